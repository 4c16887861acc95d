"""Random tiny instances for differential and oracle tests."""

from __future__ import annotations

import random

from hybridtt.model import (
    BOTH, CalendarGeometry, CampusLayout, Curriculum, Instance, Lecture, Professor, validate,
)


def random_instance(rng: random.Random, *, max_lectures=5, max_days=2, max_slots=6,
                    periods=None, campi=None, max_curricula=3, max_professors=2) -> Instance:
    days = rng.randint(1, max_days)
    nk = rng.randint(1, max_slots)
    P = periods if periods is not None else rng.choice([1, 2])
    camp_names = ["A", "B"][: (campi if campi is not None else rng.choice([1, 2]))]
    types = ["lab", "room"][: rng.randint(1, 2)]
    n = rng.randint(1, max_lectures)
    ids = [f"L{x}" for x in range(n)]

    dd = {i: set() for i in ids}
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.25:
                dd[ids[a]].add(ids[b])
                dd[ids[b]].add(ids[a])
    pred = {i: set() for i in ids}
    for a in range(n):
        for b in range(n):
            if a != b and rng.random() < 0.15:
                pred[ids[b]].add(ids[a])

    lectures = []
    for i in ids:
        lectures.append(Lecture(
            id=i, duration=rng.randint(1, min(3, nk)), room_type=rng.choice(types),
            campus=rng.choice(camp_names),
            period=rng.choice([BOTH] + list(range(1, P + 1))),
            different_day=frozenset(dd[i]), predecessors=frozenset(pred[i]),
        ))

    # curricula: each period-specific curriculum takes lectures active in its period
    curricula = []
    nc = rng.randint(1, max_curricula)
    for c in range(nc):
        per = rng.randint(1, P)
        pool = [l.id for l in lectures if l.period in (BOTH, per)]
        if not pool:
            continue
        members = rng.sample(pool, rng.randint(1, len(pool)))
        md = rng.randint(0, days * nk)
        md = min(md, nk + 1)
        curricula.append(Curriculum(
            id=f"C{c}", lectures=tuple(sorted(members)), max_daily=md,
            max_consecutive=rng.randint(0, md), class_id=f"K{c % 2}", degree_id="D",
            year=1 + c % 2, period=per,
        ))
    covered = {x for c in curricula for x in c.lectures}
    for l in lectures:
        if l.id not in covered:
            per = 1 if l.period == BOTH else l.period
            md = rng.randint(1, nk)
            curricula.append(Curriculum(
                id=f"C{l.id}", lectures=(l.id,), max_daily=md, max_consecutive=rng.randint(0, md),
                period=per,
            ))
    profs = []
    left = list(ids)
    rng.shuffle(left)
    for p in range(rng.randint(0, max_professors)):
        if not left:
            break
        take = left[: rng.randint(1, len(left))]
        left = left[len(take):]
        md = rng.randint(1, nk)
        profs.append(Professor(f"P{p}", tuple(take), md, rng.randint(0, md)))
    rooms = {}
    for c in camp_names:
        for t in types:
            rooms[(c, t)] = rng.randint(0, 2)
    travel = {}
    if len(camp_names) == 2:
        u = rng.randint(0, 2)
        travel = {("A", "B"): u, ("B", "A"): u}
    inst = Instance(
        calendar=CalendarGeometry(days, nk, P), lectures=tuple(lectures), curricula=tuple(curricula),
        professors=tuple(profs), layout=CampusLayout(room_counts=rooms, travel_slots=travel),
        name="rand",
    )
    validate(inst)
    return inst


def random_position(rng: random.Random, inst: Instance, lec_index: int):
    lec = inst.lectures[lec_index]
    cal = inst.calendar
    return rng.randrange(cal.days), rng.randint(0, cal.slots_per_day - lec.duration)
