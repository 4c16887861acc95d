"""Greedy initial timetables for newly added curricula."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .evaluator import Evaluator, Schedule
from .model.types import Instance


@dataclass
class WorkloadTracker:
    """Slots a curriculum already occupies, per day.

    Rebuilt from the evaluator's current positions, so shared lectures placed
    by earlier curricula count. ``daily`` is the number of distinct occupied
    slots; ``run_if_placed`` gives the run a lecture would end up in.
    """

    n_days: int
    n_slots: int
    occupied: List[List[bool]]
    items: List[List[int]] = field(default_factory=list)

    @classmethod
    def of(cls, ev: Evaluator, lectures: Sequence[int]) -> "WorkloadTracker":
        cal = ev.instance.calendar
        occ = [[False] * cal.slots_per_day for _ in range(cal.days)]
        items: List[List[int]] = [[] for _ in range(cal.days)]
        lecs = ev.instance.lectures
        for i in lectures:
            d, s = ev.position(i)
            if d < 0:
                continue
            items[d].append(i)
            for k in range(s, s + lecs[i].duration):
                occ[d][k] = True
        return cls(cal.days, cal.slots_per_day, occ, items)

    def daily(self, d: int) -> int:
        return sum(self.occupied[d])

    def clashes(self, d: int, k: int, c: int) -> bool:
        return any(self.occupied[d][k:k + c])

    def run_if_placed(self, d: int, k: int, c: int) -> int:
        row = self.occupied[d]
        lo = k
        while lo > 0 and row[lo - 1]:
            lo -= 1
        hi = k + c
        while hi < self.n_slots and row[hi]:
            hi += 1
        return hi - lo

    def add(self, i: int, d: int, k: int, c: int) -> None:
        for x in range(k, k + c):
            self.occupied[d][x] = True
        self.items[d].append(i)


@dataclass(frozen=True)
class ConstructionResult:
    placed: Tuple[str, ...]
    fallback: Tuple[str, ...]

    @property
    def used_fallback(self) -> bool:
        return bool(self.fallback)


def _slot_ok(ev: Evaluator, tr: WorkloadTracker, i: int, d: int, k: int, max_daily: int, max_consec: int) -> bool:
    inst = ev.instance
    c = inst.lectures[i].duration
    if k + c > tr.n_slots:
        return False
    if tr.clashes(d, k, c):
        return False
    if tr.daily(d) + c > max_daily:
        return False
    if tr.run_if_placed(d, k, c) > max_consec:
        return False
    # campus changes between this lecture and the curriculum's others that day
    lecs = inst.lectures
    me = lecs[i]
    for j in tr.items[d]:
        other = lecs[j]
        if other.campus == me.campus:
            continue
        u = inst.layout.travel(me.campus, other.campus)
        if u == 0:
            continue
        od, os_ = ev.position(j)
        if os_ <= k:
            gap = k - os_ - other.duration
        else:
            gap = os_ - k - c
        if 0 <= gap < u:
            return False
    return True


def construct_into(ev: Evaluator, curriculum: int, rng: random.Random,
                   limits: Optional[Tuple[int, int]] = None) -> ConstructionResult:
    """Place every unadded lecture of ``instance.curricula[curriculum]`` on ``ev``.

    ``limits`` is (latest start day, latest start slot) as counts; by default
    every day and every slot the longest lecture still fits at.
    """
    inst = ev.instance
    cal = inst.calendar
    cur = inst.curricula[curriculum]
    lidx = inst.lecture_index
    members = [lidx[x] for x in cur.lectures]
    todo = [i for i in members if not ev.is_added(i)]
    if not todo:
        return ConstructionResult((), ())
    todo.sort(key=lambda i: -inst.lectures[i].duration)  # stable: ties keep curriculum order

    nj, nk = cal.days, cal.slots_per_day
    c_max = max(inst.lectures[i].duration for i in members)
    if limits is None:
        j_bar, k_bar = nj, nk - c_max + 1
    else:
        j_bar, k_bar = limits
    j_bar = max(1, min(j_bar, nj))
    k_bar = max(1, min(k_bar, nk))

    tr = WorkloadTracker.of(ev, members)
    placed, fallback = [], []
    j = rng.randrange(j_bar)
    k = rng.randrange(k_bar)
    for i in todo:
        c = inst.lectures[i].duration
        spot = None
        # forward scan with a random slot restart on each new day, one sweep
        for _ in range(nj + 1):
            while k + c <= nk:
                if _slot_ok(ev, tr, i, j, k, cur.max_daily, cur.max_consecutive):
                    spot = (j, k)
                    break
                k += 1
            if spot:
                break
            j = (j + 1) % nj
            k = rng.randrange(k_bar)
        if spot is None:
            # the random restarts may have skipped early slots; check them all
            for dd in range(nj):
                jj = (j + dd) % nj
                for kk in range(nk - c + 1):
                    if _slot_ok(ev, tr, i, jj, kk, cur.max_daily, cur.max_consecutive):
                        spot = (jj, kk)
                        break
                if spot:
                    break
        if spot is None:
            jj = min(range(nj), key=lambda x: (tr.daily(x), x))
            kk = next((x for x in range(nk - c + 1) if not tr.clashes(jj, x, c)), 0)
            spot = (jj, kk)
            fallback.append(inst.lectures[i].id)
        j, k = spot
        ev.place(i, j, k)
        tr.add(i, j, k, c)
        placed.append(inst.lectures[i].id)
        k += c
        if k >= nk:
            j = (j + 1) % nj
            k = rng.randrange(k_bar)
    return ConstructionResult(tuple(placed), tuple(fallback))


def construct_initial_timetable(instance: Instance, schedule: Schedule, curriculum: str,
                                limits: Optional[Tuple[int, int]] = None, rng_seed: int = 0,
                                backend: Optional[str] = None) -> Tuple[Schedule, ConstructionResult]:
    """Functional form: returns the extended schedule and what was placed."""
    ev = Evaluator(instance, schedule, backend)
    res = construct_into(ev, instance.curriculum_index[curriculum], random.Random(rng_seed), limits)
    return ev.schedule(), res


def seed_initial_state(instance: Instance, order: Sequence[str], rng_seed: int = 0,
                       backend: Optional[str] = None) -> Tuple[Schedule, List[ConstructionResult]]:
    """Construct every curriculum of ``order`` in turn on one schedule."""
    if not order:
        raise ValueError("order is empty")
    ev = Evaluator(instance, None, backend)
    rng = random.Random(rng_seed)
    results = [construct_into(ev, instance.curriculum_index[cid], rng) for cid in order]
    return ev.schedule(), results
