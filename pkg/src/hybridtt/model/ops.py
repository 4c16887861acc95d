"""Instance transformations: random subdivisions and curriculum orderings."""

from __future__ import annotations

import random
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .types import CampusLayout, Instance, InstanceError, Lecture, Professor, validate

#: Room totals the subdivisions of the real instance were given, per campus.
TWO_CAMPUS_ROOMS = (142, 29)


def _scale_counts(counts: Dict[str, int], total: int) -> Dict[str, int]:
    """Scale per-type counts to ``total`` with largest-remainder rounding."""
    old = sum(counts.values())
    if old == 0:
        keys = sorted(counts)
        return {k: (total // len(keys) + (n < total % len(keys))) for n, k in enumerate(keys)} if keys else {}
    raw = {k: v * total / old for k, v in counts.items()}
    out = {k: int(r) for k, r in raw.items()}
    short = total - sum(out.values())
    for k in sorted(raw, key=lambda k: (-(raw[k] - out[k]), k))[:short]:
        out[k] += 1
    return out


def generate_subdivision(
    instance: Instance,
    class_count: int,
    room_scaling: Optional[Mapping[str, int]] = None,
    rng_seed: int = 0,
) -> Instance:
    """Keep a uniform sample of ``class_count`` classes and everything they need.

    ``room_scaling`` maps a campus to its new total number of rooms; the per-type
    split follows the original proportions. Campi not listed keep their counts.
    """
    classes = instance.class_ids
    if class_count > len(classes):
        raise InstanceError(f"class_count {class_count} exceeds the {len(classes)} classes available")
    if class_count < 1:
        raise InstanceError("class_count must be >= 1")
    rng = random.Random(rng_seed)
    kept_classes = set(rng.sample(list(classes), class_count))

    curricula = tuple(
        c for c in instance.curricula
        if (c.class_id if c.class_id is not None else c.id) in kept_classes
    )
    kept = set()
    for cur in curricula:
        kept.update(cur.lectures)
    lectures = tuple(
        Lecture(
            id=lec.id, duration=lec.duration, room_type=lec.room_type, campus=lec.campus,
            period=lec.period,
            different_day=frozenset(x for x in lec.different_day if x in kept),
            predecessors=frozenset(x for x in lec.predecessors if x in kept),
        )
        for lec in instance.lectures if lec.id in kept
    )
    professors = []
    for prof in instance.professors:
        lids = tuple(x for x in prof.lectures if x in kept)
        if lids:
            professors.append(Professor(prof.id, lids, prof.max_daily, prof.max_consecutive))

    rooms = dict(instance.layout.room_counts)
    if room_scaling:
        for campus, total in room_scaling.items():
            per_type = {t: n for (c, t), n in rooms.items() if c == campus}
            if not per_type:
                raise InstanceError(f"room scaling names unknown campus {campus!r}")
            for t, n in _scale_counts(per_type, total).items():
                rooms[(campus, t)] = n

    sub = Instance(
        calendar=instance.calendar,
        lectures=lectures,
        curricula=curricula,
        professors=tuple(professors),
        layout=CampusLayout(room_counts=rooms, travel_slots=dict(instance.layout.travel_slots)),
        name=f"{instance.name}-sub{class_count}-s{rng_seed}" if instance.name else "",
    )
    validate(sub)
    return sub


def two_campus_room_scaling(instance: Instance) -> Dict[str, int]:
    """The 142/29 room totals, assigned to campi in sorted-name order."""
    campi = sorted({c for c, _ in instance.layout.room_counts})
    return dict(zip(campi, TWO_CAMPUS_ROOMS))


def ordered_sort(instance: Instance) -> List[str]:
    """Degree, then ascending year, then class, then period; gaps sort last, ties by id."""

    def key(cur):
        return (
            cur.degree_id is None, cur.degree_id or "",
            cur.year is None, cur.year if cur.year is not None else 0,
            cur.class_id is None, cur.class_id or "",
            cur.period,
            cur.id,
        )

    return [c.id for c in sorted(instance.curricula, key=key)]


def random_sort(instance: Instance, rng_seed: int = 0) -> List[str]:
    ids = [c.id for c in instance.curricula]
    random.Random(rng_seed).shuffle(ids)
    return ids


def curricula_order(instance: Instance, kind: str, rng_seed: int = 0) -> List[str]:
    if kind == "ordered":
        return ordered_sort(instance)
    if kind == "random":
        return random_sort(instance, rng_seed)
    raise ValueError(f"unknown order {kind!r}")
