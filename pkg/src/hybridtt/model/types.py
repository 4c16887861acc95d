"""Immutable problem description for curriculum-based course timetabling."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

#: Period marker for semester lectures, which occupy their slot in every period.
BOTH = 0


class InstanceError(ValueError):
    """Raised when an instance breaks a structural invariant."""


@dataclass(frozen=True)
class CalendarGeometry:
    days: int
    slots_per_day: int
    periods: int = 1

    @property
    def n_slots(self) -> int:
        return self.days * self.slots_per_day


@dataclass(frozen=True)
class Lecture:
    id: str
    duration: int
    room_type: str
    campus: str
    period: int = 1
    different_day: FrozenSet[str] = frozenset()
    predecessors: FrozenSet[str] = frozenset()

    def active_periods(self, n_periods: int) -> Tuple[int, ...]:
        if self.period == BOTH:
            return tuple(range(1, n_periods + 1))
        return (self.period,)


@dataclass(frozen=True)
class Curriculum:
    id: str
    lectures: Tuple[str, ...]
    max_daily: int
    max_consecutive: int
    class_id: Optional[str] = None
    degree_id: Optional[str] = None
    year: Optional[int] = None
    period: int = 1


@dataclass(frozen=True)
class Professor:
    id: str
    lectures: Tuple[str, ...]
    max_daily: int
    max_consecutive: int


@dataclass(frozen=True)
class CampusLayout:
    room_counts: Mapping[Tuple[str, str], int]
    travel_slots: Mapping[Tuple[str, str], int] = field(default_factory=dict)

    @cached_property
    def campi(self) -> Tuple[str, ...]:
        names = {c for c, _ in self.room_counts}
        for a, b in self.travel_slots:
            names.update((a, b))
        return tuple(sorted(names))

    def travel(self, a: str, b: str) -> int:
        if a == b:
            return 0
        if (a, b) in self.travel_slots:
            return self.travel_slots[(a, b)]
        return self.travel_slots.get((b, a), 0)


@dataclass(frozen=True)
class Instance:
    calendar: CalendarGeometry
    lectures: Tuple[Lecture, ...]
    curricula: Tuple[Curriculum, ...]
    professors: Tuple[Professor, ...]
    layout: CampusLayout
    name: str = ""

    @cached_property
    def lecture_index(self) -> Dict[str, int]:
        return {lec.id: n for n, lec in enumerate(self.lectures)}

    @cached_property
    def curriculum_index(self) -> Dict[str, int]:
        return {cur.id: n for n, cur in enumerate(self.curricula)}

    @cached_property
    def professor_index(self) -> Dict[str, int]:
        return {prof.id: n for n, prof in enumerate(self.professors)}

    def lecture(self, lecture_id: str) -> Lecture:
        return self.lectures[self.lecture_index[lecture_id]]

    def curriculum(self, curriculum_id: str) -> Curriculum:
        return self.curricula[self.curriculum_index[curriculum_id]]

    @cached_property
    def curricula_of(self) -> Dict[str, Tuple[str, ...]]:
        """Lecture id -> ids of the curricula attending it."""
        out: Dict[str, list] = {lec.id: [] for lec in self.lectures}
        for cur in self.curricula:
            for lid in cur.lectures:
                out[lid].append(cur.id)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def professors_of(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, list] = {lec.id: [] for lec in self.lectures}
        for prof in self.professors:
            for lid in prof.lectures:
                out[lid].append(prof.id)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def class_ids(self) -> Tuple[str, ...]:
        seen = {}
        for cur in self.curricula:
            key = cur.class_id if cur.class_id is not None else cur.id
            seen.setdefault(key, None)
        return tuple(seen)

    def validate(self) -> "Instance":
        validate(self)
        return self


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise InstanceError(msg)


def validate(inst: Instance) -> None:
    """Check every structural invariant; raises :class:`InstanceError`."""
    cal = inst.calendar
    _check(cal.days >= 1, f"calendar: days must be >= 1, got {cal.days}")
    _check(cal.slots_per_day >= 1, f"calendar: slots_per_day must be >= 1, got {cal.slots_per_day}")
    _check(cal.periods in (1, 2), f"calendar: periods must be 1 or 2, got {cal.periods}")

    layout = inst.layout
    for key, count in layout.room_counts.items():
        _check(count >= 0, f"room count for campus {key[0]!r} type {key[1]!r} is negative")
    for (a, b), u in layout.travel_slots.items():
        _check(u >= 0, f"travel {a}->{b} is negative")
        if a == b:
            _check(u == 0, f"travel from campus {a!r} to itself must be 0")
        elif (b, a) in layout.travel_slots:
            _check(layout.travel_slots[(b, a)] == u, f"travel between {a!r} and {b!r} is not symmetric")

    ids = inst.lecture_index
    _check(len(ids) == len(inst.lectures), "duplicate lecture ids")
    _check(len(inst.curriculum_index) == len(inst.curricula), "duplicate curriculum ids")
    _check(len(inst.professor_index) == len(inst.professors), "duplicate professor ids")

    for lec in inst.lectures:
        where = f"lecture {lec.id!r}"
        _check(1 <= lec.duration <= cal.slots_per_day,
               f"{where}: duration {lec.duration} outside 1..{cal.slots_per_day}")
        _check(lec.period == BOTH or 1 <= lec.period <= cal.periods, f"{where}: bad period {lec.period}")
        _check((lec.campus, lec.room_type) in layout.room_counts,
               f"{where}: room type {lec.room_type!r} unknown on campus {lec.campus!r}")
        _check(lec.id not in lec.different_day, f"{where}: listed in its own different-day set")
        _check(lec.id not in lec.predecessors, f"{where}: listed as its own predecessor")
        for other in lec.different_day:
            _check(other in ids, f"{where}: different-day reference to unknown lecture {other!r}")
            _check(lec.id in inst.lectures[ids[other]].different_day,
                   f"{where}: different-day relation with {other!r} is not symmetric")
        for other in lec.predecessors:
            _check(other in ids, f"{where}: predecessor reference to unknown lecture {other!r}")

    covered = set()
    for cur in inst.curricula:
        where = f"curriculum {cur.id!r}"
        _check(len(cur.lectures) > 0, f"{where}: empty lecture set")
        _check(1 <= cur.period <= cal.periods, f"{where}: bad period {cur.period}")
        _check(0 <= cur.max_consecutive <= cur.max_daily <= cal.n_slots,
               f"{where}: need max_consecutive <= max_daily <= {cal.n_slots}")
        for lid in cur.lectures:
            _check(lid in ids, f"{where}: reference to unknown lecture {lid!r}")
            lec = inst.lectures[ids[lid]]
            _check(lec.period in (BOTH, cur.period),
                   f"{where}: lecture {lid!r} is not taught in period {cur.period}")
            covered.add(lid)
    for prof in inst.professors:
        where = f"professor {prof.id!r}"
        _check(0 <= prof.max_consecutive <= prof.max_daily, f"{where}: need max_consecutive <= max_daily")
        for lid in prof.lectures:
            _check(lid in ids, f"{where}: reference to unknown lecture {lid!r}")
    for lec in inst.lectures:
        _check(lec.id in covered, f"lecture {lec.id!r} belongs to no curriculum")


def symmetric_different_day(pairs: Iterable[Tuple[str, str]]) -> Dict[str, FrozenSet[str]]:
    """Close a list of different-day pairs under symmetry."""
    out: Dict[str, set] = {}
    for a, b in pairs:
        out.setdefault(a, set()).add(b)
        out.setdefault(b, set()).add(a)
    return {k: frozenset(v) for k, v in out.items()}
