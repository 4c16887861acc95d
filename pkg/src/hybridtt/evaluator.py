"""Violation counting, the augmented objective and incremental re-evaluation.

Days and start slots are 0-based everywhere in the API; periods keep their
1-based instance ids. A lecture with no entry in the schedule is not added.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple, Union

from ._data import FAMILIES, KIND_ALL, KIND_CURRICULUM, KIND_PROFESSOR, KIND_ROOM
from .kernel import kernel_for
from .model.types import Instance


class ScheduleError(ValueError):
    pass


@dataclass
class Schedule:
    """Lecture id -> (day, start slot)."""

    assignment: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    @property
    def added(self) -> frozenset:
        return frozenset(self.assignment)

    def copy(self) -> "Schedule":
        return Schedule(dict(self.assignment))

    def to_text(self, instance: Optional[Instance] = None) -> str:
        ids = [l.id for l in instance.lectures] if instance is not None else sorted(self.assignment)
        lines = ["# lecture day start"]
        for lid in ids:
            if lid in self.assignment:
                d, k = self.assignment[lid]
                lines.append(f"{lid} {d} {k}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Schedule":
        out = {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ScheduleError(f"line {n}: expected 'lecture day start', got {raw!r}")
            try:
                d, k = int(parts[1]), int(parts[2])
            except ValueError:
                raise ScheduleError(f"line {n}: day and start must be integers") from None
            if parts[0] in out:
                raise ScheduleError(f"line {n}: lecture {parts[0]!r} assigned twice")
            out[parts[0]] = (d, k)
        return cls(out)


def check_schedule(instance: Instance, schedule: Schedule) -> None:
    """Raise ScheduleError unless every assignment names a lecture and fits its day."""
    cal = instance.calendar
    idx = instance.lecture_index
    for lid, (d, k) in schedule.assignment.items():
        if lid not in idx:
            raise ScheduleError(f"lecture {lid!r} is not part of the instance")
        dur = instance.lectures[idx[lid]].duration
        if not (0 <= d < cal.days and 0 <= k and k + dur <= cal.slots_per_day):
            raise ScheduleError(f"lecture {lid!r} at day {d} slot {k} does not fit (duration {dur})")


# --------------------------------------------------------------------- moves
@dataclass(frozen=True)
class Reassign:
    lecture: str
    day: int
    start: int


@dataclass(frozen=True)
class Swap:
    a: str
    b: str


Move = Union[Reassign, Swap]


# ------------------------------------------------------------------ penalties
@dataclass(frozen=True)
class PenaltyVector:
    """GLS weights. ``curriculum`` follows instance.curricula order, ``time_slot`` is day * n_k + slot."""

    curriculum: Tuple[int, ...]
    professor_total: int
    room_total: int
    precedence_total: int
    different_day_total: int
    time_slot: Tuple[int, ...]

    @classmethod
    def zeros(cls, instance: Instance) -> "PenaltyVector":
        return cls((0,) * len(instance.curricula), 0, 0, 0, 0, (0,) * instance.calendar.n_slots)

    def is_zero(self) -> bool:
        return not (any(self.curriculum) or self.professor_total or self.room_total
                    or self.precedence_total or self.different_day_total or any(self.time_slot))

    def for_curriculum(self, instance: Instance) -> Dict[str, int]:
        return {c.id: w for c, w in zip(instance.curricula, self.curriculum)}


# --------------------------------------------------------------------- ledger
class ViolationLedger:
    """Snapshot of every violation count of a schedule.

    Map views only list non-zero entries. Keys:
    curriculum_slot (curriculum, period, day, slot); professor_slot
    (professor, period, day, slot); room_slot (campus, room type, period, day,
    slot); precedence_lecture and different_day_lecture (lecture, day, slot).
    """

    def __init__(self, instance: Instance, kernel):
        self.instance = instance
        self._k = kernel
        self._a = {key: [int(x) for x in v] for key, v in kernel.arrays().items()}
        self.grand_total = int(kernel.grand)
        self._maps = None

    # raw per-entity vectors, used by the search
    @property
    def curriculum_totals(self) -> Tuple[int, ...]:
        return tuple(self._a["curriculum_total"])

    @property
    def professor_totals(self) -> Tuple[int, ...]:
        return tuple(self._a["professor_total"])

    @property
    def room_totals(self) -> Tuple[int, ...]:
        return tuple(self._a["room_total"])

    @property
    def slot_totals(self) -> Tuple[int, ...]:
        return tuple(self._a["slot_total"])

    @property
    def group_totals(self) -> Dict[str, int]:
        a = self._a
        return {
            "curriculum": sum(a["curriculum_total"]),
            "professor": sum(a["professor_total"]),
            "room": sum(a["room_total"]),
            "different_day": sum(a["different_day"]),
            "precedence": sum(a["precedence"]),
        }

    @property
    def feasible(self) -> bool:
        return self.grand_total == 0

    def _build_maps(self):
        inst = self.instance
        cal = inst.calendar
        S, nk, P = cal.n_slots, cal.slots_per_day, cal.periods
        data = self._k.data
        a = self._a
        cur, prof, room, f4, f5 = {}, {}, {}, {}, {}
        for e, c in enumerate(inst.curricula):
            row = a["curriculum"][e * S:(e + 1) * S]
            for t, v in enumerate(row):
                if v:
                    cur[(c.id, c.period, t // nk, t % nk)] = v
        for e, p in enumerate(inst.professors):
            for q in range(P):
                base = (e * P + q) * S
                for t in range(S):
                    v = a["professor"][base + t]
                    if v:
                        prof[(p.id, q + 1, t // nk, t % nk)] = v
        for r, (campus, rtype) in enumerate(data.room_keys):
            for q in range(P):
                base = (r * P + q) * S
                for t in range(S):
                    v = a["room"][base + t]
                    if v:
                        room[(campus, rtype, q + 1, t // nk, t % nk)] = v
        for i, lec in enumerate(inst.lectures):
            if a["precedence"][i]:
                t = a["precedence_slot"][i]
                f4[(lec.id, t // nk, t % nk)] = a["precedence"][i]
            if a["different_day"][i]:
                t = a["different_day_slot"][i]
                f5[(lec.id, t // nk, t % nk)] = a["different_day"][i]
        self._maps = (cur, prof, room, f4, f5)

    @property
    def curriculum_slot(self) -> Dict[tuple, int]:
        if self._maps is None:
            self._build_maps()
        return self._maps[0]

    @property
    def professor_slot(self) -> Dict[tuple, int]:
        if self._maps is None:
            self._build_maps()
        return self._maps[1]

    @property
    def room_slot(self) -> Dict[tuple, int]:
        if self._maps is None:
            self._build_maps()
        return self._maps[2]

    @property
    def precedence_lecture(self) -> Dict[tuple, int]:
        if self._maps is None:
            self._build_maps()
        return self._maps[3]

    @property
    def different_day_lecture(self) -> Dict[tuple, int]:
        if self._maps is None:
            self._build_maps()
        return self._maps[4]

    def entries(self) -> Iterable[Tuple[str, tuple, int]]:
        """(family, key, count) for every non-zero entry."""
        for fam, m in zip(FAMILIES[:3], (self.curriculum_slot, self.professor_slot, self.room_slot)):
            for key, v in m.items():
                yield fam, key, v
        for key, v in self.different_day_lecture.items():
            yield "different_day", key, v
        for key, v in self.precedence_lecture.items():
            yield "precedence", key, v

    def schedule(self) -> Schedule:
        ids = [l.id for l in self.instance.lectures]
        return Schedule({ids[i]: (d, k) for i, (d, k) in enumerate(zip(self._a["day"], self._a["start"])) if d >= 0})

    def __eq__(self, other):
        if not isinstance(other, ViolationLedger):
            return NotImplemented
        keys = [k for k in self._a if k not in ("day", "start")]
        return self.grand_total == other.grand_total and all(self._a[k] == other._a[k] for k in keys)

    def __repr__(self):
        return f"ViolationLedger(grand_total={self.grand_total}, groups={self.group_totals})"

    def report(self, top: int = 10) -> str:
        """Plain-text diagnostic: family totals, then the worst slots and entities."""
        inst = self.instance
        nk = inst.calendar.slots_per_day
        lines = [f"grand_total {self.grand_total}"]
        for fam, v in self.group_totals.items():
            lines.append(f"family {fam} {v}")
        slots = sorted(((v, t) for t, v in enumerate(self.slot_totals) if v), key=lambda x: (-x[0], x[1]))
        lines.append("worst slots (day slot count)")
        for v, t in slots[:top]:
            lines.append(f"  {t // nk} {t % nk} {v}")
        ents = []
        for c, v in zip(inst.curricula, self.curriculum_totals):
            if v:
                ents.append((v, "curriculum", c.id))
        for p, v in zip(inst.professors, self.professor_totals):
            if v:
                ents.append((v, "professor", p.id))
        for (campus, rtype), v in zip(self._k.data.room_keys, self.room_totals):
            if v:
                ents.append((v, "room", f"{campus}/{rtype}"))
        ents.sort(key=lambda x: (-x[0], x[1], x[2]))
        lines.append("worst entities (kind id count)")
        for v, kind, eid in ents[:top]:
            lines.append(f"  {kind} {eid} {v}")
        return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- evaluation
def _index_arrays(instance: Instance, schedule: Schedule):
    n = len(instance.lectures)
    day = [-1] * n
    start = [-1] * n
    idx = instance.lecture_index
    for lid, (d, k) in schedule.assignment.items():
        day[idx[lid]] = d
        start[idx[lid]] = k
    return day, start


def evaluate_full(instance: Instance, schedule: Schedule, backend: Optional[str] = None) -> ViolationLedger:
    check_schedule(instance, schedule)
    k = kernel_for(instance, backend)
    k.load(*_index_arrays(instance, schedule))
    return ViolationLedger(instance, k)


def evaluate_delta(instance: Instance, schedule: Schedule, ledger: ViolationLedger, move: Move) -> ViolationLedger:
    """Ledger after ``move``; only the rows the move touches are recounted.

    ``schedule`` is not modified; ``ledger`` must be exact for it.
    """
    if ledger.instance is not instance:
        raise ValueError("ledger belongs to a different instance")
    k = ledger._k.clone()
    _apply(instance, k, move)
    return ViolationLedger(instance, k)


def apply_move(schedule: Schedule, move: Move) -> Schedule:
    out = schedule.copy()
    if isinstance(move, Reassign):
        out.assignment[move.lecture] = (move.day, move.start)
    else:
        a, b = out.assignment[move.a], out.assignment[move.b]
        out.assignment[move.a], out.assignment[move.b] = b, a
    return out


def _apply(instance: Instance, k, move: Move) -> None:
    idx = instance.lecture_index
    cal = instance.calendar
    if isinstance(move, Reassign):
        if move.lecture not in idx:
            raise ScheduleError(f"unknown lecture {move.lecture!r}")
        i = idx[move.lecture]
        if k.position(i)[0] < 0:
            raise ScheduleError(f"lecture {move.lecture!r} is not added")
        dur = instance.lectures[i].duration
        if not (0 <= move.day < cal.days and 0 <= move.start and move.start + dur <= cal.slots_per_day):
            raise ScheduleError(f"lecture {move.lecture!r} does not fit at day {move.day} slot {move.start}")
        k.place(i, move.day, move.start)
    elif isinstance(move, Swap):
        for lid in (move.a, move.b):
            if lid not in idx:
                raise ScheduleError(f"unknown lecture {lid!r}")
        a, b = idx[move.a], idx[move.b]
        (da, ka), (db, kb) = k.position(a), k.position(b)
        if da < 0 or db < 0:
            raise ScheduleError("swap references a lecture that is not added")
        n = cal.slots_per_day
        if kb + instance.lectures[a].duration > n or ka + instance.lectures[b].duration > n:
            raise ScheduleError(f"swapping {move.a!r} and {move.b!r} breaks day fit")
        k.swap(a, b)
    else:
        raise TypeError(f"not a move: {move!r}")


def augmented_objective(ledger: ViolationLedger, penalties: PenaltyVector) -> int:
    """f'(s): every non-zero entry adds its count, its family or entity weight and its slot weight."""
    inst = ledger.instance
    nk = inst.calendar.slots_per_day
    ls = penalties.time_slot
    lam_c = penalties.for_curriculum(inst)
    total = 0
    for (cid, _p, d, k), v in ledger.curriculum_slot.items():
        total += v + lam_c[cid] + ls[d * nk + k]
    for (_e, _p, d, k), v in ledger.professor_slot.items():
        total += v + penalties.professor_total + ls[d * nk + k]
    for (_c, _t, _p, d, k), v in ledger.room_slot.items():
        total += v + penalties.room_total + ls[d * nk + k]
    for (_i, d, k), v in ledger.precedence_lecture.items():
        total += v + penalties.precedence_total + ls[d * nk + k]
    for (_i, d, k), v in ledger.different_day_lecture.items():
        total += v + penalties.different_day_total + ls[d * nk + k]
    return total


@dataclass(frozen=True)
class WorstSelectors:
    slots: Tuple[Tuple[int, int], ...]
    curricula: Tuple[str, ...]
    professors: Tuple[str, ...]
    rooms: Tuple[Tuple[str, str], ...]
    entity_cells: Dict[Tuple[str, object], Tuple[Tuple[int, int, int], ...]]


class InapplicableFamily(LookupError):
    """The queried violation family has no violations."""


def worst_selectors(ledger: ViolationLedger, family: Optional[str] = None) -> WorstSelectors:
    """Argmax sets with every tie included.

    ``entity_cells`` maps (kind, entity) to its worst (period, day, slot)
    cells. Raises InapplicableFamily when ``family`` is given and is all zero.
    """
    if family is not None:
        fam = family if family != "slot" else None
        total = ledger.grand_total if fam is None else ledger.group_totals[fam]
        if total == 0:
            raise InapplicableFamily(family)
    inst = ledger.instance
    k = ledger._k
    nk = inst.calendar.slots_per_day
    S = inst.calendar.n_slots
    slots = tuple((t // nk, t % nk) for t in k.argmax_entities(KIND_ALL))
    curricula = tuple(inst.curricula[e].id for e in k.argmax_entities(KIND_CURRICULUM))
    professors = tuple(inst.professors[e].id for e in k.argmax_entities(KIND_PROFESSOR))
    rooms = tuple(k.data.room_keys[e] for e in k.argmax_entities(KIND_ROOM))
    cells: Dict[Tuple[str, object], Tuple[Tuple[int, int, int], ...]] = {}

    def unpack(kind, e, periods_fixed=None):
        out = []
        for q in k.row_argmax(kind, e):
            p, t = divmod(q, S)
            out.append((periods_fixed if periods_fixed is not None else p + 1, t // nk, t % nk))
        return tuple(out)

    for e in k.argmax_entities(KIND_CURRICULUM):
        c = inst.curricula[e]
        cells[("curriculum", c.id)] = unpack(KIND_CURRICULUM, e, c.period)
    for e in k.argmax_entities(KIND_PROFESSOR):
        cells[("professor", inst.professors[e].id)] = unpack(KIND_PROFESSOR, e)
    for e in k.argmax_entities(KIND_ROOM):
        cells[("room", k.data.room_keys[e])] = unpack(KIND_ROOM, e)
    return WorstSelectors(slots, curricula, professors, rooms, cells)


# ------------------------------------------------------------- live evaluator
class Evaluator:
    """Mutable schedule plus its exact ledger, updated in place.

    Works on lecture indices (instance.lectures order). Used by construction
    and search, where snapshotting every move would dominate the run time.
    """

    def __init__(self, instance: Instance, schedule: Optional[Schedule] = None, backend: Optional[str] = None):
        self.instance = instance
        self.k = kernel_for(instance, backend)
        if schedule is not None and schedule.assignment:
            check_schedule(instance, schedule)
            self.k.load(*_index_arrays(instance, schedule))

    @property
    def backend(self) -> str:
        return self.k.backend

    @property
    def grand(self) -> int:
        return int(self.k.grand)

    @property
    def aug(self) -> int:
        return int(self.k.aug)

    def position(self, i: int) -> Tuple[int, int]:
        d, s = self.k.position(i)
        return int(d), int(s)

    def is_added(self, i: int) -> bool:
        return self.k.position(i)[0] >= 0

    def place(self, i: int, d: int, s: int) -> None:
        self.k.place(i, d, s)

    def swap(self, a: int, b: int) -> None:
        self.k.swap(a, b)

    def apply(self, move: Move) -> None:
        _apply(self.instance, self.k, move)

    def set_penalties(self, pv: PenaltyVector) -> None:
        self.k.set_penalties(pv.curriculum, pv.professor_total, pv.room_total,
                             pv.different_day_total, pv.precedence_total, pv.time_slot)

    def family_totals(self) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.k.family_totals())

    def ledger(self) -> ViolationLedger:
        return ViolationLedger(self.instance, self.k.clone())

    def positions(self) -> Tuple[List[int], List[int]]:
        return [int(x) for x in self.k.day], [int(x) for x in self.k.start]

    def restore(self, day, start) -> None:
        self.k.load(day, start)

    def schedule(self) -> Schedule:
        day, start = self.positions()
        ids = [l.id for l in self.instance.lectures]
        return Schedule({ids[i]: (day[i], start[i]) for i in range(len(ids)) if day[i] >= 0})
