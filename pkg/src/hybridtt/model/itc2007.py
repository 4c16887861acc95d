"""Reader for ITC2007 curriculum-based (.ctt) files and the hardening adapter."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Sequence, Tuple

from .types import CalendarGeometry, CampusLayout, Curriculum, Instance, Lecture, Professor, validate

CAMPUS = "main"
ROOM_TYPE = "room"


class CTTFormatError(ValueError):
    pass


class PolicyError(ValueError):
    pass


@dataclass(frozen=True)
class CTTCourse:
    id: str
    teacher: str
    lectures: int
    min_days: int
    students: int


@dataclass(frozen=True)
class CTTDocument:
    name: str
    days: int
    periods_per_day: int
    courses: Tuple[CTTCourse, ...]
    rooms: Tuple[Tuple[str, int], ...]
    curricula: Tuple[Tuple[str, Tuple[str, ...]], ...]
    unavailability: Tuple[Tuple[str, int, int], ...]


_HEADER = {
    "name": "Name",
    "courses": "Courses",
    "rooms": "Rooms",
    "days": "Days",
    "periods_per_day": "Periods_per_day",
    "curricula": "Curricula",
    "constraints": "Constraints",
}


def _is_section(line: str) -> bool:
    return line.endswith(":") and " " not in line and line[:-1].isupper()


def parse_ctt(text: str) -> CTTDocument:
    lines = [ln.strip() for ln in text.splitlines()]
    header: Dict[str, str] = {}
    pos = 0
    while pos < len(lines) and not _is_section(lines[pos]):
        ln = lines[pos]
        pos += 1
        if not ln:
            continue
        key, sep, value = ln.partition(":")
        if not sep:
            raise CTTFormatError(f"line {pos}: expected 'Key: value' header line")
        header[key.strip().lower()] = value.strip()
    for key, label in _HEADER.items():
        if key not in header:
            raise CTTFormatError(f"missing header field {label!r}")
    try:
        counts = {k: int(header[k]) for k in _HEADER if k != "name"}
    except ValueError as exc:
        raise CTTFormatError(f"non-integer header value: {exc}") from None

    sections: Dict[str, List[Tuple[int, List[str]]]] = {}
    current = None
    for lineno in range(pos, len(lines)):
        ln = lines[lineno]
        if not ln:
            continue
        if ln == "END.":
            break
        if _is_section(ln):
            current = ln[:-1].upper()
            sections[current] = []
            continue
        if current is None:
            raise CTTFormatError(f"line {lineno + 1}: data outside a section")
        sections[current].append((lineno + 1, ln.split()))

    for name in ("COURSES", "ROOMS", "CURRICULA", "UNAVAILABILITY_CONSTRAINTS"):
        if name not in sections:
            raise CTTFormatError(f"missing section {name}")

    def ints(lineno, toks, idx):
        try:
            return [int(toks[i]) for i in idx]
        except (ValueError, IndexError):
            raise CTTFormatError(f"line {lineno}: malformed record {' '.join(toks)!r}") from None

    courses = []
    for lineno, toks in sections["COURSES"]:
        if len(toks) != 5:
            raise CTTFormatError(f"line {lineno}: COURSES record needs 5 fields")
        n, md, st = ints(lineno, toks, (2, 3, 4))
        courses.append(CTTCourse(toks[0], toks[1], n, md, st))
    rooms = []
    for lineno, toks in sections["ROOMS"]:
        if len(toks) != 2:
            raise CTTFormatError(f"line {lineno}: ROOMS record needs 2 fields")
        rooms.append((toks[0], ints(lineno, toks, (1,))[0]))
    curricula = []
    for lineno, toks in sections["CURRICULA"]:
        if len(toks) < 2:
            raise CTTFormatError(f"line {lineno}: CURRICULA record too short")
        (n,) = ints(lineno, toks, (1,))
        members = tuple(toks[2:])
        if len(members) != n:
            raise CTTFormatError(f"line {lineno}: curriculum {toks[0]} declares {n} courses, lists {len(members)}")
        curricula.append((toks[0], members))
    unavailable = []
    for lineno, toks in sections["UNAVAILABILITY_CONSTRAINTS"]:
        if len(toks) != 3:
            raise CTTFormatError(f"line {lineno}: UNAVAILABILITY record needs 3 fields")
        d, p = ints(lineno, toks, (1, 2))
        unavailable.append((toks[0], d, p))

    for what, key, got in (("courses", "courses", courses), ("rooms", "rooms", rooms),
                           ("curricula", "curricula", curricula),
                           ("constraints", "constraints", unavailable)):
        if counts[key] != len(got):
            raise CTTFormatError(f"header declares {counts[key]} {what}, found {len(got)}")
    known = {c.id for c in courses}
    for cid, members in curricula:
        for m in members:
            if m not in known:
                raise CTTFormatError(f"curriculum {cid} references unknown course {m}")

    return CTTDocument(
        name=header["name"],
        days=counts["days"],
        periods_per_day=counts["periods_per_day"],
        courses=tuple(courses),
        rooms=tuple(rooms),
        curricula=tuple(curricula),
        unavailability=tuple(unavailable),
    )


@dataclass(frozen=True)
class AdaptationPolicy:
    """How a competition instance is hardened into the extended model."""

    different_day: bool = True
    max_daily_fraction: float = 0.7
    max_consecutive: int = 4
    chain_course_lectures: bool = False
    precedence_chains: Tuple[Tuple[str, ...], ...] = field(default_factory=tuple)

    def check(self) -> None:
        if self.max_consecutive < 1:
            raise PolicyError("max_consecutive must be >= 1")
        if not 0 < self.max_daily_fraction <= 1:
            raise PolicyError("max_daily_fraction must lie in (0, 1]")

    def max_daily(self, slots_per_day: int) -> int:
        # round() guards against 0.7 * 10 = 7.000000000000001
        return max(1, math.ceil(round(self.max_daily_fraction * slots_per_day, 9)))

    def to_json(self) -> str:
        d = asdict(self)
        d["precedence_chains"] = [list(c) for c in self.precedence_chains]
        return json.dumps(d, sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    @classmethod
    def from_json(cls, text: str) -> "AdaptationPolicy":
        data = json.loads(text)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise PolicyError(f"unknown policy keys: {sorted(unknown)}")
        if "precedence_chains" in data:
            data["precedence_chains"] = tuple(tuple(c) for c in data["precedence_chains"])
        policy = cls(**data)
        policy.check()
        return policy


def lecture_id(course: str, n: int) -> str:
    return f"{course}.{n}"


def adapt_document(doc: CTTDocument, policy: AdaptationPolicy = AdaptationPolicy()) -> Instance:
    policy.check()
    max_daily = policy.max_daily(doc.periods_per_day)
    max_consec = min(policy.max_consecutive, max_daily)

    diff: Dict[str, set] = {}
    preds: Dict[str, set] = {}
    course_lectures: Dict[str, List[str]] = {}
    for course in doc.courses:
        ids = [lecture_id(course.id, n) for n in range(course.lectures)]
        course_lectures[course.id] = ids
        for lid in ids:
            diff[lid] = set()
            preds[lid] = set()
        if policy.different_day:
            capped = ids[: min(len(ids), doc.days)]
            for a in capped:
                diff[a].update(b for b in capped if b != a)
        if policy.chain_course_lectures:
            for a, b in zip(ids, ids[1:]):
                preds[b].add(a)
    for chain in policy.precedence_chains:
        for a, b in zip(chain, chain[1:]):
            if a not in preds or b not in preds:
                raise PolicyError(f"precedence chain references unknown lecture {a if a not in preds else b}")
            preds[b].add(a)

    lectures = tuple(
        Lecture(id=lid, duration=1, room_type=ROOM_TYPE, campus=CAMPUS, period=1,
                different_day=frozenset(diff[lid]), predecessors=frozenset(preds[lid]))
        for course in doc.courses for lid in course_lectures[course.id]
    )

    curricula = []
    in_curriculum = set()
    for cid, members in doc.curricula:
        lids = tuple(lid for m in members for lid in course_lectures[m])
        in_curriculum.update(members)
        curricula.append(Curriculum(id=cid, lectures=lids, max_daily=max_daily,
                                    max_consecutive=max_consec, period=1))
    # courses outside every curriculum get a curriculum of their own
    for course in doc.courses:
        if course.id not in in_curriculum and course_lectures[course.id]:
            curricula.append(Curriculum(id=f"course:{course.id}", lectures=tuple(course_lectures[course.id]),
                                        max_daily=max_daily, max_consecutive=max_consec, period=1))

    teachers: Dict[str, List[str]] = {}
    for course in doc.courses:
        teachers.setdefault(course.teacher, []).extend(course_lectures[course.id])
    professors = tuple(Professor(id=t, lectures=tuple(lids), max_daily=max_daily, max_consecutive=max_consec)
                       for t, lids in teachers.items() if lids)

    inst = Instance(
        calendar=CalendarGeometry(days=doc.days, slots_per_day=doc.periods_per_day, periods=1),
        lectures=lectures,
        curricula=tuple(c for c in curricula if c.lectures),
        professors=professors,
        layout=CampusLayout(room_counts={(CAMPUS, ROOM_TYPE): len(doc.rooms)}),
        name=doc.name,
    )
    validate(inst)
    return inst


def adapt_itc2007(text: str, policy: AdaptationPolicy = AdaptationPolicy()) -> Instance:
    """Read a competition .ctt document and harden it per ``policy``."""
    return adapt_document(parse_ctt(text), policy)


def write_ctt(doc: CTTDocument) -> str:
    """Serialise a document in the competition layout (used for synthetic test files)."""
    out = [
        f"Name: {doc.name}",
        f"Courses: {len(doc.courses)}",
        f"Rooms: {len(doc.rooms)}",
        f"Days: {doc.days}",
        f"Periods_per_day: {doc.periods_per_day}",
        f"Curricula: {len(doc.curricula)}",
        f"Constraints: {len(doc.unavailability)}",
        "",
        "COURSES:",
    ]
    out += [f"{c.id} {c.teacher} {c.lectures} {c.min_days} {c.students}" for c in doc.courses]
    out += ["", "ROOMS:"] + [f"{r} {cap}" for r, cap in doc.rooms]
    out += ["", "CURRICULA:"] + [f"{cid} {len(m)} {' '.join(m)}" for cid, m in doc.curricula]
    out += ["", "UNAVAILABILITY_CONSTRAINTS:"] + [f"{c} {d} {p}" for c, d, p in doc.unavailability]
    out += ["", "END.", ""]
    return "\n".join(out)


def chains_from(seq: Sequence[Sequence[str]]) -> Tuple[Tuple[str, ...], ...]:
    return tuple(tuple(c) for c in seq)
