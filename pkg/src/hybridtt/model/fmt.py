"""Reader and writer for the extended instance format (grammar in docs/format.md)."""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .types import (
    BOTH,
    CalendarGeometry,
    CampusLayout,
    Curriculum,
    Instance,
    Lecture,
    Professor,
    validate,
)

SECTIONS = ("CALENDAR", "CAMPI", "LECTURES", "PROFESSORS", "CURRICULA")


class ParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _int(tok: str, line: int, name: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(line, f"field {name!r} must be a decimal integer, got {tok!r}") from None


def _period(tok: str, line: int) -> int:
    return BOTH if tok.lower() == "both" else _int(tok, line, "period")


def _list(tok: str) -> Tuple[str, ...]:
    if tok == "-":
        return ()
    return tuple(t for t in tok.split(",") if t)


def _opt(tok: str) -> Optional[str]:
    return None if tok == "-" else tok


def _fields(toks: List[str], n: int, line: int, what: str) -> None:
    if len(toks) != n:
        raise ParseError(line, f"{what} record needs {n} fields, got {len(toks)}")


def parse_instance(text: str, *, check: bool = True) -> Instance:
    """Parse an extended-format document into a validated :class:`Instance`."""
    name = ""
    section = None
    seen = set()
    calendar = None
    rooms: Dict[Tuple[str, str], int] = {}
    travel: Dict[Tuple[str, str], int] = {}
    lectures: List[Lecture] = []
    professors: List[Professor] = []
    curricula: List[Curriculum] = []
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            raise ParseError(lineno, "content after END")
        toks = line.split()
        head = toks[0].upper()
        if head == "NAME" and section is None:
            name = " ".join(toks[1:])
            continue
        if head in SECTIONS and len(toks) == 1:
            if head in seen:
                raise ParseError(lineno, f"duplicate section {head}")
            seen.add(head)
            section = head
            continue
        if head == "END" and len(toks) == 1:
            ended = True
            continue
        if section is None:
            raise ParseError(lineno, f"record outside any section: {toks[0]!r}")

        if section == "CALENDAR":
            if calendar is not None:
                raise ParseError(lineno, "CALENDAR takes exactly one record")
            _fields(toks, 3, lineno, "CALENDAR")
            calendar = CalendarGeometry(
                _int(toks[0], lineno, "days"),
                _int(toks[1], lineno, "slots_per_day"),
                _int(toks[2], lineno, "periods"),
            )
        elif section == "CAMPI":
            kind = toks[0].lower()
            _fields(toks, 4, lineno, "CAMPI")
            if kind == "rooms":
                rooms[(toks[1], toks[2])] = _int(toks[3], lineno, "count")
            elif kind == "travel":
                travel[(toks[1], toks[2])] = _int(toks[3], lineno, "slots")
            else:
                raise ParseError(lineno, f"CAMPI record must start with 'rooms' or 'travel', got {toks[0]!r}")
        elif section == "LECTURES":
            _fields(toks, 7, lineno, "LECTURES")
            lectures.append(Lecture(
                id=toks[0],
                duration=_int(toks[1], lineno, "duration"),
                room_type=toks[2],
                campus=toks[3],
                period=_period(toks[4], lineno),
                different_day=frozenset(_list(toks[5])),
                predecessors=frozenset(_list(toks[6])),
            ))
        elif section == "PROFESSORS":
            _fields(toks, 4, lineno, "PROFESSORS")
            professors.append(Professor(
                id=toks[0],
                max_daily=_int(toks[1], lineno, "max_daily"),
                max_consecutive=_int(toks[2], lineno, "max_consecutive"),
                lectures=_list(toks[3]),
            ))
        elif section == "CURRICULA":
            _fields(toks, 8, lineno, "CURRICULA")
            curricula.append(Curriculum(
                id=toks[0],
                degree_id=_opt(toks[1]),
                year=None if toks[2] == "-" else _int(toks[2], lineno, "year"),
                class_id=_opt(toks[3]),
                period=_int(toks[4], lineno, "period"),
                max_daily=_int(toks[5], lineno, "max_daily"),
                max_consecutive=_int(toks[6], lineno, "max_consecutive"),
                lectures=_list(toks[7]),
            ))

    if calendar is None:
        raise ParseError(0, "missing CALENDAR section")
    inst = Instance(
        calendar=calendar,
        lectures=tuple(lectures),
        curricula=tuple(curricula),
        professors=tuple(professors),
        layout=CampusLayout(room_counts=rooms, travel_slots=travel),
        name=name,
    )
    if check:
        validate(inst)
    return inst


def _fmt_list(items) -> str:
    items = list(items)
    return ",".join(items) if items else "-"


def serialise_instance(inst: Instance) -> str:
    out = []
    if inst.name:
        out.append(f"NAME {inst.name}")
    cal = inst.calendar
    out += ["CALENDAR", f"{cal.days} {cal.slots_per_day} {cal.periods}", "", "CAMPI"]
    for (campus, rtype), count in inst.layout.room_counts.items():
        out.append(f"rooms {campus} {rtype} {count}")
    for (a, b), u in inst.layout.travel_slots.items():
        out.append(f"travel {a} {b} {u}")
    out += ["", "LECTURES"]
    for lec in inst.lectures:
        period = "both" if lec.period == BOTH else str(lec.period)
        out.append(" ".join([
            lec.id, str(lec.duration), lec.room_type, lec.campus, period,
            _fmt_list(sorted(lec.different_day)), _fmt_list(sorted(lec.predecessors)),
        ]))
    out += ["", "PROFESSORS"]
    for prof in inst.professors:
        out.append(f"{prof.id} {prof.max_daily} {prof.max_consecutive} {_fmt_list(prof.lectures)}")
    out += ["", "CURRICULA"]
    for cur in inst.curricula:
        out.append(" ".join([
            cur.id,
            cur.degree_id or "-",
            "-" if cur.year is None else str(cur.year),
            cur.class_id or "-",
            str(cur.period),
            str(cur.max_daily),
            str(cur.max_consecutive),
            _fmt_list(cur.lectures),
        ]))
    out += ["END", ""]
    return "\n".join(out)
