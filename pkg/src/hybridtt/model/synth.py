"""Synthetic instances with a planted zero-violation timetable.

Structure mirrors a university: degrees contain years, years contain
classes, each class has one curriculum per period. Courses shared by every
class of a (degree, year) give clusters of curricula with common lectures;
semester courses are shared by a class's two curricula. Limits, room counts,
professors, different-day pairs and precedences are all derived from the
planted timetable, so it stays feasible while the limits stay tight.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .types import BOTH, CalendarGeometry, CampusLayout, Curriculum, Instance, Lecture, Professor, validate


@dataclass(frozen=True)
class SynthSpec:
    degrees: int = 4
    years: int = 5
    classes: int = 5
    days: int = 5
    slots_per_day: int = 10
    shared_courses: int = 2      # per (degree, year, period)
    semester_courses: int = 1    # per class, taught in both periods
    own_courses: int = 3         # per curriculum
    lectures_per_course: Tuple[int, int] = (2, 3)
    durations: Tuple[int, ...] = (1, 2)
    campi: int = 2
    travel: int = 1
    foreign_campus_rate: float = 0.1
    precedence_rate: float = 0.5
    workload_slack: int = 1
    room_slack: int = 0
    professors_per_degree: int = 12
    departments: int = 0         # > 0: professors pooled per department, across degrees
    elective_pool: int = 0       # per (degree, year, period); each class takes a subset
    electives_per_class: int = 0
    room_types: Tuple[str, ...] = ("room", "lab")
    lab_rate: float = 0.25       # share of courses needing the last room type
    max_daily: Optional[int] = None        # fixed limits instead of planted load + slack
    max_consecutive: Optional[int] = None

    @property
    def n_curricula(self) -> int:
        return 2 * self.degrees * self.years * self.classes


@dataclass
class _Course:
    cid: str
    period: int
    lectures: List[str]
    room_type: str


class _Grid:
    def __init__(self, days, nk, max_daily=None, max_consec=None):
        self.nk = nk
        self.cells = [[False] * nk for _ in range(days)]
        self.max_daily = max_daily
        self.max_consec = max_consec

    def free(self, d, k, c):
        row = self.cells[d]
        if any(row[k:k + c]):
            return False
        if self.max_daily is not None and sum(row) + c > self.max_daily:
            return False
        if self.max_consec is not None:
            lo, hi = k, k + c
            while lo > 0 and row[lo - 1]:
                lo -= 1
            while hi < self.nk and row[hi]:
                hi += 1
            if hi - lo > self.max_consec:
                return False
        return True

    def take(self, d, k, c):
        for x in range(k, k + c):
            self.cells[d][x] = True


def _place(rng, grids, days, nk, c, avoid_days=()):
    spots = [(d, k) for d in range(days) for k in range(nk - c + 1)
             if d not in avoid_days and all(g.free(d, k, c) for g in grids)]
    if not spots:
        spots = [(d, k) for d in range(days) for k in range(nk - c + 1) if all(g.free(d, k, c) for g in grids)]
    if not spots:
        return None
    d, k = rng.choice(spots)
    for g in grids:
        g.take(d, k, c)
    return d, k


def generate_planted(spec: SynthSpec = SynthSpec(), rng_seed: int = 0, name: Optional[str] = None):
    """Return (instance, planted assignment) with the assignment violation-free."""
    rng = random.Random(rng_seed)
    nj, nk = spec.days, spec.slots_per_day
    campus_names = [f"campus{c}" for c in range(spec.campi)]
    types = list(spec.room_types)

    dur: Dict[str, int] = {}
    rtype: Dict[str, str] = {}
    period: Dict[str, int] = {}
    home: Dict[str, str] = {}
    course_of: Dict[str, str] = {}
    plant: Dict[str, Tuple[int, int]] = {}
    cur_lectures: Dict[str, List[str]] = {}
    cur_meta: Dict[str, Tuple[str, int, str, int]] = {}
    courses: List[_Course] = []
    degree_of_course: Dict[str, int] = {}

    def new_course(cid, per, deg):
        n = rng.randint(*spec.lectures_per_course)
        if len(types) == 1:
            rt = types[0]
        elif rng.random() < spec.lab_rate:
            rt = types[-1]
        else:
            rt = rng.choice(types[:-1])
        lids = [f"{cid}.{x}" for x in range(n)]
        for lid in lids:
            dur[lid] = rng.choice(spec.durations)
            rtype[lid] = rt
            period[lid] = per
            home[lid] = campus_names[deg % spec.campi]
            course_of[lid] = cid
        c = _Course(cid, per, lids, rt)
        courses.append(c)
        degree_of_course[cid] = deg
        return c

    def plant_course(c, grids):
        used_days: Set[int] = set()
        for lid in c.lectures:
            spot = _place(rng, grids, nj, nk, dur[lid], used_days)
            if spot is None:
                for l in c.lectures:
                    plant.pop(l, None)
                return False
            plant[lid] = spot
            used_days.add(spot[0])
        return True

    for deg in range(spec.degrees):
        for year in range(1, spec.years + 1):
            classes = [f"d{deg}y{year}c{c}" for c in range(spec.classes)]
            grid = {(k, p): _Grid(nj, nk, spec.max_daily, spec.max_consecutive) for k in classes for p in (1, 2)}
            for k in classes:
                for p in (1, 2):
                    cid = f"{k}p{p}"
                    cur_lectures[cid] = []
                    cur_meta[cid] = (f"d{deg}", year, k, p)
            # year-wide courses shared by every class in one period
            for p in (1, 2):
                for s in range(spec.shared_courses):
                    c = new_course(f"d{deg}y{year}p{p}s{s}", p, deg)
                    if plant_course(c, [grid[(k, p)] for k in classes]):
                        for k in classes:
                            cur_lectures[f"{k}p{p}"].extend(c.lectures)
                    else:
                        courses.pop()
            # electives: overlapping subsets of a year-wide pool
            for p in (1, 2):
                pool = [new_course(f"d{deg}y{year}p{p}e{s}", p, deg) for s in range(spec.elective_pool)]
                takers = {c.cid: [] for c in pool}
                for k in classes:
                    for c in rng.sample(pool, min(spec.electives_per_class, len(pool))):
                        takers[c.cid].append(k)
                for c in pool:
                    if takers[c.cid] and plant_course(c, [grid[(k, p)] for k in takers[c.cid]]):
                        for k in takers[c.cid]:
                            cur_lectures[f"{k}p{p}"].extend(c.lectures)
                    else:
                        courses.remove(c)
                        for l in c.lectures:
                            plant.pop(l, None)
            for k in classes:
                for s in range(spec.semester_courses):
                    c = new_course(f"{k}sem{s}", BOTH, deg)
                    if plant_course(c, [grid[(k, 1)], grid[(k, 2)]]):
                        cur_lectures[f"{k}p1"].extend(c.lectures)
                        cur_lectures[f"{k}p2"].extend(c.lectures)
                    else:
                        courses.pop()
                for p in (1, 2):
                    for s in range(spec.own_courses):
                        c = new_course(f"{k}p{p}o{s}", p, deg)
                        if plant_course(c, [grid[(k, p)]]):
                            cur_lectures[f"{k}p{p}"].extend(c.lectures)
                        else:
                            courses.pop()

    placed = [c for c in courses if all(l in plant for l in c.lectures)]
    lecture_ids = [l for c in placed for l in c.lectures]

    def active(lid):
        return (1, 2) if period[lid] == BOTH else (period[lid],)

    def _rushed(mine, theirs):
        # a pooled professor must still have time to change campus
        for a in mine:
            for b in theirs:
                if home[a] == home[b] or plant[a][0] != plant[b][0] or set(active(a)).isdisjoint(active(b)):
                    continue
                ka, kb = plant[a][1], plant[b][1]
                gap = ka - (kb + dur[b]) if kb <= ka else kb - (ka + dur[a])
                if gap < spec.travel:
                    return True
        return False

    # professors: one per course, pooled per degree without planted clashes
    prof_busy: Dict[str, Set[Tuple[int, int, int]]] = {}
    prof_lecs: Dict[str, List[str]] = {}
    pools: Dict[int, List[str]] = {}
    for c in placed:
        deg = degree_of_course[c.cid]
        if spec.departments > 0:
            deg = rng.randrange(spec.departments)
        cells = {(p, plant[l][0], plant[l][1] + x) for l in c.lectures for p in active(l) for x in range(dur[l])}
        pool = pools.setdefault(deg, [])
        cand = [p for p in pool if not (prof_busy[p] & cells) and not _rushed(c.lectures, prof_lecs[p])]
        if cand and (len(pool) >= spec.professors_per_degree or rng.random() < 0.7):
            pid = rng.choice(cand)
        else:
            pid = f"prof{deg}_{len(pool)}"
            pool.append(pid)
            prof_busy[pid] = set()
            prof_lecs[pid] = []
        prof_busy[pid] |= cells
        prof_lecs[pid].extend(c.lectures)

    # some lectures move to another campus when no entity would need to rush
    campus = dict(home)
    if spec.campi > 1 and spec.foreign_campus_rate > 0:
        entity_lecs = list(cur_lectures.values()) + list(prof_lecs.values())
        entities_of: Dict[str, List[int]] = {}
        for n, ls in enumerate(entity_lecs):
            for l in ls:
                entities_of.setdefault(l, []).append(n)
        for lid in lecture_ids:
            if rng.random() >= spec.foreign_campus_rate:
                continue
            target = rng.choice([c for c in campus_names if c != home[lid]])
            d, k = plant[lid]
            ok = True
            for n in entities_of.get(lid, ()):
                for other in entity_lecs[n]:
                    if other == lid or plant[other][0] != d or campus[other] == target:
                        continue
                    # professor rows are per period; curriculum rows see every lecture
                    if n >= len(cur_lectures) and set(active(other)).isdisjoint(active(lid)):
                        continue
                    k2 = plant[other][1]
                    gap = k - (k2 + dur[other]) if k2 <= k else k2 - (k + dur[lid])
                    if 0 <= gap < spec.travel:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                campus[lid] = target

    # different-day pairs and precedences follow the planted layout of each course
    dd: Dict[str, Set[str]] = {l: set() for l in lecture_ids}
    pred: Dict[str, Set[str]] = {l: set() for l in lecture_ids}
    for c in placed:
        ls = c.lectures
        for a in range(len(ls)):
            for b in range(a + 1, len(ls)):
                x, y = ls[a], ls[b]
                if plant[x][0] != plant[y][0]:
                    dd[x].add(y)
                    dd[y].add(x)
        if rng.random() < spec.precedence_rate and len(ls) > 1:
            seq = sorted(ls, key=lambda l: plant[l])
            for a, b in zip(seq, seq[1:]):
                if plant[a] < plant[b]:
                    pred[b].add(a)

    def runs_and_daily(lids, per=None):
        occ = [[0] * nk for _ in range(nj)]
        for l in lids:
            if per is not None and per not in active(l):
                continue
            d, k = plant[l]
            for x in range(k, k + dur[l]):
                occ[d][x] = 1
        daily = max(sum(r) for r in occ)
        run = best = 0
        for r in occ:
            run = 0
            for v in r:
                run = run + 1 if v else 0
                best = max(best, run)
        return daily, best

    lectures = tuple(
        Lecture(id=l, duration=dur[l], room_type=rtype[l], campus=campus[l], period=period[l],
                different_day=frozenset(dd[l]), predecessors=frozenset(pred[l]))
        for l in lecture_ids
    )
    curricula = []
    for cid, lids in cur_lectures.items():
        if not lids:
            continue
        daily, run = runs_and_daily(lids)
        if spec.max_daily is not None:
            md = max(spec.max_daily, daily)
        else:
            md = min(daily + spec.workload_slack, nj * nk)
        if spec.max_consecutive is not None:
            mc = min(max(spec.max_consecutive, run), md)
        else:
            mc = min(run + spec.workload_slack, md)
        deg, year, klass, p = cur_meta[cid]
        curricula.append(Curriculum(id=cid, lectures=tuple(lids), max_daily=md, max_consecutive=mc,
                                    class_id=klass, degree_id=deg, year=year, period=p))
    professors = []
    for pid, lids in prof_lecs.items():
        daily = max(runs_and_daily(lids, p)[0] for p in (1, 2))
        run = max(runs_and_daily(lids, p)[1] for p in (1, 2))
        md = daily + spec.workload_slack
        mc = run + spec.workload_slack
        if spec.max_daily is not None:
            md = max(md, spec.max_daily)
        if spec.max_consecutive is not None:
            mc = max(mc, spec.max_consecutive)
        professors.append(Professor(pid, tuple(lids), md, min(mc, md)))

    usage: Dict[Tuple[str, str], int] = {(c, t): 0 for c in campus_names for t in types}
    cells: Dict[Tuple[str, str, int, int, int], int] = {}
    for l in lecture_ids:
        d, k = plant[l]
        for p in active(l):
            for x in range(k, k + dur[l]):
                key = (campus[l], rtype[l], p, d, x)
                cells[key] = cells.get(key, 0) + 1
    for (c, t, _p, _d, _x), v in cells.items():
        usage[(c, t)] = max(usage[(c, t)], v)
    rooms = {key: v + spec.room_slack for key, v in usage.items()}
    travel = {}
    for a in campus_names:
        for b in campus_names:
            if a != b:
                travel[(a, b)] = spec.travel

    inst = Instance(
        calendar=CalendarGeometry(nj, nk, 2), lectures=lectures, curricula=tuple(curricula),
        professors=tuple(professors), layout=CampusLayout(room_counts=rooms, travel_slots=travel),
        name=name or f"synth-{spec.degrees}x{spec.years}x{spec.classes}-s{rng_seed}",
    )
    validate(inst)
    return inst, {l: plant[l] for l in lecture_ids}


#: Shaped after the description of the real instance: 24 half-hour slots, 1-3
#: hour lectures, 8 hour days with at most 5 consecutive hours, overlapping
#: electives inside each year, scarce rooms, two campi one slot apart and
#: departments whose professors teach across degrees.
IST_LIKE = SynthSpec(
    degrees=4, years=5, classes=5, days=5, slots_per_day=24,
    shared_courses=1, semester_courses=1, own_courses=1, elective_pool=3, electives_per_class=2,
    lectures_per_course=(2, 3), durations=(2, 4, 6), campi=2, travel=1, foreign_campus_rate=0.1,
    precedence_rate=0.5, workload_slack=0, room_slack=0, professors_per_degree=15, departments=6,
    room_types=("small", "medium", "large", "lab"), lab_rate=0.2, max_daily=16, max_consecutive=10,
)


# ------------------------------------------------------------ competition-style
#: (courses, rooms, days, periods per day, curricula) of the twenty published
#: competition files, used only to size synthetic stand-ins.
CTT_SHAPES = (
    (30, 6, 5, 6, 14), (82, 16, 5, 5, 70), (72, 16, 5, 5, 68), (79, 18, 5, 5, 57),
    (54, 9, 6, 6, 139), (108, 18, 5, 5, 70), (131, 20, 5, 5, 77), (86, 18, 5, 5, 61),
    (76, 18, 5, 5, 75), (115, 18, 5, 5, 67), (30, 5, 5, 9, 13), (88, 11, 6, 6, 150),
    (82, 19, 5, 5, 66), (85, 17, 5, 5, 60), (72, 16, 5, 5, 68), (108, 20, 5, 5, 71),
    (99, 17, 5, 5, 70), (47, 9, 6, 6, 52), (74, 16, 5, 5, 66), (121, 19, 5, 5, 78),
)


def generate_ctt(shape: Tuple[int, int, int, int, int], rng_seed: int = 0, name: str = "synthetic",
                 max_daily: Optional[int] = None, max_consecutive: int = 4,
                 lectures: Tuple[int, int] = (2, 5), curriculum_size: Tuple[int, int] = (3, 6),
                 courses_per_teacher: Tuple[int, int] = (1, 3)):
    """Competition-layout document with a planted timetable that survives hardening.

    Every course's lectures sit on distinct days; teachers and curricula never
    clash and stay within the daily and consecutive caps; no slot uses more
    rooms than exist. Returns (CTTDocument, {lecture id: (day, period)}).
    """
    from .itc2007 import CTTCourse, CTTDocument, lecture_id

    n_courses, n_rooms, days, ppd, n_curricula = shape
    rng = random.Random(rng_seed)
    if max_daily is None:
        max_daily = max(1, -(-7 * ppd // 10))
    max_consecutive = min(max_consecutive, max_daily)
    rooms_used = [[0] * ppd for _ in range(days)]
    teachers: List[_Grid] = []
    courses: List[CTTCourse] = []
    cells: Dict[str, List[Tuple[int, int]]] = {}
    left = 0
    for c in range(n_courses):
        if left == 0:
            teachers.append(_Grid(days, ppd, max_daily, max_consecutive))
            left = rng.randint(*courses_per_teacher)
        left -= 1
        tg = teachers[-1]
        placed: List[Tuple[int, int]] = []
        for _ in range(rng.randint(lectures[0], min(lectures[1], days))):
            used = {d for d, _k in placed}
            spots = [(d, k) for d in range(days) for k in range(ppd)
                     if d not in used and rooms_used[d][k] < n_rooms and tg.free(d, k, 1)]
            if not spots:
                break
            d, k = rng.choice(spots)
            tg.take(d, k, 1)
            rooms_used[d][k] += 1
            placed.append((d, k))
        if not placed:
            continue
        cid = f"c{c:04d}"
        courses.append(CTTCourse(cid, f"t{len(teachers) - 1:03d}", len(placed), 1, 30))
        cells[cid] = placed

    def fits(grid, cid):
        trial = _Grid(days, ppd, max_daily, max_consecutive)
        trial.cells = [row[:] for row in grid.cells]
        for d, k in cells[cid]:
            if not trial.free(d, k, 1):
                return False
            trial.take(d, k, 1)
        return True

    curricula = []
    ids = [c.id for c in courses]
    for q in range(n_curricula):
        grid = _Grid(days, ppd, max_daily, max_consecutive)
        members: List[str] = []
        want = rng.randint(*curriculum_size)
        for cid in rng.sample(ids, len(ids)):
            if len(members) == want:
                break
            if fits(grid, cid):
                for d, k in cells[cid]:
                    grid.take(d, k, 1)
                members.append(cid)
        curricula.append((f"q{q:03d}", tuple(sorted(members))))
    doc = CTTDocument(name=name, days=days, periods_per_day=ppd, courses=tuple(courses),
                      rooms=tuple((f"r{r:02d}", 100) for r in range(n_rooms)),
                      curricula=tuple(curricula), unavailability=())
    plant = {lecture_id(cid, n): dk for cid, placed in cells.items() for n, dk in enumerate(placed)}
    return doc, plant
