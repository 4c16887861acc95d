"""Hybrid local search: adaptive neighbourhood selection, guided penalties and shaking."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from ._data import FAM_DIFFERENT_DAY, FAM_PRECEDENCE, KIND_ALL, KIND_CURRICULUM, KIND_PROFESSOR, KIND_ROOM
from .decompose import IncrementPolicy, increment
from .evaluator import Evaluator, Move, PenaltyVector, Reassign, Schedule, Swap, ViolationLedger
from .kernel import compiled
from .model.types import Instance

NEIGHBOURHOODS = ("worst_slot", "worst_curriculum", "worst_professor", "worst_room_type",
                  "different_day", "precedence")
# neighbourhood n >= 1 targets kernel family n - 1
MAX_REDRAWS = 12


@dataclass(frozen=True)
class NeighbourhoodId:
    family: str
    swap: bool

    @property
    def index(self) -> int:
        return NEIGHBOURHOODS.index(self.family)


@dataclass
class SearchState:
    rng: random.Random
    probabilities: List[float] = field(default_factory=lambda: [1 / 6] * 6)
    successes: List[int] = field(default_factory=lambda: [1] * 6)
    stagnation: int = 0
    iterations: int = 0
    phases: int = 0
    shakes: int = 0

    @classmethod
    def seeded(cls, seed: int) -> "SearchState":
        return cls(random.Random(seed))


@dataclass(frozen=True)
class StoppingCriteria:
    s1: int = 25
    s2: int = 3
    s3: int = 1
    iteration_limit: Optional[int] = None
    time_limit: Optional[float] = None
    s1_mode: str = "fixed"  # or "non_improving": s1 counts iterations since the last improvement

    def check(self) -> None:
        for name in ("s1", "s2", "s3"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.s1_mode not in ("fixed", "non_improving"):
            raise ValueError(f"unknown s1_mode {self.s1_mode!r}")
        if self.iteration_limit is not None and self.iteration_limit < 0:
            raise ValueError("iteration_limit must be >= 0")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be > 0")


# ------------------------------------------------------------ probabilities
def probability_weights(successes: Sequence[int], totals: Sequence[int]) -> List[float]:
    """Selection probabilities from success counts and the five family totals."""
    if len(successes) != 6 or len(totals) != 5:
        raise ValueError("need 6 success counts and 5 family totals")
    raw = [successes[0] * (sum(totals) / 5.0)]
    raw += [s * f for s, f in zip(successes[1:], totals)]
    z = sum(raw)
    if z <= 0:
        return [1 / 6] * 6
    return [w / z for w in raw]


def update_probabilities(state: SearchState, ledger) -> SearchState:
    """``ledger`` is a ViolationLedger or the five family totals in kernel order."""
    if isinstance(ledger, ViolationLedger):
        g = ledger.group_totals
        totals = (g["curriculum"], g["professor"], g["room"], g["different_day"], g["precedence"])
    else:
        totals = tuple(ledger)
    state.probabilities = probability_weights(state.successes, totals)
    return state


def select_neighbourhood(state: SearchState, rng: Optional[random.Random] = None) -> NeighbourhoodId:
    rng = rng or state.rng
    r = rng.random()
    acc = 0.0
    n = 5
    for idx, p in enumerate(state.probabilities):
        acc += p
        if r < acc:
            n = idx
            break
    else:
        # rounding left r above the last cumulative sum
        n = max(i for i, p in enumerate(state.probabilities) if p > 0)
    return NeighbourhoodId(NEIGHBOURHOODS[n], rng.random() < 0.5)


# ------------------------------------------------------------------ penalties
def _features(curr_totals, fam, slot_totals):
    return (tuple(int(x) for x in curr_totals), int(fam[1]), int(fam[2]), int(fam[4]), int(fam[3]),
            tuple(int(x) for x in slot_totals))


def _bump(lam: int, cur: int, prev: int) -> int:
    return lam + 1 if 0 < cur and cur >= prev else 0


def _gls_update(aug_prev: int, aug_cur: int, prev, cur, pv: PenaltyVector) -> PenaltyVector:
    if aug_cur < aug_prev:
        return PenaltyVector((0,) * len(pv.curriculum), 0, 0, 0, 0, (0,) * len(pv.time_slot))
    return PenaltyVector(
        curriculum=tuple(_bump(l, c, p) for l, c, p in zip(pv.curriculum, cur[0], prev[0])),
        professor_total=_bump(pv.professor_total, cur[1], prev[1]),
        room_total=_bump(pv.room_total, cur[2], prev[2]),
        precedence_total=_bump(pv.precedence_total, cur[3], prev[3]),
        different_day_total=_bump(pv.different_day_total, cur[4], prev[4]),
        time_slot=tuple(_bump(l, c, p) for l, c, p in zip(pv.time_slot, cur[5], prev[5])),
    )


def _ledger_features(ledger: ViolationLedger):
    g = ledger.group_totals
    fam = (g["curriculum"], g["professor"], g["room"], g["different_day"], g["precedence"])
    return _features(ledger.curriculum_totals, fam, ledger.slot_totals)


def update_penalties(previous: ViolationLedger, current: ViolationLedger, penalties: PenaltyVector) -> PenaltyVector:
    """New weights after a search phase that went from ``previous`` to ``current``.

    Both augmented values use the weights in force during the phase.
    """
    from .evaluator import augmented_objective

    return _gls_update(augmented_objective(previous, penalties), augmented_objective(current, penalties),
                       _ledger_features(previous), _ledger_features(current), penalties)


# -------------------------------------------------------------- neighbourhoods
class _Ctx:
    """Index tables the move generators need, built once per evaluator."""

    def __init__(self, ev: Evaluator):
        self.ev = ev
        self.k = ev.k
        inst = ev.instance
        d = compiled(inst)
        self.nj = d.n_days
        self.nk = d.n_slots_per_day
        self.S = d.n_slots
        self.dur = list(d.duration)
        self.lc = [d.lc_idx[d.lc_ptr[i]:d.lc_ptr[i + 1]] for i in range(d.n_lectures)]
        self.cl = [d.cl_idx[d.cl_ptr[e]:d.cl_ptr[e + 1]] for e in range(d.n_curricula)]
        self.pred = [d.pred_idx[d.pred_ptr[i]:d.pred_ptr[i + 1]] for i in range(d.n_lectures)]
        self.rtype = [d.room_type[d.room[i]] for i in range(d.n_lectures)]
        self.room_type = list(d.room_type)

    def pos(self, i):
        return self.k.position(i)

    def random_slot(self, rng, i, days=None):
        d = rng.randrange(self.nj) if days is None else rng.choice(days)
        return d, rng.randint(0, self.nk - self.dur[i])

    def swap_fits(self, a, b, pa, pb):
        return pb[1] + self.dur[a] <= self.nk and pa[1] + self.dur[b] <= self.nk

    def partner(self, rng, i, lecs, accept=None):
        pi = self.pos(i)
        out = []
        for j in lecs:
            if j == i:
                continue
            pj = self.pos(j)
            if pj[0] < 0 or not self.swap_fits(i, j, pi, pj):
                continue
            if accept is not None and not accept(j, pj):
                continue
            out.append(j)
        return rng.choice(out) if out else None

    def partner_via_curriculum(self, rng, i, accept=None):
        if not self.lc[i]:
            return None
        e = rng.choice(self.lc[i])
        return self.partner(rng, i, self.cl[e], accept)

    def move_for(self, rng, i, swap, lecs=None, accept=None):
        if swap:
            j = (self.partner_via_curriculum(rng, i, accept) if lecs is None
                 else self.partner(rng, i, lecs, accept))
            return None if j is None else ("swap", i, j)
        d, s = self.random_slot(rng, i)
        return ("place", i, d, s)


def _gen_worst_slot(cx: _Ctx, swap, rng):
    slots = cx.k.argmax_entities(KIND_ALL)
    if not slots:
        return None
    t = rng.choice(slots)
    lecs = cx.k.covering(KIND_ALL, 0, -1, t)
    if not lecs:
        return None
    return cx.move_for(rng, rng.choice(lecs), swap)


def _gen_worst_curriculum(cx: _Ctx, swap, rng):
    ents = cx.k.argmax_entities(KIND_CURRICULUM)
    if not ents:
        return None
    e = rng.choice(ents)
    t = rng.choice(cx.k.row_argmax(KIND_CURRICULUM, e))
    lecs = cx.k.covering(KIND_CURRICULUM, e, -1, t)
    if not lecs:
        return None
    return cx.move_for(rng, rng.choice(lecs), swap, lecs=cx.cl[e])


def _gen_worst_professor(cx: _Ctx, swap, rng):
    ents = cx.k.argmax_entities(KIND_PROFESSOR)
    if not ents:
        return None
    e = rng.choice(ents)
    p, t = divmod(rng.choice(cx.k.row_argmax(KIND_PROFESSOR, e)), cx.S)
    lecs = cx.k.covering(KIND_PROFESSOR, e, p, t)
    if not lecs:
        return None
    return cx.move_for(rng, rng.choice(lecs), swap)


def _gen_worst_room_type(cx: _Ctx, swap, rng):
    ents = cx.k.argmax_entities(KIND_ROOM)
    if not ents:
        return None
    e = rng.choice(ents)
    p, t = divmod(rng.choice(cx.k.row_argmax(KIND_ROOM, e)), cx.S)
    lecs = cx.k.covering(KIND_ROOM, e, p, t)
    if not lecs:
        return None
    bad_type = cx.room_type[e]
    return cx.move_for(rng, rng.choice(lecs), swap, accept=lambda j, pj: cx.rtype[j] != bad_type)


def _gen_different_day(cx: _Ctx, swap, rng):
    vio = cx.k.violators(FAM_DIFFERENT_DAY)
    if not vio:
        return None
    i = rng.choice(vio)
    day = cx.pos(i)[0]
    if swap:
        j = cx.partner_via_curriculum(rng, i, accept=lambda j, pj: pj[0] != day)
        return None if j is None else ("swap", i, j)
    days = [d for d in range(cx.nj) if d != day]
    if not days:
        return None
    d, s = cx.random_slot(rng, i, days)
    return ("place", i, d, s)


def precedence_pairs(cx: _Ctx):
    """(predecessor, successor) pairs currently out of order."""
    out = []
    for s in cx.k.violators(FAM_PRECEDENCE):
        ps = cx.pos(s)
        for p in cx.pred[s]:
            pp = cx.pos(p)
            if pp[0] >= 0 and (pp[0], pp[1]) >= (ps[0], ps[1]):
                out.append((p, s))
    return out


def _gen_precedence(cx: _Ctx, swap, rng):
    pairs = precedence_pairs(cx)
    if not pairs:
        return None
    a, b = rng.choice(pairs)
    pa, pb = cx.pos(a), cx.pos(b)
    if not swap:
        jb, kb = pb
        days = list(range(jb))
        last_same = min(kb - 1, cx.nk - cx.dur[a])
        if last_same >= 0:
            days.append(jb)
        if days:
            d = rng.choice(days)
            if d < jb:
                s = rng.randint(0, cx.nk - cx.dur[a])
            else:
                s = rng.randint(0, last_same)
            return ("place", a, d, s)
        # nothing earlier exists: fall through to the swap
    if not cx.swap_fits(a, b, pa, pb):
        return None
    return ("swap", a, b)


_GENERATORS = (_gen_worst_slot, _gen_worst_curriculum, _gen_worst_professor, _gen_worst_room_type,
               _gen_different_day, _gen_precedence)


def _as_move(ev: Evaluator, cand) -> Optional[Move]:
    if cand is None:
        return None
    ids = ev.instance.lectures
    if cand[0] == "place":
        return Reassign(ids[cand[1]].id, cand[2], cand[3])
    return Swap(ids[cand[1]].id, ids[cand[2]].id)


def _public(n):
    def search(ev: Evaluator, swap: bool, rng: random.Random) -> Optional[Move]:
        return _as_move(ev, _GENERATORS[n](_Ctx(ev), swap, rng))
    search.__name__ = f"search_{NEIGHBOURHOODS[n]}"
    search.__doc__ = f"Candidate move from the {NEIGHBOURHOODS[n].replace('_', ' ')} neighbourhood, or None."
    return search


search_worst_slot = _public(0)
search_worst_curriculum = _public(1)
search_worst_professor = _public(2)
search_worst_room_type = _public(3)
search_different_day = _public(4)
search_precedence = _public(5)


# ----------------------------------------------------------------- the engine
class _Limits:
    def __init__(self, criteria: StoppingCriteria, state: SearchState):
        self.cap = criteria.iteration_limit
        self.deadline = None if criteria.time_limit is None else time.perf_counter() + criteria.time_limit
        self.state = state
        self.hit = None

    def reached(self) -> bool:
        if self.hit:
            return True
        if self.cap is not None and self.state.iterations >= self.cap:
            self.hit = "iteration_limit"
        elif self.deadline is not None and time.perf_counter() >= self.deadline:
            self.hit = "time_limit"
        return self.hit is not None


class _Engine:
    def __init__(self, ev: Evaluator, state: SearchState, limits: Optional[_Limits] = None,
                 on_move: Optional[Callable] = None):
        self.ev = ev
        self.cx = _Ctx(ev)
        self.st = state
        self.limits = limits
        self.on_move = on_move
        self.best_key = None
        self.best_pos = None
        self.tracking = False

    def applicable(self, n: int, fam) -> bool:
        if n == 0:
            return self.ev.grand > 0
        return fam[n - 1] > 0

    def draw(self):
        st, rng = self.st, self.st.rng
        fam = self.ev.family_totals()
        for _ in range(MAX_REDRAWS):
            nb = select_neighbourhood(st, rng)
            n = nb.index
            if not self.applicable(n, fam):
                continue
            cand = _GENERATORS[n](self.cx, nb.swap, rng)
            if cand is not None:
                return n, cand
        swap = rng.random() < 0.5
        cand = _GENERATORS[0](self.cx, swap, rng)
        if cand is None and swap:
            cand = _GENERATORS[0](self.cx, False, rng)
        return 0, cand

    def do(self, cand):
        k = self.ev.k
        if cand[0] == "place":
            i = cand[1]
            old = k.position(i)
            k.place(i, cand[2], cand[3])
            return ("place", i, int(old[0]), int(old[1]))
        k.swap(cand[1], cand[2])
        return cand

    def note_best(self):
        if self.tracking and self.ev.grand < self.best_key:
            self.best_key = self.ev.grand
            self.best_pos = self.ev.positions()

    def alns(self, s1: int, mode: str = "fixed") -> None:
        ev, st = self.ev, self.st
        st.successes = [1] * 6
        update_probabilities(st, ev.family_totals())
        count = 0
        while count < s1:
            if ev.grand == 0 or (self.limits and self.limits.reached()):
                break
            n, cand = self.draw()
            st.iterations += 1
            count += 1
            if cand is not None:
                before = ev.aug
                undo = self.do(cand)
                after = ev.aug
                if after > before:
                    self.do(undo)
                else:
                    if after < before:
                        st.successes[n] += 1
                        if mode == "non_improving":
                            count = 0
                    self.note_best()
                if self.on_move is not None:
                    self.on_move("alns", n, cand, after <= before, ev.grand, ev.aug)
            update_probabilities(st, ev.family_totals())

    def shake(self, s3: int) -> int:
        ev, st = self.ev, self.st
        applied = 0
        for _ in range(s3):
            if ev.grand == 0 or (self.limits and self.limits.reached()):
                break
            n, cand = self.draw()
            st.iterations += 1
            if cand is not None:
                self.do(cand)
                applied += 1
                self.note_best()
                if self.on_move is not None:
                    self.on_move("shake", n, cand, True, ev.grand, ev.aug)
            update_probabilities(st, ev.family_totals())
        st.shakes += 1
        return applied


def alns(ev: Evaluator, penalties: PenaltyVector, state: SearchState, s1: int, mode: str = "fixed",
         on_move: Optional[Callable] = None) -> Evaluator:
    """One search phase of ``s1`` iterations on ``ev`` (modified in place)."""
    if s1 < 1:
        raise ValueError("s1 must be >= 1")
    ev.set_penalties(penalties)
    _Engine(ev, state, on_move=on_move).alns(s1, mode)
    return ev


def shake(ev: Evaluator, state: SearchState, s3: int, on_move: Optional[Callable] = None) -> int:
    """Apply ``s3`` unconditional moves; returns how many were applied."""
    if s3 < 1:
        raise ValueError("s3 must be >= 1")
    return _Engine(ev, state, on_move=on_move).shake(s3)


# ------------------------------------------------------------------ the solve
@dataclass(frozen=True)
class TraceRow:
    iteration: int
    phase: int
    event: str
    curricula: int
    f: int
    aug: int
    probabilities: Tuple[float, ...]


TRACE_COLUMNS = ("iteration", "phase", "event", "curricula", "f", "aug") + tuple(f"p_{n}" for n in NEIGHBOURHOODS)


def trace_csv(rows: Sequence[TraceRow]) -> str:
    out = [",".join(TRACE_COLUMNS)]
    for r in rows:
        out.append(",".join([str(r.iteration), str(r.phase), r.event, str(r.curricula), str(r.f), str(r.aug)]
                            + [repr(p) for p in r.probabilities]))
    return "\n".join(out) + "\n"


@dataclass
class SolveResult:
    schedule: Schedule
    feasible: bool
    ledger: ViolationLedger
    best_total: int
    iterations: int
    phases: int
    shakes: int
    increments: int
    stop_reason: str
    elapsed: float
    trace: List[TraceRow]
    fallback_lectures: int = 0

    @property
    def grand_total(self) -> int:
        return self.ledger.grand_total


def solve(instance: Instance, order: Sequence[str], policy: IncrementPolicy = IncrementPolicy("none"),
          criteria: StoppingCriteria = StoppingCriteria(), rng_seed: int = 0,
          backend: Optional[str] = None, on_move: Optional[Callable] = None) -> SolveResult:
    """Add curricula increment by increment and search each working instance to zero violations.

    When a cap fires the best schedule seen with every curriculum added is
    returned (or the current one if the last increment was never reached).
    """
    policy.check()
    criteria.check()
    if sorted(order) != sorted(c.id for c in instance.curricula):
        raise ValueError("order must list every curriculum exactly once")
    t0 = time.perf_counter()
    ev = Evaluator(instance, None, backend)
    st = SearchState.seeded(rng_seed)
    limits = _Limits(criteria, st)
    eng = _Engine(ev, st, limits, on_move)
    trace: List[TraceRow] = []
    zero = PenaltyVector.zeros(instance)
    cursor = 0
    increments = 0
    fallback = 0

    def log(event):
        trace.append(TraceRow(st.iterations, st.phases, event, cursor, ev.grand, ev.aug,
                              tuple(st.probabilities)))

    stop = "feasible"
    while cursor < len(order):
        step = increment(ev, policy, order, cursor, st.rng)
        cursor = step.cursor
        increments += 1
        fallback += step.fallback_count
        pv = zero
        ev.set_penalties(pv)
        st.stagnation = 0
        if cursor == len(order):
            eng.tracking = True
            eng.best_key = ev.grand
            eng.best_pos = ev.positions()
        log("increment")
        while ev.grand > 0:
            if limits.reached():
                break
            f_prev, aug_prev = ev.grand, ev.aug
            k = ev.k
            fam = ev.family_totals()
            prev = _features(k.arrays()["curriculum_total"], fam, k.arrays()["slot_total"])
            eng.alns(criteria.s1, criteria.s1_mode)
            st.phases += 1
            a = k.arrays()
            cur = _features(a["curriculum_total"], ev.family_totals(), a["slot_total"])
            aug_cur = ev.aug
            pv = _gls_update(aug_prev, aug_cur, prev, cur, pv)
            ev.set_penalties(pv)
            if ev.grand >= f_prev:
                st.stagnation += 1
            else:
                st.stagnation = 0
            log("improve" if aug_cur < aug_prev else "penalise")
            if st.stagnation > criteria.s2 and ev.grand > 0:
                eng.shake(criteria.s3)
                st.stagnation = 0
                log("shake")
        if ev.grand > 0:
            stop = limits.hit or "stopped"
            break

    if ev.grand > 0 and eng.best_pos is not None and eng.best_key < ev.grand:
        ev.restore(*eng.best_pos)
    ledger = ev.ledger()
    return SolveResult(
        schedule=ev.schedule(), feasible=ledger.grand_total == 0 and cursor == len(order), ledger=ledger,
        best_total=ledger.grand_total, iterations=st.iterations, phases=st.phases, shakes=st.shakes,
        increments=increments, stop_reason=stop, elapsed=time.perf_counter() - t0, trace=trace,
        fallback_lectures=fallback,
    )
