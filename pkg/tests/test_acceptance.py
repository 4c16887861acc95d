"""Acceptance criteria, one test per criterion.

Each test records a verdict that conftest prints as ``CRITERION n: PASS/FAIL``
after the run. Criteria that cannot be met are left failing (xfail, with the
measured numbers in the verdict line) rather than weakened.
"""

import os
import random
import statistics
from pathlib import Path

import pytest

from helpers import random_instance, random_position
from oracle import all_assignments, oracle_ledger, oracle_total
from verdicts import record, sign_test_p

from hybridtt import (
    Evaluator, IncrementPolicy, PenaltyVector, Reassign, Schedule, StoppingCriteria, Swap,
    augmented_objective, evaluate_delta, evaluate_full, seed_initial_state, solve,
)
from hybridtt.cli import main as cli_main
from hybridtt.evaluator import ScheduleError, apply_move
from hybridtt.model import (
    CalendarGeometry, CampusLayout, Curriculum, Instance, Lecture, adapt_itc2007, ordered_sort, random_sort,
    validate,
)
from hybridtt.model.itc2007 import write_ctt
from hybridtt.model.synth import CTT_SHAPES, IST_LIKE, generate_ctt, generate_planted
from hybridtt.search import probability_weights, update_penalties

pytestmark = pytest.mark.acceptance

FULL = os.environ.get("HYBRIDTT_ACCEPTANCE_FULL") == "1"


def _ledger_maps(ledger):
    return (ledger.curriculum_slot, ledger.professor_slot, ledger.room_slot,
            ledger.precedence_lecture, ledger.different_day_lecture)


def _solve_defaults(inst, seed, time_limit):
    return solve(inst, ordered_sort(inst), IncrementPolicy("fixed", rho_fraction=0.5),
                 StoppingCriteria(25, 3, 1, time_limit=time_limit), rng_seed=seed)


# ---------------------------------------------------------------- criterion 1
def _competition_files():
    root = os.environ.get("HYBRIDTT_ITC_DIR")
    if not root:
        return []
    return sorted(Path(root).glob("comp*.ctt"))


def test_c1_competition_feasibility():
    files = _competition_files()
    if len(files) < 20:
        record(1, False, f"not run: {len(files)} of 20 competition files found, set HYBRIDTT_ITC_DIR")
        pytest.skip("competition files absent")
    bad = []
    for path in files:
        inst = adapt_itc2007(path.read_text())
        runs = [_solve_defaults(inst, seed, 60.0) for seed in range(30)]
        ok = sum(r.feasible and r.elapsed <= 60.0 for r in runs)
        if ok < 28:
            bad.append(f"{path.stem} {ok}/30")
    record(1, not bad, "all files >= 28/30" if not bad else ", ".join(bad))
    assert not bad


@pytest.mark.slow
@pytest.mark.xfail(reason="the hardest stand-ins (many curricula per course) exceed the time cap", strict=False)
def test_c1_proxy_synthetic_competition_shapes():
    """Same protocol on synthetic files of the twenty competition sizes with a planted solution."""
    seeds = range(30) if FULL else range(3)
    cap = 60.0 if FULL else 10.0
    need = 28 if FULL else len(seeds)
    per_file = []
    for n, shape in enumerate(CTT_SHAPES):
        doc, plant = generate_ctt(shape, rng_seed=n, name=f"synthetic{n + 1:02d}")
        inst = adapt_itc2007(write_ctt(doc))
        assert evaluate_full(inst, Schedule(dict(plant))).grand_total == 0
        ok = sum(r.feasible and r.elapsed <= cap for r in (_solve_defaults(inst, s, cap) for s in seeds))
        per_file.append(ok)
    short = [f"#{n + 1} {ok}/{len(seeds)}" for n, ok in enumerate(per_file) if ok < need]
    scope = "30 seeds, 60 s" if FULL else f"{len(seeds)} seeds, {cap:.0f} s cap"
    record("1 (synthetic proxy)", not short, f"{scope}; short: {', '.join(short) or 'none'}")
    assert not short


# ------------------------------------------------------------ criteria 2 and 3
@pytest.fixture(scope="module")
def synthetic_runs():
    inst, plant = generate_planted(IST_LIKE, 0)
    assert evaluate_full(inst, Schedule(dict(plant))).grand_total == 0
    crit = StoppingCriteria(25, 3, 1, iteration_limit=400_000)
    rho = IncrementPolicy("fixed", rho_fraction=0.2)
    whole, ordered, shuffled = [], [], []
    for seed in range(30):
        whole.append(solve(inst, ordered_sort(inst), IncrementPolicy("none"), crit, rng_seed=seed))
        ordered.append(solve(inst, ordered_sort(inst), rho, crit, rng_seed=seed))
        shuffled.append(solve(inst, random_sort(inst, seed), rho, crit, rng_seed=seed))
    return inst, whole, ordered, shuffled


@pytest.mark.slow
def test_c2_decomposition_reduces_iterations(synthetic_runs):
    inst, whole, ordered, _ = synthetic_runs
    assert len(inst.curricula) >= 200
    assert all(r.feasible for r in whole + ordered)
    a = [r.iterations for r in whole]
    b = [r.iterations for r in ordered]
    wins = sum(y < x for x, y in zip(a, b))
    p = sign_test_p(wins, len(a))
    passed = statistics.mean(b) < statistics.mean(a) and p < 0.05
    record(2, passed, f"mean {statistics.mean(b):.0f} vs {statistics.mean(a):.0f}, wins {wins}/30, p={p:.2g}")
    assert passed


@pytest.mark.slow
@pytest.mark.xfail(reason="random increments need fewer iterations on the clustered family", strict=False)
def test_c3_ordered_increments_beat_random(synthetic_runs):
    _, _, ordered, shuffled = synthetic_runs
    assert all(r.feasible for r in ordered + shuffled)
    b = [r.iterations for r in ordered]
    c = [r.iterations for r in shuffled]
    wins = sum(x < y for x, y in zip(b, c))
    p = sign_test_p(wins, len(b))
    passed = statistics.mean(b) <= statistics.mean(c) and p < 0.05
    record(3, passed, f"ordered mean {statistics.mean(b):.0f} vs random {statistics.mean(c):.0f}, "
                      f"wins {wins}/30, p={p:.2g}")
    assert passed


# ---------------------------------------------------------------- criterion 4
def _random_move(rng, inst, sched):
    n = len(inst.lectures)
    if n > 1 and rng.random() < 0.4:
        a, b = rng.sample(range(n), 2)
        return Swap(inst.lectures[a].id, inst.lectures[b].id)
    i = rng.randrange(n)
    return Reassign(inst.lectures[i].id, *random_position(rng, inst, i))


@pytest.mark.slow
def test_c4_evaluator_matches_brute_force():
    rng = random.Random(4)
    checked = 0
    mismatch = 0
    for _ in range(100):
        inst = random_instance(rng)
        for assign in all_assignments(inst):
            led = evaluate_full(inst, Schedule(assign))
            checked += 1
            if _ledger_maps(led) != oracle_ledger(inst, assign) or led.grand_total != oracle_total(inst, assign):
                mismatch += 1
    moves = 0
    delta_mismatch = 0
    for _ in range(10):
        inst = random_instance(rng)
        sched = Schedule({l.id: random_position(rng, inst, i) for i, l in enumerate(inst.lectures)})
        led = evaluate_full(inst, sched)
        while moves < 10_000 * (_ + 1):
            move = _random_move(rng, inst, sched)
            try:
                nxt = evaluate_delta(inst, sched, led, move)
            except ScheduleError:
                continue  # a swap whose lectures do not fit each other's start
            sched = apply_move(sched, move)
            led = nxt
            moves += 1
            if led != evaluate_full(inst, sched) or led.grand_total != oracle_total(inst, sched.assignment):
                delta_mismatch += 1
    passed = mismatch == 0 and delta_mismatch == 0
    record(4, passed, f"{checked} assignments, {mismatch} mismatches; {moves} moves, {delta_mismatch} mismatches")
    assert passed


# ---------------------------------------------------------------- criterion 5
def test_c5_zero_penalties_give_raw_total():
    rng = random.Random(5)
    bad = 0
    for _ in range(1000):
        inst = random_instance(rng, max_lectures=8, max_days=3, max_slots=8)
        sched = Schedule({l.id: random_position(rng, inst, i) for i, l in enumerate(inst.lectures)
                          if rng.random() < 0.9})
        led = evaluate_full(inst, sched)
        if augmented_objective(led, PenaltyVector.zeros(inst)) != led.grand_total:
            bad += 1
    record(5, bad == 0, f"1000 ledgers, {bad} differ")
    assert bad == 0


# ---------------------------------------------------------------- criterion 6
def _features(inst, maps):
    """GLS features recounted from oracle maps."""
    cur, prof, room, prec, dd = maps
    nk = inst.calendar.slots_per_day
    per_cur = {c.id: 0 for c in inst.curricula}
    for (cid, _p, _d, _k), v in cur.items():
        per_cur[cid] += v
    slots = [0] * (inst.calendar.days * nk)
    for m in maps:
        for key, v in m.items():
            slots[key[-2] * nk + key[-1]] += v
    return ([per_cur[c.id] for c in inst.curricula], sum(prof.values()), sum(room.values()),
            sum(prec.values()), sum(dd.values()), slots)


def _oracle_aug(inst, maps, pv):
    nk = inst.calendar.slots_per_day
    lam_c = {c.id: pv.curriculum[n] for n, c in enumerate(inst.curricula)}
    fam = (None, pv.professor_total, pv.room_total, pv.precedence_total, pv.different_day_total)
    total = 0
    for f, m in enumerate(maps):
        for key, v in m.items():
            weight = lam_c[key[0]] if f == 0 else fam[f]
            total += v + weight + pv.time_slot[key[-2] * nk + key[-1]]
    return total


def test_c6_penalty_update_law():
    rng = random.Random(6)
    bad = 0
    resets = bumps = 0
    for _ in range(500):
        inst = random_instance(rng, max_lectures=6, max_days=2, max_slots=5)
        pos = lambda: {l.id: random_position(rng, inst, i) for i, l in enumerate(inst.lectures)}
        a1, a2 = pos(), pos()
        S = inst.calendar.days * inst.calendar.slots_per_day
        pv = PenaltyVector(tuple(rng.randint(0, 3) for _ in inst.curricula), rng.randint(0, 3), rng.randint(0, 3),
                           rng.randint(0, 3), rng.randint(0, 3), tuple(rng.randint(0, 3) for _ in range(S)))
        m1, m2 = oracle_ledger(inst, a1), oracle_ledger(inst, a2)
        new = update_penalties(evaluate_full(inst, Schedule(a1)), evaluate_full(inst, Schedule(a2)), pv)
        if _oracle_aug(inst, m2, pv) < _oracle_aug(inst, m1, pv):
            resets += 1
            want = PenaltyVector.zeros(inst)
        else:
            bumps += 1
            f1, f2 = _features(inst, m1), _features(inst, m2)
            step = lambda lam, c, p: lam + 1 if c > 0 and c >= p else 0
            want = PenaltyVector(
                tuple(step(l, c, p) for l, c, p in zip(pv.curriculum, f2[0], f1[0])),
                step(pv.professor_total, f2[1], f1[1]), step(pv.room_total, f2[2], f1[2]),
                step(pv.precedence_total, f2[3], f1[3]), step(pv.different_day_total, f2[4], f1[4]),
                tuple(step(l, c, p) for l, c, p in zip(pv.time_slot, f2[5], f1[5])),
            )
        bad += new != want
    passed = bad == 0 and resets > 0 and bumps > 0
    record(6, passed, f"500 ledger pairs ({resets} resets, {bumps} updates), {bad} wrong")
    assert passed


# ---------------------------------------------------------------- criterion 7
def test_c7_probability_update_law():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(100):
        succ = [rng.randint(1, 50) for _ in range(6)]
        totals = [rng.choice([0, rng.randint(0, 500)]) for _ in range(5)]
        raw = [succ[0] * sum(totals) / 5] + [s * f for s, f in zip(succ[1:], totals)]
        want = [w / sum(raw) for w in raw] if sum(raw) else [1 / 6] * 6
        got = probability_weights(succ, totals)
        worst = max(worst, max(abs(g - w) for g, w in zip(got, want)))
    record(7, worst <= 1e-12, f"100 tuples, max error {worst:.1e}")
    assert worst <= 1e-12


# ---------------------------------------------------------------- criterion 8
def _disjoint_curricula_instance(rng, n_curricula):
    days, nk = 5, 10
    lectures, curricula = [], []
    for c in range(n_curricula):
        ids = []
        for x in range(rng.randint(1, 6)):
            lid = f"C{c}L{x}"
            lectures.append(Lecture(lid, rng.randint(1, 3), "room", rng.choice(["A", "B"]), 1))
            ids.append(lid)
        md = rng.randint(4, 8)
        curricula.append(Curriculum(f"C{c}", tuple(ids), md, rng.randint(3, md), period=1))
    inst = Instance(CalendarGeometry(days, nk, 1), tuple(lectures), tuple(curricula), (),
                    CampusLayout({("A", "room"): 1, ("B", "room"): 1}, {("A", "B"): 1, ("B", "A"): 1}))
    validate(inst)
    return inst


def test_c8_construction_avoids_curriculum_violations():
    rng = random.Random(8)
    inst = _disjoint_curricula_instance(rng, 50)
    sched, results = seed_initial_state(inst, [c.id for c in inst.curricula], rng_seed=8)
    led = evaluate_full(inst, sched)
    per_cur = led.curriculum_totals
    fallback = sum(r.used_fallback for r in results)
    passed = sum(per_cur) == 0 and len(sched.assignment) == len(inst.lectures)
    record(8, passed, f"50 curricula, curriculum violations {sum(per_cur)}, fallbacks {fallback}")
    assert passed


# ---------------------------------------------------------------- criterion 9
def test_c9_same_seed_same_files(tmp_path):
    inst, _ = generate_planted(IST_LIKE, 3)
    from hybridtt.model import serialise_instance

    src = tmp_path / "inst.txt"
    src.write_text(serialise_instance(inst))
    outs = []
    for run in ("a", "b"):
        d = tmp_path / run
        code = cli_main(["solve", str(src), "--seed", "11", "--rho", "20%", "--iteration-limit", "20000",
                         "--out", str(d)])
        assert code in (0, 1)
        outs.append(d)
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
               for f in ("solution.txt", "trace.csv", "ledger.txt"))
    record(9, same, "solution.txt, trace.csv and ledger.txt byte-identical" if same else "files differ")
    assert same


# --------------------------------------------------------------- criterion 10
def _infeasible_toys(count):
    rng = random.Random(10)
    toys = []
    while len(toys) < count:
        inst = random_instance(rng, max_lectures=4, max_days=2, max_slots=4)
        best = min(oracle_total(inst, a) for a in all_assignments(inst))
        if best > 0:
            toys.append((inst, best))
    return toys


def test_c10_best_found_equals_true_minimum():
    wrong = []
    for n, (inst, best) in enumerate(_infeasible_toys(20)):
        res = solve(inst, ordered_sort(inst), IncrementPolicy("none"),
                    StoppingCriteria(25, 3, 1, iteration_limit=5000), rng_seed=n)
        assert not res.feasible and res.stop_reason == "iteration_limit"
        assert evaluate_full(inst, res.schedule).grand_total == res.best_total
        if res.best_total != best:
            wrong.append(f"toy {n}: {res.best_total} vs {best}")
    record(10, not wrong, "20 toys match" if not wrong else "; ".join(wrong))
    assert not wrong
