import math
import random

import pytest

from hybridtt import Evaluator, IncrementPolicy, StoppingCriteria, fixed_increment, solve, violations_increment
from hybridtt.decompose import increment
from hybridtt.model import ordered_sort
from hybridtt.model.synth import IST_LIKE, SynthSpec, generate_planted


@pytest.fixture(scope="module")
def small():
    return generate_planted(SynthSpec(degrees=1, years=2, classes=3), 1)[0]


def _added_ids(ev):
    return {l.id for i, l in enumerate(ev.instance.lectures) if ev.is_added(i)}


def _union(inst, cids):
    return {x for c in cids for x in inst.curriculum(c).lectures}


def test_whole_instance_in_one_call(small):
    ev = Evaluator(small)
    order = ordered_sort(small)
    step = fixed_increment(ev, order, 0, len(order), random.Random(0))
    assert step.cursor == len(order) and step.added == order
    assert _added_ids(ev) == {l.id for l in small.lectures}


def test_rho_one_steps_through(small):
    ev = Evaluator(small)
    order = ordered_sort(small)[:3]
    rng = random.Random(0)
    cursors = []
    cursor = 0
    while cursor < len(order):
        step = fixed_increment(ev, order, cursor, 1, rng)
        cursor = step.cursor
        cursors.append(cursor)
        assert _added_ids(ev) == _union(small, order[:cursor])
    assert cursors == [1, 2, 3]


def test_ist_style_increments_of_eighty():
    inst, _ = generate_planted(IST_LIKE, 0)
    ev = Evaluator(inst)
    order = ordered_sort(inst)
    sizes = []
    cursor = 0
    rng = random.Random(0)
    while cursor < len(order):
        step = fixed_increment(ev, order, cursor, 80, rng)
        sizes.append(len(step.added))
        cursor = step.cursor
    assert sizes == [80, 80, len(order) - 160]


def test_increments_never_move_added_lectures(small):
    ev = Evaluator(small)
    order = ordered_sort(small)
    rng = random.Random(4)
    cursor = 0
    while cursor < len(order):
        before = {i: ev.position(i) for i in range(len(small.lectures)) if ev.is_added(i)}
        cursor = fixed_increment(ev, order, cursor, 2, rng).cursor
        assert all(ev.position(i) == pos for i, pos in before.items())


def test_violation_threshold_boundaries(small):
    order = ordered_sort(small)
    ev = Evaluator(small)
    step = violations_increment(ev, order, 0, 0, random.Random(0))
    assert step.added == order[:1]
    ev = Evaluator(small)
    step = violations_increment(ev, order, 0, math.inf, random.Random(0))
    assert step.added == order and step.cursor == len(order)


def test_violation_increment_stops_at_threshold(small):
    order = ordered_sort(small)
    ev = Evaluator(small)
    step = violations_increment(ev, order, 0, 3, random.Random(2))
    assert ev.grand >= 3 or step.cursor == len(order)
    if len(step.added) > 1:
        probe = Evaluator(small)
        fixed_increment(probe, order, 0, len(step.added) - 1, random.Random(2))
        assert probe.grand < 3


def test_policy_validation():
    with pytest.raises(ValueError):
        IncrementPolicy("fixed").check()
    with pytest.raises(ValueError):
        IncrementPolicy("fixed", rho=0).check()
    with pytest.raises(ValueError):
        IncrementPolicy("fixed", rho_fraction=1.5).check()
    with pytest.raises(ValueError):
        IncrementPolicy("violations_based").check()
    with pytest.raises(ValueError):
        IncrementPolicy("halves").check()
    assert IncrementPolicy("fixed", rho_fraction=0.2).resolve_rho(401) == 81
    assert IncrementPolicy("fixed", rho_fraction=0.5).resolve_rho(14) == 7
    assert IncrementPolicy("none").resolve_rho(9) == 9


def test_rho_equal_to_size_is_the_baseline(small):
    order = ordered_sort(small)
    crit = StoppingCriteria(25, 3, 1, iteration_limit=3000)
    a = solve(small, order, IncrementPolicy("none"), crit, rng_seed=5)
    b = solve(small, order, IncrementPolicy("fixed", rho=len(order)), crit, rng_seed=5)
    assert a.trace == b.trace and a.schedule == b.schedule


def test_dispatch_by_policy(small):
    order = ordered_sort(small)
    ev = Evaluator(small)
    step = increment(ev, IncrementPolicy("fixed", rho=2), order, 0, random.Random(0))
    assert step.cursor == 2
    step = increment(ev, IncrementPolicy("violations_based", max_violations=0), order, 2, random.Random(0))
    assert step.cursor == 3
    with pytest.raises(ValueError):
        fixed_increment(ev, order, len(order), 1, random.Random(0))
