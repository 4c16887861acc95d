import importlib
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_instance, random_position
from hybridtt import kernel as kernel_mod
from hybridtt.kernel import BACKENDS, default_backend, kernel_for

needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernel not built")


def _state(k):
    a = {key: [int(x) for x in v] for key, v in k.arrays().items()}
    return a, int(k.grand), int(k.aug), tuple(int(x) for x in k.family_totals())


def _queries(k, inst):
    nk = inst.calendar.n_slots
    out = [tuple(k.argmax_entities(kind)) for kind in range(4)]
    for kind, n in ((0, len(inst.curricula)), (1, len(inst.professors))):
        out += [tuple(k.row_argmax(kind, e)) for e in range(n)]
    out += [tuple(k.covering(3, 0, -1, t)) for t in range(nk)]
    out += [tuple(k.violators(f)) for f in (3, 4)]
    return out


def _random_penalties(rng, inst, k):
    S = inst.calendar.n_slots
    return ([rng.randint(0, 3) for _ in inst.curricula], rng.randint(0, 3), rng.randint(0, 3),
            rng.randint(0, 3), rng.randint(0, 3), [rng.randint(0, 3) for _ in range(S)])


@needs_ext
@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_backends_agree_move_by_move(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, max_lectures=8, max_days=3, max_slots=6)
    py, cy = kernel_for(inst, "python"), kernel_for(inst, "cython")
    lam = _random_penalties(rng, inst, py)
    py.set_penalties(*lam)
    cy.set_penalties(*lam)
    n = len(inst.lectures)
    for _ in range(60):
        r = rng.random()
        if r < 0.15:
            i = rng.randrange(n)
            op = ("place", i, -1, -1)
        elif r < 0.45 and n > 1:
            a, b = rng.sample(range(n), 2)
            if py.position(a)[0] < 0 or py.position(b)[0] < 0:
                continue
            nk = inst.calendar.slots_per_day
            if (py.position(b)[1] + inst.lectures[a].duration > nk
                    or py.position(a)[1] + inst.lectures[b].duration > nk):
                continue
            op = ("swap", a, b)
        else:
            i = rng.randrange(n)
            op = ("place", i, *random_position(rng, inst, i))
        for k in (py, cy):
            getattr(k, op[0])(*op[1:])
        assert _state(py) == _state(cy)
        assert _queries(py, inst) == _queries(cy, inst)
    fresh = kernel_for(inst, "python")
    fresh.load(py.arrays()["day"], py.arrays()["start"])
    fresh.set_penalties(*lam)
    assert _state(fresh) == _state(py)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_clone_is_independent(backend):
    rng = random.Random(7)
    inst = random_instance(rng, max_lectures=6, max_days=2, max_slots=6)
    k = kernel_for(inst, backend)
    for i in range(len(inst.lectures)):
        k.place(i, *random_position(rng, inst, i))
    before = _state(k)
    c = k.clone()
    assert _state(c) == before
    for i in range(len(inst.lectures)):
        c.place(i, *random_position(rng, inst, i))
    c.set_penalties(*_random_penalties(rng, inst, c))
    assert _state(k) == before


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_load_copies_its_input(backend):
    rng = random.Random(8)
    inst = random_instance(rng, max_lectures=4)
    day = [0] * len(inst.lectures)
    start = [0] * len(inst.lectures)
    k = kernel_for(inst, backend)
    k.load(day, start)
    before = _state(k)
    day[0] = -1
    assert _state(k) == before


def test_environment_selects_backend(monkeypatch):
    monkeypatch.setenv("HYBRIDTT_BACKEND", "python")
    assert default_backend() == "python"
    monkeypatch.setenv("HYBRIDTT_BACKEND", "fortran")
    with pytest.raises(RuntimeError):
        default_backend()
    monkeypatch.delenv("HYBRIDTT_BACKEND")
    assert default_backend() == ("cython" if "cython" in BACKENDS else "python")


def test_python_fallback_when_extension_missing(monkeypatch):
    import builtins

    real_import = builtins.__import__

    def fake(name, globals=None, locals=None, fromlist=(), level=0):
        if fromlist and "_kernel" in fromlist:
            raise ImportError("pretend the extension is absent")
        return real_import(name, globals, locals, fromlist, level)

    monkeypatch.setattr(builtins, "__import__", fake)
    try:
        reloaded = importlib.reload(kernel_mod)
        assert list(reloaded.BACKENDS) == ["python"]
        assert reloaded.default_backend() == "python"
    finally:
        monkeypatch.setattr(builtins, "__import__", real_import)
        importlib.reload(kernel_mod)
