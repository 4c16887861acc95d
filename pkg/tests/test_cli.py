import csv
import io
import json
import random

import pytest

from helpers import random_instance, random_position
from oracle import oracle_total
from hybridtt.cli import BENCH_COLUMNS, bench_csv, bench_rows, expand_matrix, main
from hybridtt.evaluator import Schedule, evaluate_full
from hybridtt.model import adapt_itc2007, parse_instance, serialise_instance
from hybridtt.model.synth import SynthSpec, generate_planted

TOY_CTT = """Name: Toy
Courses: 3
Rooms: 2
Days: 3
Periods_per_day: 4
Curricula: 2
Constraints: 1

COURSES:
c1 t1 2 3 20
c2 t2 2 2 20
c3 t1 1 1 20

ROOMS:
rA 30
rB 30

CURRICULA:
q1 2 c1 c2
q2 2 c2 c3

UNAVAILABILITY_CONSTRAINTS:
c1 0 0

END.
"""


@pytest.fixture
def tiny(tmp_path):
    inst, plant = generate_planted(SynthSpec(degrees=1, years=1, classes=2), 3)
    path = tmp_path / "tiny.txt"
    path.write_text(serialise_instance(inst))
    return path, inst, plant


def test_solve_writes_outputs(tiny, tmp_path):
    path, inst, _ = tiny
    out = tmp_path / "run"
    code = main(["solve", str(path), "--seed", "2", "--iteration-limit", "5000", "--out", str(out)])
    assert code == 0
    for name in ("solution.txt", "ledger.txt", "trace.csv", "report.json"):
        assert (out / name).exists()
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["seed"] == 2 and report["result"]["feasible"]
    sched = Schedule.from_text((out / "solution.txt").read_text())
    assert evaluate_full(inst, sched).grand_total == 0
    assert main(["check", str(path), str(out / "solution.txt")]) == 0


def test_solve_competition_file_records_policy(tmp_path):
    ctt = tmp_path / "toy.ctt"
    ctt.write_text(TOY_CTT)
    out = tmp_path / "run"
    main(["solve", str(ctt), "--iteration-limit", "2000", "--out", str(out)])
    cfg = json.loads((out / "report.json").read_text())["config"]
    assert cfg["format"] == "ctt"
    assert cfg["adaptation_policy"] is not None and len(cfg["adaptation_policy_hash"]) > 8


def test_missing_instance_is_an_error(tmp_path, capsys):
    out = tmp_path / "never"
    assert main(["solve", str(tmp_path / "nope.txt"), "--out", str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_bad_rho_is_an_error(tiny, tmp_path):
    path, _, _ = tiny
    assert main(["solve", str(path), "--rho", "lots", "--out", str(tmp_path / "o")]) == 2


def test_check_flags_a_clash(tiny, tmp_path, capsys):
    path, inst, plant = tiny
    cur = inst.curricula[0]
    a, b = cur.lectures[:2]
    bad = dict(plant)
    bad[b] = bad[a]
    sol = tmp_path / "bad.txt"
    sol.write_text(Schedule(bad).to_text(inst))
    assert main(["check", str(path), str(sol)]) == 1
    text = capsys.readouterr().out
    fam = {line.split()[1]: int(line.split()[2]) for line in text.splitlines() if line.startswith("family")}
    assert fam["curriculum"] >= 1


def test_check_reports_unassigned(tiny, tmp_path, capsys):
    path, inst, plant = tiny
    part = dict(plant)
    part.pop(inst.lectures[0].id)
    sol = tmp_path / "part.txt"
    sol.write_text(Schedule(part).to_text(inst))
    assert main(["check", str(path), str(sol)]) == 1
    assert "unassigned 1" in capsys.readouterr().out


def test_check_totals_match_the_oracle(tmp_path, capsys):
    rng = random.Random(12)
    for n in range(15):
        inst = random_instance(rng, max_lectures=5)
        path = tmp_path / f"i{n}.txt"
        path.write_text(serialise_instance(inst))
        assign = {l.id: random_position(rng, inst, i) for i, l in enumerate(inst.lectures)}
        sol = tmp_path / f"s{n}.txt"
        sol.write_text(Schedule(assign).to_text(inst))
        capsys.readouterr()
        code = main(["check", str(path), str(sol)])
        first = capsys.readouterr().out.splitlines()[0]
        want = oracle_total(inst, assign)
        assert first == f"grand_total {want}"
        assert code == (0 if want == 0 else 1)


def test_expand_matrix_products():
    m = {"defaults": {"instance": "x", "seeds": [0, 1]},
         "runs": [{"s1": [25, 50], "s2": [1, 3, 5]}, {"rho": "20%"}]}
    runs = expand_matrix(m)
    assert len(runs) == 2 * 3 * 2 + 2
    assert {(r["s1"], r["s2"], r["seed"]) for r in runs[:12]} == {
        (a, b, c) for a in (25, 50) for b in (1, 3, 5) for c in (0, 1)}


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bench_seeds_and_mean_row(tiny, tmp_path):
    path, _, _ = tiny
    matrix = tmp_path / "m.json"
    matrix.write_text(json.dumps({"runs": [{"instance": path.name, "seeds": [0, 1, 2],
                                            "iteration_limit": 2000}]}))
    out = tmp_path / "b"
    assert main(["bench", str(matrix), "--out", str(out)]) == 0
    rows = _rows((out / "bench.csv").read_text())
    assert [r["row"] for r in rows] == ["run"] * 3 + ["mean"]
    assert list(rows[0]) == list(BENCH_COLUMNS)
    assert rows[-1]["runs"] == "3"


@pytest.mark.slow
def test_bench_parameter_sweep(tiny):
    path, _, _ = tiny
    runs = expand_matrix({"runs": [{"instance": str(path), "s1": [25, 50, 75], "s2": [1, 3, 5],
                                    "s3": [1, 3, 5], "iteration_limit": 300}]})
    rows = bench_rows(runs)
    means = [r for r in rows if r["row"] == "mean"]
    assert len(means) == 27
    assert len({(r["s1"], r["s2"], r["s3"]) for r in means}) == 27


def test_bench_rho_rows_are_sorted(tiny):
    path, _, _ = tiny
    runs = expand_matrix({"runs": [{"instance": str(path), "rho": ["50%", "5", "10%", "2"],
                                    "iteration_limit": 200}]})
    rows = [r for r in bench_rows(runs) if r["row"] == "run"]
    assert [r["increment_value"] for r in rows] == ["2", "5", "10%", "50%"]


def test_bench_errors_stay_in_their_row(tiny, tmp_path):
    path, _, _ = tiny
    runs = expand_matrix({"runs": [{"instance": [str(path), str(tmp_path / "gone.txt")],
                                    "iteration_limit": 200}]})
    rows = bench_rows(runs)
    bad = [r for r in rows if r["row"] == "run" and r["error"]]
    good = [r for r in rows if r["row"] == "run" and not r["error"]]
    assert len(bad) == 1 and len(good) == 1
    assert "gone.txt" in bad[0]["instance"]
    assert bench_csv(rows).count("\n") == 1 + 4


def test_convert_reparses(tmp_path):
    ctt = tmp_path / "toy.ctt"
    ctt.write_text(TOY_CTT)
    out = tmp_path / "toy.txt"
    assert main(["convert", str(ctt), "-o", str(out)]) == 0
    assert parse_instance(out.read_text()) == adapt_itc2007(TOY_CTT)


def test_subdivide_is_reproducible(tmp_path):
    inst, _ = generate_planted(SynthSpec(degrees=2, years=2, classes=3), 1)
    src = tmp_path / "full.txt"
    src.write_text(serialise_instance(inst))
    outs = []
    for seed, name in ((4, "a"), (4, "b"), (5, "c")):
        o = tmp_path / f"{name}.txt"
        assert main(["subdivide", str(src), "--classes", "4", "--seed", str(seed), "-o", str(o)]) == 0
        outs.append(o.read_text())
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]
    assert main(["subdivide", str(src), "--classes", "4", "--rooms", "nonsense", "-o", str(tmp_path / "x")]) == 2


@pytest.mark.parametrize("extra", [["--preset", "small"], ["--preset", "ctt", "--shape", "3"]])
def test_generate_plants_a_feasible_timetable(tmp_path, extra):
    inst_path, sol = tmp_path / "g.txt", tmp_path / "plant.txt"
    assert main(["generate", *extra, "--seed", "1", "-o", str(inst_path), "--planted", str(sol)]) == 0
    assert main(["check", str(inst_path), str(sol)]) == 0


def test_generate_rejects_unknown_shape(tmp_path):
    assert main(["generate", "--preset", "ctt", "--shape", "99", "-o", str(tmp_path / "g")]) == 2


def test_output_directory_from_environment(tiny, tmp_path, monkeypatch):
    path, _, _ = tiny
    target = tmp_path / "envout"
    monkeypatch.setenv("HYBRIDTT_OUT", str(target))
    main(["solve", str(path), "--iteration-limit", "500"])
    assert (target / "solution.txt").exists()
