"""Command line: solve, check, bench, convert, subdivide, generate.

Exit codes: 0 feasible, 1 infeasible when a cap fired, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .decompose import IncrementPolicy
from .evaluator import Schedule, ScheduleError, evaluate_full
from .kernel import default_backend
from .model import (
    AdaptationPolicy, InstanceError, ParseError, adapt_itc2007, curricula_order, generate_subdivision,
    two_campus_room_scaling, parse_instance, serialise_instance,
)
from .model.itc2007 import CTTFormatError, PolicyError
from .search import StoppingCriteria, solve, trace_csv

log = logging.getLogger("hybridtt")

OUT_ENV = "HYBRIDTT_OUT"
EXIT_FEASIBLE, EXIT_INFEASIBLE, EXIT_ERROR = 0, 1, 2
DEFAULT_RHO = "50%"

BENCH_COLUMNS = ("row", "instance", "order", "s1", "s2", "s3", "increment", "increment_value", "seed",
                 "feasible", "iterations", "grand_total", "wall_time", "runs", "error")


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ loading
def _looks_ctt(path: str, text: str) -> bool:
    if path.lower().endswith(".ctt"):
        return True
    head = text.lstrip().split("\n", 1)[0]
    return head.startswith("Name:")


def load_policy(path: Optional[str]) -> AdaptationPolicy:
    if not path:
        return AdaptationPolicy()
    return AdaptationPolicy.from_json(Path(path).read_text())


def load_instance(path: str, policy: AdaptationPolicy, fmt: str = "auto"):
    text = Path(path).read_text()
    if fmt == "ctt" or (fmt == "auto" and _looks_ctt(path, text)):
        return adapt_itc2007(text, policy), "ctt"
    return parse_instance(text), "extended"


def parse_increment(args) -> IncrementPolicy:
    if args.no_decomposition:
        pol = IncrementPolicy("none")
    elif args.max_violations is not None:
        pol = IncrementPolicy("violations_based", max_violations=args.max_violations)
    else:
        pol = rho_policy(args.rho or DEFAULT_RHO)
    pol.check()
    return pol


def rho_policy(value) -> IncrementPolicy:
    text = str(value).strip()
    try:
        if text.endswith("%"):
            return IncrementPolicy("fixed", rho_fraction=float(text[:-1]) / 100)
        return IncrementPolicy("fixed", rho=int(text))
    except ValueError:
        raise UsageError(f"bad rho {value!r}: use a count or a percentage like 20%") from None


def out_dir(arg: Optional[str]) -> Path:
    return Path(arg or os.environ.get(OUT_ENV) or "hybridtt-out")


def _write_all(directory: Path, files: Dict[str, str]) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, body in files.items():
        tmp = directory / (name + ".tmp")
        tmp.write_text(body)
        os.replace(tmp, directory / name)


# -------------------------------------------------------------------- solve
def run_config(instance_path: str, *, policy_path=None, order="ordered", s1=25, s2=3, s3=1,
               increment: IncrementPolicy = None, seed=0, iteration_limit=None, time_limit=None,
               s1_mode="fixed", backend=None, fmt="auto"):
    policy = load_policy(policy_path)
    inst, kind = load_instance(instance_path, policy, fmt)
    increment = increment or rho_policy(DEFAULT_RHO)
    criteria = StoppingCriteria(s1, s2, s3, iteration_limit, time_limit, s1_mode)
    seq = curricula_order(inst, order, seed)
    res = solve(inst, seq, increment, criteria, seed, backend)
    config = {
        "instance": str(instance_path),
        "instance_name": inst.name,
        "format": kind,
        "adaptation_policy": json.loads(policy.to_json()) if kind == "ctt" else None,
        "adaptation_policy_hash": policy.digest() if kind == "ctt" else None,
        "order": order,
        "increment": increment.describe(),
        "criteria": {"s1": s1, "s2": s2, "s3": s3, "s1_mode": s1_mode,
                     "iteration_limit": iteration_limit, "time_limit": time_limit},
        "seed": seed,
        "backend": backend or default_backend(),
        "version": __version__,
    }
    return inst, res, config


def cmd_solve(args) -> int:
    increment = parse_increment(args)
    inst, res, config = run_config(
        args.instance, policy_path=args.policy, order=args.order, s1=args.s1, s2=args.s2, s3=args.s3,
        increment=increment, seed=args.seed, iteration_limit=args.iteration_limit,
        time_limit=args.time_limit, s1_mode=args.s1_mode, backend=args.backend, fmt=args.format,
    )
    report = {
        "config": config,
        "result": {
            "feasible": res.feasible, "grand_total": res.grand_total,
            "group_totals": res.ledger.group_totals, "iterations": res.iterations, "phases": res.phases,
            "shakes": res.shakes, "increments": res.increments, "stop_reason": res.stop_reason,
            "fallback_lectures": res.fallback_lectures, "wall_time": round(res.elapsed, 6),
        },
    }
    d = out_dir(args.out)
    _write_all(d, {
        "solution.txt": res.schedule.to_text(inst),
        "ledger.txt": res.ledger.report(),
        "trace.csv": trace_csv(res.trace),
        "report.json": json.dumps(report, indent=2, sort_keys=True) + "\n",
    })
    status = "feasible" if res.feasible else f"infeasible ({res.stop_reason})"
    print(f"{inst.name or args.instance}: {status}, f={res.grand_total}, iterations={res.iterations}, "
          f"{res.elapsed:.2f}s -> {d}")
    return EXIT_FEASIBLE if res.feasible else EXIT_INFEASIBLE


def cmd_check(args) -> int:
    inst, _ = load_instance(args.instance, load_policy(args.policy), args.format)
    sched = Schedule.from_text(Path(args.solution).read_text())
    ledger = evaluate_full(inst, sched)
    missing = [l.id for l in inst.lectures if l.id not in sched.assignment]
    sys.stdout.write(ledger.report(args.top))
    if missing:
        print(f"unassigned {len(missing)}")
    return EXIT_FEASIBLE if ledger.grand_total == 0 and not missing else EXIT_INFEASIBLE


# -------------------------------------------------------------------- bench
_GRID_KEYS = ("instance", "order", "s1", "s2", "s3", "rho", "max_violations", "seed")


def expand_matrix(matrix: dict) -> List[dict]:
    """Every run of a bench matrix; list values in a config expand as a product."""
    defaults = dict(matrix.get("defaults", {}))
    runs = []
    for cfg in matrix.get("runs", []):
        cfg = {**defaults, **cfg}
        seeds = cfg.pop("seeds", None)
        if seeds is not None:
            cfg["seed"] = list(seeds)
        keys = [k for k in _GRID_KEYS if isinstance(cfg.get(k), list)]
        for combo in itertools.product(*(cfg[k] for k in keys)):
            run = dict(cfg)
            run.update(zip(keys, combo))
            runs.append(run)
    return runs


def _increment_of(run: dict):
    if run.get("no_decomposition"):
        return IncrementPolicy("none"), "none", ""
    if run.get("max_violations") is not None:
        v = run["max_violations"]
        return IncrementPolicy("violations_based", max_violations=v), "violations_based", str(v)
    rho = run.get("rho", DEFAULT_RHO)
    return rho_policy(rho), "fixed", str(rho)


def _bench_one(run: dict) -> dict:
    inc, kind, value = _increment_of(run)
    row = {
        "row": "run", "instance": run["instance"], "order": run.get("order", "ordered"),
        "s1": run.get("s1", 25), "s2": run.get("s2", 3), "s3": run.get("s3", 1),
        "increment": kind, "increment_value": value, "seed": run.get("seed", 0),
        "feasible": "", "iterations": "", "grand_total": "", "wall_time": "", "runs": 1, "error": "",
    }
    try:
        t = time.perf_counter()
        _inst, res, _cfg = run_config(
            run["instance"], policy_path=run.get("policy"), order=row["order"], s1=row["s1"], s2=row["s2"],
            s3=row["s3"], increment=inc, seed=row["seed"], iteration_limit=run.get("iteration_limit"),
            time_limit=run.get("time_limit"), s1_mode=run.get("s1_mode", "fixed"), backend=run.get("backend"),
        )
        row.update(feasible=int(res.feasible), iterations=res.iterations, grand_total=res.grand_total,
                   wall_time=f"{time.perf_counter() - t:.4f}")
    except Exception as exc:  # recorded per row; the matrix keeps going
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _value_key(v: str):
    if v == "":
        return (0, 0.0, "")
    try:
        return (1, float(v.rstrip("%")), v)
    except ValueError:
        return (2, 0.0, v)


def _combo(row):
    return (row["instance"], row["order"], row["s1"], row["s2"], row["s3"], row["increment"], row["increment_value"])


def _sort_key(row):
    inst, order, s1, s2, s3, kind, value = _combo(row)
    return (inst, order, s1, s2, s3, kind, _value_key(value))


def bench_rows(runs: List[dict], jobs: int = 1) -> List[dict]:
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_bench_one, runs))
    else:
        rows = [_bench_one(r) for r in runs]
    rows.sort(key=lambda r: (_sort_key(r), r["seed"]))
    groups: Dict[tuple, List[dict]] = {}
    for r in rows:
        groups.setdefault(_combo(r), []).append(r)
    aggregates = []
    for key in sorted(groups, key=lambda k: _sort_key(dict(zip(
            ("instance", "order", "s1", "s2", "s3", "increment", "increment_value"), k)))):
        ok = [r for r in groups[key] if not r["error"]]
        agg = dict(zip(("instance", "order", "s1", "s2", "s3", "increment", "increment_value"), key))
        agg.update(row="mean", seed="", runs=len(groups[key]),
                   error=f"{len(groups[key]) - len(ok)} failed" if len(ok) < len(groups[key]) else "")
        if ok:
            agg["feasible"] = f"{statistics.mean(r['feasible'] for r in ok):.4f}"
            agg["iterations"] = f"{statistics.mean(r['iterations'] for r in ok):.2f}"
            agg["grand_total"] = f"{statistics.mean(r['grand_total'] for r in ok):.2f}"
            agg["wall_time"] = f"{statistics.mean(float(r['wall_time']) for r in ok):.4f}"
        else:
            agg.update(feasible="", iterations="", grand_total="", wall_time="")
        aggregates.append(agg)
    return rows + aggregates


def bench_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in BENCH_COLUMNS})
    return buf.getvalue()


def cmd_bench(args) -> int:
    matrix = json.loads(Path(args.matrix).read_text())
    base = Path(args.matrix).parent
    runs = expand_matrix(matrix)
    for r in runs:
        if not Path(r["instance"]).is_absolute() and not Path(r["instance"]).exists():
            r["instance"] = str(base / r["instance"])
    rows = bench_rows(runs, args.jobs)
    d = out_dir(args.out)
    _write_all(d, {"bench.csv": bench_csv(rows)})
    failed = sum(1 for r in rows if r["row"] == "run" and r["error"])
    print(f"{len(runs)} runs, {failed} failed -> {d / 'bench.csv'}")
    return EXIT_FEASIBLE


# ------------------------------------------------------------ conversions
def cmd_convert(args) -> int:
    inst = adapt_itc2007(Path(args.ctt).read_text(), load_policy(args.policy))
    _emit(args.output, serialise_instance(inst))
    return EXIT_FEASIBLE


def cmd_subdivide(args) -> int:
    inst, _ = load_instance(args.instance, AdaptationPolicy(), "auto")
    scaling = None
    if args.two_campus_rooms:
        scaling = two_campus_room_scaling(inst)
    elif args.rooms:
        scaling = {}
        for item in args.rooms:
            campus, _, n = item.partition("=")
            try:
                scaling[campus] = int(n)
            except ValueError:
                raise UsageError(f"--rooms expects CAMPUS=COUNT, got {item!r}") from None
    sub = generate_subdivision(inst, args.classes, scaling, args.seed)
    _emit(args.output, serialise_instance(sub))
    return EXIT_FEASIBLE


def cmd_generate(args) -> int:
    from .model.itc2007 import write_ctt
    from .model.synth import CTT_SHAPES, IST_LIKE, SynthSpec, generate_ctt, generate_planted

    if args.preset == "ctt":
        if not 1 <= args.shape <= len(CTT_SHAPES):
            raise UsageError(f"--shape must lie in 1..{len(CTT_SHAPES)}")
        doc, plant = generate_ctt(CTT_SHAPES[args.shape - 1], args.seed, f"synthetic{args.shape:02d}")
        _emit(args.output, write_ctt(doc))
        if args.planted:
            Path(args.planted).write_text(Schedule(dict(plant)).to_text())
        return EXIT_FEASIBLE
    spec = IST_LIKE if args.preset == "ist_like" else SynthSpec()
    inst, plant = generate_planted(spec, args.seed)
    _emit(args.output, serialise_instance(inst))
    if args.planted:
        Path(args.planted).write_text(Schedule(dict(plant)).to_text(inst))
    return EXIT_FEASIBLE


def _emit(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ----------------------------------------------------------------- parser
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridtt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def instance_opts(sp):
        sp.add_argument("--policy", help="adaptation policy JSON for competition files")
        sp.add_argument("--format", choices=("auto", "extended", "ctt"), default="auto")

    s = sub.add_parser("solve", help="search for a feasible timetable")
    s.add_argument("instance")
    instance_opts(s)
    s.add_argument("--order", choices=("ordered", "random"), default="ordered")
    s.add_argument("--s1", type=int, default=25, help="search iterations per phase")
    s.add_argument("--s2", type=int, default=3, help="stagnant phases before a shake")
    s.add_argument("--s3", type=int, default=1, help="moves per shake")
    s.add_argument("--s1-mode", choices=("fixed", "non_improving"), default="fixed")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--rho", help=f"curricula per increment, a count or a percentage (default {DEFAULT_RHO})")
    g.add_argument("--max-violations", type=int, help="grow increments until this many violations")
    g.add_argument("--no-decomposition", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iteration-limit", type=int)
    s.add_argument("--time-limit", type=float, metavar="SECONDS")
    s.add_argument("--backend", choices=("python", "cython"))
    s.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./hybridtt-out)")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="count the violations of a solution file")
    c.add_argument("instance")
    c.add_argument("solution")
    instance_opts(c)
    c.add_argument("--top", type=int, default=10)
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", help="run a JSON matrix of configurations and seeds")
    b.add_argument("matrix")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("convert", help="competition file to the extended format")
    v.add_argument("ctt")
    v.add_argument("-o", "--output")
    v.add_argument("--policy")
    v.set_defaults(func=cmd_convert)

    d = sub.add_parser("subdivide", help="random subset of classes")
    d.add_argument("instance")
    d.add_argument("--classes", type=int, required=True)
    d.add_argument("--seed", type=int, default=0)
    rg = d.add_mutually_exclusive_group()
    rg.add_argument("--rooms", nargs="+", metavar="CAMPUS=COUNT")
    rg.add_argument("--two-campus-rooms", action="store_true", help="142 and 29 rooms, campi in name order")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_subdivide)

    n = sub.add_parser("generate", help="synthetic instance with a planted feasible timetable")
    n.add_argument("--preset", choices=("ist_like", "small", "ctt"), default="ist_like",
                   help="ctt: competition-layout file sized like one of the twenty published ones")
    n.add_argument("--shape", type=int, default=1, help="which competition size to mimic (1-20)")
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("-o", "--output")
    n.add_argument("--planted", help="also write the planted solution here")
    n.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (OSError, ParseError, CTTFormatError, PolicyError, InstanceError, ScheduleError, UsageError,
            json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"hybridtt: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
