"""Moves per second of the compiled and pure-Python kernels on the same move stream.

    python3 benchmarks/bench_kernel.py [--moves N] [--seed S]
"""

import argparse
import random
import time

from hybridtt.kernel import BACKENDS, kernel_for
from hybridtt.model.synth import IST_LIKE, generate_planted


def move_stream(inst, n, seed):
    rng = random.Random(seed)
    nd, nk = inst.calendar.days, inst.calendar.slots_per_day
    out = []
    for _ in range(n):
        i = rng.randrange(len(inst.lectures))
        out.append((i, rng.randrange(nd), rng.randrange(nk - inst.lectures[i].duration + 1)))
    return out


def run(backend, inst, plant_day, plant_start, moves):
    k = kernel_for(inst, backend)
    k.load(plant_day, plant_start)
    t = time.perf_counter()
    for i, d, s in moves:
        k.place(i, d, s)
    elapsed = time.perf_counter() - t
    return elapsed, int(k.grand)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--moves", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    inst, plant = generate_planted(IST_LIKE, args.seed)
    day = [plant[l.id][0] for l in inst.lectures]
    start = [plant[l.id][1] for l in inst.lectures]
    moves = move_stream(inst, args.moves, args.seed)
    print(f"instance: {len(inst.lectures)} lectures, {len(inst.curricula)} curricula; {args.moves} moves")
    results, totals = {}, set()
    for backend in sorted(BACKENDS):
        elapsed, grand = run(backend, inst, day, start, moves)
        results[backend] = elapsed
        totals.add(grand)
        print(f"{backend:8s} {args.moves / elapsed:12.0f} moves/s  final total {grand}")
    if len(totals) != 1:
        raise SystemExit("kernels disagree on the final total")
    if len(results) == 2:
        print(f"speed-up {results['python'] / results['cython']:.1f}x")


if __name__ == "__main__":
    main()
