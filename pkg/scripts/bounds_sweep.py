"""Griewank bounds sweep: one repetition per box, full iteration budget.

Each repetition keeps up to 10,000 solutions alive, so expect roughly
20 minutes per box on one core.

    python scripts/bounds_sweep.py --boxes 5 20 --seed 0
"""

import argparse
import time

from linediv.engine import Config, run
from linediv.objective import Bounds, make_benchmark


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--boxes", type=float, nargs="+", default=[5.0, 10.0, 20.0], help="half-widths of [-w, w]^2")
    ap.add_argument("--sigma", type=float, default=0.1)
    ap.add_argument("--iterations", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for w in args.boxes:
        spec = make_benchmark("griewank", 2, Bounds.box(-w, w, 2))
        t0 = time.time()
        r = run(Config(sigma=args.sigma, iterations=args.iterations, seed=args.seed), spec)
        best = min(r.final_P + r.final_LP, key=lambda s: s.value)
        print(f"box=[-{w:g},{w:g}]^2 seed={args.seed} P={len(r.final_P)} LP={len(r.final_LP)} "
              f"distinct_optima={r.distinct_optima} global_found={r.global_found} "
              f"best={best.point.tolist()} f={best.value:.3g} secs={time.time() - t0:.0f}", flush=True)


if __name__ == "__main__":
    main()
