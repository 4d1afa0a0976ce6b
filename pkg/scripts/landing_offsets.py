"""How close do line-distance maximizers land to the basin bottom?

Shoots rays from points near many Rastrigin (or Griewank) minima, keeps the
candidates that land in the basin of the global optimum and reports their
distance to the origin and their gradient norm.  The verification step
accepts a point only when the gradient norm is below 1e-2.

    python scripts/landing_offsets.py --function rastrigin --rays 200000
"""

import argparse

import numpy as np

from linediv.geometry import sample_directions
from linediv.linesearch import LineSearchParams, maximize_ld_batch
from linediv.objective import make_benchmark
from linediv.verify import fd_gradient


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--function", default="rastrigin", choices=["rastrigin", "griewank"])
    ap.add_argument("--rays", type=int, default=200_000)
    ap.add_argument("--basin", type=float, default=0.4, help="radius around the origin counted as its basin")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = make_benchmark(args.function, 2)
    rng = np.random.default_rng(args.seed)
    b = spec.bounds
    X = rng.uniform(b.lower, b.upper, size=(args.rays, 2))
    if args.function == "rastrigin":
        X = np.clip(np.round(X), b.lower, b.upper) * 0.995  # near lattice minima
    fX = spec.evaluate_batch(X)
    D = sample_directions(rng, args.rays, 2)
    res = maximize_ld_batch(X, fX, D, spec, LineSearchParams())
    pts = res.points[res.room]
    near = pts[np.linalg.norm(pts, axis=1) < args.basin]
    dist = np.linalg.norm(near, axis=1)
    checker = spec.fresh()
    grads = np.array([np.linalg.norm(fd_gradient(p, checker, 1e-6)) for p in near])
    print(f"{args.function}: {near.shape[0]} of {args.rays} candidates landed within {args.basin} of the origin")
    if near.shape[0]:
        q = [0, 0.001, 0.01, 0.1, 0.5]
        print("  distance to origin, quantiles", dict(zip(q, np.quantile(dist, q).round(6))))
        print("  gradient norm,      quantiles", dict(zip(q, np.quantile(grads, q).round(6))))
        print(f"  within 1e-2 of origin: {(dist < 1e-2).sum()}   gradient < 1e-2: {(grads < 1e-2).sum()}")


if __name__ == "__main__":
    main()
