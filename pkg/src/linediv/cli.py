"""Command-line experiment driver.

    python -m linediv --function rastrigin --sigma 0.9 --repetitions 10 --output out/ --plot

Writes ``solutions.csv``, ``summary.json`` and optionally one
``plot_rep<k>.svg`` per repetition into the output directory.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import statistics
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from linediv.engine import Config, RunReport, run
from linediv.linesearch import LineSearchParams
from linediv.objective import BENCHMARK_NAMES, Bounds, ObjectiveSpec, make_benchmark
from linediv.verify import VerifyParams

log = logging.getLogger("linediv")

DEFAULT_SIGMA = {"rastrigin": 0.9, "griewank": 0.1}


@dataclass(frozen=True)
class ExperimentConfig:
    function: str
    output_dir: Path
    dim: int = 2
    m: int = 10
    sigma: float = 0.9
    iterations: int = 1000
    repetitions: int = 10
    seed: int = 0
    lower: Optional[float] = None
    upper: Optional[float] = None
    scan_points: int = 20
    refine_iters: int = 40
    pop_cap: int = 10000
    cross_suppression: bool = True
    emit_plot: bool = False
    plot_grid: int = 200
    cluster_tol: float = 0.25

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.plot_grid < 16:
            raise ValueError("plot_grid must be >= 16")

    def bounds(self) -> Optional[Bounds]:
        if self.lower is None and self.upper is None:
            return None
        return Bounds.box(self.lower, self.upper, self.dim)

    def make_spec(self) -> ObjectiveSpec:
        return make_benchmark(self.function, self.dim, self.bounds())

    def run_config(self, rep: int) -> Config:
        return Config(
            sigma=self.sigma,
            m=self.m,
            iterations=self.iterations,
            seed=self.seed + rep,
            pop_cap=self.pop_cap,
            cross_suppression=self.cross_suppression,
            linesearch=LineSearchParams(scan_points=self.scan_points, refine_iters=self.refine_iters),
        )


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linediv", description="Line-distance diversity maximization on benchmark functions.")
    p.add_argument("--function", required=True, choices=BENCHMARK_NAMES)
    p.add_argument("--dim", type=_positive_int, default=2)
    p.add_argument("--m", type=_positive_int, default=10, help="rays per solution and iteration")
    p.add_argument("--sigma", type=_positive_float, default=None,
                   help="acceptance / suppression radius (default: 0.9 rastrigin, 0.1 griewank)")
    p.add_argument("--iterations", type=_positive_int, default=1000)
    p.add_argument("--repetitions", type=_positive_int, default=10)
    p.add_argument("--seed", type=_seed, default=0, help="repetition k uses seed + k")
    p.add_argument("--lower", type=float, default=None, help="uniform lower bound override")
    p.add_argument("--upper", type=float, default=None, help="uniform upper bound override")
    p.add_argument("--scan-points", type=int, default=20)
    p.add_argument("--refine-iters", type=_positive_int, default=40)
    p.add_argument("--pop-cap", type=_positive_int, default=10000)
    p.add_argument("--no-cross-suppression", action="store_true")
    p.add_argument("--cluster-tol", type=_positive_float, default=0.25,
                   help="optima closer than this count as one")
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--plot", action="store_true", help="write an SVG per repetition (2-D only)")
    p.add_argument("--plot-grid", type=int, default=200)
    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> ExperimentConfig:
    parser = build_parser()
    a = parser.parse_args(argv)
    if (a.lower is None) != (a.upper is None):
        parser.error("--lower and --upper must be given together")
    if a.lower is not None and not (np.isfinite(a.lower) and np.isfinite(a.upper) and a.lower < a.upper):
        parser.error("--lower must be finite and below --upper")
    if a.scan_points < 3:
        parser.error("--scan-points must be >= 3")
    if a.plot_grid < 16:
        parser.error("--plot-grid must be >= 16")
    sigma = a.sigma if a.sigma is not None else DEFAULT_SIGMA[a.function]
    return ExperimentConfig(
        function=a.function, output_dir=a.output, dim=a.dim, m=a.m, sigma=sigma,
        iterations=a.iterations, repetitions=a.repetitions, seed=a.seed, lower=a.lower,
        upper=a.upper, scan_points=a.scan_points, refine_iters=a.refine_iters, pop_cap=a.pop_cap,
        cross_suppression=not a.no_cross_suppression, emit_plot=a.plot, plot_grid=a.plot_grid,
        cluster_tol=a.cluster_tol,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(reports: Sequence[RunReport], dim: int) -> str:
    lines = [",".join(["rep", "pop"] + [f"x{i + 1}" for i in range(dim)] + ["f"])]
    for rep in sorted(reports, key=lambda r: r.repetition):
        rows = [("LP", s) for s in rep.final_LP] + [("P", s) for s in rep.final_P]
        for pop, s in sorted(rows, key=lambda t: (t[0], t[1].id)):
            lines.append(",".join([str(rep.repetition), pop] + [_fmt(c) for c in s.point] + [_fmt(s.value)]))
    return "\n".join(lines) + "\n"


def write_csv(reports: Sequence[RunReport], path, dim: Optional[int] = None) -> None:
    """One row per solution, ordered by (rep, pop, id); 17 significant digits."""
    if not reports:
        raise ValueError("no reports to write")
    if dim is None:
        some = next((s for r in reports for s in r.final_P + r.final_LP), None)
        if some is None:
            raise ValueError("cannot infer dimension from empty reports")
        dim = some.point.size
    _atomic_write(Path(path), csv_text(reports, dim))


def read_csv(path) -> list[dict]:
    """Inverse of ``write_csv``; coordinates and values round-trip exactly."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        dim = len(header) - 3
        for line in fh:
            parts = line.strip().split(",")
            rows.append({
                "rep": int(parts[0]),
                "pop": parts[1],
                "point": np.array([float(v) for v in parts[2:2 + dim]]),
                "f": float(parts[-1]),
            })
    return rows


def summary(reports: Sequence[RunReport], cfg: ExperimentConfig) -> dict:
    counts = [r.distinct_optima for r in reports]
    return {
        "function": cfg.function,
        "dim": cfg.dim,
        "m": cfg.m,
        "sigma": cfg.sigma,
        "iterations": cfg.iterations,
        "repetitions": cfg.repetitions,
        "seed": cfg.seed,
        "per_rep": [
            {
                "rep": r.repetition,
                "distinct_optima": r.distinct_optima,
                "global_found": bool(r.global_found),
                "eval_count": r.eval_count,
                "lp_size": len(r.final_LP),
                "p_size": len(r.final_P),
            }
            for r in sorted(reports, key=lambda r: r.repetition)
        ],
        "aggregate": {
            "min_distinct_optima": min(counts),
            "median_distinct_optima": statistics.median(counts),
            "max_distinct_optima": max(counts),
            "fraction_global_found": sum(bool(r.global_found) for r in reports) / len(reports),
        },
    }


def write_json_summary(reports: Sequence[RunReport], path, cfg: ExperimentConfig) -> None:
    if not reports:
        raise ValueError("no reports to write")
    _atomic_write(Path(path), json.dumps(summary(reports, cfg), indent=2) + "\n")


def run_experiment(cfg: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(cfg.output_dir, os.W_OK):
            raise PermissionError(f"output directory {cfg.output_dir} is not writable")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    from linediv.plot import emit_plot

    vp = VerifyParams(cluster_tol=cfg.cluster_tol)
    reports = []
    try:
        for k in range(cfg.repetitions):
            spec = cfg.make_spec()
            report = run(cfg.run_config(k), spec, repetition=k, verify_params=vp)
            reports.append(report)
            print(f"rep={k} lp={len(report.final_LP)} p={len(report.final_P)} "
                  f"distinct_optima={report.distinct_optima} global_found={str(report.global_found).lower()} "
                  f"evals={report.eval_count}", file=out, flush=True)
            if cfg.emit_plot:
                if cfg.dim != 2:
                    if k == 0:
                        log.warning("--plot needs a 2-D problem; skipping plots for dim=%d", cfg.dim)
                        print(f"warning: --plot needs dim=2, got dim={cfg.dim}; no SVG written", file=sys.stderr)
                else:
                    emit_plot(report, spec, cfg.output_dir / f"plot_rep{k}.svg", grid=cfg.plot_grid)
        write_csv(reports, cfg.output_dir / "solutions.csv", dim=cfg.dim)
        write_json_summary(reports, cfg.output_dir / "summary.json", cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
