"""Maximizing the line distance along a ray.

The profile ``g(alpha) = ld(x + alpha*d, x)`` has one hump per basin the ray
crosses, so a plain golden-section search would lock onto whichever hump it
starts in.  A uniform scan picks the best hump first and golden-section only
polishes inside the bracket around it.

Everything here is batched over rays: the engine hands in all ``m * |P|``
rays of an iteration at once and pays one numpy call per probe round.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numba import njit

from linediv.geometry import DEGENERATE_LINE, clip_to_bounds, line_distance_batch
from linediv.objective import Bounds, ConfigurationError, ContractViolation, ObjectiveSpec
from linediv.solution import Solution

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def compiled_disabled() -> bool:
    """``LINEDIV_NO_JIT=1`` forces the numpy path (used to cross-check the kernel)."""
    return os.environ.get("LINEDIV_NO_JIT", "") == "1"


@dataclass(frozen=True)
class LineSearchParams:
    scan_points: int = 20
    refine_iters: int = 40
    alpha_min: float = 1e-6

    def __post_init__(self):
        if self.scan_points < 3:
            raise ConfigurationError("scan_points must be >= 3")
        if self.refine_iters < 1:
            raise ConfigurationError("refine_iters must be >= 1")
        if not self.alpha_min > 0:
            raise ConfigurationError("alpha_min must be > 0")

    @property
    def probes_per_ray(self) -> int:
        # scan + two golden seeds + one probe per iteration + final midpoint
        return self.scan_points + self.refine_iters + 3

    @property
    def evals_per_ray(self) -> int:
        return 2 * self.probes_per_ray


def alpha_max_batch(X: np.ndarray, D: np.ndarray, b: Bounds) -> np.ndarray:
    """Row-wise largest step keeping ``X + alpha * D`` inside ``b``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(D > 0, (b.upper - X) / D, np.inf)
        down = np.where(D < 0, (b.lower - X) / D, np.inf)
    steps = np.minimum(up, down).min(axis=-1)
    return np.maximum(steps, 0.0)


def alpha_max(x, d, b: Bounds) -> float:
    X = np.asarray(x, dtype=float)[None, :]
    D = np.asarray(d, dtype=float)[None, :]
    return float(alpha_max_batch(X, D, b)[0])


def _golden_rounds(g: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray, iters: int, seen=None):
    """Vectorized golden-section maximization over independent intervals.

    ``g`` maps an array of alphas (one per interval) to values.  ``seen`` is
    called with every probed ``(alphas, values)`` pair.  Returns the final
    ``(lo, hi)``.
    """
    lo = lo.copy()
    hi = hi.copy()
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    gc = g(c)
    gd = g(d)
    if seen is not None:
        seen(c, gc)
        seen(d, gd)
    for _ in range(iters):
        left = gc > gd
        # maximum is in [lo, d] where the left probe wins, else in [c, hi]
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - INV_PHI * (hi - lo)
        new_d = lo + INV_PHI * (hi - lo)
        probe = np.where(left, new_c, new_d)
        gp = g(probe)
        if seen is not None:
            seen(probe, gp)
        c, gc, d, gd = (
            np.where(left, probe, d),
            np.where(left, gp, gd),
            np.where(left, c, probe),
            np.where(left, gc, gp),
        )
    return lo, hi


def golden_section_max(g: Callable[[float], float], a: float, b: float, iters: int) -> float:
    """Golden-section search for a maximizer of ``g`` on ``[a, b]``.

    Returns the midpoint of the final bracket, which is ``0.618**iters``
    times the width of ``[a, b]``.
    """
    if not a < b:
        raise ValueError("golden_section_max needs a < b")
    if iters < 1:
        raise ValueError("iters must be >= 1")

    def g_vec(alphas):
        return np.array([g(float(t)) for t in alphas])

    lo, hi = _golden_rounds(g_vec, np.array([a], dtype=float), np.array([b], dtype=float), iters)
    return float(0.5 * (lo[0] + hi[0]))


@dataclass
class RayBatchResult:
    """Per-ray outcome; rows with ``room == False`` carry no candidate."""

    room: np.ndarray
    alpha: np.ndarray
    points: np.ndarray
    values: np.ndarray
    ld: np.ndarray
    scan_best: np.ndarray


@njit
def _probe_ray(f, x, fx, d, alpha, lower, upper, y, z):
    """Candidate at ``x + alpha*d`` (clipped); fills ``y``; returns (f(y), ld(y, x))."""
    n = x.size
    for i in range(n):
        v = x[i] + alpha * d[i]
        if v < lower[i]:
            v = lower[i]
        elif v > upper[i]:
            v = upper[i]
        y[i] = v
    fy = f(y)
    for i in range(n):
        z[i] = 0.5 * (y[i] + x[i])
    fz = f(z)
    # augmented points: cand' = [y, fy], parent' = [x, fx], mid' = [z, fz]
    length2 = 0.0
    for i in range(n):
        c = x[i] - y[i]
        length2 += c * c
    c = fx - fy
    length2 += c * c
    length = np.sqrt(length2)
    if length < DEGENERATE_LINE:
        return fy, 0.0
    vu = 0.0
    for i in range(n):
        vu += (z[i] - y[i]) * ((x[i] - y[i]) / length)
    vu += (fz - fy) * ((fx - fy) / length)
    r2 = 0.0
    for i in range(n):
        w = (z[i] - y[i]) - vu * ((x[i] - y[i]) / length)
        r2 += w * w
    w = (fz - fy) - vu * ((fx - fy) / length)
    r2 += w * w
    return fy, np.sqrt(r2)


@njit
def _search_rays(f, X, fX, D, lower, upper, alpha_min, lin, refine_iters):
    k, n = X.shape
    s_pts = lin.size
    room = np.zeros(k, dtype=np.bool_)
    alpha = np.full(k, np.nan)
    points = np.full((k, n), np.nan)
    values = np.full(k, np.nan)
    lds = np.full(k, np.nan)
    scan_best = np.full(k, np.nan)
    y = np.empty(n)
    z = np.empty(n)
    grid = np.empty(s_pts)
    gs = np.empty(s_pts)
    for r in range(k):
        x = X[r]
        d = D[r]
        amax = np.inf
        for i in range(n):
            if d[i] > 0:
                t = (upper[i] - x[i]) / d[i]
            elif d[i] < 0:
                t = (lower[i] - x[i]) / d[i]
            else:
                t = np.inf
            if t < amax:
                amax = t
        if amax < 0.0:
            amax = 0.0
        if not amax > alpha_min:
            continue
        room[r] = True
        best = -np.inf
        for s in range(s_pts):
            a = alpha_min + (amax - alpha_min) * lin[s]
            if s == s_pts - 1:
                a = amax
            fy, g = _probe_ray(f, x, fX[r], d, a, lower, upper, y, z)
            grid[s] = a
            gs[s] = g
            if g > best:
                best = g
                alpha[r] = a
                values[r] = fy
                points[r] = y
        scan_best[r] = best
        j = np.argmax(gs)
        lo = grid[max(j - 1, 0)]
        hi = grid[min(j + 1, s_pts - 1)]

        c = hi - INV_PHI * (hi - lo)
        dd = lo + INV_PHI * (hi - lo)
        fy, gc = _probe_ray(f, x, fX[r], d, c, lower, upper, y, z)
        if gc > best:
            best, alpha[r], values[r] = gc, c, fy
            points[r] = y
        fy, gd = _probe_ray(f, x, fX[r], d, dd, lower, upper, y, z)
        if gd > best:
            best, alpha[r], values[r] = gd, dd, fy
            points[r] = y
        for _ in range(refine_iters):
            left = gc > gd
            if left:
                hi = dd
            else:
                lo = c
            if left:
                p = hi - INV_PHI * (hi - lo)
            else:
                p = lo + INV_PHI * (hi - lo)
            fy, gp = _probe_ray(f, x, fX[r], d, p, lower, upper, y, z)
            if gp > best:
                best, alpha[r], values[r] = gp, p, fy
                points[r] = y
            if left:
                dd, gd = c, gc
                c, gc = p, gp
            else:
                c, gc = dd, gd
                dd, gd = p, gp
        p = 0.5 * (lo + hi)
        fy, gp = _probe_ray(f, x, fX[r], d, p, lower, upper, y, z)
        if gp > best:
            best, alpha[r], values[r] = gp, p, fy
            points[r] = y
        lds[r] = best
    return room, alpha, points, values, lds, scan_best


def maximize_ld_batch(X: np.ndarray, fX: np.ndarray, D: np.ndarray, spec: ObjectiveSpec,
                      params: LineSearchParams) -> RayBatchResult:
    """Line search on every row of ``X`` along the matching unit row of ``D``.

    Uses the compiled kernel when ``spec.kernel`` is set, the numpy batch
    path otherwise; both follow the same probe sequence.
    """
    X = np.ascontiguousarray(X, dtype=float)
    fX = np.ascontiguousarray(fX, dtype=float)
    D = np.ascontiguousarray(D, dtype=float)
    if spec.kernel is not None and not compiled_disabled():
        return _maximize_compiled(X, fX, D, spec, params)
    return _maximize_numpy(X, fX, D, spec, params)


def _maximize_compiled(X, fX, D, spec, params) -> RayBatchResult:
    if X.shape[0] and not np.all(np.isfinite(X)):
        raise ContractViolation("ray origins must be finite")
    lin = np.linspace(0.0, 1.0, params.scan_points)
    room, alpha, points, values, ld, scan_best = _search_rays(
        spec.kernel, X, fX, D, np.asarray(spec.bounds.lower), np.asarray(spec.bounds.upper),
        float(params.alpha_min), lin, int(params.refine_iters))
    spec.add_evals(int(room.sum()) * params.evals_per_ray)
    return RayBatchResult(room, alpha, points, values, ld, scan_best)


def _maximize_numpy(X, fX, D, spec, params) -> RayBatchResult:
    k, n = X.shape
    amax = alpha_max_batch(X, D, spec.bounds)
    room = amax > params.alpha_min

    alpha = np.full(k, np.nan)
    points = np.full((k, n), np.nan)
    values = np.full(k, np.nan)
    ld = np.full(k, np.nan)
    scan_best = np.full(k, np.nan)
    idx = np.flatnonzero(room)
    if idx.size == 0:
        return RayBatchResult(room, alpha, points, values, ld, scan_best)

    Xa, fXa, Da, Aa = X[idx], fX[idx], D[idx], amax[idx]
    r = idx.size
    best_alpha = np.full(r, np.nan)
    best_point = np.full((r, n), np.nan)
    best_value = np.full(r, np.nan)
    best_ld = np.full(r, -np.inf)

    def probe(alphas: np.ndarray):
        """alphas: shape (r,) or (r, s). Returns candidates, values, ld."""
        shape = alphas.shape
        a2 = alphas.reshape(r, -1)
        s = a2.shape[1]
        Y = Xa[:, None, :] + a2[:, :, None] * Da[:, None, :]
        Y = clip_to_bounds(Y, spec.bounds).reshape(r * s, n)
        fy = spec.evaluate_batch(Y)
        g = line_distance_batch(Y, fy, np.repeat(Xa, s, axis=0), np.repeat(fXa, s), spec)
        return Y.reshape(r, s, n), fy.reshape(r, s), g.reshape(shape)

    def record(alphas, Y, fy, g):
        # first strict improvement wins, keeping ties on the earliest probe
        g2 = g.reshape(r, -1)
        a2 = alphas.reshape(r, -1)
        j = np.argmax(g2, axis=1)
        rows = np.arange(r)
        gj = g2[rows, j]
        better = gj > best_ld
        best_ld[better] = gj[better]
        best_alpha[better] = a2[rows, j][better]
        best_value[better] = fy[rows, j][better]
        best_point[better] = Y[rows, j][better]

    s = params.scan_points
    grid = params.alpha_min + (Aa - params.alpha_min)[:, None] * np.linspace(0.0, 1.0, s)[None, :]
    grid[:, -1] = Aa
    Y, fy, g = probe(grid)
    record(grid, Y, fy, g)
    scan_best[idx] = best_ld

    j = np.argmax(g, axis=1)
    rows = np.arange(r)
    lo = grid[rows, np.maximum(j - 1, 0)]
    hi = grid[rows, np.minimum(j + 1, s - 1)]

    def g_refine(alphas):
        Yp, fyp, gp = probe(alphas)
        record(alphas, Yp, fyp, gp)
        return gp

    lo, hi = _golden_rounds(g_refine, lo, hi, params.refine_iters)
    g_refine(0.5 * (lo + hi))

    alpha[idx] = best_alpha
    points[idx] = best_point
    values[idx] = best_value
    ld[idx] = best_ld
    return RayBatchResult(room, alpha, points, values, ld, scan_best)


def maximize_ld_along(x: Solution, d, spec: ObjectiveSpec,
                      params: Optional[LineSearchParams] = None) -> Optional[tuple[float, Solution, float]]:
    """Best step along ``d`` from ``x`` by line distance to ``x``.

    Returns ``(alpha, candidate, ld_value)``, or ``None`` when the ray has no
    room (``alpha_max <= alpha_min``).  Costs ``params.evals_per_ray``
    evaluations when there is room and none otherwise.
    """
    params = params or LineSearchParams()
    res = maximize_ld_batch(np.asarray(x.point)[None, :], np.array([x.value]),
                            np.asarray(d, dtype=float)[None, :], spec, params)
    if not res.room[0]:
        return None
    cand = Solution(res.points[0], res.values[0])
    return float(res.alpha[0]), cand, float(res.ld[0])
