"""Expansion / suppression loop.

Every iteration each active solution shoots ``m`` random rays, walks each ray
to the step that maximizes its line distance to the parent and keeps the
candidates that landed farther than ``sigma`` away.  A parent whose rays all
fail is archived as a local optimum.  Suppression then thins both
populations so no two members are closer than ``sigma``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from linediv.geometry import sample_directions
from linediv.linesearch import LineSearchParams, maximize_ld_batch
from linediv.objective import ConfigurationError, ObjectiveSpec
from linediv.solution import Solution

__all__ = ["Config", "SearchState", "RunReport", "Solution", "init", "expand", "suppress", "step", "run"]


@dataclass(frozen=True)
class Config:
    sigma: float
    m: int = 10
    iterations: int = 1000
    seed: int = 0
    pop_cap: int = 10000
    cross_suppression: bool = True
    linesearch: LineSearchParams = field(default_factory=LineSearchParams)

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ConfigurationError("sigma must be > 0")
        if self.m < 1:
            raise ConfigurationError("m must be >= 1")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.pop_cap < 1:
            raise ConfigurationError("pop_cap must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")


@dataclass
class SearchState:
    P: list
    LP: list
    iter: int
    rng: np.random.Generator
    spec: ObjectiveSpec
    next_id: int = 0

    def new_solution(self, point, value) -> Solution:
        s = Solution(point, value, self.next_id)
        self.next_id += 1
        return s


@dataclass
class RunReport:
    repetition: int
    final_P: list
    final_LP: list
    eval_count: int
    per_iteration: list
    distinct_optima: int
    global_found: bool
    representatives: list = field(default_factory=list)


def _random_solution(state: SearchState) -> Solution:
    b = state.spec.bounds
    point = state.rng.uniform(b.lower, b.upper)
    return state.new_solution(point, state.spec.evaluate(point))


def init(config: Config, spec: ObjectiveSpec) -> SearchState:
    rng = np.random.default_rng(config.seed)
    state = SearchState(P=[], LP=[], iter=0, rng=rng, spec=spec)
    state.P.append(_random_solution(state))
    return state


def _search_parents(parents: list, state: SearchState, config: Config):
    """Shoot ``m`` rays from every parent, in order.

    Returns candidate points, values and the acceptance mask, each with
    ``len(parents) * m`` rows (parent-major).  Directions are drawn parent by
    parent, trial by trial.
    """
    m = config.m
    D = sample_directions(state.rng, len(parents) * m, state.spec.dim)
    X = np.repeat(np.array([p.point for p in parents]), m, axis=0)
    fX = np.repeat(np.array([p.value for p in parents]), m)
    res = maximize_ld_batch(X, fX, D, state.spec, config.linesearch)
    with np.errstate(invalid="ignore"):
        dist = np.sqrt(np.sum((res.points - X) ** 2, axis=1))
        ok = res.room & (dist > config.sigma)
    return res.points, res.values, ok


def expand(parent: Solution, state: SearchState, config: Config) -> tuple[list, bool]:
    """Run ``m`` ray trials from ``parent``; returns (accepted, exhausted).

    A trial is accepted when its candidate lands farther than ``sigma`` from
    the parent; rays with no room inside the box count as discarded.
    """
    points, values, ok = _search_parents([parent], state, config)
    kids = [state.new_solution(points[j], values[j]) for j in np.flatnonzero(ok)]
    return kids, not kids


def _pairwise(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


@njit(cache=True)
def _sq_dist(a, b):
    s = 0.0
    for t in range(a.size):
        u = a[t] - b[t]
        s += u * u
    return s


@njit(cache=True)
def _resolve(i, cand, count, vals, alive):
    """Apply i's comparisons with its (unsorted) live newer neighbors."""
    js = np.sort(cand[:count])
    for j in js:
        # j is newer than i, so i only loses to a strictly smaller value
        if vals[j] < vals[i]:
            alive[i] = False
            return
        alive[j] = False


@njit(cache=True)
def _suppress_grid(pts, vals, sigma, keys, cell_keys, cell_start, cell_members, offsets):
    k = vals.size
    alive = np.ones(k, dtype=np.bool_)
    cand = np.empty(k, dtype=np.int64)
    for i in range(k):
        if not alive[i]:
            continue
        count = 0
        for o in offsets:
            key = keys[i] + o
            c = np.searchsorted(cell_keys, key)
            if c >= cell_keys.size or cell_keys[c] != key:
                continue
            for t in range(cell_start[c], cell_start[c + 1]):
                j = cell_members[t]
                if j > i and alive[j] and np.sqrt(_sq_dist(pts[i], pts[j])) < sigma:
                    cand[count] = j
                    count += 1
        if count:
            _resolve(i, cand, count, vals, alive)
    return alive


@njit(cache=True)
def _suppress_csr(indptr, indices, vals):
    k = vals.size
    alive = np.ones(k, dtype=np.bool_)
    for i in range(k):
        if not alive[i]:
            continue
        for t in range(indptr[i], indptr[i + 1]):
            j = indices[t]
            if j <= i or not alive[j]:
                continue
            if vals[j] < vals[i]:
                alive[i] = False
                break
            alive[j] = False
    return alive


def _close_pairs(points: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """CSR adjacency (indptr, indices) of pairs at distance < sigma, neighbors sorted."""
    k = len(points)
    pairs = cKDTree(points).query_pairs(sigma, output_type="ndarray")
    if len(pairs):
        d = np.sqrt(np.sum((points[pairs[:, 0]] - points[pairs[:, 1]]) ** 2, axis=1))
        pairs = pairs[d < sigma]
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]]).astype(np.int64)
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]]).astype(np.int64)
    order = np.lexsort((cols, rows))
    indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=k), out=indptr[1:])
    return indptr, cols[order]


GRID_MAX_DIM = 4


def suppress_mask(points: np.ndarray, values: np.ndarray, sigma: float) -> np.ndarray:
    """Survivor mask for rows already in ascending id order.

    Low dimensions hash points into cells of side ``sigma`` so only live
    solutions scan their neighborhood; otherwise a k-d tree enumerates all
    close pairs up front.
    """
    k, n = points.shape
    if k < 2:
        return np.ones(k, dtype=bool)
    points = np.ascontiguousarray(points, dtype=float)
    values = np.ascontiguousarray(values, dtype=float)
    cells = np.floor((points - points.min(axis=0)) / sigma).astype(np.int64) + 1
    extent = cells.max(axis=0) + 2
    if n <= GRID_MAX_DIM and np.prod(extent.astype(float)) < 2.0**62:
        strides = np.cumprod(np.concatenate([[1], extent[:-1]])).astype(np.int64)
        keys = cells @ strides
        order = np.argsort(keys, kind="stable")
        cell_keys, first = np.unique(keys[order], return_index=True)
        cell_start = np.append(first, k).astype(np.int64)
        grid = np.stack(np.meshgrid(*[[-1, 0, 1]] * n, indexing="ij"), axis=-1).reshape(-1, n)
        offsets = (grid @ strides).astype(np.int64)
        return _suppress_grid(points, values, float(sigma), keys, cell_keys, cell_start,
                              order.astype(np.int64), offsets)
    indptr, indices = _close_pairs(points, sigma)
    return _suppress_csr(indptr, indices, values)


def suppress(pop, sigma: float) -> list:
    """Remove the worse of every pair closer than ``sigma``.

    Pairs are visited in ascending id order and the survivor of a comparison
    keeps going; the worse solution is the larger value, the newer (larger
    id) one on ties.  Output is sorted by id.
    """
    pop = sorted(pop, key=lambda s: s.id)
    if len(pop) < 2:
        return pop
    alive = suppress_mask(np.array([s.point for s in pop]), np.array([s.value for s in pop]), sigma)
    return [s for s, a in zip(pop, alive) if a]


def _cross_mask(points: np.ndarray, values: np.ndarray, LP: list, sigma: float) -> np.ndarray:
    """False for rows within ``sigma`` of an archived solution at least as good."""
    keep = np.ones(len(points), dtype=bool)
    if not LP or not len(points):
        return keep
    lpts = np.array([s.point for s in LP])
    lvals = np.array([s.value for s in LP])
    for r, near in enumerate(cKDTree(lpts).query_ball_point(points, sigma)):
        if near:
            near = np.asarray(near, dtype=int)
            d = np.sqrt(np.sum((lpts[near] - points[r]) ** 2, axis=1))
            keep[r] = not np.any(lvals[near[d < sigma]] <= values[r])
    return keep


def step(state: SearchState, config: Config) -> SearchState:
    """One expansion + suppression round. ``state`` itself is left untouched."""
    new = SearchState(P=list(state.P), LP=list(state.LP), iter=state.iter,
                      rng=copy.deepcopy(state.rng), spec=state.spec, next_id=state.next_id)
    parents = new.P
    m = config.m
    points, values, ok = _search_parents(parents, new, config)
    exhausted = ~ok.reshape(len(parents), m).any(axis=1)

    # offspring get consecutive ids after every existing solution, in parent-major order
    kid_rows = np.flatnonzero(ok)
    kid_ids = new.next_id + np.arange(kid_rows.size)
    new.next_id += kid_rows.size

    stay = [p for p, done in zip(parents, exhausted) if not done]
    archived = [p for p, done in zip(parents, exhausted) if done]
    n = new.spec.dim
    pool_pts = np.vstack([np.array([p.point for p in stay]).reshape(-1, n), points[kid_rows]])
    pool_vals = np.concatenate([[p.value for p in stay], values[kid_rows]])
    pool_ids = np.concatenate([np.array([p.id for p in stay], dtype=np.int64), kid_ids])

    keep = suppress_mask(pool_pts, pool_vals, config.sigma)
    LP = suppress(new.LP + archived, config.sigma)
    if config.cross_suppression:
        keep[keep] = _cross_mask(pool_pts[keep], pool_vals[keep], LP, config.sigma)
    rows = np.flatnonzero(keep)
    if rows.size > config.pop_cap:
        best = np.lexsort((pool_ids[rows], pool_vals[rows]))[:config.pop_cap]
        rows = np.sort(rows[best])

    by_id = {p.id: p for p in stay}
    P = [by_id.get(int(pool_ids[r])) or Solution(pool_pts[r], pool_vals[r], int(pool_ids[r])) for r in rows]
    new.P, new.LP = P, LP
    if not new.P:
        new.P.append(_random_solution(new))
    new.iter += 1
    return new


def run(config: Config, spec: ObjectiveSpec, repetition: int = 0, verify_params=None,
        check_invariants: bool = False) -> RunReport:
    """Full run: ``init``, ``config.iterations`` steps, then verification.

    Verification uses a separate copy of ``spec`` so ``eval_count`` reports
    only the search's evaluations.
    """
    from linediv.verify import VerifyParams, count_distinct_optima, global_optimum_found

    vp = verify_params or VerifyParams()
    state = init(config, spec)
    history = []
    for _ in range(config.iterations):
        state = step(state, config)
        if check_invariants:
            _check_separation(state, config.sigma)
        everyone = state.P + state.LP
        history.append((state.iter, len(state.P), len(state.LP), min(s.value for s in everyone)))

    checker = spec.fresh()
    pool = state.LP + state.P
    count, reps = count_distinct_optima(pool, checker, vp)
    return RunReport(
        repetition=repetition,
        final_P=state.P,
        final_LP=state.LP,
        eval_count=spec.eval_count,
        per_iteration=history,
        distinct_optima=count,
        global_found=global_optimum_found(pool, checker, vp),
        representatives=reps,
    )


def _check_separation(state: SearchState, sigma: float) -> None:
    for pop in (state.P, state.LP):
        if len(pop) > 1:
            d = _pairwise(np.array([s.point for s in pop]))
            np.fill_diagonal(d, np.inf)
            assert d.min() >= sigma, f"populations closer than sigma at iteration {state.iter}"
    ids_p = {s.id for s in state.P}
    assert ids_p.isdisjoint(s.id for s in state.LP)
