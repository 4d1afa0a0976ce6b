"""Independent local-optimality checks and distinct-optimum counting.

Only ``ObjectiveSpec`` evaluations are used here; nothing from the engine's
internals leaks in, so a report can be audited from its points alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import norm, qmc

from linediv.geometry import clip_to_bounds
from linediv.objective import ConfigurationError, ObjectiveSpec, as_point

GRAD_TOL = 1e-2
PROBE_SLACK = 1e-9
GLOBAL_TOL = 1e-2


@dataclass(frozen=True)
class VerifyParams:
    probe_radius: float = 1e-3
    probe_count: int = 64
    grad_eps: float = 1e-6
    cluster_tol: float = 0.25

    def __post_init__(self):
        if not (self.probe_radius > 0 and self.probe_count > 0 and self.grad_eps > 0 and self.cluster_tol > 0):
            raise ConfigurationError("verification parameters must be strictly positive")


@lru_cache(maxsize=32)
def sphere_directions(n: int, count: int) -> np.ndarray:
    """Deterministic, roughly uniform unit vectors in R^n."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        t = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    u = qmc.Halton(d=n, scramble=False).random(count + 1)[1:]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def fd_gradient(p: np.ndarray, spec: ObjectiveSpec, eps: float) -> np.ndarray:
    n = p.size
    E = np.eye(n) * eps
    vals = spec.evaluate_batch(np.vstack([p + E, p - E]))
    return (vals[:n] - vals[n:]) / (2.0 * eps)


def is_local_optimum(p, spec: ObjectiveSpec, params: VerifyParams | None = None) -> bool:
    """Near-zero finite-difference gradient and no lower value on a small sphere around ``p``."""
    params = params or VerifyParams()
    x = as_point(p, spec.dim)
    grad = fd_gradient(x, spec, params.grad_eps)
    if not np.linalg.norm(grad) < GRAD_TOL:
        return False
    probes = clip_to_bounds(x + params.probe_radius * sphere_directions(spec.dim, params.probe_count), spec.bounds)
    fx = spec.evaluate(x)
    return bool(np.all(spec.evaluate_batch(probes) >= fx - PROBE_SLACK))


def count_distinct_optima(solutions, spec: ObjectiveSpec, params: VerifyParams | None = None) -> tuple[int, list]:
    """Cluster the verified local optima; best-valued member represents each cluster."""
    params = params or VerifyParams()
    verified = [s for s in solutions if is_local_optimum(s.point, spec, params)]
    verified.sort(key=lambda s: (s.value, s.id))
    reps = []
    for s in verified:
        if all(np.linalg.norm(s.point - r.point) >= params.cluster_tol for r in reps):
            reps.append(s)
    return len(reps), reps


def global_optimum_found(solutions, spec: ObjectiveSpec, params: VerifyParams | None = None,
                         tol: float = GLOBAL_TOL) -> bool:
    """Some solution lies within ``tol`` of the known global optimum and verifies."""
    if spec.global_optimum is None:
        return False
    params = params or VerifyParams()
    target = np.asarray(spec.global_optimum, dtype=float)
    return any(np.linalg.norm(s.point - target) < tol and is_local_optimum(s.point, spec, params)
               for s in solutions)
