"""Objective functions, box domains and evaluation accounting.

Evaluators are written against row-stacked points of shape ``(k, n)`` so a
whole batch of probes costs one numpy call; ``ObjectiveSpec.evaluate`` is the
single-point convenience on top of that.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numba import njit


class ContractViolation(ValueError):
    """A caller broke an operation's precondition (dimension, finiteness)."""


class ConfigurationError(ValueError):
    """Unknown benchmark name or invalid parameter value."""


def as_point(p, dim: Optional[int] = None) -> np.ndarray:
    x = np.asarray(p, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ContractViolation(f"expected a 1-D point, got shape {x.shape}")
    if dim is not None and x.size != dim:
        raise ContractViolation(f"point has dimension {x.size}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise ContractViolation("point has non-finite coordinates")
    return x


@njit(cache=True)
def rastrigin_point(x):
    s = 10.0 * x.size
    for v in x:
        s += v * v - 10.0 * np.cos(2.0 * np.pi * v)
    return s


@njit(cache=True)
def griewank_point(x):
    sq = 0.0
    prod = 1.0
    for i in range(x.size):
        sq += x[i] * x[i]
        prod *= np.cos(x[i] / np.sqrt(i + 1.0))
    return 1.0 + sq / 4000.0 - prod


@njit
def apply_rows(f, X):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        out[i] = f(X[i])
    return out


def _rowwise(kernel, p):
    x = np.ascontiguousarray(p, dtype=float)
    if x.ndim == 1:
        return float(kernel(x))
    return apply_rows(kernel, x.reshape(-1, x.shape[-1])).reshape(x.shape[:-1])


def rastrigin(p):
    """10n + sum(p_i^2 - 10 cos(2 pi p_i)). Accepts one point or a (k, n) batch."""
    return _rowwise(rastrigin_point, p)


def griewank(p):
    """1 + sum(p_i^2)/4000 - prod(cos(p_i / sqrt(i))), i = 1..n."""
    return _rowwise(griewank_point, p)


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise ConfigurationError("lower and upper bounds differ in dimension")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ConfigurationError("bounds must be finite")
        if np.any(lo >= hi):
            raise ConfigurationError("every lower bound must be strictly below its upper bound")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def box(cls, lo: float, hi: float, dim: int) -> "Bounds":
        return cls(np.full(dim, float(lo)), np.full(dim, float(hi)))

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, p, tol: float = 0.0) -> bool:
        x = np.asarray(p, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))


@dataclass(eq=False)
class ObjectiveSpec:
    """A minimization problem over a box.

    ``evaluator`` maps a ``(k, n)`` array to ``k`` values.  Every evaluated row
    adds one to ``eval_count``; the counter is guarded by a lock so concurrent
    callers see exact totals.  ``kernel``, when set, is the same function as a
    numba-compiled single-point routine; the line search then runs compiled.
    """

    name: str
    dim: int
    bounds: Bounds
    evaluator: Callable[[np.ndarray], np.ndarray]
    global_optimum: Optional[np.ndarray] = None
    orientation: str = "minimize"
    kernel: Optional[Callable] = None
    _count: int = field(default=0, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError("dim must be >= 1")
        if self.bounds.dim != self.dim:
            raise ConfigurationError(f"bounds have dimension {self.bounds.dim}, expected {self.dim}")
        if self.orientation != "minimize":
            raise ConfigurationError("only minimization is supported; negate the function instead")

    @property
    def eval_count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def fresh(self) -> "ObjectiveSpec":
        """Same problem, independent counter starting at 0."""
        return ObjectiveSpec(self.name, self.dim, self.bounds, self.evaluator, self.global_optimum,
                             self.orientation, self.kernel)

    def evaluate(self, p) -> float:
        x = as_point(p, self.dim)
        return float(self.evaluate_batch(x[None, :])[0])

    def evaluate_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ContractViolation(f"expected shape (k, {self.dim}), got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ContractViolation("batch has non-finite coordinates")
        values = np.asarray(self.evaluator(X), dtype=float).reshape(X.shape[0])
        self.add_evals(X.shape[0])
        return values

    def add_evals(self, k: int) -> None:
        with self._lock:
            self._count += int(k)


def evaluate(spec: ObjectiveSpec, p) -> float:
    return spec.evaluate(p)


_BENCHMARKS = {
    "rastrigin": (rastrigin, rastrigin_point, (-5.12, 5.12)),
    "griewank": (griewank, griewank_point, (-10.0, 10.0)),
}

BENCHMARK_NAMES = tuple(_BENCHMARKS)


def make_benchmark(name: str, dim: int, bounds: Optional[Bounds] = None) -> ObjectiveSpec:
    """Build a fresh benchmark problem (``eval_count`` starts at 0).

    Default domains: rastrigin [-5.12, 5.12]^n, griewank [-10, 10]^n.
    """
    if name not in _BENCHMARKS:
        raise ConfigurationError(f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARK_NAMES)}")
    if int(dim) != dim or dim < 1:
        raise ConfigurationError("dim must be a positive integer")
    func, kernel, (lo, hi) = _BENCHMARKS[name]
    if bounds is None:
        bounds = Bounds.box(lo, hi, dim)
    elif bounds.dim != dim:
        raise ConfigurationError(f"bounds have dimension {bounds.dim}, expected {dim}")
    origin = np.zeros(int(dim))
    optimum = origin if bounds.contains(origin) else None
    return ObjectiveSpec(name=name, dim=int(dim), bounds=bounds, evaluator=func,
                         global_optimum=optimum, kernel=kernel)
