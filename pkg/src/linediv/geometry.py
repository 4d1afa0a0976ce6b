"""Line Distance and the small vector helpers around it."""

from __future__ import annotations

import numpy as np

from linediv.objective import Bounds, ContractViolation, ObjectiveSpec, as_point

DEGENERATE_LINE = 1e-12
MIN_DIRECTION_NORM = 1e-9


def chord_distance(xa: np.ndarray, ya: np.ndarray, za: np.ndarray) -> np.ndarray:
    """Distance from ``za`` to the infinite line through ``xa`` and ``ya``.

    Works row-wise on ``(k, n+1)`` stacks of augmented points.  Rows whose
    line is degenerate (``|ya - xa| < 1e-12``) give 0.  The norm of the
    residual ``v - (v.u) u`` is used rather than ``sqrt(|v|^2 - (v.u)^2)``;
    same quantity, without the cancellation when ``z'`` sits close to the line.
    """
    chord = ya - xa
    length = np.sqrt(np.sum(chord * chord, axis=-1))
    degenerate = length < DEGENERATE_LINE
    u = chord / np.where(degenerate, 1.0, length)[..., None]
    v = za - xa
    resid = v - np.sum(v * u, axis=-1)[..., None] * u
    out = np.sqrt(np.sum(resid * resid, axis=-1))
    return np.where(degenerate, 0.0, out)


def line_distance_batch(X: np.ndarray, fx: np.ndarray, Y: np.ndarray, fy: np.ndarray, spec: ObjectiveSpec) -> np.ndarray:
    """Row-wise line distance; costs one evaluation per row (the midpoints)."""
    Z = 0.5 * (X + Y)
    fz = spec.evaluate_batch(Z)
    xa = np.column_stack([X, fx])
    ya = np.column_stack([Y, fy])
    za = np.column_stack([Z, fz])
    return chord_distance(xa, ya, za)


def line_distance(x, fx: float, y, fy: float, spec: ObjectiveSpec) -> float:
    """Line distance between ``x`` and ``y`` given their cached values.

    The midpoint ``z = (x + y) / 2`` is evaluated (exactly one new evaluation)
    and the result is the distance of ``[z, f(z)]`` from the line through
    ``[x, f(x)]`` and ``[y, f(y)]``.
    """
    x = as_point(x, spec.dim)
    y = as_point(y, spec.dim)
    if not (np.isfinite(fx) and np.isfinite(fy)):
        raise ContractViolation("cached objective values must be finite")
    d = line_distance_batch(x[None, :], np.array([fx]), y[None, :], np.array([fy]), spec)
    return float(d[0])


def euclidean(x, y) -> float:
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.sqrt(np.dot(diff, diff)))


def sample_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draw from [-1, 1]^n, normalized to unit length.

    Each attempt consumes exactly ``n`` doubles from ``rng``; attempts with
    norm below 1e-9 are redrawn.
    """
    if n < 1:
        raise ContractViolation("direction dimension must be >= 1")
    while True:
        d = rng.uniform(-1.0, 1.0, size=n)
        norm = np.sqrt(np.sum(d * d))
        if norm >= MIN_DIRECTION_NORM:
            return d / norm


def sample_directions(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    """``k`` successive ``sample_direction`` draws as rows, same stream consumption."""
    if k == 0:
        return np.empty((0, n))
    saved = rng.bit_generator.state
    raw = rng.uniform(-1.0, 1.0, size=(k, n))
    norms = np.sqrt(np.sum(raw * raw, axis=1))
    bad = np.flatnonzero(norms < MIN_DIRECTION_NORM)
    if bad.size == 0:
        return raw / norms[:, None]
    # rare redraw: replay the stream up to the first rejected row, then go one by one
    first = int(bad[0])
    rng.bit_generator.state = saved
    head = rng.uniform(-1.0, 1.0, size=(first, n))
    head /= np.sqrt(np.sum(head * head, axis=1))[:, None]
    tail = [sample_direction(rng, n) for _ in range(k - first)]
    return np.vstack([head.reshape(first, n)] + [t[None, :] for t in tail])


def clip_to_bounds(p, b: Bounds) -> np.ndarray:
    x = np.asarray(p, dtype=float)
    if x.shape[-1] != b.dim:
        raise ContractViolation(f"point has dimension {x.shape[-1]}, bounds have {b.dim}")
    return np.clip(x, b.lower, b.upper)
