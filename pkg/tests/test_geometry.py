import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linediv.geometry import clip_to_bounds, euclidean, line_distance, sample_direction, sample_directions
from linediv.objective import Bounds, ContractViolation, make_benchmark

from conftest import affine_spec, parabola_spec


def heron_height(xa, ya, za):
    """Height of z' over the side x'y', via Heron's area at 50 digits."""
    with mp.workdps(50):
        P = [[mp.mpf(float(c)) for c in v] for v in (xa, ya, za)]

        def dist(a, b):
            return mp.sqrt(sum((ai - bi) ** 2 for ai, bi in zip(a, b)))

        base = dist(P[0], P[1])
        if base == 0:
            return 0.0
        a, b, c = sorted([base, dist(P[0], P[2]), dist(P[1], P[2])], reverse=True)
        # Kahan's ordering keeps Heron's formula stable for needle triangles
        area = mp.sqrt(max(mp.mpf(0), (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c)))) / 4
        return float(2 * area / base)


def oracle_ld(spec, x, y):
    f = spec.evaluator
    z = 0.5 * (x + y)
    fx, fy, fz = (float(f(p[None, :])[0]) for p in (x, y, z))
    return heron_height(np.append(x, fx), np.append(y, fy), np.append(z, fz))


def test_parabola_example():
    spec = parabola_spec()
    assert heron_height([0, 0], [2, 4], [1, 1]) == pytest.approx(0.2**0.5, rel=1e-15)
    ld = line_distance([0.0], 0.0, [2.0], 4.0, spec)
    assert ld == pytest.approx(0.4472135954999579, rel=1e-12)
    assert spec.eval_count == 1


def test_degenerate_line_is_zero():
    spec = make_benchmark("rastrigin", 2)
    x = np.array([0.3, -1.2])
    fx = spec.evaluate(x)
    assert line_distance(x, fx, x, fx, spec) == 0.0


def test_affine_example():
    spec = affine_spec(coef=[1.0, 1.0], offset=0.0)
    assert line_distance([0, 0], 0.0, [2, 2], 4.0, spec) == pytest.approx(0.0, abs=1e-12)


def test_line_distance_dimension_mismatch():
    spec = make_benchmark("rastrigin", 2)
    with pytest.raises(ContractViolation):
        line_distance([0.0, 0.0, 0.0], 0.0, [1.0, 1.0], 2.0, spec)


@pytest.mark.parametrize("name", ["rastrigin", "griewank"])
def test_matches_heron_oracle(name, rng):
    spec = make_benchmark(name, 2)
    b = spec.bounds
    worst = 0.0
    for _ in range(200):
        x, y = rng.uniform(b.lower, b.upper, size=(2, 2))
        got = line_distance(x, spec.evaluate(x), y, spec.evaluate(y), spec)
        want = oracle_ld(spec, x, y)
        worst = max(worst, abs(got - want) / max(want, 1e-300))
    assert worst < 1e-9


def test_symmetry_and_budget(rng):
    spec = make_benchmark("rastrigin", 2)
    for _ in range(1000):
        x, y = rng.uniform(-5.12, 5.12, size=(2, 2))
        fx, fy = spec.evaluate(x), spec.evaluate(y)
        before = spec.eval_count
        a = line_distance(x, fx, y, fy, spec)
        assert spec.eval_count == before + 1
        assert a >= 0
        assert a == pytest.approx(line_distance(y, fy, x, fx, spec), abs=1e-12)


def test_affine_zero(rng):
    spec = affine_spec(dim=3, coef=[2.0, -1.0, 0.5], offset=3.0)
    for _ in range(1000):
        x, y = rng.uniform(-5, 5, size=(2, 3))
        assert line_distance(x, spec.evaluate(x), y, spec.evaluate(y), spec) < 1e-9


def test_euclidean():
    assert euclidean([0, 0], [0, 0]) == 0.0
    assert euclidean([0, 0], [3, 4]) == 5.0
    assert euclidean([1, 1], [2, 2]) == pytest.approx(2**0.5)
    with pytest.raises(ContractViolation):
        euclidean([0, 0], [1, 1, 1])


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3), st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
       st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
def test_euclidean_translation_invariant(x, y, t):
    x, y, t = map(np.array, (x, y, t))
    assert euclidean(x + t, y + t) == pytest.approx(euclidean(x, y), abs=1e-9)
    assert euclidean(x, y) == euclidean(y, x)


def test_sample_direction_unit_and_deterministic():
    a = np.random.default_rng(7)
    b = np.random.default_rng(7)
    d1, d2 = sample_direction(a, 2), sample_direction(a, 2)
    assert not np.allclose(d1, d2)
    assert np.array_equal(d1, sample_direction(b, 2)) and np.array_equal(d2, sample_direction(b, 2))
    for n in (1, 2, 5):
        for _ in range(100):
            d = sample_direction(a, n)
            assert abs(np.linalg.norm(d) - 1.0) < 1e-12
    assert all(sample_direction(a, 1)[0] in (-1.0, 1.0) for _ in range(20))


def test_sample_direction_consumes_n_values():
    a = np.random.default_rng(3)
    b = np.random.default_rng(3)
    sample_direction(a, 4)
    b.uniform(size=4)
    assert a.uniform() == b.uniform()


@settings(max_examples=30)
@given(st.integers(0, 60), st.integers(1, 5), st.integers(0, 2**32))
def test_batched_directions_match_sequential(k, n, seed):
    a = np.random.default_rng(seed)
    b = np.random.default_rng(seed)
    batch = sample_directions(a, k, n)
    seq = np.array([sample_direction(b, n) for _ in range(k)]).reshape(k, n)
    assert np.array_equal(batch, seq)
    assert a.uniform() == b.uniform()


def test_clip_to_bounds():
    b = Bounds.box(-5.12, 5.12, 2)
    assert np.array_equal(clip_to_bounds([6, 0], b), [5.12, 0])
    assert np.array_equal(clip_to_bounds([1.5, -2.0], b), [1.5, -2.0])
    assert np.array_equal(clip_to_bounds([-100, 100], Bounds.box(-10, 10, 2)), [-10, 10])
