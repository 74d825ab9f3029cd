import math

import numpy as np
import pytest
from scipy.optimize import minimize, minimize_scalar

from interplab.couple import (Couple, CustomGauge, WeightedLp, j_functional, k_functional, norm,
                              norm_spec_from_json, sum_norm)
from interplab.errors import InputError

from conftest import rand_couple


def test_norm_examples():
    assert norm(WeightedLp(2, (1, 1)), [3, 4]) == pytest.approx(5)
    assert norm(WeightedLp(1, (2, 1)), [1, 1]) == pytest.approx(3)
    assert norm(WeightedLp(math.inf, (1, 3)), [0, 0]) == 0
    with pytest.raises(InputError):
        norm(WeightedLp(2, (1, 1)), [1, 2, 3])


def test_weighted_lp_validation():
    with pytest.raises(InputError):
        WeightedLp(0.5, (1,))
    with pytest.raises(InputError):
        WeightedLp(2, (1, 0))


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, math.inf])
def test_norm_axioms_on_random_samples(p, rng):
    space = WeightedLp(p, tuple(np.exp(rng.uniform(-1, 1, 3))))
    U = rng.normal(size=(1000, 3)) + 1j * rng.normal(size=(1000, 3))
    V = rng.normal(size=(1000, 3)) + 1j * rng.normal(size=(1000, 3))
    lam = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    nu, nv = space.evaluate(U), space.evaluate(V)
    assert np.all(space.evaluate(U + V) <= nu + nv + 1e-10)
    assert np.allclose(space.evaluate(lam[:, None] * U), np.abs(lam) * nu, rtol=1e-10)
    assert np.all(nu > 0)


def test_custom_gauge_checks_axioms():
    g = CustomGauge(lambda v: float(np.abs(v).sum()), 2, lipschitz=math.sqrt(2))
    assert norm(g, [1, -1j]) == pytest.approx(2)
    with pytest.raises(InputError):
        CustomGauge(lambda v: float(np.abs(v).sum()) ** 2, 2, lipschitz=1.0)


def test_j_functional():
    c = Couple(1, WeightedLp(1, (5,)), WeightedLp(1, (1,)))
    assert j_functional(c, math.e ** 2, [1]) == pytest.approx(math.e ** 2)
    assert j_functional(c, 1, [1]) == pytest.approx(5)
    assert j_functional(c, 3.0, [0]) == 0
    with pytest.raises(InputError):
        j_functional(c, 0, [1])


def test_j_functional_monotone_in_t(rng):
    c = rand_couple(rng, 3)
    x = rng.normal(size=3) + 1j * rng.normal(size=3)
    vals = [j_functional(c, t, x) for t in np.geomspace(0.01, 100, 30)]
    assert np.all(np.diff(vals) >= -1e-14)


def test_sum_norm_examples():
    n = WeightedLp(2, (1, 2))
    assert sum_norm(Couple(2, n, n), [3, 4j]) == pytest.approx(norm(n, [3, 4j]), rel=1e-8)
    assert sum_norm(Couple(2, n, n), [0, 0]) == 0
    assert sum_norm(Couple.scalar(1, 10), [1]) == pytest.approx(1, rel=1e-8)


def test_sum_norm_one_dimensional_line_search():
    # split 1 = y + (1 - y) over real y; for a one-dimensional couple the optimum is real
    c = Couple.scalar(3.0, 0.7)
    r = minimize_scalar(lambda y: 3 * abs(y) + 0.7 * abs(1 - y), bounds=(-2, 3), method="bounded",
                        options={"xatol": 1e-12})
    assert sum_norm(c, [1]) == pytest.approx(r.fun, rel=1e-7)


def test_sum_norm_against_derivative_free_oracle(rng):
    for _ in range(5):
        c = rand_couple(rng, 2)
        x = rng.normal(size=2) + 1j * rng.normal(size=2)

        def f(z):
            y = z[:2] + 1j * z[2:]
            return norm(c.norm0, y) + norm(c.norm1, x - y)

        best = min((minimize(f, z0, method="Nelder-Mead",
                             options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 40000})
                    for z0 in (np.zeros(4), np.r_[x.real, x.imag], np.r_[x.real, x.imag] / 2)),
                   key=lambda r: r.fun)
        val = sum_norm(c, x)
        assert val <= best.fun + 1e-9
        assert val == pytest.approx(best.fun, rel=1e-5)
        assert val <= min(norm(c.norm0, x), norm(c.norm1, x)) + 1e-12


def test_sum_norm_custom_gauge_fallback(rng):
    g0 = CustomGauge(lambda v: float(np.sqrt((np.abs(v) ** 2).sum())), 2, lipschitz=1.0)
    g1 = CustomGauge(lambda v: float(3 * np.abs(v).max()), 2, lipschitz=3.0)
    ref = Couple(2, WeightedLp(2, (1, 1)), WeightedLp(math.inf, (3, 3)))
    x = np.array([1.0, -0.5j])
    assert sum_norm(Couple(2, g0, g1), x) == pytest.approx(sum_norm(ref, x), rel=1e-6)


def test_k_functional_scaling(rng):
    c = rand_couple(rng, 2)
    x = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert k_functional(c, 1.0, x) == pytest.approx(sum_norm(c, x), rel=1e-9)
    ks = [k_functional(c, t, x) for t in (0.1, 1.0, 10.0)]
    assert ks[0] <= ks[1] + 1e-9 <= ks[2] + 2e-9


def test_norm_spec_from_json():
    n = norm_spec_from_json({"kind": "weighted_lp", "p": "inf", "weights": [1, 2]})
    assert math.isinf(n.p) and n.weights == (1.0, 2.0)
    n = norm_spec_from_json({"p": 2}, dim=3)
    assert n.weights == (1.0, 1.0, 1.0)


def test_couple_dimension_checks():
    with pytest.raises(InputError):
        Couple(2, WeightedLp(2, (1, 1)), WeightedLp(2, (1,)))
    with pytest.raises(InputError):
        Couple(9, WeightedLp(2, (1,) * 9), WeightedLp(2, (1,) * 9))
