import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interplab.audit import AUDIT_SPECS, axiom_iii_audit, operators_audit
from interplab.couple import Couple, WeightedLp
from interplab.errors import InputError, NumericalInstabilityError, PreconditionError
from interplab.jcalculus import JSpaceSpec, j_norm
from interplab.laurent import LaurentPoly, evaluate
from interplab.pseudolattice import PseudolatticeSpec, pl_norm
from interplab.seqops import (diff_bound, diff_op, divide_at_zero, multiply_by_linear,
                              null_corrector, rk_bound_check, shift, unshift)
from interplab.sequences import FinSeq

from conftest import rand_couple, rand_seq


def test_shift_examples():
    v = np.array([1.0, 2.0])
    assert shift(FinSeq.delta(0, v)).allclose(FinSeq.delta(1, v), atol=0)
    assert shift(FinSeq.zeros(2)).is_zero
    b = FinSeq(-2, np.arange(6.0).reshape(3, 2) + 1)
    assert unshift(shift(b, 3), 3).allclose(b, atol=0)


@pytest.mark.parametrize("spec", AUDIT_SPECS, ids=lambda s: s.label)
def test_shift_is_isometry(spec, rng):
    space = WeightedLp(2, (1.0, 0.4))
    for _ in range(20):
        b = rand_seq(rng, 2, lo=int(rng.integers(-4, 3)), length=int(rng.integers(1, 7)))
        v = pl_norm(spec, b, space)
        assert abs(pl_norm(spec, shift(b), space) - v) <= 1e-12 * v


def _brute_diff(j, rho, b, lo, hi):
    out = {}
    for n in range(lo, hi + 1):
        ks = range(-60, 0) if j == 0 else range(0, 60)
        out[n] = sum((rho ** (-k) if j == 0 else rho ** k) * b[n + k + 1] for k in ks)
    return out


@pytest.mark.parametrize("j", [0, 1])
def test_diff_op_against_direct_sums(j, rng):
    rho = 0.55 * np.exp(0.7j)
    b = rand_seq(rng, 2, lo=-2, length=5)
    res = diff_op(j, rho, b)
    brute = _brute_diff(j, rho, b, -12, 12)
    for n, v in brute.items():
        assert np.abs(res.seq[n] - v).max() <= 5e-14
    r = abs(rho)
    assert res.dropped <= res.threshold * r / (1 - r) * (1 + 1e-12)


def test_diff_op_delta_examples():
    rho, v = 0.5, np.array([1.0, -2.0])
    d0 = diff_op(0, rho, FinSeq.delta(0, v)).seq
    for n in range(-3, 10):
        expect = rho ** (n + 1) * v if n >= 0 else 0 * v
        assert np.allclose(d0[n], expect, atol=1e-15)
    d1 = diff_op(1, rho, FinSeq.delta(0, v)).seq
    for n in range(-10, 3):
        expect = rho ** (-n - 1) * v if n <= -1 else 0 * v
        assert np.allclose(d1[n], expect, atol=1e-15)
    assert diff_op(0, rho, FinSeq.zeros(2)).seq.is_zero


def test_diff_op_checks():
    with pytest.raises(InputError):
        diff_op(0, 1.0, FinSeq.delta(0, [1.0]))
    with pytest.raises(InputError):
        diff_op(2, 0.5, FinSeq.delta(0, [1.0]))


def test_diff_linearity_and_bound(rng):
    space = WeightedLp(3, (1.0, 2.0))
    for _ in range(50):
        j = int(rng.integers(2))
        rho = rng.uniform(0.1, 0.9) * np.exp(1j * rng.uniform(0, 6.3))
        a, b = rand_seq(rng, 2), rand_seq(rng, 2, lo=-1)
        alpha = complex(rng.normal(), rng.normal())
        left = diff_op(j, rho, a * alpha + b).seq
        right = diff_op(j, rho, a).seq * alpha + diff_op(j, rho, b).seq
        assert (left - right).mass() <= 1e-12 * max(1.0, a.mass() + b.mass())
        for p in (1, 2, math.inf):
            spec = PseudolatticeSpec.lp(p)
            lhs = pl_norm(spec, diff_op(j, rho, a).seq, space)
            assert lhs <= diff_bound(rho, j) * pl_norm(spec, a, space) * (1 + 1e-12)


def test_divide_examples():
    s = 1.6487
    g = divide_at_zero(FinSeq(0, [-s, 1.0]), s)
    assert g.allclose(FinSeq.delta(0, [1.0]), atol=1e-15)
    v = np.array([2.0, 1j])
    f = multiply_by_linear(FinSeq.delta(1, v), s)
    assert divide_at_zero(f, s).allclose(FinSeq.delta(1, v), atol=1e-14)
    out = divide_at_zero(LaurentPoly(FinSeq(0, [-s, 1.0])), s)
    assert isinstance(out, LaurentPoly)


def test_divide_errors():
    with pytest.raises(PreconditionError):
        divide_at_zero(FinSeq(0, [1.0, 1.0]), 2.0)
    with pytest.raises(PreconditionError):
        divide_at_zero(FinSeq.delta(3, [1.0]), 2.0)
    with pytest.raises(InputError):
        divide_at_zero(FinSeq(0, [0.0, 1.0]), 0.0)


def test_divide_detects_inconsistent_halves():
    # a loose zero test lets f(s) = 5e-9 through; the strict meeting check catches it
    s = 1.0
    f = FinSeq(0, [[1.0], [-1.0 + 5e-9]])
    with pytest.raises(NumericalInstabilityError):
        divide_at_zero(f, s, zero_tol=1e-8, meet_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(-4, 4), st.integers(1, 8), st.floats(0.2, 3.0), st.floats(0, 6.28),
       st.integers(0, 2 ** 31))
def test_divide_round_trip(lo, length, r, phase, seed):
    rng = np.random.default_rng(seed)
    h = FinSeq(lo, rng.normal(size=(length, 2)) + 1j * rng.normal(size=(length, 2)), 2)
    s = r * np.exp(1j * phase)
    g = divide_at_zero(multiply_by_linear(h, s), s)
    assert (g - h).mass() <= 1e-10 * h.mass()


def test_null_corrector(rng):
    v = np.array([1.0, 3j])
    s = 1.3 + 0.4j
    out = null_corrector(FinSeq.delta(0, v), s)
    assert np.allclose(out[0], -s * v) and np.allclose(out[1], v)
    assert null_corrector(FinSeq.zeros(2), s).is_zero
    for _ in range(100):
        h = rand_seq(rng, 2, lo=int(rng.integers(-5, 3)))
        assert np.linalg.norm(evaluate(null_corrector(h, s), s)) <= 1e-12 * h.mass() * 10


def test_rk_bound_examples(rng):
    c = rand_couple(rng, 2)
    spec = JSpaceSpec.same(PseudolatticeSpec.lp(2))
    v = rng.normal(size=2)
    lhs, rhs = rk_bound_check(c, spec, FinSeq.delta(0, v))
    # closed form: entries -s v at 0 and v at 1
    s = spec.s.real
    exact = max(math.hypot(s * c.norm0.evaluate(v), c.norm0.evaluate(v)),
                math.hypot(s * c.norm1.evaluate(v), math.e * c.norm1.evaluate(v)))
    assert lhs == pytest.approx(exact)
    assert rhs == pytest.approx(2 * math.e * max(c.norm0.evaluate(v), c.norm1.evaluate(v)))
    assert lhs <= rhs
    assert rk_bound_check(c, spec, FinSeq.zeros(2)) == (0.0, 0.0)


def test_operators_audit_is_clean():
    summary = operators_audit(Couple(2, WeightedLp(2, (1, 2)), WeightedLp(1, (1, 0.5))), 100, 7)
    assert set(summary) == {"nullCorrector", "divideRoundTrip", "rkBound", "shiftIsometry",
                            "diffLinearity", "diffBound"}
    assert all(e["violations"] == 0 for e in summary.values())


def test_axiom_iii_audit_is_clean():
    summary = axiom_iii_audit(200, 3)
    assert sum(e["trials"] for e in summary.values()) == 200
    assert all(e["violations"] == 0 for e in summary.values())
