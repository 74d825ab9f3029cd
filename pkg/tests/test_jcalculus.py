import math

import numpy as np
import pytest

from interplab.couple import Couple, WeightedLp
from interplab.errors import InputError
from interplab.jcalculus import (JSpaceSpec, PhiLattice, VariantNorm, equivalence_ratio, j_norm,
                                 j_norm_components, j_norm_variant_2, j_norm_variant_e, jphi_norm,
                                 norm_selector_from_json, representation_norm)
from interplab.pseudolattice import PseudolatticeSpec
from interplab.sequences import FinSeq

from conftest import rand_couple, rand_seq

L1 = PseudolatticeSpec.lp(1)
ONE = Couple.scalar(1.0, 1.0)


def test_j_norm_examples():
    spec = JSpaceSpec.same(L1)
    assert j_norm(spec, ONE, FinSeq(0, [1.0, 1.0])) == pytest.approx(1 + math.e)
    c = Couple(2, WeightedLp(2, (1, 1)), WeightedLp(1, (2, 1)))
    v = np.array([3.0, 4.0])
    assert j_norm(spec, c, FinSeq.delta(0, v)) == pytest.approx(max(5.0, 10.0))
    assert j_norm(spec, c, FinSeq.zeros(2)) == 0


def test_base_two():
    spec = JSpaceSpec.same(L1, base=2.0, theta=0.5)
    assert j_norm(spec, ONE, FinSeq(0, [1.0, 1.0])) == pytest.approx(3.0)


@pytest.mark.parametrize("fn,base", [(j_norm_variant_e, math.e), (j_norm_variant_2, 2.0)])
def test_variant_examples(fn, base):
    c = Couple(1, WeightedLp(1, (2.0,)), WeightedLp(1, (0.5,)))
    assert fn(c, 0.3, 2, FinSeq.delta(0, [1.0])) == pytest.approx(2.0)
    assert fn(c, 0.3, 2, FinSeq.zeros(1)) == 0
    assert fn(ONE, 0.5, 1, FinSeq(0, [1.0, 1.0])) == pytest.approx(1 + math.sqrt(base))
    # brute arithmetic over the two terms
    terms = [base ** (-0.5 * n) * max(1.0, base ** n) for n in (0, 1)]
    assert fn(ONE, 0.5, 1, FinSeq(0, [1.0, 1.0])) == pytest.approx(sum(terms), rel=1e-15)


def test_variant_argument_checks():
    with pytest.raises(InputError):
        j_norm_variant_e(ONE, 1.2, 1, FinSeq.delta(0, [1.0]))
    with pytest.raises(InputError):
        j_norm_variant_2(ONE, 0.5, 0.5, FinSeq.delta(0, [1.0]))
    with pytest.raises(InputError):
        JSpaceSpec.same(L1, base=2.0, s=3.0)
    with pytest.raises(InputError):
        VariantNorm("J-3", 0.5, 1)


def test_jphi(rng):
    c = rand_couple(rng, 2)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    d = FinSeq.delta(0, v)
    expect = max(c.norm0.evaluate(v), c.norm1.evaluate(v))
    assert jphi_norm(PhiLattice(1, 0.0), c, d) == pytest.approx(expect)
    assert jphi_norm(PhiLattice(1, 0.0), c, FinSeq.zeros(2)) == 0
    for _ in range(20):
        b = rand_seq(rng, 2, lo=int(rng.integers(-4, 3)))
        theta, p = rng.uniform(0.05, 0.95), [1, 2, 3][int(rng.integers(3))]
        assert jphi_norm(PhiLattice(p, theta), c, b) == pytest.approx(
            j_norm_variant_2(c, theta, p, b), rel=1e-14)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_per_index_formula(p, rng):
    c = rand_couple(rng, 3)
    spec = JSpaceSpec.same(PseudolatticeSpec.lp(p), base=1.7, theta=0.4)
    for _ in range(20):
        b = rand_seq(rng, 3, lo=int(rng.integers(-4, 3)))
        direct = []
        for j, space in enumerate((c.norm0, c.norm1)):
            tot = sum((spec.base ** (j * n) * space.evaluate(b[n])) ** p for n in b.indices)
            direct.append(tot ** (1 / p))
        assert np.allclose(j_norm_components(spec, c, b), direct, rtol=1e-12, atol=0)


def test_nontriviality_witness():
    for kind in (L1, PseudolatticeSpec.lp(math.inf), PseudolatticeSpec("c0"),
                 PseudolatticeSpec("FC"), PseudolatticeSpec("UC")):
        for s in (1.2, 2.0 + 0.5j, -1.5):
            spec = JSpaceSpec.same(kind, s=s)
            d = FinSeq.delta(0, [1.0])
            assert sum(spec.s ** n * d[n][0] for n in d.indices) == 1
            assert 0 < j_norm(spec, ONE, d) < math.inf


@pytest.mark.parametrize("p", [1, 2, 4])
def test_equivalence_ratio_range(p, rng):
    for _ in range(100):
        c = rand_couple(rng, 2)
        theta = rng.uniform(0.1, 0.9)
        jspec = JSpaceSpec.same(PseudolatticeSpec.lp(p), theta=theta)
        var = VariantNorm("J-e", theta, p)
        b = rand_seq(rng, 2, lo=int(rng.integers(-5, 3)), length=int(rng.integers(1, 7)))
        r = equivalence_ratio(c, b, var, jspec)
        assert 1 - 1e-12 <= r <= 2 ** (1 / p) + 1e-12
        assert equivalence_ratio(c, b * 3.7j, var, jspec) == pytest.approx(r, rel=1e-12)
        assert equivalence_ratio(c, b, var, var) == 1


def test_equivalence_ratio_zero():
    with pytest.raises(InputError):
        equivalence_ratio(ONE, FinSeq.zeros(1), VariantNorm("J-e", 0.5, 1), VariantNorm("J-2", 0.5, 1))


def test_representation_norm_uses_contributions():
    spec = JSpaceSpec.same(L1, theta=0.5)
    contrib = FinSeq(0, [1.0, 1.0])
    s = math.exp(0.5)
    coeffs = FinSeq(0, [1.0, 1.0 / s])
    assert representation_norm(spec, ONE, contrib) == pytest.approx(j_norm(spec, ONE, coeffs))
    # for l^p pairs the J-space norm of a contribution sequence is the variant norm up to 2^(1/p)
    assert representation_norm(VariantNorm("J-e", 0.5, 1), ONE, contrib) == pytest.approx(1 + s)


def test_homogeneity_and_triangle(rng):
    c = rand_couple(rng, 2)
    sels = [JSpaceSpec.same(PseudolatticeSpec.lp(2)), JSpaceSpec(L1, PseudolatticeSpec("FC")),
            VariantNorm("J-e", 0.3, 2), VariantNorm("J-2", 0.6, 1), PhiLattice(3, -0.4)]
    for sel in sels:
        tol = 1e-6 if isinstance(sel, JSpaceSpec) and sel.x1.kind == "FC" else 0.0
        for _ in range(20):
            a, b = rand_seq(rng, 2), rand_seq(rng, 2, lo=-1)
            na, nb = representation_norm(sel, c, a), representation_norm(sel, c, b)
            assert representation_norm(sel, c, a + b) <= na + nb + 3 * tol * math.e ** 3 + 1e-10
            assert representation_norm(sel, c, a * (2 - 1j)) == pytest.approx(
                math.sqrt(5) * na, rel=1e-9, abs=10 * tol * math.e ** 3)


def test_selector_from_json():
    sel = norm_selector_from_json({"norm": "j", "x0": {"kind": "lp"}, "x1": {"kind": "FC"}}, 0.25, 2)
    assert isinstance(sel, JSpaceSpec) and sel.x0.p == 2 and sel.theta == 0.25
    sel = norm_selector_from_json({"norm": "J-2"}, 0.25, 3)
    assert sel == VariantNorm("J-2", 0.25, 3)
