"""Acceptance suite: the seven primary criteria at their stated tolerances.

Each criterion is a plain function returning ``(passed, detail)``; the
pytest wrappers record one ``PASS``/``FAIL`` line per criterion, which the
terminal summary repeats.  Running this file as a script prints the same
lines without pytest.

The checks deliberately avoid the library's own audit helpers: the
operator identities and the axiom (iii) audit are re-implemented here, and
the one-dimensional oracle uses the three-circle bound ``M**theta`` together
with the independent first-order annulus solver.
"""

import math
import time
import warnings

import numpy as np
import pytest

from interplab.couple import Couple, WeightedLp
from interplab.jcalculus import JSpaceSpec, VariantNorm, j_norm
from interplab.laurent import AnnulusSpec, annulus_norm, evaluate, fc_equals_annulus, fejer_sum, \
    fejer_tail_bound, fourier_coeff
from interplab.pseudolattice import PseudolatticeSpec, fc_sup, pl_norm, uc_sup
from interplab.repsolver import WindowProblem, stafney_sweep
from interplab.seqops import divide_at_zero, multiply_by_linear, null_corrector, shift
from interplab.sequences import FinSeq

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []

LP = PseudolatticeSpec.lp
FC = PseudolatticeSpec("FC")
UC = PseudolatticeSpec("UC")
LATTICE_SPECS = (LP(1), LP(2), LP(math.inf), PseudolatticeSpec("c0"), FC, UC)


def _weighted_lp(rng, dim, ps=(1, 2, 3, math.inf)):
    return WeightedLp(ps[int(rng.integers(len(ps)))], tuple(np.exp(rng.uniform(-1, 1, dim))))


def _couple(rng, dim, ps=(1, 2, 3, math.inf)):
    return Couple(dim, _weighted_lp(rng, dim, ps), _weighted_lp(rng, dim, ps))


def _cvec(rng, dim):
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


def _seq(rng, dim, spread=6, max_len=8):
    length = int(rng.integers(1, max_len + 1))
    lo = int(rng.integers(-spread, spread - length + 2))
    return FinSeq(lo, rng.normal(size=(length, dim)) + 1j * rng.normal(size=(length, dim)), dim)


# -- 1 ------------------------------------------------------------------------------

C1_WINDOWS = [0, 1, 2, 3, 4, 6, 8, 10, 12, 14, 16, 18, 20, 25, 30]


def criterion_1():
    """Windowed values nonincreasing in N; relative change N=20 -> 30 below 1e-3."""
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_step, failures, cells = 0.0, [], 0
    for i in range(20):
        dim = 2 if i < 10 else 3
        c, x = _couple(rng, dim), _cvec(rng, dim)
        for theta in (0.25, 0.5, 0.75):
            for p in (1, 2, 16):
                spec = JSpaceSpec.same(LP(p), theta=theta)
                sweep = dict(stafney_sweep(WindowProblem(c, spec, x, 0), windows=C1_WINDOWS))
                vals = [sweep[N].value for N in C1_WINDOWS]
                step = max((b - a) / a for a, b in zip(vals, vals[1:]))
                worst_step = max(worst_step, step)
                change = abs(sweep[20].value - sweep[30].value) / sweep[30].value
                cells += 1
                if step > 1e-4 or change >= 1e-3:
                    failures.append((i, theta, p, change))
    wall = time.perf_counter() - t0
    ok = not failures and wall < 300
    by_p = {}
    for _, th, p, ch in failures:
        key = (th, p)
        by_p[key] = max(by_p.get(key, 0.0), ch)
    detail = (f"{cells - len(failures)}/{cells} cells pass; worst monotonicity step {worst_step:.1e}; "
              f"{wall:.0f}s")
    if by_p:
        detail += "; N20->30 change >= 1e-3 in (theta,p): " + ", ".join(
            f"({th:g},{p:g}) max {ch:.1e}" for (th, p), ch in sorted(by_p.items()))
    return ok, detail


# -- 2 ------------------------------------------------------------------------------


def criterion_2():
    """(|.|, M|.|): the FC/annulus value of x=1 approaches M**theta within 1e-3 by N=20.

    The three-circle theorem makes ``M**theta`` a lower bound on every
    window, so the certified lower bound of each conic solve must respect
    it; the first-order annulus solver is run at N=20 as an independent route.
    """
    t0 = time.perf_counter()
    worst, worst_an, issues, conic_wall = 0.0, 0.0, [], 0.0
    for M in (2.0, 10.0):
        c = Couple.scalar(1.0, M)
        for theta in (0.25, 0.5, 0.75):
            target = M ** theta
            tc = time.perf_counter()
            sweep = stafney_sweep(WindowProblem(c, JSpaceSpec.same(FC, theta=theta), [1.0], 0),
                                  windows=[0, 2, 4, 8, 12, 16, 20])
            conic_wall += time.perf_counter() - tc
            final = sweep[-1][1]
            gap = final.value - target
            worst = max(worst, gap)
            if any(r.lower < target * (1 - 1e-6) for _, r in sweep):
                issues.append(f"lower bound below M^theta at M={M:g}, theta={theta}")
            if gap >= 1e-3:
                issues.append(f"conic value off by {gap:.1e} at M={M:g}, theta={theta}")
            an = annulus_norm(c, [1.0], AnnulusSpec(theta=theta), 20, starts=("delta",)).value
            worst_an = max(worst_an, an - target)
            if not (target * (1 - 1e-6) <= an < target + 1e-3):
                issues.append(f"annulus value off by {an - target:.1e} at M={M:g}, theta={theta}")
    wall = time.perf_counter() - t0
    if conic_wall >= 60:
        issues.append(f"conic sweeps took {conic_wall:.0f}s")
    detail = (f"max excess over M^theta at N=20: conic {worst:.1e}, first-order annulus {worst_an:.1e}; "
              f"conic {conic_wall:.0f}s, total {wall:.0f}s")
    if issues:
        detail += "; " + "; ".join(issues)
    return not issues, detail


# -- 3 ------------------------------------------------------------------------------


def criterion_3():
    """FC windowed norm and annulus norm agree within 1e-2 at N=15, theta=0.5."""
    rng = np.random.default_rng(303)
    spec = AnnulusSpec(theta=0.5)
    worst = 0.0
    for i in range(10):
        dim = 1 if i < 5 else 2
        c, x = _couple(rng, dim, ps=(1, 2, math.inf)), _cvec(rng, dim)
        fcv, anv = fc_equals_annulus(c, x, spec, 15)
        worst = max(worst, abs(fcv - anv) / fcv)
    return worst < 1e-2, f"max relative difference {worst:.1e} over 10 couples"


# -- 4 ------------------------------------------------------------------------------


def criterion_4():
    """Null corrector, division round trip, rk bound and shift isometry."""
    rng = np.random.default_rng(404)
    worst_null = worst_div = worst_shift = 0.0
    rk_viol = 0
    for _ in range(1000):
        dim = int(rng.integers(1, 4))
        h = _seq(rng, dim)
        theta = rng.uniform(0.1, 0.9)
        s = math.e ** theta * (np.exp(1j * rng.uniform(0, 2 * np.pi)) if rng.random() < 0.3 else 1)
        r = null_corrector(h, s)
        scale = float(np.sum(np.abs(s) ** r.indices * np.linalg.norm(r.entries, axis=1)))
        worst_null = max(worst_null, float(np.linalg.norm(evaluate(r, s))) / scale)

        g = divide_at_zero(multiply_by_linear(h, s), s)
        worst_div = max(worst_div, (g - h).mass() / h.mass())

        c = _couple(rng, dim)
        xs = LATTICE_SPECS[int(rng.integers(len(LATTICE_SPECS)))]
        js = JSpaceSpec.same(xs, theta=theta, s=s)
        lhs = j_norm(js, c, null_corrector(h, js.s))
        if lhs > js.base * (1 + 1) * j_norm(js, c, h) * (1 + 1e-12):
            rk_viol += 1

    for spec in LATTICE_SPECS:
        for _ in range(100):
            dim = int(rng.integers(1, 4))
            b, space = _seq(rng, dim), _weighted_lp(rng, dim)
            v = pl_norm(spec, b, space)
            worst_shift = max(worst_shift, abs(pl_norm(spec, shift(b), space) - v) / v)
    ok = worst_null <= 1e-12 and worst_div <= 1e-10 and rk_viol == 0 and worst_shift <= 1e-12
    return ok, (f"null corrector {worst_null:.1e}, division round trip {worst_div:.1e}, "
                f"rk violations {rk_viol}/1000, shift isometry {worst_shift:.1e}")


# -- 5 ------------------------------------------------------------------------------


def _norm_lower_bound(T, src, dst, extra, rng, samples=256):
    """max ||T v|| / ||v|| over random and supplied vectors: a lower bound for ||T||."""
    V = rng.normal(size=(samples, src.dim)) + 1j * rng.normal(size=(samples, src.dim))
    V = np.vstack([V] + [np.atleast_2d(e) for e in extra])
    num, den = dst.evaluate(V @ T.T), src.evaluate(V)
    keep = den > 0
    return float(np.max(num[keep] / den[keep]))


def criterion_5():
    """Axiom (iii) with C=1 for l^p, c0, FC (sampled) and UC (enumerated signs)."""
    rng = np.random.default_rng(505)
    specs = (LP(1), LP(2), LP(3), LP(math.inf), PseudolatticeSpec("c0"), FC, UC)
    violations, worst, counts = 0, -math.inf, {}
    for _ in range(500):
        d_src, d_dst = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        src, dst = _weighted_lp(rng, d_src), _weighted_lp(rng, d_dst)
        T = rng.normal(size=(d_dst, d_src)) + 1j * rng.normal(size=(d_dst, d_src))
        b = _seq(rng, d_src)
        spec = specs[int(rng.integers(len(specs)))]
        counts[spec.label] = counts.get(spec.label, 0) + 1
        Tb = FinSeq(b.lo, b.entries @ T.T, d_dst)
        lhs = pl_norm(spec, Tb, dst)
        rhs_b = pl_norm(spec, b, src)
        if spec.kind in ("lp", "c0"):
            extra = list(b.entries)
        elif spec.kind == "FC":
            # the maximiser of the image certifies a vector w with ||T w|| = lhs, ||w|| <= ||b||_FC
            t = fc_sup(spec, Tb, dst).t
            center = (Tb.lo + Tb.hi) // 2
            w = np.exp(1j * t * (b.indices - center)) @ b.entries
            extra = [w]
            rhs_b = max(rhs_b, float(src.evaluate(w)))
        else:
            pat = uc_sup(spec, Tb, dst).pattern
            full = np.zeros(len(b), dtype=complex)
            full[Tb.lo - b.lo:Tb.lo - b.lo + len(Tb)] = pat
            extra = [full @ b.entries]
        tnorm = _norm_lower_bound(T, src, dst, extra, rng)
        excess = lhs - tnorm * rhs_b
        worst = max(worst, excess)
        if excess > 1e-8:
            violations += 1
    per = ", ".join(f"{k} {v}" for k, v in sorted(counts.items()))
    return violations == 0, f"{violations} violations in 500 trials (max excess {worst:.1e}; {per})"


# -- 6 ------------------------------------------------------------------------------


def criterion_6():
    """B0 = B1: the variant-e J-norm value equals ||x|| at every window (p = 1)."""
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(50):
        dim = int(rng.integers(1, 4))
        space = _weighted_lp(rng, dim)
        c = Couple(dim, space, space)
        x = _cvec(rng, dim) * math.exp(rng.uniform(-3, 3))
        theta = rng.uniform(0.05, 0.95)
        target = float(space.evaluate(x))
        sweep = stafney_sweep(WindowProblem(c, VariantNorm("J-e", theta, 1), x, 0), n_max=6)
        for _, rep in sweep:
            worst = max(worst, abs(rep.value - target) / target)
    return worst <= 1e-3, f"max relative deviation from ||x|| {worst:.1e} (50 x, N = 0..6)"


# -- 7 ------------------------------------------------------------------------------


def criterion_7():
    """Fourier coefficients from samples are exact; Fejer errors respect the tail bound."""
    rng = np.random.default_rng(707)
    worst_coeff, worst_ratio, fejer_viol = 0.0, 0.0, 0
    grid = np.exp(2j * np.pi * np.arange(1024) / 1024)
    for _ in range(100):
        dim = int(rng.integers(1, 4))
        b = _seq(rng, dim, spread=8, max_len=10)
        space = _weighted_lp(rng, dim)
        deg = b.degree()
        M = 2 * deg + 1 + int(rng.integers(0, 5))
        samples = evaluate(b, np.exp(2j * np.pi * np.arange(M) / M))
        for n in range(-deg, deg + 1):
            err = float(np.abs(fourier_coeff(samples, n, degree=deg) - b[n]).max())
            worst_coeff = max(worst_coeff, err)
        for radius in (1.0, math.e):
            exact = evaluate(b, radius * grid)
            for N in (max(deg, 1), 4 * deg + 3, 40):
                err = float(space.evaluate(fejer_sum(b, N, radius * grid) - exact).max())
                bound = fejer_tail_bound(b, N, radius, space)
                if err > bound * (1 + 1e-12) + 1e-13:
                    fejer_viol += 1
                if bound > 0:
                    worst_ratio = max(worst_ratio, err / bound)
    ok = worst_coeff <= 1e-12 and fejer_viol == 0
    return ok, (f"coefficient recovery error {worst_coeff:.1e}; Fejer error/bound max "
                f"{worst_ratio:.3f}, {fejer_viol} violations")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7]


def _run(k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        ok, detail = CRITERIA[k - 1]()
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, line


@pytest.mark.slow
@pytest.mark.parametrize("k", range(1, 8))
def test_criterion(k):
    ok, line = _run(k)
    assert ok, line


if __name__ == "__main__":
    for k in range(1, 8):
        _run(k)
