"""Coefficient-level operators: shifts, differentiation operators, division by ``z - s``.

All operators act on :class:`~interplab.sequences.FinSeq`.  Where the exact
result has infinite support (the differentiation operators) it is truncated
at a relative decay threshold and the truncation is reported.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import InputError, NumericalInstabilityError, PreconditionError
from .jcalculus import j_norm
from .sequences import FinSeq

__all__ = [
    "shift",
    "unshift",
    "DiffResult",
    "diff_op",
    "diff_bound",
    "multiply_by_linear",
    "divide_at_zero",
    "null_corrector",
    "rk_bound_check",
    "SHIFT_NORM",
]

#: Norm of the right shift on every supported pseudolattice (it is an isometry).
SHIFT_NORM = 1.0


def _poly_seq(f):
    return getattr(f, "coeffs", f)


def shift(b, k=1):
    """Right shift: ``(S b)_n = b_{n-k}``."""
    if b.is_zero:
        return b
    return FinSeq(b.lo + k, b.entries, b.dim)


def unshift(b, k=1):
    """Inverse of :func:`shift`."""
    return shift(b, -k)


class DiffResult(NamedTuple):
    """Truncated output of a differentiation operator.

    ``radius`` is the number of indices kept on the decaying side beyond the
    exact core; ``dropped`` is the mass (sum of Euclidean norms) of the
    discarded geometric tail, computed exactly.
    """

    seq: FinSeq
    radius: int
    threshold: float
    dropped: float


def diff_op(j, rho, b, rel_threshold=1e-14):
    """``D_{j,rho}``: ``(D_0 b)_n = sum_{k<0} rho**(-k) b_{n+k+1}``, ``(D_1 b)_n = sum_{k>=0} rho**k b_{n+k+1}``.

    For finitely supported ``b`` the output of ``D_0`` vanishes below
    ``b.lo`` and decays geometrically upwards; ``D_1`` vanishes above
    ``b.hi - 1`` and decays downwards.  The decaying side is cut once the
    entries fall below ``rel_threshold`` times the mass of ``b``.
    """
    if j not in (0, 1):
        raise InputError(f"j must be 0 or 1, got {j}")
    rho = complex(rho)
    r = abs(rho)
    if not 0 < r < 1:
        raise InputError(f"|rho| must lie in (0, 1), got {r:g}")
    if b.is_zero:
        return DiffResult(b, 0, rel_threshold, 0.0)
    thr = rel_threshold * b.mass()
    E, L, dim = b.entries, len(b), b.dim
    core = np.zeros((L, dim), dtype=complex)
    acc = np.zeros(dim, dtype=complex)
    if j == 0:
        # (D_0 b)_n = rho * ((D_0 b)_{n-1} + b_n), zero below b.lo
        for i in range(L):
            acc = rho * (acc + E[i])
            core[i] = acc
    else:
        # (D_1 b)_n = b_{n+1} + rho * (D_1 b)_{n+1}, zero above b.hi - 1;
        # core[i] holds index b.lo - 1 + i
        for i in range(L - 1, -1, -1):
            acc = E[i] + rho * acc
            core[i] = acc
    # beyond the support the entries are rho**k times the boundary entry
    edge = float(np.linalg.norm(acc))
    radius = 0
    if edge > thr and thr > 0:
        radius = math.ceil(math.log(thr / edge) / math.log(r))
    k = np.arange(1, radius + 1)
    tail = rho ** k[:, None] * acc[None, :]
    if j == 0:
        out, lo = np.vstack([core, tail]), b.lo
    else:
        out, lo = np.vstack([tail[::-1], core]), b.lo - 1 - radius
    dropped = edge * r ** (radius + 1) / (1 - r)
    return DiffResult(FinSeq(lo, out, dim), radius, thr, dropped)


def diff_bound(rho, j):
    """Geometric-series majorant ``K`` with ``||D_{j,rho} b|| <= K ||b||`` for isometric shifts."""
    r = abs(complex(rho))
    return r / (1 - r) if j == 0 else 1 / (1 - r)


def multiply_by_linear(h, s):
    """Coefficients of ``(z - s) h(z)``: ``f_n = h_{n-1} - s h_n``."""
    h = _poly_seq(h)
    if h.is_zero:
        return h
    return shift(h) - h * s


def null_corrector(h, s):
    """``{h_{n-1} - s h_n}``; its weighted sum ``sum s**n out_n`` telescopes to 0."""
    return multiply_by_linear(h, s)


def divide_at_zero(f, s, zero_tol=1e-10, meet_tol=1e-10):
    """Solve ``f_n = g_{n-1} - s g_n`` for finitely supported ``g`` (so ``g = f / (z - s)``).

    The bottom-up recursion ``g_n = (g_{n-1} - f_n) / s`` (from ``g_{lo-1} = 0``)
    is stable for ``|s| > 1``; the top-down recursion ``g_{n-1} = f_n + s g_n``
    (from ``g_hi = 0``) is stable for ``|s| < 1``.  Both are run to a
    meeting index; the identity at that index is checked and the two halves
    are joined.  Raises :class:`PreconditionError` if ``f(s)`` is not zero
    relative to the coefficient mass and :class:`NumericalInstabilityError`
    if the halves disagree.
    """
    from .laurent import evaluate

    fs = _poly_seq(f)
    s = complex(s)
    if s == 0:
        raise InputError("s must be nonzero")
    if fs.is_zero:
        return type(f)(fs) if fs is not f else fs
    mass = fs.mass()
    val = evaluate(fs, s)
    resid = float(np.linalg.norm(val))
    # scale-aware: |s|**n spreads the magnitudes of the terms in f(s)
    n = fs.indices.astype(float)
    term_scale = float(np.sum(np.abs(s) ** n * np.linalg.norm(fs.entries, axis=1)))
    if resid > zero_tol * max(mass, term_scale):
        raise PreconditionError(f"f(s) is not zero: residual {resid:.3g}", residual=resid)
    lo, hi = fs.lo, fs.hi
    # g is supported on lo .. hi - 1
    L = hi - lo
    if L == 0:
        raise PreconditionError("a single nonzero coefficient cannot vanish at s != 0",
                                residual=resid)
    F = fs.entries
    G = np.zeros((L, fs.dim), dtype=complex)
    # choose the meeting index by stability: bottom-up error grows like |s|**-k
    if abs(s) > 1:
        m = L - 1
    elif abs(s) < 1:
        m = 0
    else:
        m = L // 2
    prev = np.zeros(fs.dim, dtype=complex)
    for k in range(0, m + 1):
        # g_{lo+k} = (g_{lo+k-1} - f_{lo+k}) / s
        prev = (prev - F[k]) / s
        G[k] = prev
    nxt = np.zeros(fs.dim, dtype=complex)
    for k in range(L - 1, m, -1):
        # g_{lo+k} = f_{lo+k+1} + s g_{lo+k+1}
        nxt = F[k + 1] + s * nxt
        G[k] = nxt
    # meeting identity at n = lo + m + 1: f_n = g_{n-1} - s g_n
    g_next = G[m + 1] if m + 1 < L else np.zeros(fs.dim, dtype=complex)
    mismatch = float(np.linalg.norm(F[m + 1] - (G[m] - s * g_next)))
    scale = max(mass, float(np.abs(G).max()) * (1 + abs(s)))
    if mismatch > meet_tol * scale:
        raise NumericalInstabilityError(
            f"one-sided recursions disagree by {mismatch:.3g}", mismatch=mismatch)
    g = FinSeq(lo, G, fs.dim)
    return type(f)(g) if fs is not f else g


def rk_bound_check(c, spec, k):
    """``(||null_corrector(k, s)||, base * (1 + C) * ||k||)`` in the J-norm of ``spec``.

    ``C = 1`` because the shift is an isometry on every supported
    pseudolattice.  Raises ``AssertionError`` on a violation.
    """
    if k.is_zero:
        return 0.0, 0.0
    rk = null_corrector(k, spec.s)
    lhs = j_norm(spec, c, rk)
    rhs = spec.base * (1 + SHIFT_NORM) * j_norm(spec, c, k)
    if lhs > rhs * (1 + 1e-9):
        raise AssertionError(f"rk bound violated: {lhs} > {rhs}")
    return lhs, rhs
