"""Pseudolattice norms of finitely supported vector sequences.

Supported kinds: ``lp`` (``1 <= p <= inf``), ``c0``, ``FC`` (sup over the
circle of the associated trigonometric polynomial), ``UC`` and ``WUC``
(sup over multiplier sequences ``|lambda_n| <= 1``).  On finite support
``WUC`` and ``UC`` coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import CapacityError, InputError
from .sequences import FinSeq

__all__ = [
    "PseudolatticeSpec",
    "TrigSup",
    "UCSup",
    "entry_norms",
    "lp_norm",
    "fc_norm",
    "fc_sup",
    "uc_norm",
    "uc_sup",
    "pl_norm",
    "trig_grid_size",
    "spec_from_json",
]

KINDS = ("lp", "c0", "FC", "UC", "WUC")

#: Largest FFT grid used for a sampled sup.
MAX_GRID = 2 ** 22
#: Largest number of multiplier patterns enumerated in one UC evaluation.
MAX_PATTERNS = 2 ** 22


@dataclass(frozen=True)
class PseudolatticeSpec:
    """One of ``lp(p)``, ``c0``, ``FC``, ``UC``, ``WUC``.

    ``tol`` is the absolute accuracy of sampled sups (FC, UC phase mode).
    ``mode`` selects the UC multiplier set: ``"sign"`` enumerates the real
    patterns ``lambda_n = +-1`` exactly; ``"phase"`` uses ``q``-th roots of
    unity, approximating the complex-multiplier norm.  ``cap`` bounds the
    support size for exhaustive enumeration.
    """

    kind: str
    p: float = None
    tol: float = 1e-6
    mode: str = "sign"
    q: int = 8
    cap: int = 20

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown pseudolattice kind {self.kind!r}")
        if self.kind == "lp":
            p = math.inf if self.p is None else float(self.p)
            if not p >= 1:
                raise InputError(f"p must be >= 1, got {self.p}")
            object.__setattr__(self, "p", p)
        elif self.kind == "c0":
            object.__setattr__(self, "p", math.inf)
        if not self.tol > 0:
            raise InputError("tol must be positive")
        if self.mode not in ("sign", "phase"):
            raise InputError(f"unknown UC mode {self.mode!r}")
        if self.q < 2:
            raise InputError("q must be at least 2")

    @classmethod
    def lp(cls, p, **kw):
        return cls("lp", p, **kw)

    @property
    def label(self):
        if self.kind == "lp":
            return f"l{'inf' if math.isinf(self.p) else f'{self.p:g}'}"
        if self.kind in ("UC", "WUC"):
            return f"{self.kind}[{self.mode}]"
        return self.kind

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind == "lp":
            out["p"] = "inf" if math.isinf(self.p) else self.p
        if self.kind in ("FC", "UC", "WUC"):
            out["tol"] = self.tol
        if self.kind in ("UC", "WUC"):
            out.update(mode=self.mode, q=self.q, cap=self.cap)
        return out


def spec_from_json(obj, p_default=None):
    kind = obj["kind"]
    p = obj.get("p", p_default)
    if p in ("inf", "Infinity"):
        p = math.inf
    kw = {k: obj[k] for k in ("tol", "mode", "q", "cap") if k in obj}
    return PseudolatticeSpec(kind, p, **kw)


def _check_dim(b, space):
    if b.dim != space.dim:
        raise InputError(f"sequence dimension {b.dim} does not match space dimension {space.dim}")


def entry_norms(b, space):
    """The scalar sequence ``{||b_n||_B}`` over the stored window."""
    _check_dim(b, space)
    if b.is_zero:
        return np.zeros(0)
    return np.asarray(space.evaluate(b.entries), dtype=float)


def lp_norm(spec, b, space):
    """``||{||b_n||_B}||_{l^p}``; ``c0`` uses the sup norm."""
    if spec.kind not in ("lp", "c0"):
        raise InputError(f"lp_norm called with kind {spec.kind}")
    a = entry_norms(b, space)
    if a.size == 0:
        return 0.0
    p = spec.p
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.sum())
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


# -- FC -----------------------------------------------------------------------


class TrigSup(NamedTuple):
    """Sampled sup of ``t -> ||sum_n e^{int} b_n||``."""

    value: float
    t: float
    grid: int
    bound: float


def trig_grid_size(offsets, norms, tol, min_size=64):
    """Uniform grid size certifying a sampled sup within ``tol``.

    ``offsets`` are the (centred) frequencies and ``norms`` the coefficient
    norms.  Two certificates are combined: the Lipschitz bound
    ``pi * sum |m| a_m / M`` and the curvature bound
    ``(2 pi / M)**2 * sum m**2 a_m / 2``, the latter valid because a norm of
    an affine path is convex, so one of the two neighbours of the maximiser
    is within second order.  Returns ``(M, achieved_bound)``.
    """
    offsets = np.abs(np.asarray(offsets, dtype=float))
    norms = np.asarray(norms, dtype=float)
    l1 = float(np.sum(offsets * norms))
    l2 = float(np.sum(offsets ** 2 * norms))
    need = max(min_size, 4 * (2 * int(offsets.max(initial=0)) + 1))
    if l1 > 0:
        m1 = math.pi * l1 / tol
        m2 = 2 * math.pi * math.sqrt(l2 / (2 * tol))
        need = max(need, min(m1, m2))
    M = 1 << max(0, math.ceil(math.log2(need)))
    M = min(M, MAX_GRID)
    h = 2 * math.pi / M
    bound = min(0.5 * h * l1, 0.5 * h * h * l2)
    return M, bound


def _trig_eval(coeffs, offsets, t):
    ph = np.exp(1j * np.multiply.outer(np.atleast_1d(t), offsets))
    return ph @ coeffs


def trig_sup(coeffs, offsets, space, tol, refine=3):
    """Sup over ``t`` of ``||sum_m e^{imt} coeffs[m]||``, ``offsets`` integers."""
    coeffs = np.asarray(coeffs, dtype=complex)
    offsets = np.asarray(offsets, dtype=int)
    if coeffs.shape[0] == 0:
        return TrigSup(0.0, 0.0, 0, 0.0)
    norms = np.asarray(space.evaluate(coeffs), dtype=float)
    M, bound = trig_grid_size(offsets, norms, tol)
    buf = np.zeros((M, coeffs.shape[1]), dtype=complex)
    np.add.at(buf, offsets % M, coeffs)
    vals = M * np.fft.ifft(buf, axis=0)
    g = np.asarray(space.evaluate(vals), dtype=float)
    best_k = int(np.argmax(g))
    best_v, best_t = float(g[best_k]), 2 * math.pi * best_k / M
    if refine and M > 1:
        h = 2 * math.pi / M
        top = np.argpartition(-g, min(refine, M - 1))[:refine]

        def neg(t):
            return -float(space.evaluate(_trig_eval(coeffs, offsets, t)[0]))

        for k in top:
            tk = 2 * math.pi * int(k) / M
            r = minimize_scalar(neg, bounds=(tk - h, tk + h), method="bounded",
                                options={"xatol": 1e-13})
            if -r.fun > best_v:
                best_v, best_t = float(-r.fun), float(r.x) % (2 * math.pi)
    return TrigSup(best_v, best_t, M, bound)


def fc_sup(spec, b, space):
    """Detailed FC evaluation; the polynomial is centred so the grid is shift invariant."""
    _check_dim(b, space)
    if b.is_zero:
        return TrigSup(0.0, 0.0, 0, 0.0)
    center = (b.lo + b.hi) // 2
    res = trig_sup(b.entries, b.indices - center, space, spec.tol)
    return res


def fc_norm(spec, b, space):
    """``sup_t ||sum_n e^{int} b_n||_B``, within ``spec.tol`` of the true sup."""
    if spec.kind != "FC":
        raise InputError(f"fc_norm called with kind {spec.kind}")
    return fc_sup(spec, b, space).value


# -- UC -----------------------------------------------------------------------


class UCSup(NamedTuple):
    """Result of a UC evaluation: value, maximising multipliers, error bound."""

    value: float
    pattern: np.ndarray
    bound: float
    mode: str


def _pattern_blocks(m, mode, q, block=1 << 15):
    """Yield blocks of multiplier patterns, first multiplier fixed to 1."""
    if m == 0:
        return
    if mode == "sign":
        alphabet = np.array([1.0, -1.0], dtype=complex)
    else:
        alphabet = np.exp(2j * np.pi * np.arange(q) / q)
    k = len(alphabet)
    total = k ** (m - 1)
    for start in range(0, total, block):
        idx = np.arange(start, min(total, start + block))
        pat = np.ones((len(idx), m), dtype=complex)
        rem = idx.copy()
        for col in range(m - 1, 0, -1):
            pat[:, col] = alphabet[rem % k]
            rem //= k
        yield pat


def uc_sup(spec, b, space):
    """Sup of ``||sum lambda_n b_n||`` over the multiplier set selected by ``spec.mode``."""
    _check_dim(b, space)
    if b.is_zero:
        return UCSup(0.0, np.zeros(0, dtype=complex), 0.0, spec.mode)
    keep = np.flatnonzero(np.any(b.entries != 0, axis=1))
    E = b.entries[keep]
    m = len(keep)
    k = 2 if spec.mode == "sign" else spec.q
    if spec.mode == "sign" and m > spec.cap:
        raise CapacityError(
            f"support of size {m} exceeds the exact-enumeration cap {spec.cap}; "
            "use mode='phase' with a small support or raise cap")
    if k ** (m - 1) > MAX_PATTERNS:
        raise CapacityError(f"{k}**{m - 1} multiplier patterns exceed the enumeration cap")
    best_v, best_p = -1.0, None
    for pat in _pattern_blocks(m, spec.mode, spec.q):
        vals = np.asarray(space.evaluate(pat @ E), dtype=float)
        i = int(np.argmax(vals))
        if vals[i] > best_v:
            best_v, best_p = float(vals[i]), pat[i]
    full = np.zeros(len(b), dtype=complex)
    full[keep] = best_p
    if spec.mode == "sign":
        bound = 0.0
    else:
        bound = float(np.sum(space.evaluate(E))) * 2 * math.pi / spec.q
    return UCSup(best_v, full, bound, spec.mode)


def uc_norm(spec, b, space):
    """UC / WUC norm of ``b``; see :func:`uc_sup` for the error bound in phase mode."""
    if spec.kind not in ("UC", "WUC"):
        raise InputError(f"uc_norm called with kind {spec.kind}")
    return uc_sup(spec, b, space).value


def pl_norm(spec, b, space):
    """Dispatch on ``spec.kind``."""
    if spec.kind in ("lp", "c0"):
        return lp_norm(spec, b, space)
    if spec.kind == "FC":
        return fc_norm(spec, b, space)
    return uc_norm(spec, b, space)

