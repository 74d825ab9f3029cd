"""Couple-level sequence norms.

Two families are provided.

* The pseudolattice-pair norm ``max_j ||{base**(j n) b_n}||_{X_j(B_j)}``
  (:func:`j_norm`), used with representations ``x = sum_n s**n b_n``.
* The J-functional norms ``||{base**(-theta n) J(base**n, c_n)}||_{l^p}``
  (:func:`j_norm_variant_e`, :func:`j_norm_variant_2`, :func:`jphi_norm`),
  used with representations ``x = sum_n c_n``.

The two conventions are related by ``c_n = s**n b_n`` with
``s = base**theta``; :func:`representation_norm` evaluates either family on
a contribution sequence ``{c_n}`` so that they can be compared directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .pseudolattice import PseudolatticeSpec, entry_norms, pl_norm
from .sequences import FinSeq

__all__ = [
    "JSpaceSpec",
    "VariantNorm",
    "PhiLattice",
    "j_norm",
    "j_norm_components",
    "j_norm_variant_e",
    "j_norm_variant_2",
    "jphi_norm",
    "variant_norm",
    "representation_norm",
    "equivalence_ratio",
    "norm_selector_from_json",
]


@dataclass(frozen=True)
class JSpaceSpec:
    """Pseudolattice pair with base, evaluation point and a parameter ``theta``.

    ``s`` defaults to ``base**theta``.  It must satisfy ``1 < |s| < base``.
    """

    x0: PseudolatticeSpec
    x1: PseudolatticeSpec
    base: float = math.e
    theta: float = 0.5
    s: complex = field(default=None)

    def __post_init__(self):
        if not self.base > 1:
            raise InputError(f"base must exceed 1, got {self.base}")
        if not 0 < self.theta < 1:
            raise InputError(f"theta must lie in (0, 1), got {self.theta}")
        s = self.base ** self.theta if self.s is None else complex(self.s)
        if not 1 < abs(s) < self.base:
            raise InputError(f"|s| = {abs(s):g} is not inside the open annulus (1, {self.base:g})")
        object.__setattr__(self, "s", complex(s))

    @classmethod
    def same(cls, x, **kw):
        return cls(x, x, **kw)

    @property
    def label(self):
        return f"J({self.x0.label},{self.x1.label})"

    def to_json(self):
        return {"norm": "j", "x0": self.x0.to_json(), "x1": self.x1.to_json(),
                "base": self.base, "theta": self.theta,
                "s": [self.s.real, self.s.imag]}


@dataclass(frozen=True)
class VariantNorm:
    """``||{base**(-theta n) J(base**n, c_n)}||_{l^p}`` on representations ``x = sum c_n``.

    ``kind`` is ``"J-e"`` (base e), ``"J-2"`` (base 2) or ``"Jphi"``, the
    discrete J-method with the lattice ``Phi`` of sequences normed by
    ``||{2**(-theta n) a_n}||_{l^p}``; for ``Jphi`` theta may be any real.
    """

    kind: str
    theta: float
    p: float

    def __post_init__(self):
        if self.kind not in ("J-e", "J-2", "Jphi"):
            raise InputError(f"unknown variant norm {self.kind!r}")
        p = float(self.p)
        if not p >= 1:
            raise InputError(f"p must be >= 1, got {self.p}")
        if self.kind != "Jphi" and not 0 < self.theta < 1:
            raise InputError(f"theta must lie in (0, 1), got {self.theta}")
        object.__setattr__(self, "p", p)

    @property
    def base(self):
        return math.e if self.kind == "J-e" else 2.0

    @property
    def label(self):
        return f"{self.kind}(theta={self.theta:g},p={self.p:g})"

    def to_json(self):
        return {"norm": self.kind, "theta": self.theta,
                "p": "inf" if math.isinf(self.p) else self.p}


@dataclass(frozen=True)
class PhiLattice:
    """Weighted ``l^p`` lattice: ``||a||_Phi = ||{2**(-weight_exponent n) a_n}||_{l^p}``."""

    p: float
    weight_exponent: float = 0.0

    def __post_init__(self):
        if not float(self.p) >= 1:
            raise InputError(f"p must be >= 1, got {self.p}")


def _lp(a, p):
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def j_norm_components(spec, c, b):
    """The two terms ``||{base**(j n) b_n}||_{X_j(B_j)}`` for ``j = 0, 1``."""
    if b.dim != c.dim:
        raise InputError(f"sequence dimension {b.dim} does not match couple dimension {c.dim}")
    if b.is_zero:
        return 0.0, 0.0
    v0 = pl_norm(spec.x0, b, c.norm0)
    v1 = pl_norm(spec.x1, b.weighted(spec.base), c.norm1)
    return v0, v1


def j_norm(spec, c, b):
    """``max_j ||{base**(j n) b_n}||_{X_j(B_j)}``."""
    return max(j_norm_components(spec, c, b))


def variant_norm(c, theta, p, b, base):
    """``||{base**(-theta n) J(base**n, b_n)}||_{l^p}`` over the support of ``b``."""
    if b.dim != c.dim:
        raise InputError(f"sequence dimension {b.dim} does not match couple dimension {c.dim}")
    if b.is_zero:
        return 0.0
    n = b.indices.astype(float)
    a0 = entry_norms(b, c.norm0)
    a1 = entry_norms(b, c.norm1)
    jvals = np.maximum(a0, base ** n * a1)
    return _lp(base ** (-theta * n) * jvals, float(p))


def j_norm_variant_e(c, theta, p, b):
    """J-functional norm with base ``e``."""
    if not 1 <= p < math.inf:
        raise InputError(f"p must lie in [1, inf), got {p}")
    if not 0 < theta < 1:
        raise InputError(f"theta must lie in (0, 1), got {theta}")
    return variant_norm(c, theta, p, b, math.e)


def j_norm_variant_2(c, theta, p, b):
    """J-functional norm with base 2."""
    if not 1 <= p < math.inf:
        raise InputError(f"p must lie in [1, inf), got {p}")
    if not 0 < theta < 1:
        raise InputError(f"theta must lie in (0, 1), got {theta}")
    return variant_norm(c, theta, p, b, 2.0)


def jphi_norm(phi, c, b):
    """``||{J(2**n, b_n)}||_Phi`` for one representation ``x = sum b_n``."""
    return variant_norm(c, phi.weight_exponent, phi.p, b, 2.0)


def representation_norm(selector, c, contrib):
    """Norm of the representation whose contributions are ``contrib``.

    ``contrib`` holds ``c_n`` with ``x = sum_n c_n``.  For a
    :class:`JSpaceSpec` the coefficients are recovered as
    ``b_n = s**(-n) c_n`` before :func:`j_norm` is applied.
    """
    if isinstance(selector, JSpaceSpec):
        b = contrib.weighted(selector.s, -1.0) if not contrib.is_zero else contrib
        return j_norm(selector, c, b)
    if isinstance(selector, VariantNorm):
        return variant_norm(c, selector.theta, selector.p, contrib, selector.base)
    if isinstance(selector, PhiLattice):
        return jphi_norm(selector, c, contrib)
    raise InputError(f"unknown norm selector {selector!r}")


def equivalence_ratio(c, b, spec_a, spec_b):
    """``representation_norm(spec_a, b) / representation_norm(spec_b, b)``.

    ``b`` is read as a contribution sequence (``x = sum b_n``).
    """
    if b.is_zero:
        raise InputError("equivalence_ratio needs a nonzero sequence")
    den = representation_norm(spec_b, c, b)
    if den == 0:
        raise InputError("denominator norm vanished")
    return representation_norm(spec_a, c, b) / den


def norm_selector_from_json(obj, theta, p, base=None):
    """Build a norm selector for one ``(theta, p)`` grid cell.

    ``{"norm": "j", "x0": {...}, "x1": {...}}`` gives a :class:`JSpaceSpec`;
    ``l^p`` pseudolattices without an explicit ``p`` take the cell's ``p``.
    ``{"norm": "J-e" | "J-2" | "Jphi"}`` gives a :class:`VariantNorm`.
    """
    from .pseudolattice import spec_from_json

    kind = obj.get("norm", "j")
    if kind == "j":
        x0 = spec_from_json(obj.get("x0", {"kind": "lp"}), p)
        x1 = spec_from_json(obj.get("x1", obj.get("x0", {"kind": "lp"})), p)
        s = obj.get("s")
        if s is not None:
            s = complex(*s) if isinstance(s, (list, tuple)) else complex(s)
        return JSpaceSpec(x0, x1, base=float(obj.get("base", base or math.e)), theta=theta, s=s)
    return VariantNorm(kind, theta, p)
