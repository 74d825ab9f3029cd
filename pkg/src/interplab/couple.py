"""Finite-dimensional complex Banach couples.

A couple is two norms on the same coordinate space ``C**dim``; the ambient
space of the abstract theory is the coordinate space itself.  Norms are
either weighted ``l^p`` norms ``(sum_i (w_i |v_i|)**p)**(1/p)`` or a
user-supplied gauge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize

from .errors import InputError, SolverError
from .sequences import as_vector

__all__ = [
    "MAX_DIM",
    "WeightedLp",
    "CustomGauge",
    "Couple",
    "norm",
    "j_functional",
    "sum_norm",
    "k_functional",
    "norm_spec_from_json",
]

#: Dimension cap; keeps the exhaustive oracles in the test-suite feasible.
MAX_DIM = 8


@dataclass(frozen=True)
class WeightedLp:
    """Weighted ``l^p`` norm ``(sum_i (w_i |v_i|)**p)**(1/p)``; ``p = inf`` is ``max_i w_i |v_i|``."""

    p: float
    weights: tuple

    def __post_init__(self):
        p = float(self.p)
        if not p >= 1:
            raise InputError(f"p must be >= 1, got {self.p}")
        w = tuple(float(x) for x in np.atleast_1d(self.weights))
        if not w or min(w) <= 0 or not all(math.isfinite(x) for x in w):
            raise InputError("weights must be finite and strictly positive")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, p, dim, scale=1.0):
        return cls(p, (scale,) * dim)

    @property
    def dim(self):
        return len(self.weights)

    @property
    def lipschitz(self):
        """Bound on ``||v|| / ||v||_2``."""
        w = max(self.weights)
        if math.isinf(self.p):
            return w
        return w * self.dim ** max(0.0, 1.0 / self.p - 0.5)

    def evaluate(self, v):
        """Norm of the last axis of ``v``; leading axes are batched."""
        a = np.abs(np.asarray(v)) * np.asarray(self.weights)
        if math.isinf(self.p):
            return a.max(axis=-1)
        if self.p == 1:
            return a.sum(axis=-1)
        if self.p == 2:
            return np.sqrt((a * a).sum(axis=-1))
        m = a.max(axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        return (safe[..., 0] * ((a / safe) ** self.p).sum(axis=-1) ** (1.0 / self.p)) * (m[..., 0] > 0)

    def cvx_rows(self, expr, scale=None):
        """cvxpy row norms of a ``(rows, dim)`` affine expression.

        ``scale`` is an optional nonnegative ``(rows, dim)`` parameter or array
        multiplying ``|expr|`` entrywise before the norm is taken.  Returns
        ``(rows, constraints)``; the constraints carry the power-cone epigraph
        needed for exponents other than 1, 2 and infinity.
        """
        z = cp.multiply(np.broadcast_to(np.asarray(self.weights), expr.shape), expr)
        if scale is not None:
            z = cp.multiply(scale, z)
        if math.isinf(self.p):
            return cp.max(cp.abs(z), axis=1), []
        if self.p == 1 or expr.shape[1] == 1:
            # in one dimension every weighted l^p norm is w |z|
            return cp.sum(cp.abs(z), axis=1), []
        if self.p == 2:
            return cp.norm(z, 2, axis=1), []
        rows, dim = expr.shape
        t = cp.Variable(rows)
        r = cp.Variable((rows, dim), nonneg=True)
        u = cp.Variable((rows, dim))
        tb = cp.reshape(t, (rows, 1), order="C") @ np.ones((1, dim))
        cons = [cp.abs(z) <= u, cp.sum(r, axis=1) == t,
                cp.PowCone3D(r, tb, u, 1.0 / self.p)]
        return t, cons

    def to_json(self):
        return {"kind": "weighted_lp", "p": "inf" if math.isinf(self.p) else self.p,
                "weights": list(self.weights)}


@dataclass(frozen=True)
class CustomGauge:
    """A norm given by a callback.

    ``func`` maps a complex vector of length ``dim`` to its norm.  It must be
    absolutely homogeneous over complex scalars, subadditive and definite;
    these axioms are spot-checked at construction.  ``lipschitz`` bounds
    ``||v|| / ||v||_2``.  ``cvx`` optionally builds a cvxpy row-norm
    expression so the gauge can enter the conic solver.
    """

    func: Callable
    dim: int
    lipschitz: float
    cvx: Optional[Callable] = field(default=None, compare=False)
    name: str = "custom"
    check_trials: int = 64

    def __post_init__(self):
        if self.dim < 1:
            raise InputError("dim must be positive")
        if not self.lipschitz > 0:
            raise InputError("a positive Lipschitz bound is required for custom gauges")
        if self.check_trials:
            worst = norm_axiom_defect(self, np.random.default_rng(0), self.check_trials)
            if worst > 1e-12:
                raise InputError(f"custom gauge violates the norm axioms (defect {worst:.3g})")

    def evaluate(self, v):
        v = np.asarray(v, dtype=complex)
        if v.ndim == 1:
            return float(self.func(v))
        flat = v.reshape(-1, self.dim)
        out = np.fromiter((self.func(row) for row in flat), dtype=float, count=len(flat))
        return out.reshape(v.shape[:-1])

    def cvx_rows(self, expr, scale=None):
        if self.cvx is None:
            raise InputError(f"custom gauge {self.name!r} has no cvxpy model")
        z = expr if scale is None else cp.multiply(scale, expr)
        out = self.cvx(z)
        return out if isinstance(out, tuple) else (out, [])

    def to_json(self):
        return {"kind": "custom", "name": self.name}


def norm_axiom_defect(space, rng, trials):
    """Largest relative violation of the norm axioms on random complex triples."""
    dim = space.dim
    worst = 0.0
    for _ in range(trials):
        u, v = (rng.normal(size=(2, dim)) + 1j * rng.normal(size=(2, dim)))
        lam = complex(rng.normal(), rng.normal())
        nu, nv = space.evaluate(u), space.evaluate(v)
        scale = max(nu, nv, 1e-300)
        worst = max(worst, (space.evaluate(u + v) - nu - nv) / scale)
        worst = max(worst, abs(space.evaluate(lam * u) - abs(lam) * nu) / max(abs(lam) * nu, 1e-300))
        if nu <= 0:
            worst = max(worst, 1.0)
    if space.evaluate(np.zeros(dim)) != 0:
        worst = max(worst, 1.0)
    return float(worst)


@dataclass(frozen=True)
class Couple:
    """Two norms ``(norm0, norm1)`` on ``C**dim``."""

    dim: int
    norm0: object
    norm1: object

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise InputError(f"dim must lie in [1, {MAX_DIM}], got {self.dim}")
        for nm in (self.norm0, self.norm1):
            if nm.dim != self.dim:
                raise InputError(f"norm of dimension {nm.dim} in a couple of dimension {self.dim}")

    def space(self, j):
        return self.norm0 if j == 0 else self.norm1

    @classmethod
    def scalar(cls, a=1.0, b=1.0):
        """The one-dimensional couple ``(a|.|, b|.|)``."""
        return cls(1, WeightedLp(1, (a,)), WeightedLp(1, (b,)))

    def to_json(self):
        return {"dim": self.dim, "norm0": self.norm0.to_json(), "norm1": self.norm1.to_json()}


def norm_spec_from_json(obj, dim=None):
    kind = obj.get("kind", "weighted_lp")
    if kind not in ("weighted_lp", "lp"):
        raise InputError(f"unsupported norm kind {kind!r} in configuration")
    p = obj.get("p", 2)
    p = math.inf if p in ("inf", "Infinity", None) else float(p)
    weights = obj.get("weights")
    if weights is None:
        if dim is None:
            raise InputError("weights or dim required")
        weights = [obj.get("scale", 1.0)] * dim
    return WeightedLp(p, tuple(weights))


def norm(space, v):
    """``||v||`` in ``space``."""
    v = as_vector(v, space.dim)
    return float(space.evaluate(v))


def j_functional(c, t, x):
    """Peetre's ``J(t, x) = max(||x||_0, t ||x||_1)``."""
    if not t > 0:
        raise InputError(f"t must be positive, got {t}")
    x = as_vector(x, c.dim)
    return max(norm(c.norm0, x), t * norm(c.norm1, x))


@lru_cache(maxsize=64)
def _sum_norm_problem(n0, n1):
    dim = n0.dim
    x = cp.Parameter(dim, complex=True)
    y = cp.Variable(dim, complex=True)
    r0, c0 = n0.cvx_rows(cp.reshape(y, (1, dim), order="C"))
    r1, c1 = n1.cvx_rows(cp.reshape(x - y, (1, dim), order="C"))
    return cp.Problem(cp.Minimize(cp.sum(r0) + cp.sum(r1)), c0 + c1), x, y


def _modelable(space):
    return isinstance(space, WeightedLp) or getattr(space, "cvx", None) is not None


def sum_norm(c, x, tol=1e-9):
    """``||x||_{B0+B1} = min {||y||_0 + ||x - y||_1}``, by a convex solve.

    The returned value is the exactly recomputed objective of the solver's
    split, so it is an upper bound that is tight to solver accuracy.
    """
    x = as_vector(x, c.dim)
    if not np.any(x):
        return 0.0
    scale = np.abs(x).max()
    xs = x / scale
    ub = min(norm(c.norm0, xs), norm(c.norm1, xs))
    if _modelable(c.norm0) and _modelable(c.norm1):
        prob, xp, y = _sum_norm_problem(c.norm0, c.norm1)
        xp.value = xs
        try:
            prob.solve(solver=cp.CLARABEL, warm_start=False, tol_gap_abs=1e-10, tol_gap_rel=1e-10)
        except cp.SolverError as exc:
            raise SolverError(f"sum-norm solve failed: {exc}") from exc
        if y.value is None:
            raise SolverError("sum-norm solve returned no point", residual=np.inf)
        yv = np.asarray(y.value).reshape(-1)
        val = norm(c.norm0, yv) + norm(c.norm1, xs - yv)
        lower = prob.value if prob.value is not None else -np.inf
        if val - lower > max(tol, 1e-6 * val) and val < ub:
            raise SolverError("sum-norm solve did not converge", residual=val - lower)
    else:
        def f(z):
            yv = z[:c.dim] + 1j * z[c.dim:]
            return norm(c.norm0, yv) + norm(c.norm1, xs - yv)
        best = min(
            (minimize(f, np.concatenate([y0.real, y0.imag]), method="Powell",
                      options={"xtol": 1e-12, "ftol": 1e-14, "maxiter": 20000})
             for y0 in (np.zeros(c.dim), xs, xs / 2)),
            key=lambda r: r.fun,
        )
        val = float(best.fun)
    return float(min(val, ub) * scale)


def k_functional(c, t, x):
    """``K(t, x) = inf {||x0||_0 + t ||x1||_1}`` as the sum norm of ``(B0, t B1)``.

    Convenience for oracles; only ``t = 1`` carries meaning elsewhere.
    """
    if not t > 0:
        raise InputError(f"t must be positive, got {t}")
    n1 = c.norm1
    if isinstance(n1, WeightedLp):
        scaled = WeightedLp(n1.p, tuple(t * w for w in n1.weights))
    else:
        scaled = CustomGauge(lambda v, f=n1.func: t * f(v), n1.dim, t * n1.lipschitz,
                             None if n1.cvx is None else (lambda z, g=n1.cvx: g(t * z)),
                             name=f"{t}*{n1.name}", check_trials=0)
    return sum_norm(Couple(c.dim, c.norm0, scaled), x)
