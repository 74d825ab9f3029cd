"""Interpolation norms as infima over finitely supported representations.

For a window ``-N .. N`` the problem is

    minimise   ||representation||
    subject to sum_n c_n = x,

where ``c_n`` are the contributions of the representation (``c_n = s**n b_n``
for pseudolattice-pair norms, ``c_n`` itself for the J-functional norms).
The constraint is eliminated through ``c_0 = x - sum_{n != 0} c_n`` and the
remaining convex program is handed to a conic solver.  Sampled sups (FC and
UC components) enter as finitely many constraints; the sample set is grown
by exchange until the relaxation (a lower bound) and the exactly re-evaluated
objective of the returned point (an upper bound) agree to ``rel_tol``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import cvxpy as cp
import numpy as np

from .couple import Couple, sum_norm
from .errors import InputError
from .jcalculus import JSpaceSpec, VariantNorm, representation_norm
from .pseudolattice import fc_sup, uc_sup
from .sequences import FinSeq, as_vector

__all__ = [
    "SolverConfig",
    "WindowProblem",
    "SolveReport",
    "windowed_norm",
    "stafney_sweep",
    "null_distance",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``rel_tol`` is the target relative gap between the certified lower bound
    and the reported value; ``max_iter`` bounds the exchange rounds.
    """

    rel_tol: float = 1e-4
    max_iter: int = 40
    feas_tol: float = 1e-10
    solver: str = "CLARABEL"
    exchange_points: int = 16

    def to_json(self):
        return {"relTol": self.rel_tol, "maxIter": self.max_iter,
                "feasTol": self.feas_tol, "solver": self.solver}


@dataclass(frozen=True)
class WindowProblem:
    """Representation problem on the symmetric window ``-N .. N``."""

    couple: Couple
    norm: object
    x: np.ndarray
    N: int

    def __post_init__(self):
        object.__setattr__(self, "x", as_vector(self.x, self.couple.dim))
        if self.N < 0:
            raise InputError("N must be nonnegative")
        if not isinstance(self.norm, (JSpaceSpec, VariantNorm)):
            raise InputError(f"unsupported norm selector {self.norm!r}")

    def with_window(self, N):
        return replace(self, N=N)

    def with_x(self, x):
        return replace(self, x=x)


@dataclass
class SolveReport:
    """Outcome of one windowed solve.

    ``value`` is the exactly recomputed objective of ``argmin`` and hence an
    upper bound for the windowed infimum; ``lower`` is a certified lower bound
    from the relaxation; ``rel_gap = (value - lower) / value``.  ``argmin``
    uses the natural convention of the norm (coefficients ``b_n`` with
    ``x = sum s**n b_n`` for pseudolattice pairs, ``c_n`` with ``x = sum c_n``
    for J-functional norms); ``contributions`` always holds the ``c_n``.
    """

    value: float
    argmin: FinSeq
    iterations: int
    rel_gap: float
    converged: bool
    lower: float = 0.0
    residual: float = 0.0
    N: int = 0
    contributions: Optional[FinSeq] = field(default=None, repr=False)
    raw_value: float = None
    note: str = ""

    def row(self):
        return {"N": self.N, "value": self.value, "relGap": self.rel_gap,
                "iterations": self.iterations, "converged": self.converged}

    def to_json(self):
        out = self.row()
        out.update(lower=self.lower, residual=self.residual, note=self.note,
                   rawValue=self.raw_value, argmin=self.argmin.to_json())
        return out


# -- model building -------------------------------------------------------------


def _scales(norm, N):
    """Per-index moduli of the component weights acting on contributions."""
    n = np.arange(-N, N + 1, dtype=float)
    if isinstance(norm, JSpaceSpec):
        inv = abs(norm.s) ** (-n)
        return inv, norm.base ** n * inv
    base, th = norm.base, norm.theta
    return base ** (-th * n), base ** ((1 - th) * n)


def _phases(norm, N):
    """Complex factors turning contributions into ``base**(jn) b_n`` (phase-sensitive kinds)."""
    n = np.arange(-N, N + 1, dtype=float)
    if isinstance(norm, JSpaceSpec):
        inv = norm.s ** (-n)
        return inv, norm.base ** n * inv
    raise AssertionError("only pseudolattice pairs carry FC/UC components")


def _outer(rows, spec):
    if spec.kind == "c0" or math.isinf(spec.p):
        return cp.max(rows)
    if spec.p == 1:
        return cp.sum(rows)
    if spec.p == 2:
        return cp.norm(rows, 2)
    return cp.pnorm(rows, spec.p)


class _Model:
    """cvxpy program over the free contributions, scaled by ``1/D_n``."""

    def __init__(self, couple, norm, N, samples=None):
        self.couple, self.norm, self.N = couple, norm, N
        K, dim = 2 * N + 1, couple.dim
        self.K = K
        free = np.r_[0:N, N + 1:K]
        self.free = free
        self.x = cp.Parameter(dim, complex=True)
        self.inv_d = cp.Parameter((K - 1, dim), nonneg=True)
        self.U = cp.Variable((K - 1, dim), complex=True)
        Cf = cp.multiply(self.inv_d, self.U)
        c0 = self.x - cp.sum(Cf, axis=0)
        self.c0_row = cp.reshape(c0, (1, dim), order="C")
        cons = []
        w = _scales(norm, N)
        d = np.maximum(np.maximum(w[0], w[1]), 1.0)[free]
        # rows whose weight is negligible next to the column scale are left out
        # of the conic model: this only lowers the relaxation (so its value is
        # still a lower bound), while the reported value is always recomputed
        # on all rows; keeping them makes interior-point solves stall
        self.keep = [np.flatnonzero(w[j][free] / d >= _PRUNE) for j in range(2)]
        self.w_free = [cp.Parameter((len(k), dim), nonneg=True) for k in self.keep]
        spaces = (couple.norm0, couple.norm1)

        def free_rows(j):
            keep = self.keep[j]
            if len(keep) == 0:
                return cp.Constant(np.zeros(K - 1)), []
            r, c1 = spaces[j].cvx_rows(self.U[keep, :], scale=self.w_free[j])
            if len(keep) == K - 1:
                return r, c1
            scatter = np.zeros((K - 1, len(keep)))
            scatter[keep, np.arange(len(keep))] = 1.0
            return scatter @ r, c1

        if isinstance(norm, VariantNorm):
            rows = []
            for j in range(2):
                r_free, c1 = free_rows(j)
                r_0, c2 = spaces[j].cvx_rows(self.c0_row)
                cons += c1 + c2
                rows.append(cp.hstack([r_0, r_free]))
            inner = cp.maximum(rows[0], rows[1])
            p = norm.p
            obj = cp.max(inner) if math.isinf(p) else (
                cp.sum(inner) if p == 1 else (cp.norm(inner, 2) if p == 2 else cp.pnorm(inner, p)))
        else:
            comps = []
            for j, spec in enumerate((norm.x0, norm.x1)):
                if spec.kind in ("lp", "c0"):
                    r_free, c1 = free_rows(j)
                    r_0, c2 = spaces[j].cvx_rows(self.c0_row)
                    cons += c1 + c2
                    comps.append(_outer(cp.hstack([r_0, r_free]), spec))
                else:
                    A = samples[j]
                    # A: (rows, K) complex sample matrix on contributions
                    P = cp.reshape(A[:, N], (A.shape[0], 1), order="C") @ self.c0_row
                    if K > 1:
                        P = P + A[:, free] @ Cf
                    r, c1 = spaces[j].cvx_rows(P)
                    cons += c1
                    comps.append(cp.max(r))
        if not isinstance(norm, VariantNorm):
            obj = cp.maximum(*comps)
        self.w = w
        self.problem = cp.Problem(cp.Minimize(obj), cons)

    def _set_params(self, x):
        K, dim, free = self.K, self.couple.dim, self.free
        w0, w1 = self.w
        d = np.maximum(np.maximum(w0, w1), 1.0)[free]
        self.x.value = x
        self.inv_d.value = np.repeat((1.0 / d)[:, None], dim, axis=1)
        for j, wj in enumerate((w0, w1)):
            keep = self.keep[j]
            self.w_free[j].value = np.repeat((wj[free][keep] / d[keep])[:, None], dim, axis=1)
        return d

    def solve(self, x, solver):
        K, dim, free = self.K, self.couple.dim, self.free
        d = self._set_params(x)
        opts = _SOLVER_OPTS.get(solver, {})
        # a reused solver object is updated in place and its answers then
        # depend on what it solved before; a fresh one keeps solves reproducible
        self.problem.solve(solver=solver, warm_start=False, **opts)
        if self.U.value is None:
            return None, -np.inf
        C = np.zeros((K, dim), dtype=complex)
        C[free] = np.asarray(self.U.value).reshape(K - 1, dim) / d[:, None]
        C[self.N] = x - C[free].sum(axis=0)
        lower = self.problem.value
        slack = _LOWER_SLACK.get(self.problem.status)
        if lower is None or slack is None:
            return C, -np.inf
        return C, float(lower) * (1.0 - slack)


_MODEL_CACHE = {}

# Relative row weight below which a row is dropped from the conic relaxation.
_PRUNE = 1e-9

_SOLVER_OPTS = {
    "CLARABEL": {"tol_gap_abs": 1e-9, "tol_gap_rel": 1e-9},
}

# Relative amount by which the relaxation value is lowered before it is used
# as a certified bound; interior-point duality gaps are only met to tolerance.
_LOWER_SLACK = {"optimal": 1e-7, "optimal_inaccurate": 1e-5}


def _cached_model(couple, norm, N):
    if isinstance(norm, JSpaceSpec):
        skey = ("j", norm.x0.kind, norm.x0.p, norm.x1.kind, norm.x1.p,
                norm.base, norm.s)
    else:
        skey = ("v", norm.kind, norm.theta, norm.p)
    key = (N, couple.norm0, couple.norm1, skey)
    m = _MODEL_CACHE.get(key)
    if m is None:
        if len(_MODEL_CACHE) > 256:
            _MODEL_CACHE.clear()
        m = _MODEL_CACHE[key] = _Model(couple, norm, N)
    return m


def _needs_samples(norm):
    return isinstance(norm, JSpaceSpec) and (
        norm.x0.kind not in ("lp", "c0") or norm.x1.kind not in ("lp", "c0"))


# -- exact objective and candidates ---------------------------------------------


def _contrib_seq(C, N, dim):
    return FinSeq(-N, C, dim)


def _natural(norm, contrib):
    if isinstance(norm, JSpaceSpec) and not contrib.is_zero:
        return contrib.weighted(norm.s, -1.0)
    return contrib


def _objective(problem, C):
    contrib = _contrib_seq(C, problem.N, problem.couple.dim)
    return representation_norm(problem.norm, problem.couple, contrib), contrib


def _delta_start(problem):
    K, dim = 2 * problem.N + 1, problem.couple.dim
    C = np.zeros((K, dim), dtype=complex)
    C[problem.N] = problem.x
    return C


def _spread_start(problem, ratio=0.25):
    """Contributions ``proportional to ratio**|n|``, summing to ``x``."""
    n = np.arange(-problem.N, problem.N + 1)
    w = ratio ** np.abs(n)
    w = w / w.sum()
    return np.outer(w, problem.x)


def _pad(C_prev, N_prev, N):
    K, dim = 2 * N + 1, C_prev.shape[1]
    C = np.zeros((K, dim), dtype=complex)
    C[N - N_prev:N + N_prev + 1] = C_prev
    return C


def _eliminate(C, x, N):
    """Re-impose ``sum c_n = x`` exactly through the centre entry."""
    C = C.copy()
    mask = np.ones(C.shape[0], dtype=bool)
    mask[N] = False
    C[N] = x - C[mask].sum(axis=0)
    return C


# -- exchange helpers -------------------------------------------------------------


def _sample_matrix(kind_rows, factors):
    return kind_rows * factors[None, :]


def _initial_samples(problem):
    N, K = problem.N, 2 * problem.N + 1
    norm = problem.norm
    phases = _phases(norm, N)
    n = np.arange(-N, N + 1)
    sets, mats = [], []
    for j, spec in enumerate((norm.x0, norm.x1)):
        if spec.kind == "FC":
            G = 1 << max(4, math.ceil(math.log2(4 * K)))
            ts = 2 * np.pi * np.arange(G) / G
            sets.append(("FC", list(ts)))
            mats.append(np.exp(1j * np.outer(ts, n)) * phases[j][None, :])
        elif spec.kind in ("UC", "WUC"):
            if spec.mode == "sign" and K > spec.cap:
                from .errors import CapacityError
                raise CapacityError(
                    f"window of {K} indices exceeds the UC enumeration cap {spec.cap}")
            pats = [np.ones(K, dtype=complex)]
            sets.append(("UC", pats))
            mats.append(np.array(pats) * phases[j][None, :])
        else:
            sets.append((spec.kind, None))
            mats.append(None)
    return sets, mats


def _local_maxima(values, threshold, limit):
    g = values
    left, right = np.roll(g, 1), np.roll(g, -1)
    idx = np.flatnonzero((g >= left) & (g >= right) & (g > threshold))
    idx = idx[np.argsort(-g[idx])][:limit]
    return idx


def _grow_samples(problem, sets, contrib, level, cfg):
    """Add violated FC sample points / UC patterns; return True if anything was added."""
    norm, N = problem.norm, problem.N
    n = np.arange(-N, N + 1)
    phases = _phases(norm, N)
    b = _natural(norm, contrib)
    added = False
    for j, spec in enumerate((norm.x0, norm.x1)):
        kind, pts = sets[j]
        space = problem.couple.space(j)
        seq = b if j == 0 else (b.weighted(norm.base) if not b.is_zero else b)
        if kind == "FC":
            res = fc_sup(spec, seq, space)
            G = 1 << max(6, math.ceil(math.log2(16 * (2 * N + 1))))
            ts = 2 * np.pi * np.arange(G) / G
            full = seq.window(-N, N)
            vals = np.asarray(space.evaluate(np.exp(1j * np.outer(ts, n)) @ full))
            new = [res.t] + [ts[k] for k in _local_maxima(vals, level, cfg.exchange_points)]
            have = np.asarray(pts)
            for t in new:
                if np.min(np.abs(np.angle(np.exp(1j * (have - t))))) > 1e-9:
                    pts.append(t)
                    have = np.append(have, t)
                    added = True
        elif kind == "UC":
            res = uc_sup(spec, seq, space)
            pat = np.zeros(2 * N + 1, dtype=complex)
            pat[seq.lo + N:seq.hi + N + 1] = res.pattern if not seq.is_zero else 1
            if not any(np.allclose(pat, q) for q in pts):
                pts.append(pat)
                added = True
    mats = []
    for j, (kind, pts) in enumerate(sets):
        if kind == "FC":
            mats.append(np.exp(1j * np.outer(np.asarray(pts), n)) * phases[j][None, :])
        elif kind == "UC":
            mats.append(np.array(pts) * phases[j][None, :])
        else:
            mats.append(None)
    return added, mats


# -- public operations --------------------------------------------------------------


def windowed_norm(problem, cfg=None, warm=None):
    """Infimum of the representation norm over the window ``-N .. N``.

    ``warm`` is an optional earlier :class:`SolveReport` on a smaller window;
    its argmin, padded with zeros, is feasible here, so the reported value
    never exceeds the warm value.
    """
    cfg = cfg or SolverConfig()
    x, N, dim = problem.x, problem.N, problem.couple.dim
    scale = float(np.abs(x).max())
    if scale == 0:
        zero = FinSeq.zeros(dim)
        return SolveReport(0.0, zero, 0, 0.0, True, 0.0, 0.0, N, zero, 0.0)
    xs = x / scale
    sproblem = problem.with_x(xs)

    candidates = [("delta", _delta_start(sproblem))]
    if N > 0:
        candidates.append(("spread", _spread_start(sproblem)))
    if warm is not None and warm.contributions is not None and warm.N <= N:
        Cw = warm.contributions.window(-warm.N, warm.N) / scale
        candidates.append(("warm", _eliminate(_pad(Cw, warm.N, N), xs, N)))

    lower, iterations, note = -np.inf, 0, ""
    if N == 0:
        lower = None
    else:
        try:
            if _needs_samples(problem.norm):
                sets, mats = _initial_samples(sproblem)
                level = 0.0
                for iterations in range(1, cfg.max_iter + 1):
                    model = _Model(problem.couple, problem.norm, N, samples=mats)
                    C, lo = model.solve(xs, cfg.solver)
                    if C is None:
                        note = f"solver status {model.problem.status}"
                        break
                    lower = max(lower, lo)
                    C = _eliminate(C, xs, N)
                    val, contrib = _objective(sproblem, C)
                    candidates.append(("solver", C))
                    if val - lower <= cfg.rel_tol * val:
                        break
                    level = lo
                    added, mats = _grow_samples(sproblem, sets, contrib, level, cfg)
                    if not added:
                        note = "exchange stalled"
                        break
            else:
                iterations = 1
                model = _cached_model(problem.couple, problem.norm, N)
                C, lo = model.solve(xs, cfg.solver)
                if C is None:
                    note = f"solver status {model.problem.status}"
                else:
                    lower = lo
                    candidates.append(("solver", _eliminate(C, xs, N)))
        except cp.SolverError as exc:
            note = f"solver error: {exc}"
            log.warning("windowed solve failed at N=%d: %s", N, exc)

    best = None
    for tag, C in candidates:
        val, contrib = _objective(sproblem, C)
        if best is None or val < best[0]:
            best = (val, contrib, tag)
    val, contrib, tag = best
    if lower is None:
        lower = val
    lower = min(lower, val)
    gap = 0.0 if val == 0 else max(0.0, (val - lower) / val)
    raw = None
    for t, C in candidates:
        if t == "solver":
            raw = _objective(sproblem, C)[0] * scale
    contrib = contrib * scale
    total = contrib.entries.sum(axis=0) if not contrib.is_zero else np.zeros(dim)
    residual = float(np.linalg.norm(total - x)) / max(1.0, float(np.linalg.norm(x)))
    converged = gap <= cfg.rel_tol and residual <= cfg.feas_tol
    if tag != "solver":
        note = (note + "; " if note else "") + f"best point from {tag} start"
    return SolveReport(
        value=val * scale,
        argmin=_natural(problem.norm, contrib),
        iterations=iterations,
        rel_gap=gap,
        converged=converged,
        lower=max(lower, 0.0) * scale,
        residual=residual,
        N=N,
        contributions=contrib,
        raw_value=raw if raw is not None else val * scale,
        note=note,
    )


def stafney_sweep(template, n_max=None, cfg=None, windows=None):
    """Windowed values for growing windows, warm-started so they never increase.

    ``windows`` overrides the default ``0 .. n_max``.
    """
    if windows is None:
        if n_max is None or n_max < 1:
            raise InputError("n_max must be at least 1")
        windows = range(0, n_max + 1)
    windows = sorted(set(int(w) for w in windows))
    out, prev = [], None
    for N in windows:
        rep = windowed_norm(template.with_window(N), cfg, warm=prev)
        out.append((N, rep))
        prev = rep
    return out


def null_distance(problem, b, cfg=None):
    """``inf ||b - u||`` over windowed ``u`` with ``sum s**n u_n = 0``.

    Implemented through the change of variables ``c = b - u``: the feasible
    sets of this problem and of the representation problem for
    ``x = sum s**n b_n`` are in bijection.  The report's ``argmin`` holds
    the optimal null sequence ``u``.
    """
    norm = problem.norm
    N = problem.N
    if not b.is_zero and (b.lo < -N or b.hi > N):
        raise InputError(f"b is supported on [{b.lo}, {b.hi}], outside the window [-{N}, {N}]")
    if isinstance(norm, JSpaceSpec):
        target = b.weighted(norm.s).entries.sum(axis=0) if not b.is_zero else np.zeros(b.dim)
    else:
        target = b.entries.sum(axis=0) if not b.is_zero else np.zeros(b.dim)
    rep = windowed_norm(problem.with_x(target), cfg)
    u = b - rep.argmin
    if isinstance(norm, JSpaceSpec):
        resid = u.weighted(norm.s).entries.sum(axis=0) if not u.is_zero else 0
    else:
        resid = u.entries.sum(axis=0) if not u.is_zero else 0
    rep.residual = float(np.linalg.norm(resid)) / max(1.0, b.mass())
    rep.argmin = u
    rep.note = (rep.note + "; " if rep.note else "") + "argmin is the null sequence u"
    return rep


def sum_norm_residual(couple, x, rep, s):
    """``||sum s**n b_n - x||_{B0+B1}`` for a report's argmin (audit helper)."""
    b = rep.argmin
    total = b.weighted(s).entries.sum(axis=0) if not b.is_zero else np.zeros(couple.dim)
    return sum_norm(couple, total - as_vector(x, couple.dim))
