"""Finitely supported two-sided vector sequences.

A :class:`FinSeq` stores the entries ``b_lo, ..., b_hi`` of a sequence
``{b_n}`` indexed by all integers; everything outside the window is zero.
The same object doubles as the coefficient list of a Laurent polynomial
``sum_n z**n b_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = ["FinSeq", "as_vector"]


def as_vector(v, dim=None):
    """Return ``v`` as a 1-d complex array, checking its length if ``dim`` is given."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InputError(f"expected a vector, got array of shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InputError(f"dimension mismatch: expected {dim}, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class FinSeq:
    """Finitely supported sequence ``{b_n}`` of vectors in ``C**dim``.

    Parameters
    ----------
    lo : int
        Index of the first stored entry.
    entries : array_like, shape (length, dim)
        ``entries[k]`` is ``b_{lo + k}``.
    dim : int, optional
        Vector dimension; inferred from ``entries`` when omitted.

    The constructor puts the sequence in normal form: zero vectors at both
    ends are trimmed and the empty sequence is the zero element (``lo = 0``).
    """

    lo: int
    entries: np.ndarray
    dim: int = field(default=None)

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        dim = self.dim
        if arr.ndim == 1:
            if dim is None:
                dim = 1
            if dim == 1:
                arr = arr.reshape(-1, 1)
            elif arr.size == 0:
                arr = arr.reshape(0, dim)
            else:
                raise InputError("1-d entries are only accepted for dim = 1")
        if arr.ndim != 2:
            raise InputError(f"entries must be 2-d, got shape {arr.shape}")
        if dim is None:
            dim = arr.shape[1]
        if dim < 1:
            raise InputError("dim must be positive")
        if arr.shape[1] != dim:
            raise InputError(f"entries have dimension {arr.shape[1]}, expected {dim}")
        nz = np.flatnonzero(np.any(arr != 0, axis=1))
        if nz.size == 0:
            lo, arr = 0, np.zeros((0, dim), dtype=complex)
        else:
            lo = int(self.lo) + int(nz[0])
            arr = arr[nz[0]:nz[-1] + 1].copy()
        arr.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "dim", int(dim))

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, dim):
        return cls(0, np.zeros((0, dim)), dim)

    @classmethod
    def delta(cls, n, v, dim=None):
        """The sequence with ``v`` at index ``n`` and zero elsewhere."""
        v = as_vector(v, dim)
        return cls(n, v.reshape(1, -1), v.shape[0])

    @classmethod
    def from_dict(cls, mapping, dim):
        """Build from ``{index: vector}``."""
        if not mapping:
            return cls.zeros(dim)
        lo, hi = min(mapping), max(mapping)
        arr = np.zeros((hi - lo + 1, dim), dtype=complex)
        for n, v in mapping.items():
            arr[n - lo] = as_vector(v, dim)
        return cls(lo, arr, dim)

    # -- views --------------------------------------------------------------

    @property
    def hi(self):
        """Index of the last stored entry (``lo - 1`` for the zero sequence)."""
        return self.lo + len(self.entries) - 1

    @property
    def indices(self):
        return np.arange(self.lo, self.lo + len(self.entries))

    @property
    def is_zero(self):
        return len(self.entries) == 0

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n):
        k = n - self.lo
        if 0 <= k < len(self.entries):
            return self.entries[k]
        return np.zeros(self.dim, dtype=complex)

    def window(self, lo, hi):
        """Dense ``(hi - lo + 1, dim)`` array of the entries ``b_lo .. b_hi``."""
        out = np.zeros((hi - lo + 1, self.dim), dtype=complex)
        if self.is_zero:
            return out
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.entries[a - self.lo:b - self.lo + 1]
        return out

    def degree(self):
        """Largest ``|n|`` in the support (0 for the zero sequence)."""
        if self.is_zero:
            return 0
        return max(abs(self.lo), abs(self.hi))

    # -- algebra ------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, FinSeq):
            return NotImplemented
        if other.dim != self.dim:
            raise InputError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return FinSeq(lo, self.window(lo, hi) + other.window(lo, hi), self.dim)

    def __neg__(self):
        return FinSeq(self.lo, -self.entries, self.dim)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, alpha):
        return FinSeq(self.lo, complex(alpha) * self.entries, self.dim)

    __rmul__ = __mul__

    def scaled_by_index(self, factor):
        """``{factor(n) * b_n}`` for a scalar function ``factor`` of the index."""
        f = np.array([factor(int(n)) for n in self.indices], dtype=complex)
        return FinSeq(self.lo, self.entries * f[:, None], self.dim)

    def weighted(self, base, power=1.0):
        """``{base**(power*n) b_n}``, vectorised."""
        w = np.power(complex(base), power * self.indices.astype(float))
        return FinSeq(self.lo, self.entries * w[:, None], self.dim)

    def map_entries(self, matrix):
        """Apply a linear map to every entry: ``{T b_n}``."""
        T = np.asarray(matrix, dtype=complex)
        if T.shape[1] != self.dim:
            raise InputError(f"map expects dimension {T.shape[1]}, sequence has {self.dim}")
        return FinSeq(self.lo, self.entries @ T.T, T.shape[0])

    def allclose(self, other, atol=1e-12, rtol=0.0):
        if other.dim != self.dim:
            return False
        parts = [q for q in (self, other) if not q.is_zero]
        if not parts:
            return True
        lo, hi = min(q.lo for q in parts), max(q.hi for q in parts)
        return np.allclose(self.window(lo, hi), other.window(lo, hi), atol=atol, rtol=rtol)

    def mass(self):
        """Sum of Euclidean norms of the entries."""
        return float(np.linalg.norm(self.entries, axis=1).sum()) if len(self) else 0.0

    def __repr__(self):
        return f"FinSeq(lo={self.lo}, hi={self.hi}, dim={self.dim})"

    def to_json(self):
        return {
            "lo": self.lo,
            "dim": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj):
        arr = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return cls(obj["lo"], arr.reshape(-1, obj["dim"]), obj["dim"])
