"""Truncated matrix representations of the su(1,1) generators.

Basis vectors are the discrete-series states ``|k, n>``, ``n = 0 .. dim-1``.
The non-zero matrix elements are

    K3 |k,n> = (n + k) |k,n>
    K+ |k,n> = sqrt((n + 1)(n + 2k)) |k,n+1>

and ``K1 = (K+ + K-)/2``, ``K2 = (K+ - K-)/(2i)``, so that
``[K1, K2] = -i K3``, ``[K2, K3] = i K1``, ``[K3, K1] = i K2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DimensionError

GENERATORS = ("K1", "K2", "K3", "Kplus", "Kminus")


@dataclass(frozen=True, order=True)
class BargmannIndex:
    """Discrete-series label ``k``, stored doubled so half-integers compare exactly."""

    twice_k: int

    def __post_init__(self):
        if isinstance(self.twice_k, bool) or int(self.twice_k) != self.twice_k:
            raise ValueError(f"twice_k must be an integer, got {self.twice_k!r}")
        object.__setattr__(self, "twice_k", int(self.twice_k))
        if self.twice_k < 1:
            raise ValueError(f"Bargmann index requires twice_k >= 1, got {self.twice_k}")

    @classmethod
    def from_k(cls, k) -> "BargmannIndex":
        frac = Fraction(k)
        if (2 * frac).denominator != 1:
            raise ValueError(f"k must be a positive half-integer, got {k}")
        return cls(int(2 * frac))

    @classmethod
    def from_n0(cls, n0: int) -> "BargmannIndex":
        """Index of the irrep with photon-number difference ``n0``."""
        if n0 < 0:
            raise ValueError(f"n0 must be nonnegative, got {n0}")
        return cls(n0 + 1)

    @property
    def k(self) -> float:
        return self.twice_k / 2

    @property
    def n0(self) -> int:
        return self.twice_k - 1

    def __str__(self):
        return f"{self.twice_k}/2" if self.twice_k % 2 else str(self.twice_k // 2)


def as_index(k) -> BargmannIndex:
    """Coerce a float/Fraction ``k`` or an existing index into a `BargmannIndex`."""
    if isinstance(k, BargmannIndex):
        return k
    return BargmannIndex.from_k(k)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense truncation of an operator in the ``|k, n>`` basis."""

    k: BargmannIndex
    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.dim, self.dim):
            raise DimensionError(f"entries shape {entries.shape} does not match dim={self.dim}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_compatible(other)
            return OperatorMatrix(self.k, self.dim, self.entries @ other.entries)
        return self.entries @ other

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.k, self.dim, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.k, self.dim, self.entries - other.entries)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.k, self.dim, scalar * self.entries)

    __rmul__ = __mul__

    @property
    def H(self) -> "OperatorMatrix":
        return OperatorMatrix(self.k, self.dim, self.entries.conj().T)

    def interior(self, margin: int = 1) -> np.ndarray:
        """Leading block unaffected by truncation after ``margin`` band products."""
        m = self.dim - margin
        return self.entries[:m, :m]

    def _check_compatible(self, other):
        if other.k != self.k or other.dim != self.dim:
            raise DimensionError(
                f"basis mismatch: (k={self.k}, dim={self.dim}) vs (k={other.k}, dim={other.dim})"
            )


@lru_cache(maxsize=64)
def _raising(twice_k: int, dim: int) -> np.ndarray:
    n = np.arange(dim - 1, dtype=float)
    mat = np.zeros((dim, dim))
    mat[np.arange(1, dim), np.arange(dim - 1)] = np.sqrt((n + 1) * (n + twice_k))
    mat.setflags(write=False)
    return mat


def generator_matrix(which: str, k, dim: int) -> OperatorMatrix:
    """Return the ``dim x dim`` truncation of generator ``which`` at index ``k``.

    ``which`` is one of ``"K1", "K2", "K3", "Kplus", "Kminus"``.
    """
    k = as_index(k)
    if dim < 2:
        raise DimensionError(f"generator truncation needs dim >= 2, got {dim}")
    if which not in GENERATORS:
        raise ValueError(f"unknown generator {which!r}; expected one of {GENERATORS}")
    kp = _raising(k.twice_k, dim)
    if which == "K3":
        mat = np.diag(np.arange(dim) + k.k).astype(complex)
    elif which == "Kplus":
        mat = kp.astype(complex)
    elif which == "Kminus":
        mat = kp.T.astype(complex)
    elif which == "K1":
        mat = ((kp + kp.T) / 2).astype(complex)
    else:
        mat = (kp - kp.T) / 2j
    return OperatorMatrix(k, dim, mat)


def generators(k, dim: int) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """``(K1, K2, K3)`` truncated at ``dim``."""
    return tuple(generator_matrix(w, k, dim) for w in ("K1", "K2", "K3"))


def casimir_matrix(k, dim: int) -> OperatorMatrix:
    """``K3^2 - K1^2 - K2^2`` from truncated generators.

    Equals ``k(k-1)`` times the identity on the interior block ``[:dim-1, :dim-1]``.
    """
    if dim < 3:
        raise DimensionError(f"Casimir check needs dim >= 3, got {dim}")
    k1, k2, k3 = generators(k, dim)
    return k3 @ k3 - k1 @ k1 - k2 @ k2


def commutator_residuals(k, dim: int, interior: bool = True) -> dict[str, float]:
    """Max-abs residual of each su(1,1) commutation relation."""
    if dim < 3:
        raise DimensionError(f"commutator check needs dim >= 3, got {dim}")
    k1, k2, k3 = (g.entries for g in generators(k, dim))
    out = {
        "[K1,K2]+iK3": k1 @ k2 - k2 @ k1 + 1j * k3,
        "[K2,K3]-iK1": k2 @ k3 - k3 @ k2 - 1j * k1,
        "[K3,K1]-iK2": k3 @ k1 - k1 @ k3 - 1j * k2,
    }
    m = dim - 1 if interior else dim
    return {name: float(np.max(np.abs(r[:m, :m]))) for name, r in out.items()}


def commutator_residual(k, dim: int, interior: bool = True) -> float:
    """Largest entry of ``[K1,K2]+iK3``, ``[K2,K3]-iK1``, ``[K3,K1]-iK2``.

    With ``interior=False`` the last row and column are included, exposing
    the truncation artifact at the basis edge.
    """
    return max(commutator_residuals(k, dim, interior).values())
