"""Two-mode boson realization of su(1,1), used as an oracle for `core`.

The generators are built from ordinary single-mode ladder matrices on a
truncated two-mode Fock space, then pulled back onto the irrep sector
``|k,n> = |n + n0>_1 |n>_2`` and compared with the single-index matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BargmannIndex, generator_matrix


def annihilation(dim: int) -> np.ndarray:
    """Truncated single-mode annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


@dataclass(frozen=True)
class TwoModeOperatorSet:
    n0: int
    n_max: int
    K1: np.ndarray = field(repr=False)
    K2: np.ndarray = field(repr=False)
    K3: np.ndarray = field(repr=False)
    number_difference: np.ndarray = field(repr=False)

    @property
    def mode_dims(self) -> tuple[int, int]:
        return self.n_max + self.n0 + 1, self.n_max + 1

    @property
    def Kplus(self) -> np.ndarray:
        return self.K1 + 1j * self.K2

    @property
    def Kminus(self) -> np.ndarray:
        return self.K1 - 1j * self.K2

    def index(self, n1: int, n2: int) -> int:
        """Flat tensor-space index of ``|n1>_1 |n2>_2``."""
        return n1 * self.mode_dims[1] + n2

    def embedding(self) -> np.ndarray:
        """Isometry ``|k,n> -> |n+n0>_1 |n>_2`` for ``n = 0 .. n_max``."""
        d1, d2 = self.mode_dims
        iso = np.zeros((d1 * d2, self.n_max + 1))
        for n in range(self.n_max + 1):
            iso[self.index(n + self.n0, n), n] = 1.0
        return iso

    def casimir(self) -> np.ndarray:
        """``(N1 - N2)^2 / 4 - 1/4`` on the tensor space."""
        d = self.number_difference
        return d @ d / 4 - np.eye(d.shape[0]) / 4


def build_two_mode_generators(n0: int, n_max: int) -> TwoModeOperatorSet:
    if n0 < 0:
        raise ValueError(f"photon-number difference must be nonnegative, got {n0}")
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    d1, d2 = n_max + n0 + 1, n_max + 1
    a1 = np.kron(annihilation(d1), np.eye(d2))
    a2 = np.kron(np.eye(d1), annihilation(d2))
    pair_create = a1.T @ a2.T
    pair_destroy = a1 @ a2
    k1 = (pair_create + pair_destroy) / 2
    k2 = (pair_create - pair_destroy) / 2j
    # a2 a2^dag = N2 + 1 holds exactly only below the cutoff, so use N2 + 1 directly
    n1 = a1.T @ a1
    n2 = a2.T @ a2
    k3 = (n1 + n2 + np.eye(d1 * d2)) / 2
    return TwoModeOperatorSet(
        n0=n0,
        n_max=n_max,
        K1=k1.astype(complex),
        K2=k2,
        K3=k3.astype(complex),
        number_difference=n1 - n2,
    )


def pulled_back(ops: TwoModeOperatorSet) -> dict[str, np.ndarray]:
    """Two-mode generators restricted to the embedded irrep sector."""
    iso = ops.embedding()
    return {
        name: iso.T @ getattr(ops, name) @ iso
        for name in ("K1", "K2", "K3", "Kplus", "Kminus")
    }


def irrep_embedding_deviations(n0: int, n_max: int) -> dict[str, float]:
    ops = build_two_mode_generators(n0, n_max)
    k = BargmannIndex.from_n0(n0)
    dim = n_max + 1
    m = dim - 1
    out = {}
    for name, mat in pulled_back(ops).items():
        ref = generator_matrix(name, k, dim).entries
        out[name] = float(np.max(np.abs(mat[:m, :m] - ref[:m, :m])))
    return out


def irrep_embedding_check(n0: int, n_max: int) -> float:
    """Max deviation between pulled-back two-mode and single-index generators.

    The comparison runs over the interior block of the ``k = (n0+1)/2``
    truncation of dimension ``n_max + 1``.
    """
    return max(irrep_embedding_deviations(n0, n_max).values())


def number_difference_commutators(n0: int, n_max: int) -> dict[str, float]:
    """Max-abs entries of ``[N1 - N2, Ki]``; these label irreps so all vanish."""
    ops = build_two_mode_generators(n0, n_max)
    d = ops.number_difference
    return {
        name: float(np.max(np.abs(d @ getattr(ops, name) - getattr(ops, name) @ d)))
        for name in ("K1", "K2", "K3")
    }
