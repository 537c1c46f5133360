"""Perelomov coherent states, their moments, and coherent-intelligent states."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import BargmannIndex, as_index
from .errors import BranchMismatch, DegenerateState, InvalidAmplitude, TailTooLarge

DEFAULT_TAIL_TOL = 1e-12
MIN_DIM = 32
DIM_CAP = 4096
_TERM_FLOOR = 1e-20


@dataclass(frozen=True)
class TruncatedState:
    """Normalized amplitudes over ``|k, n>``, ``n < dim``.

    ``tail_bound`` bounds the probability mass discarded by the truncation.
    """

    k: BargmannIndex
    coefficients: np.ndarray = field(repr=False)
    tail_bound: float = 0.0

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("coefficients must be a 1-D array with at least 2 entries")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def dim(self) -> int:
        return self.coefficients.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def padded(self, dim: int) -> "TruncatedState":
        """Same state embedded in a larger truncation."""
        if dim < self.dim:
            raise ValueError(f"cannot pad dim {self.dim} down to {dim}")
        c = np.zeros(dim, dtype=complex)
        c[: self.dim] = self.coefficients
        return TruncatedState(self.k, c, self.tail_bound)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2


def fock_state(k, n: int, dim: int) -> TruncatedState:
    """Basis state ``|k, n>``."""
    if not 0 <= n < dim:
        raise ValueError(f"n={n} outside truncation of dimension {dim}")
    c = np.zeros(dim, dtype=complex)
    c[n] = 1.0
    return TruncatedState(as_index(k), c, 0.0)


def vacuum(k=BargmannIndex(1), dim: int = MIN_DIM) -> TruncatedState:
    return fock_state(k, 0, dim)


@dataclass(frozen=True)
class CoherentParams:
    """Amplitude of the coherent state ``|k, zeta>``, ``|zeta| < 1``."""

    k: BargmannIndex
    zeta: complex
    xi: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "k", as_index(self.k))
        object.__setattr__(self, "zeta", complex(self.zeta))
        if not abs(self.zeta) < 1:
            raise InvalidAmplitude(f"|zeta| must be < 1, got {abs(self.zeta)}")
        if self.xi is not None:
            expected = _zeta_from_xi(complex(self.xi))
            if abs(self.zeta - expected) >= 1e-12:
                raise InvalidAmplitude(f"zeta={self.zeta} inconsistent with xi={self.xi}")

    @classmethod
    def from_xi(cls, k, xi: complex) -> "CoherentParams":
        """Parametrize by the squeeze parameter of ``exp(xi K+ - xi* K-)``."""
        return cls(k, _zeta_from_xi(complex(xi)), complex(xi))


def _zeta_from_xi(xi: complex) -> complex:
    r = abs(xi)
    return 0j if r == 0 else xi / r * math.tanh(r)


def _check_amplitude(zeta) -> complex:
    zeta = complex(zeta)
    if not abs(zeta) < 1:
        raise InvalidAmplitude(f"|zeta| must be < 1, got {abs(zeta)}")
    return zeta


def _series(twice_k: int, zeta: complex, n_terms: int) -> np.ndarray:
    """First ``n_terms`` coefficients of the coherent-state expansion.

    Uses the ratio ``c[n+1]/c[n] = zeta sqrt((n + 2k)/(n + 1))`` so no gamma
    function is ever evaluated.
    """
    n = np.arange(n_terms - 1, dtype=float)
    ratios = np.empty(n_terms, dtype=complex)
    ratios[0] = (1 - abs(zeta) ** 2) ** (twice_k / 2)
    ratios[1:] = zeta * np.sqrt((n + twice_k) / (n + 1))
    return np.cumprod(ratios)


def _tail_profile(twice_k: int, zeta: complex, n_terms: int, weight_power: int = 0):
    """Discarded mass ``sum_{m >= n} w_m |c_m|^2`` for every cut ``n <= n_terms``.

    Terms are summed past the distribution peak until they drop below the
    floor; the rest is bounded by a geometric series.
    """
    r2 = abs(zeta) ** 2
    # |c[n+1]|^2/|c[n]|^2 = r2 (n+2k)/(n+1) is non-increasing; below 1 past the peak
    peak = max(0, math.ceil((r2 * twice_k - 1) / (1 - r2))) if r2 > 0 else 0
    total = n_terms
    while True:
        c = _series(twice_k, zeta, total)
        terms = np.abs(c) ** 2
        n = np.arange(total, dtype=float)
        terms = terms * (n + twice_k / 2) ** weight_power
        last = terms[-1]
        if total > peak + 1 and (last < _TERM_FLOOR or r2 == 0):
            break
        total *= 2
    ratio = r2 * (total - 1 + twice_k) / total
    if weight_power:
        ratio *= ((total + twice_k / 2) / (total - 1 + twice_k / 2)) ** weight_power
    remainder = last * ratio / (1 - ratio) if ratio < 1 else math.inf
    tails = np.cumsum(terms[::-1])[::-1] + remainder
    tails = np.append(tails, remainder)
    return tails[: n_terms + 1], c[:n_terms]


def tail_mass(k, zeta, dim: int) -> float:
    """Probability mass of ``|k, zeta>`` beyond the first ``dim`` basis states."""
    k = as_index(k)
    tails, _ = _tail_profile(k.twice_k, _check_amplitude(zeta), dim)
    return float(tails[dim])


def default_dim(k, zeta, tol: float = DEFAULT_TAIL_TOL, dim_cap: int = DIM_CAP) -> int:
    """Smallest truncation (at least 32) holding ``|k, zeta>`` to ``tol``.

    The criterion bounds the discarded ``(n+k)^2``-weighted mass, which also
    keeps second moments of the generators accurate to ``tol``.
    """
    k = as_index(k)
    zeta = _check_amplitude(zeta)
    tails, _ = _tail_profile(k.twice_k, zeta, dim_cap, weight_power=2)
    ok = np.nonzero(tails[MIN_DIM:] < tol)[0]
    if ok.size == 0:
        raise TailTooLarge(
            f"|k={k}, zeta={zeta}> cannot be truncated to tail < {tol} within dim_cap={dim_cap}"
        )
    return MIN_DIM + int(ok[0])


def coherent_state(params, dim: int | None = None, tol: float = DEFAULT_TAIL_TOL,
                   dim_cap: int = DIM_CAP) -> TruncatedState:
    """Truncated Perelomov coherent state ``|k, zeta>``.

    Parameters
    ----------
    params : CoherentParams or tuple (k, zeta)
    dim : int, optional
        Truncation. Chosen automatically from ``tol`` when omitted.
    tol : float
        Largest admissible discarded probability mass.

    Raises
    ------
    InvalidAmplitude
        If ``|zeta| >= 1``.
    TailTooLarge
        If the truncation cannot meet ``tol``.
    """
    if not isinstance(params, CoherentParams):
        params = CoherentParams(*params)
    k, zeta = params.k, params.zeta
    if dim is None:
        dim = default_dim(k, zeta, tol, dim_cap)
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    tails, c = _tail_profile(k.twice_k, zeta, dim)
    tail = float(tails[dim])
    if not tail < tol:
        raise TailTooLarge(f"tail mass {tail:.3g} >= {tol} at dim={dim}")
    c = c / np.linalg.norm(c)
    return TruncatedState(k, c, tail)


# -- moments ---------------------------------------------------------------


def apply_generators(state: TruncatedState) -> np.ndarray:
    """Rows ``K1|psi>, K2|psi>, K3|psi>`` on a basis one larger than the state.

    The extra row keeps every product exact for the truncated vector.
    """
    c = state.coefficients
    dim = c.size
    n = np.arange(dim, dtype=float)
    up = np.zeros(dim + 1, dtype=complex)  # K+ |psi>
    up[1:] = np.sqrt((n + 1) * (n + state.k.twice_k)) * c
    down = np.zeros(dim + 1, dtype=complex)  # K- |psi>
    down[: dim - 1] = np.sqrt((n[:-1] + 1) * (n[:-1] + state.k.twice_k)) * c[1:]
    k3 = np.zeros(dim + 1, dtype=complex)
    k3[:-1] = (n + state.k.k) * c
    return np.stack([(up + down) / 2, (up - down) / 2j, k3])


@dataclass(frozen=True)
class KMoments:
    """First moments and symmetrized second moments of ``(K1, K2, K3)``."""

    mean: np.ndarray
    second: np.ndarray

    @property
    def covariance(self) -> np.ndarray:
        return self.second - np.outer(self.mean, self.mean)

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    def transformed(self, matrix: np.ndarray) -> "KMoments":
        """Moments of ``M K`` for a real 3x3 ``M``."""
        m = np.asarray(matrix, dtype=float)
        return KMoments(m @ self.mean, m @ self.second @ m.T)


def moments(state: TruncatedState, tol: float = DEFAULT_TAIL_TOL) -> KMoments:
    if not state.tail_bound < tol:
        raise TailTooLarge(f"state tail bound {state.tail_bound:.3g} >= {tol}")
    c = np.zeros(state.dim + 1, dtype=complex)
    c[:-1] = state.coefficients
    kpsi = apply_generators(state)
    mean = np.real(kpsi.conj() @ c)
    gram = kpsi.conj() @ kpsi.T
    return KMoments(mean, np.real(gram))


class ClosedFormMoments(NamedTuple):
    var_k2: float
    var_k3: float
    mean_k1: float


def coherent_closed_form_moments(params) -> ClosedFormMoments:
    """Closed-form ``(dK2)^2``, ``(dK3)^2`` and ``<K1>`` over ``|k, zeta>``."""
    if not isinstance(params, CoherentParams):
        params = CoherentParams(*params)
    k, z = params.k.k, params.zeta
    a2 = abs(z) ** 2
    var_k2 = k * (1 + a2**2 - (z**2 + z.conjugate() ** 2).real) / (2 * (1 - a2) ** 2)
    var_k3 = 2 * k * a2 / (1 - a2) ** 2
    mean_k1 = 2 * k * z.real / (1 - a2)
    return ClosedFormMoments(var_k2, var_k3, mean_k1)


# -- intelligent states ----------------------------------------------------


def _branch_sign(branch) -> int:
    if branch in (1, "+", "upper"):
        return 1
    if branch in (-1, "-", "lower"):
        return -1
    raise ValueError(f"branch must be '+'/'upper' or '-'/'lower', got {branch!r}")


@dataclass(frozen=True)
class IntelligentParams:
    """K2-K3 intelligent state that is also a coherent state."""

    k: BargmannIndex
    gamma: float
    branch: int
    lam: complex
    zeta: float

    def coherent_params(self) -> CoherentParams:
        return CoherentParams(self.k, self.zeta)


def coherent_intelligent_params(gamma: float, branch="+", k=BargmannIndex(1)) -> IntelligentParams:
    """Eigenvalue and real amplitude of the coherent-intelligent state at ``gamma``.

    ``lambda = +-i k sqrt(gamma^2+1)`` and ``zeta = 1/(gamma +- sqrt(gamma^2+1))``.
    The upper branch needs ``gamma > 0`` and the lower one ``gamma < 0``.
    """
    k = as_index(k)
    sign = _branch_sign(branch)
    gamma = float(gamma)
    if gamma == 0 or not math.isfinite(gamma):
        raise BranchMismatch(f"gamma must be finite and nonzero, got {gamma}")
    if gamma * sign < 0:
        raise BranchMismatch(
            f"{'upper' if sign > 0 else 'lower'} branch requires gamma "
            f"{'> 0' if sign > 0 else '< 0'}, got {gamma}"
        )
    root = math.hypot(gamma, 1.0)
    # 1/(gamma + root) == root - gamma, computed without cancellation
    zeta = 1 / (gamma + sign * root)
    return IntelligentParams(k, gamma, sign, 1j * sign * k.k * root, zeta)


def coherent_intelligent_state(gamma: float, branch="+", k=BargmannIndex(1),
                               dim: int | None = None, tol: float = DEFAULT_TAIL_TOL):
    p = coherent_intelligent_params(gamma, branch, k)
    return p, coherent_state(p.coherent_params(), dim=dim, tol=tol)


def intelligent_residual(state: TruncatedState, gamma: float, lam: complex,
                         tol: float = DEFAULT_TAIL_TOL) -> float:
    """``||(K2 + i gamma K3 - lambda)|psi>||`` over the interior block.

    The last component needs the amplitude just beyond the truncation, so
    only components ``0 .. dim-2`` enter the norm.
    """
    if not state.tail_bound < tol:
        raise TailTooLarge(f"state tail bound {state.tail_bound:.3g} >= {tol}")
    _, k2, k3 = apply_generators(state)
    out = k2 + 1j * gamma * k3
    out[:-1] -= lam * state.coefficients
    return float(np.linalg.norm(out[: state.dim - 1]))


def gamma_from_state(state: TruncatedState, signed: bool = True) -> float:
    """Ratio ``dK2/dK3`` of the state.

    With ``signed`` the sign of ``<K1>`` is attached, which recovers the
    branch of a coherent-intelligent state (``sign(zeta) == sign(gamma)``).
    """
    m = moments(state)
    var2, var3 = m.variances[1], m.variances[2]
    if var3 <= 1e-14:
        raise DegenerateState("(dK3)^2 vanishes; gamma is undefined for a K3 eigenstate")
    ratio = math.sqrt(var2 / var3)
    if signed and m.mean[0] < 0:
        ratio = -ratio
    return ratio


def uncertainty_slack(m: KMoments) -> float:
    """``(dK2)^2 (dK3)^2 - <K1>^2 / 4``, nonnegative for any state."""
    v = m.variances
    return float(v[1] * v[2] - m.mean[0] ** 2 / 4)
