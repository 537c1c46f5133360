"""SU(1,1) interferometer: two four-wave mixers around a pair of phase shifters.

Two equivalent pictures are provided.  In the Heisenberg picture each element
acts on the generator vector ``K = (K1, K2, K3)`` as a real 3x3 matrix (a
Lorentz boost for a mixer, a rotation about the third axis for the phase
shifters).  In the Schrodinger picture each element is a unitary acting on a
truncated state; ``U^dag K U = M K`` ties the two together.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import BargmannIndex, OperatorMatrix, as_index
from .errors import DimensionError, InvalidAmplitude, TruncationLeak
from .states import DIM_CAP, CoherentParams, KMoments, TruncatedState, moments

METRIC = np.diag([-1.0, -1.0, 1.0])


@dataclass(frozen=True)
class KVectorTransform:
    """Real 3x3 matrix acting on ``(K1, K2, K3)``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if isinstance(other, KVectorTransform):
            return KVectorTransform(self.matrix @ other.matrix)
        return self.matrix @ other

    def metric_defect(self) -> float:
        """``max |M^T g M - g|`` with ``g = diag(-1, -1, 1)``."""
        m = self.matrix
        return float(np.max(np.abs(m.T @ METRIC @ m - METRIC)))

    def apply(self, m: KMoments) -> KMoments:
        return m.transformed(self.matrix)


def boost_matrix(beta: float) -> KVectorTransform:
    """Boost ``L(beta)`` mixing ``K2`` and ``K3``.

    ``boost_matrix(-beta)`` is the first mixer's transformation, with
    ``-sinh(beta)`` off the diagonal.
    """
    ch, sh = math.cosh(beta), math.sinh(beta)
    return KVectorTransform([[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]])


def rotation_matrix(phi: float) -> KVectorTransform:
    """Rotation ``R(phi)`` of ``(K1, K2)`` about the third axis."""
    c, s = math.cos(phi), math.sin(phi)
    return KVectorTransform([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class InterferometerConfig:
    """Mixer gain ``beta`` and per-arm phases; the net phase is ``-(phi1 + phi2)``."""

    beta: float
    phi1: float = 0.0
    phi2: float = 0.0

    @classmethod
    def from_phi(cls, beta: float, phi: float) -> "InterferometerConfig":
        return cls(float(beta), -float(phi), 0.0)

    @property
    def phi(self) -> float:
        return -(self.phi1 + self.phi2)


def overall_transform(cfg: InterferometerConfig) -> KVectorTransform:
    """``L(beta) R(phi) L(-beta)``: first mixer, phase shifters, second mixer."""
    return boost_matrix(cfg.beta) @ rotation_matrix(cfg.phi) @ boost_matrix(-cfg.beta)


def k3_out_coefficients(cfg: InterferometerConfig) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of ``K3_out`` on ``(K1, K2, K3)`` and their phi-derivatives."""
    ch, sh = math.cosh(cfg.beta), math.sinh(cfg.beta)
    c, s = math.cos(cfg.phi), math.sin(cfg.phi)
    coeffs = np.array([sh * s, sh * ch * (c - 1), ch * ch - sh * sh * c])
    derivs = np.array([sh * c, -sh * ch * s, sh * sh * s])
    return coeffs, derivs


# -- Schrodinger picture ---------------------------------------------------


@lru_cache(maxsize=32)
def _k1_eigensystem(twice_k: int, dim: int):
    n = np.arange(dim - 1, dtype=float)
    off = np.sqrt((n + 1) * (n + twice_k)) / 2
    w, v = eigh_tridiagonal(np.zeros(dim), off)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def _k3_diagonal(k: BargmannIndex, dim: int) -> np.ndarray:
    return np.arange(dim) + k.k


def _boost_vector(psi: np.ndarray, beta: float, k: BargmannIndex, sign: int) -> np.ndarray:
    w, v = _k1_eigensystem(k.twice_k, psi.size)
    return v @ (np.exp(sign * 1j * beta * w) * (v.T @ psi))


def _phase_vector(psi: np.ndarray, phi: float, k: BargmannIndex, sign: int) -> np.ndarray:
    return np.exp(sign * 1j * phi * _k3_diagonal(k, psi.size)) * psi


@lru_cache(maxsize=1)
def convention_signs() -> tuple[int, int]:
    """Generator signs ``(s_fwm, s_phase)`` with ``U = exp(s i x K)``.

    Fixed by evolving small probe states and picking the sign whose first
    moments follow the 3x3 transforms (``L(-beta)`` for the mixer, ``R(phi)``
    for the phase shifters).  ``U^dag K U = M K`` means the moments of
    ``U|psi>`` are ``M <K>``.
    """
    from .states import coherent_state

    k = BargmannIndex(1)
    probe = coherent_state((k, 0.3 + 0.1j), dim=64)
    m0 = moments(probe).mean
    x = 0.1

    def misfit(evolve, target):
        out = TruncatedState(k, evolve(probe.coefficients), probe.tail_bound)
        return float(np.max(np.abs(moments(out).mean - target @ m0)))

    fwm = min((1, -1), key=lambda s: misfit(
        lambda c: _boost_vector(c, x, k, s), boost_matrix(-x).matrix))
    phase = min((1, -1), key=lambda s: misfit(
        lambda c: _phase_vector(c, x, k, s), rotation_matrix(x).matrix))
    return fwm, phase


def fwm_unitary(beta: float, k, dim: int, flip_sign: bool = False) -> OperatorMatrix:
    """Mixer unitary ``exp(+-i beta K1)`` whose adjoint action is ``L(-beta)``.

    The exponential comes from the eigendecomposition of the truncated
    (real symmetric) ``K1``.  ``flip_sign`` inverts the convention and
    exists only to show that the consistency checks catch it.
    """
    k = as_index(k)
    if dim < 8:
        raise DimensionError(f"mixer unitary needs dim >= 8, got {dim}")
    sign = convention_signs()[0] * (-1 if flip_sign else 1)
    w, v = _k1_eigensystem(k.twice_k, dim)
    return OperatorMatrix(k, dim, (v * np.exp(sign * 1j * beta * w)) @ v.T)


def phase_unitary(phi: float, k, dim: int) -> OperatorMatrix:
    """Diagonal unitary ``exp(+-i phi K3)`` whose adjoint action is ``R(phi)``."""
    k = as_index(k)
    if dim < 2:
        raise DimensionError(f"phase unitary needs dim >= 2, got {dim}")
    sign = convention_signs()[1]
    return OperatorMatrix(k, dim, np.diag(np.exp(sign * 1j * phi * _k3_diagonal(k, dim))))


def edge_mass(coefficients: np.ndarray) -> float:
    """Probability in the top tenth (at least 8 states) of the basis."""
    width = max(8, coefficients.size // 10)
    return float(np.sum(np.abs(coefficients[-width:]) ** 2))


def evolution_dim(state: TruncatedState, cfg: InterferometerConfig,
                  dim_cap: int = DIM_CAP) -> int:
    """Truncation large enough to hold the state at every interferometer stage.

    The largest ``<K3>`` along the path follows from the 3x3 transforms
    (``<K3>`` along a boost is convex, so the ends bound it); the basis is
    then sized for a geometric tail with that mean, as for coherent states.
    """
    k = state.k.k
    m = moments(state, tol=np.inf).mean
    first = boost_matrix(-cfg.beta) @ m
    last = overall_transform(cfg) @ m
    n_mean = max(m[2], first[2], last[2]) - k
    if n_mean <= 0:
        need = state.dim
    else:
        ratio = n_mean / (n_mean + 2 * k)
        need = n_mean + 42.0 / -math.log(ratio)
    occupied = int(np.max(np.nonzero(np.abs(state.coefficients) > 1e-300)[0], initial=0))
    dim = max(state.dim, occupied + int(math.ceil(1.25 * need)) + 32)
    return min(dim, dim_cap)


@dataclass(frozen=True)
class Stages:
    """States after each interferometer element, all on one truncation."""

    cfg: InterferometerConfig
    input: TruncatedState
    after_fwm1: TruncatedState
    after_phase: TruncatedState
    output: TruncatedState
    leak: float = field(default=0.0)


def propagate(state: TruncatedState, cfg: InterferometerConfig, dim: int | None = None,
              dim_cap: int = DIM_CAP, leak_tol: float = 1e-8,
              flip_fwm_sign: bool = False) -> Stages:
    """Run ``state`` through mixer, phase shifters and mixer.

    With ``dim`` omitted the truncation starts at `evolution_dim` and is
    doubled (up to ``dim_cap``) while probability piles up at the basis edge.

    Raises
    ------
    TruncationLeak
        If the edge mass at any stage exceeds ``leak_tol``.
    """
    k = state.k
    s_fwm, s_phase = convention_signs()
    if flip_fwm_sign:
        s_fwm = -s_fwm
    auto = dim is None
    dim = evolution_dim(state, cfg, dim_cap) if auto else dim
    if dim < state.dim:
        raise DimensionError(f"evolution dim {dim} is smaller than the state dim {state.dim}")
    while True:
        psi0 = state.padded(dim).coefficients
        psi1 = _boost_vector(psi0, cfg.beta, k, s_fwm)
        psi2 = _phase_vector(psi1, cfg.phi, k, s_phase)
        psi3 = _boost_vector(psi2, -cfg.beta, k, s_fwm)
        leak = max(edge_mass(p) for p in (psi1, psi2, psi3))
        if not auto or leak < 1e-15 or dim >= dim_cap:
            break
        dim = min(2 * dim, dim_cap)
    if leak > leak_tol:
        raise TruncationLeak(f"edge mass {leak:.3g} exceeds {leak_tol} at dim={dim}")
    tail = state.tail_bound + leak
    wrap = lambda p: TruncatedState(k, p, tail)  # noqa: E731
    return Stages(cfg, wrap(psi0), wrap(psi1), wrap(psi2), wrap(psi3), leak)


def apply_interferometer(state: TruncatedState, cfg: InterferometerConfig,
                         dim: int | None = None, dim_cap: int = DIM_CAP,
                         leak_tol: float = 1e-8, flip_fwm_sign: bool = False) -> TruncatedState:
    """Output state ``U_fwm2 U_phase U_fwm1 |psi>``.

    Raises
    ------
    TruncationLeak
        If the truncation could not hold the evolving state.
    """
    out = propagate(state, cfg, dim, dim_cap, leak_tol, flip_fwm_sign).output
    defect = abs(out.norm - state.norm)
    if defect > 1e-8:
        raise TruncationLeak(f"norm defect {defect:.3g} after evolution")
    return TruncatedState(out.k, out.coefficients / out.norm, out.tail_bound)


# -- photon bookkeeping ----------------------------------------------------


def total_photons(params, beta: float) -> float:
    """Photons emitted by the first mixer for a real-amplitude coherent input.

    ``N = 2k (1 + zeta^2)/(1 - zeta^2) cosh(beta) - 1``.
    """
    if not isinstance(params, CoherentParams):
        params = CoherentParams(*params)
    z = params.zeta
    if abs(z.imag) > 0:
        raise InvalidAmplitude(
            f"closed-form photon number needs a real amplitude, got {z}; "
            "use total_photons_from_moments"
        )
    z = z.real
    return 2 * params.k.k * (1 + z * z) / (1 - z * z) * math.cosh(beta) - 1


def total_photons_from_moments(m: KMoments, beta: float) -> float:
    """``N = 2 <cosh(beta) K3 - sinh(beta) K2> - 1`` for any input state."""
    return 2 * (math.cosh(beta) * m.mean[2] - math.sinh(beta) * m.mean[1]) - 1
