"""Phase uncertainty of the interferometer.

Error propagation gives ``(dphi)^2 = Var(K3_out) / (d<K3_out>/dphi)^2``.
`delta_phi_numeric` evaluates this from input moments (Heisenberg picture),
`delta_phi_evolved` from a state pushed through the unitaries (Schrodinger
picture); the remaining functions are the closed forms they are checked
against.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import as_index
from .errors import (
    IndeterminatePoint,
    InfeasibleBudget,
    NonpositivePhotons,
    NonpositiveVariance,
    ZeroGain,
)
from .interferometer import (
    InterferometerConfig,
    _boost_vector,
    convention_signs,
    k3_out_coefficients,
    propagate,
)
from .states import DIM_CAP, KMoments, TruncatedState

EPS_DENOMINATOR = 1e-10


class Method(str, enum.Enum):
    NUMERIC = "numeric"
    EVOLVED = "evolved"
    VACUUM_CLOSED = "vacuum_closed"
    INTELLIGENT_CLOSED = "intelligent_closed"
    COHERENT_INTELLIGENT_CLOSED = "coherent_intelligent_closed"
    PHOTON_BUDGET = "photon_budget"


@dataclass(frozen=True)
class SensitivityResult:
    """``delta_phi_sq = numerator / denominator`` in radians squared.

    For numeric routes ``numerator`` is ``Var(K3_out)`` and ``denominator``
    the squared phase derivative of ``<K3_out>``; closed forms report the
    numerator and denominator of their own formula.
    """

    delta_phi_sq: float
    numerator: float
    denominator: float
    method: Method

    @property
    def delta_phi(self) -> float:
        return math.sqrt(self.delta_phi_sq)


def _require_gain(beta: float) -> float:
    sh = math.sinh(beta)
    if sh == 0:
        raise ZeroGain("mixer gain beta = 0 carries no phase information")
    return sh


def delta_phi_numeric(m: KMoments, cfg: InterferometerConfig,
                      eps_den: float = EPS_DENOMINATOR) -> SensitivityResult:
    """Error propagation from input moments.

    ``K3_out = c . K`` with real ``c``, so its variance only involves the
    symmetrized second moments: ``c^T S c - (c . <K>)^2``.

    Raises
    ------
    IndeterminatePoint
        If ``|d<K3_out>/dphi| <= eps_den`` (e.g. vacuum input at ``phi = 0``).
    """
    coeffs, derivs = k3_out_coefficients(cfg)
    slope = float(derivs @ m.mean)
    if abs(slope) <= eps_den:
        raise IndeterminatePoint(
            f"d<K3_out>/dphi = {slope:.3g} at phi={cfg.phi}; use a closed-form limit"
        )
    numerator = float(coeffs @ m.second @ coeffs - (coeffs @ m.mean) ** 2)
    denominator = slope * slope
    return SensitivityResult(numerator / denominator, numerator, denominator, Method.NUMERIC)


def output_signal_slope(state: TruncatedState, cfg: InterferometerConfig, **kw) -> float:
    """``d<K3_out>/dphi`` from the evolved state.

    With ``eta`` the state after the phase shifters and ``B`` the output
    ``K3`` pulled back through the second mixer, the derivative is
    ``-2 s Im<B eta|K3 eta>`` for a phase unitary ``exp(s i phi K3)``.
    """
    return _slope_and_stages(state, cfg, **kw)[0]


def _slope_and_stages(state, cfg, **kw):
    stages = propagate(state, cfg, **kw)
    s_fwm, s_phase = convention_signs()
    if kw.get("flip_fwm_sign"):
        s_fwm = -s_fwm
    k = state.k
    eta = stages.after_phase.coefficients
    n3 = np.arange(eta.size) + k.k
    b_eta = _boost_vector(n3 * stages.output.coefficients, cfg.beta, k, s_fwm)
    slope = -2 * s_phase * float(np.imag(np.vdot(b_eta, n3 * eta)))
    return slope, stages


def delta_phi_evolved(state: TruncatedState, cfg: InterferometerConfig,
                      eps_den: float = EPS_DENOMINATOR, dim: int | None = None,
                      dim_cap: int = DIM_CAP, flip_fwm_sign: bool = False) -> SensitivityResult:
    """Error propagation on the state evolved through the truncated unitaries."""
    slope, stages = _slope_and_stages(state, cfg, dim=dim, dim_cap=dim_cap,
                                      flip_fwm_sign=flip_fwm_sign)
    if abs(slope) <= eps_den:
        raise IndeterminatePoint(
            f"d<K3_out>/dphi = {slope:.3g} at phi={cfg.phi}; use a closed-form limit"
        )
    out = stages.output.coefficients
    n3 = np.arange(out.size) + state.k.k
    p = np.abs(out) ** 2
    mean = float(p @ n3)
    numerator = float(p @ (n3 - mean) ** 2)
    denominator = slope * slope
    return SensitivityResult(numerator / denominator, numerator, denominator, Method.EVOLVED)


def extrapolate_phi_to_zero(evaluate: Callable[[float], float], h: float = 1e-3) -> float:
    """``phi -> 0`` limit of ``evaluate(phi)`` from four points near zero.

    Odd terms are removed by averaging ``+-phi``; Richardson elimination
    in ``phi^2`` removes the leading even term.
    """
    even = lambda x: (evaluate(x) + evaluate(-x)) / 2  # noqa: E731
    return (4 * even(h / 2) - even(h)) / 3


# -- closed forms ----------------------------------------------------------


def delta_phi_vacuum(beta: float, phi: float, limit: bool = False) -> SensitivityResult:
    """Vacuum-input uncertainty ``[sin^2 + cosh^2 beta (1-cos)^2]/(sin^2 sinh^2 beta)``.

    At ``phi = 0`` (or with ``limit=True``) the minimum ``1/sinh^2 beta`` is
    returned.
    """
    sh = _require_gain(beta)
    if limit or phi == 0:
        return SensitivityResult(1 / sh**2, 1.0, sh**2, Method.VACUUM_CLOSED)
    s, c = math.sin(phi), math.cos(phi)
    if abs(s) < 1e-12:
        raise IndeterminatePoint(f"sin(phi) vanishes at phi={phi}")
    numerator = s * s + math.cosh(beta) ** 2 * (1 - c) ** 2
    denominator = s * s * sh * sh
    return SensitivityResult(numerator / denominator, numerator, denominator, Method.VACUUM_CLOSED)


def delta_phi_lowest_weight(k, beta: float, phi: float, limit: bool = False) -> SensitivityResult:
    """Vacuum formula divided by ``2k``: input ``|k, 0>`` (a Fock state, ``zeta = 0``).

    Follows from the vacuum derivation with ``<K3> = k`` and
    ``Var K1 = Var K2 = k/2``; ``k = 1/2`` is the two-mode vacuum.
    """
    k = as_index(k)
    res = delta_phi_vacuum(beta, phi, limit)
    denominator = res.denominator * k.twice_k
    return SensitivityResult(res.numerator / denominator, res.numerator, denominator,
                             Method.VACUUM_CLOSED)


def delta_phi_intelligent(var_k2: float, beta: float) -> SensitivityResult:
    """``1/(4 sinh^2 beta (dK2)^2)``, attained by K2-K3 intelligent states at ``phi = 0``."""
    sh = _require_gain(beta)
    if not var_k2 > 0:
        raise NonpositiveVariance(f"(dK2)^2 must be positive, got {var_k2}")
    denominator = 4 * sh * sh * var_k2
    return SensitivityResult(1 / denominator, 1.0, denominator, Method.INTELLIGENT_CLOSED)


def delta_phi_coherent_intelligent(k, beta: float) -> SensitivityResult:
    """``1/(2k sinh^2 beta)``, independent of the squeezing amplitude."""
    k = as_index(k)
    sh = _require_gain(beta)
    denominator = k.twice_k * sh * sh
    return SensitivityResult(1 / denominator, 1.0, denominator,
                             Method.COHERENT_INTELLIGENT_CLOSED)


def photon_budget_gain(k, zeta: float, n_total: float) -> float:
    """``cosh(beta)`` that makes the first mixer emit ``n_total`` photons."""
    k = as_index(k)
    z2 = float(zeta) ** 2
    return (1 - z2) / (1 + z2) * (n_total + 1) / k.twice_k


def delta_phi_vs_photons(k, zeta: float, n_total: float) -> SensitivityResult:
    """Coherent-intelligent uncertainty at a fixed photon budget ``N``.

    ``(1/2k) [((1-zeta^2)/(1+zeta^2) (N+1)/(2k))^2 - 1]^-1``.

    Raises
    ------
    InfeasibleBudget
        If no ``beta > 0`` emits ``N`` photons at this ``(k, zeta)``.
    """
    k = as_index(k)
    zeta = float(zeta)
    if not abs(zeta) < 1:
        raise InfeasibleBudget(f"|zeta| must be < 1, got {zeta}")
    bracket = photon_budget_gain(k, zeta, n_total) ** 2 - 1
    if not bracket > 0:
        raise InfeasibleBudget(
            f"N={n_total} photons cannot be emitted with beta > 0 at k={k}, zeta={zeta}"
        )
    denominator = k.twice_k * bracket
    return SensitivityResult(1 / denominator, 1.0, denominator, Method.PHOTON_BUDGET)


def delta_phi_vacuum_limit(n_total: float) -> SensitivityResult:
    """Vacuum input at the optimal phase: ``1/(N(N+2))``."""
    if not n_total > 0:
        raise NonpositivePhotons(f"photon number must be positive, got {n_total}")
    denominator = n_total * (n_total + 2)
    return SensitivityResult(1 / denominator, 1.0, denominator, Method.PHOTON_BUDGET)
