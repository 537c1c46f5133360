"""Phase sensitivity of an SU(1,1) (four-wave-mixer) interferometer.

The discrete-series representation is simulated in a truncated number
basis; closed-form sensitivities are cross-checked against explicit
evolution of coherent, intelligent and Fock input states.
"""
from .core import BargmannIndex, OperatorMatrix, casimir_matrix, generator_matrix, generators
from .errors import (
    IndeterminatePoint,
    InfeasibleBudget,
    SU11Error,
    TailTooLarge,
    TruncationLeak,
)
from .interferometer import (
    InterferometerConfig,
    apply_interferometer,
    boost_matrix,
    overall_transform,
    propagate,
    rotation_matrix,
    total_photons,
)
from .sensitivity import (
    SensitivityResult,
    delta_phi_coherent_intelligent,
    delta_phi_evolved,
    delta_phi_intelligent,
    delta_phi_numeric,
    delta_phi_vacuum,
    delta_phi_vacuum_limit,
    delta_phi_vs_photons,
)
from .states import (
    CoherentParams,
    TruncatedState,
    coherent_intelligent_params,
    coherent_intelligent_state,
    coherent_state,
    fock_state,
    moments,
)

__version__ = "0.1.0"
