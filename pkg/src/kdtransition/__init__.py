"""Kirkwood-Dirac quasiprobabilities across the weak-to-strong measurement transition."""

from .config import DEFAULT_TOL, Tolerances
from .dynamics import (
    TransitionPoint,
    dynamical_kd_exact,
    dynamical_kd_interp,
    general_value_AT,
    transition_sweep,
)
from .errors import KDError
from .kd import (
    JohansenParts,
    KDTable,
    binary_dephase,
    coherence_terms,
    full_dephase,
    johansen_decompose,
    kd_marginals,
    kd_table,
    phase_rotated_projector,
    reconstruct_state,
    wigner_table,
)
from .linalg import (
    Basis,
    DensityOperator,
    ObservableSpec,
    bloch_state,
    computational_basis,
    density,
    fourier_basis,
    observable,
    pure_state,
    rotated_qubit_basis,
    sigma_z,
    validate_density,
)
from .nonclassicality import NonclassicalityReport, decay_check, delta_q, nonclassicality
from .pointer import PointerConfig, decoherence_factors, decoherence_time, pointer_overlap, reduced_state
from .values import WeakValueResult, conditional_value, denominator_compare, expectation, weak_value

__version__ = "0.1.0"
