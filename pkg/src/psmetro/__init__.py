"""Postselected quantum metrology on small dense Hilbert spaces.

Quantum Fisher information with and without postselection, weak values and
their amplification efficiency, Kirkwood-Dirac quasiprobabilities, and the
three-level information-preserving protocol.
"""

from .config import TOL, Tolerances
from .errors import (
    AlphaSingularError,
    DegenerateSpectrumError,
    DimensionCapExceededError,
    DimensionMismatchError,
    NoConvergenceError,
    NonHermitianError,
    NotNormalizedError,
    NullVectorError,
    OrthogonalPrePostError,
    PsmetroError,
    VanishingPostselectionError,
    ZeroCostDenominatorError,
    ZeroMeanError,
)
from .fisher import (
    CostModel,
    ProtocolMetrics,
    check_saturation_conditions,
    check_theorem1,
    efficiency_terms,
    efficiency_xi,
    info_cost_rate,
    postselected_metrics,
    qfi_finite_difference,
    qfi_optimal,
    qfi_postselected_derivative,
    qfi_postselected_operator,
    qfi_postselected_weakvalues,
    qfi_pure,
    random_protocol,
    weak_value_records,
)
from .linalg import (
    HermitianOperator,
    Ket,
    hermitian_eigendecomposition,
    operator_norm_sq,
    random_haar_ket,
    random_hermitian,
    random_unitary,
    unitary_from_generator,
)
from .protocols import (
    SweepGrid,
    ThreeLevelConfig,
    kd_tables_at_optimum,
    sweep,
    three_level_limits,
    three_level_metrics,
    three_level_setup,
)
from .quasiprob import (
    classicality_report,
    extended_kd_distribution,
    kd_distribution,
    kd_identity_check,
    postselected_qfi_from_quasiprob,
    quantum_modification,
    theorem2_check,
    wigner_formula,
)
from .states import EncodingConfig, Postselection, encode, postselect
from .weakvalue import (
    EntangledProbeConfig,
    MeterModel,
    efficiency_via_phases,
    entangled_probe,
    entangled_scaling_report,
    first_order_meter_average,
    geometric_phase,
    optimal_postselection,
    optimal_wv_and_prob,
    spin_half_pair,
    weak_value,
    wva_efficiency,
)

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Tolerances",
    "EncodingConfig",
    "Postselection",
    "encode",
    "postselect",
    "AlphaSingularError",
    "check_saturation_conditions",
    "check_theorem1",
    "classicality_report",
    "CostModel",
    "DegenerateSpectrumError",
    "DimensionCapExceededError",
    "DimensionMismatchError",
    "efficiency_terms",
    "efficiency_via_phases",
    "efficiency_xi",
    "entangled_probe",
    "entangled_scaling_report",
    "EntangledProbeConfig",
    "extended_kd_distribution",
    "first_order_meter_average",
    "geometric_phase",
    "hermitian_eigendecomposition",
    "HermitianOperator",
    "info_cost_rate",
    "kd_distribution",
    "kd_identity_check",
    "kd_tables_at_optimum",
    "Ket",
    "MeterModel",
    "NoConvergenceError",
    "NonHermitianError",
    "NotNormalizedError",
    "NullVectorError",
    "operator_norm_sq",
    "optimal_postselection",
    "optimal_wv_and_prob",
    "OrthogonalPrePostError",
    "postselected_metrics",
    "postselected_qfi_from_quasiprob",
    "ProtocolMetrics",
    "PsmetroError",
    "qfi_finite_difference",
    "qfi_optimal",
    "qfi_postselected_derivative",
    "qfi_postselected_operator",
    "qfi_postselected_weakvalues",
    "qfi_pure",
    "quantum_modification",
    "random_haar_ket",
    "random_hermitian",
    "random_protocol",
    "random_unitary",
    "spin_half_pair",
    "sweep",
    "SweepGrid",
    "theorem2_check",
    "three_level_limits",
    "three_level_metrics",
    "three_level_setup",
    "ThreeLevelConfig",
    "unitary_from_generator",
    "VanishingPostselectionError",
    "weak_value",
    "weak_value_records",
    "wigner_formula",
    "wva_efficiency",
    "ZeroCostDenominatorError",
    "ZeroMeanError",
]
