"""Numerical thresholds shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    normalization: float = 1e-10
    orthonormal: float = 1e-10
    jacobi_offdiag: float = 1e-13  # relative to the Frobenius norm
    jacobi_max_sweeps: int = 100
    degeneracy_gap: float = 1e-9
    nonzero_amplitude: float = 1e-10
    postselection_prob: float = 1e-12  # below this the renormalized state is withheld
    weak_value_overlap: float = 1e-10
    variance_floor: float = 1e-12
    bound_slack: float = 1e-9
    classical: float = 1e-10
    bargmann: float = 1e-12
    null_vector: float = 1e-14
    zero_mean: float = 1e-12
    saturation: float = 1e-9
    uniform_condition: float = 1e-9
    meter_coupling: float = 0.1


TOL = Tolerances()
