"""Weak values, weak-value-amplification efficiency and its geometric-phase form.

Also covers the entangled-probe optimization (``n`` subsystems in a GHZ-like
superposition of two eigenvectors), the spin-1/2 optimal pair, and the
first-order meter readout.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import TOL
from .errors import (
    DimensionCapExceededError,
    NullVectorError,
    OrthogonalPrePostError,
    ZeroMeanError,
)
from .linalg import HermitianOperator, Ket, as_ket, as_operator, check_same_dim

MAX_PROBE_DIM = 4096


def _principal_arg(z: complex) -> float:
    """``arg z`` on the branch ``(-pi, pi]``."""
    phase = cmath.phase(z)
    return math.pi if phase <= -math.pi else phase


def _sandwich(psi_f: Ket, gen: HermitianOperator, psi_i: Ket) -> complex:
    return complex(np.vdot(psi_f.amps, gen.matrix @ psi_i.amps))


def weak_value(psi_i, psi_f, gen) -> complex:
    """``<psi_f|A|psi_i> / <psi_f|psi_i>``."""
    psi_i, psi_f, gen = as_ket(psi_i), as_ket(psi_f), as_operator(gen)
    check_same_dim(psi_i, psi_f, gen)
    overlap = psi_f.inner(psi_i)
    if abs(overlap) < TOL.weak_value_overlap:
        raise OrthogonalPrePostError(f"|<psi_f|psi_i>| = {abs(overlap):.3e}")
    return _sandwich(psi_f, gen, psi_i) / overlap


def wva_efficiency(psi_i, psi_f, gen) -> float:
    """``p_s |A_w|^2``, evaluated in the regular product form ``|<psi_f|A|psi_i>|^2``."""
    psi_i, psi_f, gen = as_ket(psi_i), as_ket(psi_f), as_operator(gen)
    check_same_dim(psi_i, psi_f, gen)
    return abs(_sandwich(psi_f, gen, psi_i)) ** 2


def optimal_postselection(psi_i, gen) -> Ket:
    """Final state parallel to ``A|psi_i>``, which maximizes the efficiency."""
    psi_i, gen = as_ket(psi_i), as_operator(gen)
    check_same_dim(psi_i, gen)
    v = gen.matrix @ psi_i.amps
    second = np.vdot(v, v).real
    if second < TOL.null_vector:
        raise NullVectorError("A|psi_i> vanishes; no optimal postselection exists")
    return Ket(v / math.sqrt(second))


def optimal_wv_and_prob(psi_i, gen) -> tuple[float, float]:
    """Weak value and success probability at the efficiency optimum.

    ``A_w = <A^2>/<A>`` and ``p_s = <A>^2/<A^2>``. Both are real.

    Raises
    ------
    ZeroMeanError
        When ``|<A>|`` is below ``TOL.zero_mean``; the weak value diverges
        there while the probability goes to zero.
    """
    psi_i, gen = as_ket(psi_i), as_operator(gen)
    check_same_dim(psi_i, gen)
    v = gen.matrix @ psi_i.amps
    mean = np.vdot(psi_i.amps, v).real
    second = np.vdot(v, v).real
    if abs(mean) < TOL.zero_mean:
        raise ZeroMeanError(f"<A> = {mean:.3e}: anomalous limit, weak value diverges")
    return float(second / mean), float(mean * mean / second)


@dataclass(frozen=True)
class GeometricPhaseResult:
    phase: float
    bargmann_product: complex
    degenerate: bool


def geometric_phase(psi_i, a, psi_f) -> GeometricPhaseResult:
    """Phase of the three-vertex Bargmann invariant ``<psi_f|a><a|psi_i><psi_i|psi_f>``."""
    psi_i, a, psi_f = as_ket(psi_i), as_ket(a), as_ket(psi_f)
    check_same_dim(psi_i, a, psi_f)
    product = psi_f.inner(a) * a.inner(psi_i) * psi_i.inner(psi_f)
    degenerate = abs(product) < TOL.bargmann
    phase = 0.0 if degenerate else _principal_arg(product)
    return GeometricPhaseResult(phase, product, degenerate)


@dataclass(frozen=True)
class BranchPhase:
    eigenvalue: float
    weight: float  # |<psi_f|a_k><a_k|psi_i>|
    phase: GeometricPhaseResult
    factor: Optional[complex]  # exp(i Phi_k) exp(-i phi), None when degenerate
    sign: int
    null_eigenvalue: bool


def branch_phases(psi_i, psi_f, gen) -> tuple[list[BranchPhase], float]:
    """Per-eigenvector geometric phases with the global phase removed.

    Returns the branches and the global phase ``phi = arg <psi_i|psi_f>``. At
    the optimal postselection each ``factor`` equals ``sign(a_k)``. A zero
    eigenvalue gets sign ``+1`` and ``null_eigenvalue=True``.
    """
    psi_i, psi_f, gen = as_ket(psi_i), as_ket(psi_f), as_operator(gen)
    check_same_dim(psi_i, psi_f, gen)
    vals, vecs = gen.spectrum
    overlap = psi_i.inner(psi_f)
    global_phase = _principal_arg(overlap) if abs(overlap) > 0 else 0.0
    unit = cmath.exp(-1j * global_phase)
    out = []
    for k, a_k in enumerate(vals):
        ket = Ket(vecs[:, k])
        g = geometric_phase(psi_i, ket, psi_f)
        weight = abs(psi_f.inner(ket) * ket.inner(psi_i))
        factor = None if g.degenerate else cmath.exp(1j * g.phase) * unit
        out.append(BranchPhase(float(a_k), weight, g, factor, 1 if a_k >= 0 else -1, a_k == 0))
    return out, global_phase


def efficiency_via_phases(psi_i, psi_f, gen) -> float:
    """WVA efficiency rebuilt from eigenvalues, Bargmann magnitudes and geometric phases.

    ``|sum_k a_k |<psi_f|a_k><a_k|psi_i>| exp(i (Phi_k - phi))|^2``. When
    ``<psi_i|psi_f>`` vanishes every Bargmann invariant does too; the phase of
    ``<psi_f|a_k><a_k|psi_i>`` is then used directly.
    """
    psi_i, psi_f, gen = as_ket(psi_i), as_ket(psi_f), as_operator(gen)
    branches, global_phase = branch_phases(psi_i, psi_f, gen)
    vecs = gen.eigenvectors
    total = 0j
    for k, br in enumerate(branches):
        if br.weight == 0.0:
            continue
        if br.factor is not None:
            factor = br.factor
        else:
            ket = vecs[:, k]
            pair = np.vdot(psi_f.amps, ket) * np.vdot(ket, psi_i.amps)
            factor = pair / abs(pair)
        total += br.eigenvalue * br.weight * factor
    return abs(total) ** 2


def spin_half_pair(theta: float, phi: float) -> tuple[Ket, Ket]:
    """Bloch-sphere state at ``(theta, phi)`` and its optimal partner at ``(theta, phi + pi)``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = cmath.exp(1j * phi)
    return Ket([c, e * s]), Ket([c, -e * s])


def sigma_z() -> HermitianOperator:
    return HermitianOperator.diagonal([1.0, -1.0])


@dataclass(frozen=True)
class MeterModel:
    weak_value: complex
    correlation: complex
    coupling: float

    def __post_init__(self):
        if abs(self.coupling) > TOL.meter_coupling:
            warnings.warn(
                f"coupling {self.coupling} exceeds {TOL.meter_coupling}; "
                "the first-order readout may be inaccurate",
                stacklevel=3,
            )


def first_order_meter_average(model: MeterModel) -> float:
    """``2 g (Re A_w Im alpha + Im A_w Re alpha)``."""
    aw, alpha = complex(model.weak_value), complex(model.correlation)
    return 2.0 * model.coupling * (aw.real * alpha.imag + aw.imag * alpha.real)


@dataclass(frozen=True)
class EntangledProbeConfig:
    n: int
    lambda_x: float
    lambda_y: float
    sub_dim: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.sub_dim < 2:
            raise ValueError("sub_dim must be >= 2")

    @property
    def total_dim(self) -> int:
        return self.sub_dim**self.n


def single_observable(config: EntangledProbeConfig) -> HermitianOperator:
    """``diag(lambda_x, lambda_y, 0, ...)`` on one subsystem."""
    vals = np.zeros(config.sub_dim)
    vals[0], vals[1] = config.lambda_x, config.lambda_y
    return HermitianOperator.diagonal(vals)


def entangled_probe(config: EntangledProbeConfig) -> tuple[Ket, HermitianOperator]:
    """GHZ-like probe ``(|x>^n + |y>^n)/sqrt 2`` and the collective observable ``sum_k a_k``."""
    if config.total_dim > MAX_PROBE_DIM:
        raise DimensionCapExceededError(
            f"sub_dim**n = {config.sub_dim}**{config.n} exceeds the cap of {MAX_PROBE_DIM}"
        )
    d, n = config.sub_dim, config.n
    total = d**n
    psi = np.zeros(total, dtype=complex)
    psi[0] = 1.0  # |0...0>
    psi[sum(d**j for j in range(n))] += 1.0  # |1...1>
    a = single_observable(config).matrix
    eye = np.eye(d)
    big = np.zeros((total, total), dtype=complex)
    for k in range(n):
        term = np.ones((1, 1))
        for j in range(n):
            term = np.kron(term, a if j == k else eye)
        big += term
    return Ket.from_unnormalized(psi), HermitianOperator(big)


def weak_value_closed_form(n: int, lambda_x: float, lambda_y: float) -> float:
    """``n (lx^2 + ly^2) / (lx + ly)``."""
    return n * (lambda_x**2 + lambda_y**2) / (lambda_x + lambda_y)


def lambda_y_for_weak_value(n: int, lambda_x: float, weak: float) -> tuple[float, float]:
    """Both roots ``lambda_y`` giving optimal weak value ``weak``; NaN when complex."""
    disc = weak**2 - 4 * n**2 * lambda_x**2 + 4 * n * weak * lambda_x
    if disc < 0:
        return math.nan, math.nan
    r = math.sqrt(disc)
    return (weak + r) / (2 * n), (weak - r) / (2 * n)


def lambda_y_for_probability(lambda_x: float, prob: float) -> tuple[float, float]:
    """Both roots ``lambda_y`` giving optimal success probability ``prob``."""
    if prob == 0.5:
        # the quadratic degenerates to a linear equation with root 0
        return 0.0, math.nan
    disc = 4 * lambda_x**2 - 4 * (2 * prob - 1) ** 2 * lambda_x**2
    r = math.sqrt(max(disc, 0.0))
    return (2 * lambda_x + r) / (4 * prob - 2), (2 * lambda_x - r) / (4 * prob - 2)


def weak_value_at_probability(n: int, lambda_x: float, prob: float) -> float:
    """Optimal ``|A_w|`` for a fixed small success probability: ``n lx / sqrt(p)``."""
    return n * lambda_x / math.sqrt(prob)


@dataclass(frozen=True)
class EntangledScalingReport:
    n: int
    lambda_x: float
    lambda_y: float
    weak_value: float
    prob: float
    approx_prob: float
    relative_gap: float
    anomalous: bool
    lambda_y_roots: Optional[tuple[float, float]] = None


# relative gap below which the small-probability approximation is trusted
ANOMALOUS_GAP = 0.05


def entangled_scaling_report(
    config: EntangledProbeConfig, weak_target: Optional[float] = None
) -> EntangledScalingReport:
    """Exact optimum from the tensor-product probe vs. the ``n^2 lx^2 / A_w^2`` approximation."""
    psi, gen = entangled_probe(config)
    aw, ps = optimal_wv_and_prob(psi, gen)
    approx = config.n**2 * config.lambda_x**2 / aw**2
    approx = float(approx)
    gap = abs(ps - approx) / ps
    roots = None
    if weak_target is not None:
        roots = lambda_y_for_weak_value(config.n, config.lambda_x, weak_target)
    return EntangledScalingReport(
        config.n, config.lambda_x, config.lambda_y, aw, ps, approx, gap, gap < ANOMALOUS_GAP, roots
    )
