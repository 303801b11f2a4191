"""Quantum Fisher information of pure states, with and without postselection.

The postselected QFI is available through three algebraically equivalent
routes that share no intermediate quantities, so they can check each other:

* :func:`qfi_postselected_derivative` differentiates the unnormalized
  postselected vector ``F U(theta)|psi_i>``.
* :func:`qfi_postselected_operator` evaluates traces of ``F A rho A`` and
  ``F rho A`` with explicit density matrices.
* :func:`qfi_postselected_weakvalues` sums pairwise weak-value differences
  in cross-product form, so branches with vanishing overlap never divide
  by zero.

:func:`qfi_finite_difference` is a fourth, numerical route based on the
fidelity of neighbouring postselected states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import TOL
from .errors import VanishingPostselectionError, ZeroCostDenominatorError
from .linalg import (
    Ket,
    SeedLike,
    as_ket,
    as_operator,
    check_same_dim,
    make_rng,
    operator_norm_sq,
    random_haar_ket,
    random_hermitian,
    random_unitary,
)
from .states import EncodingConfig, Postselection, encode, postselect


@dataclass(frozen=True)
class WeakValueRecord:
    branch_index: int
    overlap: complex  # <psi_theta|f_k>
    numerator: complex  # <psi_theta|A|f_k>
    prob: float
    weak_value: Optional[complex]


@dataclass(frozen=True)
class CostModel:
    prep_cost: float = 0.0
    measure_cost: float = 1.0
    postselect_cost: float = 0.0

    def __post_init__(self):
        if min(self.prep_cost, self.measure_cost, self.postselect_cost) < 0:
            raise ValueError("costs must be non-negative")
        if self.prep_cost + self.postselect_cost <= 0 and self.measure_cost <= 0:
            raise ValueError("at least one cost must be positive")


@dataclass(frozen=True)
class ProtocolMetrics:
    """Success probability, postselected QFI, efficiency and optional cost rate.

    ``qfi`` is ``None`` (and ``divergent`` is set) when the success probability
    is below ``TOL.postselection_prob``: the QFI itself blows up there but the
    efficiency ``xi = p * qfi`` keeps a finite value.
    """

    prob: float
    qfi: Optional[float]
    xi: float
    cost_rate: Optional[float] = None
    divergent: bool = False


@dataclass(frozen=True)
class Theorem1Check:
    xi: float
    bound: float
    within: bool

    @property
    def ratio(self) -> float:
        return self.xi / self.bound if self.bound > 0 else 0.0


@dataclass(frozen=True)
class SaturationFlags:
    mean_A_zero: bool
    failed_branch_wv_zero: bool

    @property
    def saturated(self) -> bool:
        return self.mean_A_zero and self.failed_branch_wv_zero


def qfi_pure(psi_0, gen) -> float:
    """``4 Var(A)`` in the state ``psi_0``; clamped at zero."""
    psi, gen = as_ket(psi_0), as_operator(gen)
    check_same_dim(psi, gen)
    a_psi = gen.matrix @ psi.amps
    mean = np.vdot(psi.amps, a_psi).real
    second = np.vdot(a_psi, a_psi).real
    var = second - mean * mean
    return 4.0 * max(var, 0.0)


def qfi_optimal(gen) -> float:
    """``(a_max - a_min)**2``, the best QFI without postselection."""
    vals = as_operator(gen).eigenvalues
    return float((vals[-1] - vals[0]) ** 2)


def efficiency_xi(p: float, qfi: float) -> float:
    return p * qfi


def _branch_amplitudes(psi: Ket, gen, ps: Postselection):
    """Overlaps ``<psi|f_k>`` and numerators ``<psi|A|f_k>`` for every basis vector."""
    overlaps = ps.basis.T @ psi.amps.conj()
    numerators = ps.basis.T @ (gen.matrix @ psi.amps).conj()
    return overlaps, numerators


def weak_value_records(psi_theta, gen, ps: Postselection) -> list[WeakValueRecord]:
    psi, gen = as_ket(psi_theta), as_operator(gen)
    check_same_dim(psi, gen, ps)
    overlaps, numerators = _branch_amplitudes(psi, gen, ps)
    records = []
    for k in ps.selected:
        o, n = complex(overlaps[k]), complex(numerators[k])
        # n / o is <psi|A|f>/<psi|f>; report its conjugate so the value matches
        # weak_value(psi_theta, f_k, A) = <f|A|psi>/<f|psi>
        wv = (n / o).conjugate() if abs(o) >= TOL.weak_value_overlap else None
        records.append(WeakValueRecord(k, o, n, abs(o) ** 2, wv))
    return records


def _encoded(psi_i, cfg: EncodingConfig, ps: Postselection) -> tuple[Ket, float]:
    psi = encode(psi_i, cfg)
    check_same_dim(psi, ps)
    p = postselect(psi, ps).prob
    if p < TOL.postselection_prob:
        raise VanishingPostselectionError(
            f"postselection probability {p:.3e} is below {TOL.postselection_prob:g}"
        )
    return psi, p


def info_cost_rate(p: float, qfi: float, cost: CostModel) -> float:
    """Information per unit cost ``p I / (C_P + p C_M + C_ps)``."""
    denom = cost.prep_cost + p * cost.measure_cost + cost.postselect_cost
    if denom <= 0:
        raise ZeroCostDenominatorError("cost denominator is zero")
    return p * qfi / denom


def qfi_postselected_derivative(
    psi_i, cfg: EncodingConfig, ps: Postselection, cost: Optional[CostModel] = None
) -> ProtocolMetrics:
    psi, p = _encoded(psi_i, cfg, ps)
    proj = ps.projector()
    big_psi = proj @ psi.amps
    big_dpsi = -1j * (proj @ (cfg.generator.matrix @ psi.amps))
    # 4<dPsi|dPsi>/p - 4|<dPsi|Psi>|^2/p^2, written as the norm of the part of
    # dPsi orthogonal to Psi to avoid cancellation
    residual = big_dpsi - (np.vdot(big_psi, big_dpsi) / p) * big_psi
    qfi = 4.0 * np.vdot(residual, residual).real / p
    rate = None if cost is None else info_cost_rate(p, qfi, cost)
    return ProtocolMetrics(p, qfi, efficiency_xi(p, qfi), rate)


def qfi_postselected_operator(psi_i, cfg: EncodingConfig, ps: Postselection) -> float:
    psi, _ = _encoded(psi_i, cfg, ps)
    rho = np.outer(psi.amps, psi.amps.conj())
    f = ps.projector()
    a = cfg.generator.matrix
    p = np.trace(f @ rho).real
    first = np.trace(f @ a @ rho @ a).real
    second = np.trace(f @ rho @ a)
    return max(4.0 * first / p - 4.0 * abs(second) ** 2 / p**2, 0.0)


def _pair_sum(overlaps: np.ndarray, numerators: np.ndarray) -> float:
    # p_i p_j |A_i - A_j|^2 == |n_i o_j - n_j o_i|^2, finite even when o_i -> 0
    cross = np.outer(numerators, overlaps)
    diff = np.abs(cross - cross.T) ** 2
    return float(np.sum(np.triu(diff, k=1)))


def qfi_postselected_weakvalues(psi_i, cfg: EncodingConfig, ps: Postselection) -> float:
    psi, _ = _encoded(psi_i, cfg, ps)
    overlaps, numerators = _branch_amplitudes(psi, cfg.generator, ps)
    sel = list(ps.selected)
    o, n = overlaps[sel], numerators[sel]
    p = float(np.sum(np.abs(o) ** 2))
    return 4.0 * _pair_sum(o, n) / p**2


def qfi_finite_difference(
    psi_i, cfg: EncodingConfig, ps: Postselection, h: float = 1e-4
) -> float:
    """Fidelity-based estimate ``8 (1 - |<psi_ps(theta)|psi_ps(theta +/- h)>|) / h**2``.

    Forward and backward estimates are averaged, which cancels the odd-order
    terms and leaves an ``O(h**2)`` error.
    """
    states = []
    for shift in (0.0, h, -h):
        out = postselect(encode(psi_i, cfg.shifted(shift)), ps)
        if out.prob < 10 * TOL.postselection_prob:
            raise VanishingPostselectionError(
                f"postselection probability {out.prob:.3e} too small at theta{shift:+g}"
            )
        states.append(out.state)
    centre, fwd, bwd = states
    est = [8.0 * (1.0 - abs(centre.inner(other))) / h**2 for other in (fwd, bwd)]
    return 0.5 * (est[0] + est[1])


def efficiency_terms(psi_theta, gen, ps: Postselection) -> tuple[float, float]:
    """Split ``xi`` into its weak-value part and its KD-mean part.

    Returns ``(4 sum_k |<psi|A|f_k>|^2, (4/p) |sum_{m,k} a_m q_{m,k}|^2)`` with
    sums over selected ``k``; the efficiency is their difference. Both parts
    stay finite as ``p -> 0`` (the second by Cauchy-Schwarz).
    """
    psi, gen = as_ket(psi_theta), as_operator(gen)
    check_same_dim(psi, gen, ps)
    vals, vecs = gen.spectrum
    f = ps.selected_vectors()
    psi_a = vecs.conj().T @ psi.amps  # <a_m|psi>
    a_f = vecs.conj().T @ f  # <a_m|f_k>
    f_psi = f.conj().T @ psi.amps  # <f_k|psi>
    kd = psi_a.conj()[:, None] * a_f * f_psi[None, :]
    p = float(np.sum(np.abs(f_psi) ** 2))
    if p == 0.0:
        raise VanishingPostselectionError("postselection probability is exactly zero")
    numerators = f.conj().T @ (gen.matrix @ psi.amps)  # <f_k|A|psi>
    wva = 4.0 * float(np.sum(np.abs(numerators) ** 2))
    mean = complex(np.sum(vals[:, None] * kd))
    return wva, 4.0 * abs(mean) ** 2 / p


def postselected_metrics(
    psi_i, cfg: EncodingConfig, ps: Postselection, cost: Optional[CostModel] = None
) -> ProtocolMetrics:
    """Like :func:`qfi_postselected_derivative` but tolerant of ``p -> 0``.

    Below ``TOL.postselection_prob`` the QFI is reported as divergent and only
    the efficiency (from :func:`efficiency_terms`) is returned.
    """
    psi = encode(psi_i, cfg)
    p = postselect(psi, ps).prob
    if p >= TOL.postselection_prob:
        return qfi_postselected_derivative(psi_i, cfg, ps, cost)
    wva, kd = efficiency_terms(psi, cfg.generator, ps)
    xi = max(wva - kd, 0.0)
    rate = None
    if cost is not None:
        denom = cost.prep_cost + p * cost.measure_cost + cost.postselect_cost
        if denom <= 0:
            raise ZeroCostDenominatorError("cost denominator is zero")
        rate = xi / denom
    return ProtocolMetrics(p, None, xi, rate, divergent=True)


def check_theorem1(psi_i, cfg: EncodingConfig, ps: Postselection) -> Theorem1Check:
    """Compare the efficiency against ``4 ||A^2||_op``."""
    xi = qfi_postselected_derivative(psi_i, cfg, ps).xi
    bound = 4.0 * operator_norm_sq(cfg.generator)
    within = -TOL.bound_slack <= xi <= bound + TOL.bound_slack
    return Theorem1Check(xi, bound, within)


def check_saturation_conditions(
    psi_i, cfg: EncodingConfig, ps: Postselection, tol: float = TOL.saturation
) -> SaturationFlags:
    """Flags for ``<psi_i|A|psi_i> = 0`` and ``<psi_theta|A|f_k> = 0`` on rejected ``k``."""
    psi_i = as_ket(psi_i)
    gen = cfg.generator
    mean = abs(np.vdot(psi_i.amps, gen.matrix @ psi_i.amps))
    psi = encode(psi_i, cfg)
    _, numerators = _branch_amplitudes(psi, gen, ps)
    rejected = list(ps.rejected)
    failed = bool(np.all(np.abs(numerators[rejected]) < tol)) if rejected else True
    return SaturationFlags(bool(mean < tol), failed)


def random_protocol(
    dim: int, seed: SeedLike, rank: Optional[int] = None
) -> tuple[Ket, EncodingConfig, Postselection]:
    """Random instance: Haar input, GUE generator, Haar basis, uniform theta and rank."""
    rng = make_rng(seed)
    psi = random_haar_ket(dim, rng)
    gen = random_hermitian(dim, rng)
    basis = random_unitary(dim, rng)
    theta = float(rng.uniform(-math.pi, math.pi))
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    selected = tuple(sorted(int(k) for k in rng.choice(dim, size=rank, replace=False)))
    return psi, EncodingConfig(gen, theta), Postselection(basis, selected)
