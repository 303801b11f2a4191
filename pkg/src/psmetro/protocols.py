"""Three-level information-preserving protocol.

Observable ``A = diag(lambda, lambda_tilde, -lambda)`` in the basis
``(|lambda>, |lambda_tilde>, |-lambda>)``; the probe is an equal superposition
of ``|lambda>`` and ``|-lambda>`` with relative phase ``2 phi``; the accepted
outcomes are ``f1 = (|lambda> - |-lambda>)/sqrt 2`` and
``f2 = cos(alpha)(|lambda> + |-lambda>)/sqrt 2 + sin(alpha)|lambda_tilde>``.
Everything depends on ``phi`` and ``delta_theta`` only through
``x = phi - lambda * delta_theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import TOL
from .errors import AlphaSingularError, DegenerateSpectrumError
from .fisher import CostModel, ProtocolMetrics, info_cost_rate
from .linalg import HermitianOperator, Ket, unitary_from_generator
from .quasiprob import KDTable, kd_distribution, wigner_formula
from .states import EncodingConfig, Postselection, encode

# x at which the x -> 0 limits are realized numerically
OPTIMUM_X = 1e-8

SWEEP_COLUMNS = (
    "x", "alpha", "p_ps", "qfi", "xi", "aw1_re", "aw1_im", "aw2_re", "aw2_im", "divergent",
)


@dataclass(frozen=True)
class ThreeLevelConfig:
    lam: float
    alpha: float
    lambda_tilde: float = 0.0
    phi: float = 0.0
    theta0: float = 0.0
    delta_theta: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise DegenerateSpectrumError(f"lambda must be positive, got {self.lam}")
        if abs(abs(self.lambda_tilde) - self.lam) < TOL.degeneracy_gap:
            raise DegenerateSpectrumError(
                f"|lambda_tilde| = {abs(self.lambda_tilde)} coincides with lambda"
            )

    @classmethod
    def from_x(cls, lam: float, alpha: float, x: float, **kwargs) -> "ThreeLevelConfig":
        """Configuration with ``phi = x`` and ``delta_theta = 0``."""
        return cls(lam, alpha, phi=x, **kwargs)

    @property
    def x(self) -> float:
        return self.phi - self.lam * self.delta_theta

    @property
    def alpha_singular(self) -> bool:
        return abs(math.cos(self.alpha)) < 1e-8


@dataclass(frozen=True)
class ThreeLevelResult:
    metrics: ProtocolMetrics
    aw1: Optional[complex]
    aw2: Optional[complex]
    x: float

    @property
    def divergent(self) -> bool:
        return self.metrics.divergent or self.aw1 is None or self.aw2 is None


def three_level_setup(cfg: ThreeLevelConfig) -> tuple[Ket, EncodingConfig, Postselection]:
    """Probe, encoding at ``theta0 + delta_theta``, and the ``{f1, f2}`` postselection."""
    gen = HermitianOperator.diagonal([cfg.lam, cfg.lambda_tilde, -cfg.lam])
    c, s = math.cos(cfg.alpha), math.sin(cfg.alpha)
    r = 1.0 / math.sqrt(2.0)
    basis = np.array(
        [
            [r, c * r, -s * r],
            [0.0, s, c],
            [-r, c * r, -s * r],
        ],
        dtype=complex,
    )
    probe = np.array([np.exp(1j * cfg.phi), 0.0, np.exp(-1j * cfg.phi)]) * r
    psi_i = Ket(unitary_from_generator(gen, cfg.theta0).conj().T @ probe)
    enc = EncodingConfig(gen, cfg.theta0 + cfg.delta_theta)
    return psi_i, enc, Postselection(basis, (0, 1))


def three_level_metrics(
    cfg: ThreeLevelConfig, cost: Optional[CostModel] = None
) -> ThreeLevelResult:
    """Closed-form probability, QFI, efficiency and the two intrinsic weak values."""
    x, lam = cfg.x, cfg.lam
    sx, cx, ca = math.sin(x), math.cos(x), math.cos(cfg.alpha)
    p = sx * sx + ca * ca * cx * cx
    xi = 4.0 * lam * lam * ca * ca
    if p >= TOL.postselection_prob:
        xi /= p
        qfi = xi / p
        rate = None if cost is None else info_cost_rate(p, qfi, cost)
        metrics = ProtocolMetrics(p, qfi, xi, rate)
    else:
        # p -> 0 needs cos(alpha) -> 0 too; the efficiency limit is then 0/0
        metrics = ProtocolMetrics(p, None, math.nan, None, divergent=True)
    aw1 = -1j * lam * cx / sx if abs(sx) >= TOL.weak_value_overlap else None
    overlap2 = abs(ca * cx)
    aw2 = 1j * lam * sx / cx if overlap2 >= TOL.weak_value_overlap else None
    return ThreeLevelResult(metrics, aw1, aw2, x)


def three_level_limits(lam: float, alpha: float) -> tuple[float, float, float]:
    """``(cos^2 alpha, 4 lambda^2 sec^2 alpha, 4 lambda^2)``, the ``x -> 0`` limits."""
    c2 = math.cos(alpha) ** 2
    if math.sqrt(c2) < 1e-8:
        raise AlphaSingularError(f"cos(alpha) = {math.cos(alpha):.3e}; the QFI limit diverges")
    return c2, 4.0 * lam * lam / c2, 4.0 * lam * lam


def _strictly_increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class SweepGrid:
    x_values: tuple[float, ...]
    alpha_values: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(v) for v in self.x_values)
        alphas = tuple(float(v) for v in self.alpha_values)
        for name, vals in (("x_values", xs), ("alpha_values", alphas)):
            if not vals:
                raise ValueError(f"{name} must be non-empty")
            if not _strictly_increasing(vals):
                raise ValueError(f"{name} must be strictly increasing")
        object.__setattr__(self, "x_values", xs)
        object.__setattr__(self, "alpha_values", alphas)

    @classmethod
    def linspace(cls, x_min, x_max, x_steps, alpha_min, alpha_max, alpha_steps) -> "SweepGrid":
        return cls(
            tuple(np.linspace(x_min, x_max, x_steps).tolist()),
            tuple(np.linspace(alpha_min, alpha_max, alpha_steps).tolist()),
        )


def _component(z: Optional[complex], part: str) -> Optional[float]:
    return None if z is None else float(getattr(z, part))


def metrics_record(result: ThreeLevelResult, alpha: float) -> dict:
    m = result.metrics
    return {
        "x": result.x,
        "alpha": alpha,
        "p_ps": m.prob,
        "qfi": m.qfi,
        "xi": m.xi,
        "aw1_re": _component(result.aw1, "real"),
        "aw1_im": _component(result.aw1, "imag"),
        "aw2_re": _component(result.aw2, "real"),
        "aw2_im": _component(result.aw2, "imag"),
        "divergent": result.divergent,
    }


def sweep(cfg_base: ThreeLevelConfig, grid: SweepGrid) -> list[dict]:
    """One record per ``(alpha, x)`` cell, alpha-major in grid order.

    ``lam`` and ``lambda_tilde`` come from ``cfg_base``; each cell uses
    ``phi = x`` and ``delta_theta = 0``.
    """
    records = []
    for alpha in grid.alpha_values:
        for x in grid.x_values:
            cfg = ThreeLevelConfig.from_x(
                cfg_base.lam, alpha, x, lambda_tilde=cfg_base.lambda_tilde
            )
            records.append(metrics_record(three_level_metrics(cfg), alpha))
    return records


def kd_tables_at_optimum(alpha: float, lam: float = 1.0) -> tuple[KDTable, np.ndarray]:
    """KD table and Wigner formula of the encoded state at ``x = 1e-8``.

    Rows follow ascending eigenvalues ``(-lambda, lambda_tilde, lambda)``;
    columns are ``(f1, f2, f3)``.
    """
    cfg = ThreeLevelConfig.from_x(lam, alpha, OPTIMUM_X)
    psi_i, enc, ps = three_level_setup(cfg)
    psi = encode(psi_i, enc)
    return kd_distribution(psi, enc.generator, ps), wigner_formula(psi, enc.generator, ps)
