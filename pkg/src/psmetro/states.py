"""Parameter encoding ``|psi_theta> = exp(-i theta A)|psi_i>`` and projective postselection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import TOL
from .errors import DimensionMismatchError
from .linalg import HermitianOperator, Ket, as_ket, as_operator, check_same_dim, unitary_from_generator


@dataclass(frozen=True)
class EncodingConfig:
    generator: HermitianOperator
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "generator", as_operator(self.generator))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def dim(self) -> int:
        return self.generator.dim

    def unitary(self) -> np.ndarray:
        return unitary_from_generator(self.generator, self.theta)

    def shifted(self, dtheta: float) -> "EncodingConfig":
        return EncodingConfig(self.generator, self.theta + dtheta)


@dataclass(frozen=True, eq=False)
class Postselection:
    """Orthonormal basis ``{|f_k>}`` (matrix columns) plus the accepted indices."""

    basis: np.ndarray
    selected: tuple[int, ...]

    def __post_init__(self):
        b = self.basis
        if isinstance(b, (list, tuple)) and b and isinstance(b[0], Ket):
            b = np.column_stack([k.amps for k in b])
        b = np.array(b, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("postselection basis must be a complete square matrix of columns")
        gram_err = np.max(np.abs(b.conj().T @ b - np.eye(b.shape[0])))
        if gram_err > TOL.orthonormal:
            raise ValueError(f"postselection basis is not orthonormal (error {gram_err:.3e})")
        sel = tuple(int(k) for k in self.selected)
        if not sel:
            raise ValueError("at least one basis vector must be selected")
        if len(set(sel)) != len(sel):
            raise ValueError(f"duplicate indices in selection {sel}")
        if min(sel) < 0 or max(sel) >= b.shape[0]:
            raise ValueError(f"selection {sel} out of range for dimension {b.shape[0]}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "selected", tuple(sorted(sel)))

    @classmethod
    def computational(cls, dim: int, selected: Sequence[int]) -> "Postselection":
        return cls(np.eye(dim, dtype=complex), tuple(selected))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return len(self.selected)

    @property
    def rejected(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.dim) if k not in self.selected)

    def vector(self, k: int) -> np.ndarray:
        return self.basis[:, k]

    def selected_vectors(self) -> np.ndarray:
        return self.basis[:, list(self.selected)]

    def projector(self) -> np.ndarray:
        f = self.selected_vectors()
        return f @ f.conj().T

    def complement(self) -> "Postselection":
        return Postselection(self.basis, self.rejected)


@dataclass(frozen=True)
class Branch:
    index: int
    amplitude: complex  # <f_k|psi_theta>
    prob: float


@dataclass(frozen=True)
class PostselectionOutcome:
    prob: float
    state: Optional[Ket]
    per_branch: tuple[Branch, ...] = field(default_factory=tuple)


def encode(psi_i, cfg: EncodingConfig) -> Ket:
    psi_i = as_ket(psi_i)
    if psi_i.dim != cfg.dim:
        raise DimensionMismatchError(f"state has dim {psi_i.dim}, generator has dim {cfg.dim}")
    return Ket(cfg.unitary() @ psi_i.amps)


def postselect(psi_theta, ps: Postselection) -> PostselectionOutcome:
    """Project onto the selected subspace and renormalize.

    The renormalized state is omitted (``state is None``) when the success
    probability falls below ``TOL.postselection_prob``; branch amplitudes are
    always reported.
    """
    psi = as_ket(psi_theta)
    check_same_dim(psi, ps)
    f = ps.selected_vectors()
    amps = f.conj().T @ psi.amps
    probs = np.abs(amps) ** 2
    prob = float(np.sum(probs))
    branches = tuple(
        Branch(k, complex(a), float(p)) for k, a, p in zip(ps.selected, amps, probs)
    )
    state = None
    if prob >= TOL.postselection_prob:
        state = Ket.from_unnormalized(f @ amps)
    return PostselectionOutcome(prob, state, branches)
