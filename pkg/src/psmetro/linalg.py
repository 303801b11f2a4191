"""Dense complex linear algebra for small Hilbert spaces.

Everything here works on plain ``numpy`` arrays. Two light wrappers carry
validated data around the rest of the package:

* :class:`Ket` -- a normalized state vector.
* :class:`HermitianOperator` -- a Hermitian matrix whose spectral
  decomposition is computed on first use and cached.

The eigensolver is a cyclic complex Jacobi iteration, which is robust and
accurate for the dimensions used here (``d <= 32``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from .config import TOL, Tolerances
from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NonHermitianError,
    NotNormalizedError,
)

SeedLike = Union[int, np.random.Generator]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized vector in C^d."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        if a.size == 0:
            raise ValueError("a ket needs at least one amplitude")
        if not np.all(np.isfinite(a)):
            raise ValueError("ket amplitudes must be finite")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > TOL.normalization:
            raise NotNormalizedError(f"ket norm is {norm!r}, expected 1")
        object.__setattr__(self, "amps", _frozen(a))

    @classmethod
    def from_unnormalized(cls, vec) -> "Ket":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if not np.isfinite(norm) or norm == 0.0:
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "Ket":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.amps.size

    def inner(self, other: "Ket | np.ndarray") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amps, np.asarray(other)))

    def __array__(self, dtype=None, copy=None):
        return self.amps if dtype is None else self.amps.astype(dtype)

    def __repr__(self):
        return f"Ket({np.array2string(self.amps, precision=6)})"


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian matrix with a lazily cached eigendecomposition."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        err = np.max(np.abs(m - m.conj().T))
        if err > TOL.hermitian:
            raise NonHermitianError(f"matrix is not Hermitian (max asymmetry {err:.3e})")
        # remove the sub-tolerance asymmetry so downstream products are exact
        m = 0.5 * (m + m.conj().T)
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def diagonal(cls, values) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        vals, vecs = hermitian_eigendecomposition(self.matrix)
        return _frozen(vals), _frozen(vecs)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        """Eigenvectors as the columns of a unitary matrix."""
        return self.spectrum[1]

    def squared(self) -> np.ndarray:
        return self.matrix @ self.matrix

    def expectation(self, ket) -> float:
        psi = np.asarray(ket)
        return float(np.vdot(psi, self.matrix @ psi).real)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def as_ket(obj) -> Ket:
    return obj if isinstance(obj, Ket) else Ket(obj)


def as_operator(obj) -> HermitianOperator:
    return obj if isinstance(obj, HermitianOperator) else HermitianOperator(obj)


def check_same_dim(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimensionMismatchError(f"incompatible dimensions {sorted(dims)}")
    return dims.pop()


def _jacobi_sweeps(m: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    # scalar loops beat numpy slicing by ~4x at the dimensions used here
    n = m.shape[0]
    a = [[complex(x) for x in row] for row in m]
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    threshold = tol.jacobi_offdiag * float(np.linalg.norm(m))
    skip = threshold / n
    for _ in range(tol.jacobi_max_sweeps + 1):
        off = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= threshold:
            return np.array([a[i][i].real for i in range(n)]), np.array(v)
        for p in range(n - 1):
            ap = a[p]
            for q in range(p + 1, n):
                apq = ap[q]
                g = abs(apq)
                if g <= skip:
                    continue
                aq = a[q]
                tau = (aq[q].real - ap[p].real) / (2.0 * g)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                se = t * c * (apq / g)
                sec = se.conjugate()
                # A <- J^H A J with J = [[c, s e], [-s e*, c]] acting on (p, q)
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x - sec * y
                    row[q] = se * x + c * y
                for j in range(n):
                    x, y = ap[j], aq[j]
                    ap[j] = c * x - se * y
                    aq[j] = sec * x + c * y
                ap[q] = aq[p] = 0j
                ap[p] = complex(ap[p].real)
                aq[q] = complex(aq[q].real)
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = c * x - sec * y
                    row[q] = se * x + c * y
    raise NoConvergenceError(
        f"Jacobi iteration did not converge in {tol.jacobi_max_sweeps} sweeps"
    )


def _canonical_order(vals: np.ndarray, vecs: np.ndarray, tol: Tolerances):
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order].copy()
    lead = []
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > tol.nonzero_amplitude)
        i = int(nz[0]) if nz.size else 0
        amp = col[i]
        if abs(amp) > 0:
            vecs[:, k] = col * (abs(amp) / amp)
        lead.append((i, -abs(amp)))

    # reorder inside clusters of (numerically) degenerate eigenvalues
    perm = list(range(len(vals)))
    start = 0
    for end in range(1, len(vals) + 1):
        if end == len(vals) or vals[end] - vals[end - 1] >= tol.degeneracy_gap:
            if end - start > 1:
                perm[start:end] = sorted(perm[start:end], key=lambda k: lead[k])
            start = end
    return vals[perm], vecs[:, perm]


def hermitian_eigendecomposition(op, tol: Tolerances = TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.

    Each eigenvector's global phase is fixed so its first nonzero amplitude is
    real and positive. Inside a degenerate cluster the vectors are ordered by
    the position and then the magnitude of that amplitude, which makes the
    output reproducible.

    Raises
    ------
    NonHermitianError
        If the input is not Hermitian within ``tol.hermitian``.
    NoConvergenceError
        If the off-diagonal mass does not drop below threshold within the
        sweep cap.
    """
    m = op.matrix if isinstance(op, HermitianOperator) else HermitianOperator(op).matrix
    vals, vecs = _jacobi_sweeps(m.copy(), tol)
    return _canonical_order(vals, vecs, tol)


def unitary_from_generator(gen, theta: float) -> np.ndarray:
    """``exp(-i * theta * gen)`` built from the spectral decomposition."""
    gen = as_operator(gen)
    vals, vecs = gen.spectrum
    return (vecs * np.exp(-1j * vals * theta)) @ vecs.conj().T


def operator_norm_sq(op) -> float:
    """Largest eigenvalue of ``op @ op``, i.e. ``max |a_k|**2``."""
    vals = as_operator(op).eigenvalues
    return float(np.max(np.abs(vals)) ** 2)


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Philox4x64 counter-based generator for a given seed.

    Passing an existing generator returns it unchanged so callers can thread
    one stream through several draws.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed)))


def complex_gaussians(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex normals via the Box-Muller transform."""
    u1 = 1.0 - rng.random(shape)  # (0, 1], keeps the log finite
    u2 = rng.random(shape)
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(2 * np.pi * u2) + 1j * r * np.sin(2 * np.pi * u2)


def random_haar_ket(dim: int, seed: SeedLike) -> Ket:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = make_rng(seed)
    return Ket.from_unnormalized(complex_gaussians(rng, dim))


def random_hermitian(dim: int, seed: SeedLike) -> HermitianOperator:
    """Sample from the Gaussian unitary ensemble."""
    g = complex_gaussians(make_rng(seed), (dim, dim))
    return HermitianOperator(0.5 * (g + g.conj().T))


def random_unitary(dim: int, seed: SeedLike) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase correction)."""
    z = complex_gaussians(make_rng(seed), (dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
