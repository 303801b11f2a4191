"""Kirkwood-Dirac quasiprobabilities, the Wigner formula and KD/Wigner relations.

Rows of every table follow the ascending eigenvalues of the observable;
columns follow the full postselection basis ``{|f_k>}`` (selected or not).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import TOL
from .errors import VanishingPostselectionError
from .fisher import efficiency_terms
from .linalg import HermitianOperator, Ket, as_ket, as_operator, check_same_dim
from .states import Postselection


@dataclass(frozen=True, eq=False)
class KDTable:
    """``entries[m, k] = <psi|a_m><a_m|f_k><f_k|psi>``."""

    eigenvalues: np.ndarray
    row_basis: np.ndarray  # eigenvectors |a_m> as columns
    col_basis: np.ndarray  # |f_k> as columns
    entries: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def row_marginals(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def col_marginals(self) -> np.ndarray:
        return self.entries.sum(axis=0)


@dataclass(frozen=True, eq=False)
class ExtendedKDTable:
    """``entries[j, l, k] = <f_k|a_j><a_j|rho|a_l><a_l|f_k>``."""

    eigenvalues: np.ndarray
    entries: np.ndarray


@dataclass(frozen=True)
class ClassicalityReport:
    min_real: float
    max_abs_imag: float
    classical: bool


@dataclass(frozen=True)
class IdentityCheck:
    """Residuals of the KD / Wigner-formula decomposition.

    ``max_residual`` is ``max |Re q - Q - M|`` with ``M`` from
    :func:`quantum_modification`. ``complex_residual`` is
    ``max |q - Q - T_F/2 - i T_rot/2|``, the decomposition that holds for
    complex ``q`` (see :func:`modification_traces`).
    """

    max_residual: float
    imag_flagged: bool
    complex_residual: float


@dataclass(frozen=True)
class Theorem2Check:
    uniform_cond48: bool
    common_branch: bool
    kd_equals_wigner: bool
    xi: float


def _overlaps(psi: Ket, gen: HermitianOperator, ps: Postselection):
    check_same_dim(psi, gen, ps)
    vals, vecs = gen.spectrum
    psi_a = vecs.conj().T @ psi.amps  # <a_m|psi>
    a_f = vecs.conj().T @ ps.basis  # <a_m|f_k>
    f_psi = ps.basis.conj().T @ psi.amps  # <f_k|psi>
    return vals, vecs, psi_a, a_f, f_psi


def kd_distribution(psi, gen, ps: Postselection) -> KDTable:
    psi, gen = as_ket(psi), as_operator(gen)
    vals, vecs, psi_a, a_f, f_psi = _overlaps(psi, gen, ps)
    entries = psi_a.conj()[:, None] * a_f * f_psi[None, :]
    return KDTable(vals, vecs, ps.basis, entries)


def extended_kd_distribution(psi, gen, ps: Postselection) -> ExtendedKDTable:
    psi, gen = as_ket(psi), as_operator(gen)
    vals, _, psi_a, a_f, _ = _overlaps(psi, gen, ps)
    rho_a = np.outer(psi_a, psi_a.conj())  # <a_j|rho|a_l>
    # <f_k|a_j> = conj(a_f[j, k])
    entries = a_f.conj()[:, None, :] * rho_a[:, :, None] * a_f[None, :, :]
    return ExtendedKDTable(vals, entries)


def postselected_qfi_from_quasiprob(
    table: ExtendedKDTable, eigenvalues: Sequence[float], selected: Sequence[int], p_ps: float
) -> float:
    """``4 sum q a a' / p - 4 |sum q a' / p|^2`` over the selected columns."""
    if p_ps < TOL.postselection_prob:
        raise VanishingPostselectionError(f"postselection probability {p_ps:.3e} too small")
    a = np.asarray(eigenvalues, dtype=float)
    q = table.entries[:, :, list(selected)].sum(axis=2)
    first = float(np.einsum("j,jl,l->", a, q, a).real)
    mean = complex(np.einsum("jl,l->", q, a))
    return max(4.0 * first / p_ps - 4.0 * abs(mean) ** 2 / p_ps**2, 0.0)


def wigner_formula(psi, gen, ps: Postselection) -> np.ndarray:
    """``Q[m, k] = Tr(rho A_m F_k A_m)`` for rank-1 projectors."""
    psi, gen = as_ket(psi), as_operator(gen)
    _, vecs, _, _, _ = _overlaps(psi, gen, ps)
    rho = np.outer(psi.amps, psi.amps.conj())
    d = psi.dim
    out = np.empty((d, d))
    for m in range(d):
        proj_a = np.outer(vecs[:, m], vecs[:, m].conj())
        for k in range(d):
            proj_f = np.outer(ps.basis[:, k], ps.basis[:, k].conj())
            out[m, k] = np.trace(rho @ proj_a @ proj_f @ proj_a).real
    return out


def modification_traces(psi, gen, ps: Postselection) -> tuple[np.ndarray, np.ndarray]:
    """``(Tr((rho - rho') F_k), Tr((rho - rho') F_k^{pi/2}))`` per ``(m, k)``.

    ``rho'`` is ``rho`` after a nonselective measurement of ``{A_m, 1 - A_m}``
    and ``F^{pi/2} = exp(-i pi/2 A_m) F exp(i pi/2 A_m)``.
    """
    psi, gen = as_ket(psi), as_operator(gen)
    _, vecs, _, _, _ = _overlaps(psi, gen, ps)
    rho = np.outer(psi.amps, psi.amps.conj())
    d = psi.dim
    eye = np.eye(d)
    plain = np.empty((d, d))
    rotated = np.empty((d, d))
    for m in range(d):
        proj_a = np.outer(vecs[:, m], vecs[:, m].conj())
        comp = eye - proj_a
        delta = rho - proj_a @ rho @ proj_a - comp @ rho @ comp
        u = eye - (1 + 1j) * proj_a  # exp(-i pi/2 A_m) for a projector
        for k in range(d):
            proj_f = np.outer(ps.basis[:, k], ps.basis[:, k].conj())
            plain[m, k] = np.trace(delta @ proj_f).real
            rotated[m, k] = np.trace(delta @ u @ proj_f @ u.conj().T).real
    return plain, rotated


def quantum_modification(psi, gen, ps: Postselection) -> np.ndarray:
    """``(Tr((rho - rho') F_k) + Tr((rho - rho') F_k^{pi/2})) / 2`` per ``(m, k)``."""
    plain, rotated = modification_traces(psi, gen, ps)
    return 0.5 * (plain + rotated)


def kd_identity_check(psi, gen, ps: Postselection) -> IdentityCheck:
    q = kd_distribution(psi, gen, ps).entries
    wig = wigner_formula(psi, gen, ps)
    plain, rotated = modification_traces(psi, gen, ps)
    residual = float(np.max(np.abs(q.real - wig - 0.5 * (plain + rotated))))
    complex_residual = float(np.max(np.abs(q - wig - 0.5 * plain - 0.5j * rotated)))
    imag_flagged = bool(np.max(np.abs(q.imag)) > TOL.classical)
    return IdentityCheck(residual, imag_flagged, complex_residual)


def classicality_report(table: KDTable) -> ClassicalityReport:
    min_real = float(np.min(table.entries.real))
    max_imag = float(np.max(np.abs(table.entries.imag)))
    classical = min_real >= -TOL.classical and max_imag <= TOL.classical
    return ClassicalityReport(min_real, max_imag, classical)


def theorem2_check(psi_theta, gen, ps: Postselection, tol: float = TOL.saturation) -> Theorem2Check:
    """Evaluate the KD = Wigner conditions on the selected columns.

    ``uniform_cond48``: for every selected ``k`` with ``|<f_k|psi>| > 1e-10``
    and every ``m``, ``<a_m|psi><f_k|a_m> = <f_k|psi>``. Summing over ``m``
    shows this can only hold when ``d = 1``.

    ``common_branch``: a single ``m*`` carries every selected branch, i.e.
    ``<a_m*|psi><f_k|a_m*> = <f_k|psi>`` and ``<psi|a_m><a_m|f_k> = 0`` for
    ``m != m*``. Then all selected weak values equal ``a_m*`` and ``xi = 0``.

    ``kd_equals_wigner``: ``q = Q`` entrywise on the selected columns; this
    alone does not force ``xi = 0``.
    """
    psi, gen = as_ket(psi_theta), as_operator(gen)
    _, _, psi_a, a_f, f_psi = _overlaps(psi, gen, ps)
    sel = list(ps.selected)
    if float(np.sum(np.abs(f_psi[sel]) ** 2)) < TOL.postselection_prob:
        raise VanishingPostselectionError("postselection probability too small")
    live = [k for k in sel if abs(f_psi[k]) > TOL.nonzero_amplitude]
    # branch[m, k] = <a_m|psi><f_k|a_m>
    branch = psi_a[:, None] * a_f.conj()
    hits = np.abs(branch[:, live] - f_psi[None, live]) < tol
    uniform = bool(np.all(hits))
    zero = np.abs(branch[:, live]) < tol
    common = any(
        bool(np.all(hits[m]) and np.all(np.delete(zero, m, axis=0))) for m in range(psi.dim)
    )
    q = kd_distribution(psi, gen, ps).entries[:, sel]
    wig = wigner_formula(psi, gen, ps)[:, sel]
    equal = bool(np.max(np.abs(q - wig)) < tol)
    wva, kd = efficiency_terms(psi, gen, ps)
    return Theorem2Check(uniform, common, equal, max(wva - kd, 0.0))
