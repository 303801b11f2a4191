import math

import numpy as np
import pytest

from psmetro.errors import VanishingPostselectionError
from psmetro.fisher import qfi_optimal, qfi_postselected_operator, random_protocol
from psmetro.linalg import HermitianOperator, Ket, make_rng, random_haar_ket, random_hermitian
from psmetro.protocols import ThreeLevelConfig, three_level_setup
from psmetro.quasiprob import (
    classicality_report,
    extended_kd_distribution,
    kd_distribution,
    kd_identity_check,
    modification_traces,
    postselected_qfi_from_quasiprob,
    quantum_modification,
    theorem2_check,
    wigner_formula,
)
from psmetro.states import Postselection, encode, postselect

DIAG01 = HermitianOperator.diagonal([0.0, 1.0])  # rows |0>, |1>
HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
PLUS = Ket(HADAMARD[:, 0])


def _random_instance(seed):
    psi_i, cfg, ps = random_protocol(2 + seed % 4, seed)
    return encode(psi_i, cfg), cfg, ps


def _commuting_instance(seed, selected=(0, 1)):
    rng = make_rng(seed)
    dim = 3 + seed % 3
    gen = random_hermitian(dim, rng)
    psi = random_haar_ket(dim, rng)
    return psi, gen, Postselection(gen.eigenvectors, selected)


def test_kd_simple_table():
    table = kd_distribution(Ket.basis(2, 0), DIAG01, Postselection(HADAMARD, (0,)))
    np.testing.assert_allclose(table.entries, [[0.5, 0.5], [0, 0]], atol=1e-15)


def test_kd_commuting_is_diagonal():
    psi, gen, ps = _commuting_instance(3)
    table = kd_distribution(psi, gen, ps)
    weights = np.abs(gen.eigenvectors.conj().T @ psi.amps) ** 2
    np.testing.assert_allclose(table.entries, np.diag(weights), atol=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_kd_normalization_and_marginals(seed):
    psi, cfg, ps = _random_instance(seed)
    table = kd_distribution(psi, cfg.generator, ps)
    assert abs(table.entries.sum() - 1) < 1e-10
    rows = np.abs(cfg.generator.eigenvectors.conj().T @ psi.amps) ** 2
    cols = np.abs(ps.basis.conj().T @ psi.amps) ** 2
    assert np.max(np.abs(table.row_marginals() - rows)) < 1e-10
    assert np.max(np.abs(table.col_marginals() - cols)) < 1e-10


def test_extended_simple_table():
    ext = extended_kd_distribution(Ket.basis(2, 0), DIAG01, Postselection(HADAMARD, (0,)))
    expected = np.zeros((2, 2, 2))
    expected[0, 0, :] = 0.5
    np.testing.assert_allclose(ext.entries, expected, atol=1e-15)


@pytest.mark.parametrize("seed", range(50))
def test_extended_kd_invariants(seed):
    psi, cfg, ps = _random_instance(seed)
    ext = extended_kd_distribution(psi, cfg.generator, ps)
    assert abs(ext.entries.sum() - 1) < 1e-10
    diag = np.einsum("jjk->jk", ext.entries)
    assert np.max(np.abs(diag.imag)) < 1e-12 and diag.real.min() >= -1e-12
    # factorization for pure states
    q = kd_distribution(psi, cfg.generator, ps).entries
    f_psi = ps.basis.conj().T @ psi.amps
    for k in range(ps.dim):
        if abs(f_psi[k]) > 1e-10:
            lhs = ext.entries[:, :, k] * abs(f_psi[k]) ** 2
            rhs = np.outer(q[:, k].conj(), q[:, k])
            assert np.max(np.abs(lhs - rhs)) < 1e-10


@pytest.mark.parametrize("seed", range(100))
def test_quasiprob_qfi_matches_operator_form(seed):
    psi_i, cfg, ps = random_protocol(2 + seed % 5, 4000 + seed)
    psi = encode(psi_i, cfg)
    p = postselect(psi, ps).prob
    if p < 1e-6:
        pytest.skip("postselection too unlikely")
    ext = extended_kd_distribution(psi, cfg.generator, ps)
    got = postselected_qfi_from_quasiprob(ext, cfg.generator.eigenvalues, ps.selected, p)
    want = qfi_postselected_operator(psi_i, cfg, ps)
    assert abs(got - want) <= 1e-9 * max(1.0, want)


def test_quasiprob_qfi_rank_one_and_commuting():
    psi_i, cfg, ps = random_protocol(4, 12, rank=1)
    psi = encode(psi_i, cfg)
    ext = extended_kd_distribution(psi, cfg.generator, ps)
    p = postselect(psi, ps).prob
    assert postselected_qfi_from_quasiprob(ext, cfg.generator.eigenvalues, ps.selected, p) < 1e-10
    psi, gen, ps = _commuting_instance(5, selected=(0, 2))
    ext = extended_kd_distribution(psi, gen, ps)
    p = postselect(psi, ps).prob
    assert postselected_qfi_from_quasiprob(ext, gen.eigenvalues, ps.selected, p) <= qfi_optimal(gen) + 1e-9
    with pytest.raises(VanishingPostselectionError):
        postselected_qfi_from_quasiprob(ext, gen.eigenvalues, ps.selected, 0.0)


def test_worked_wigner_instance():
    ps = Postselection(HADAMARD, (0,))
    assert wigner_formula(PLUS, DIAG01, ps)[0, 0] == pytest.approx(0.25)
    assert quantum_modification(PLUS, DIAG01, ps)[0, 0] == pytest.approx(0.25)
    assert kd_distribution(PLUS, DIAG01, ps).entries[0, 0] == pytest.approx(0.5)


@pytest.mark.parametrize("seed", range(30))
def test_wigner_pure_state_formula(seed):
    psi, cfg, ps = _random_instance(seed)
    vecs = cfg.generator.eigenvectors
    expected = np.abs(vecs.conj().T @ psi.amps)[:, None] ** 2 * np.abs(vecs.conj().T @ ps.basis) ** 2
    wig = wigner_formula(psi, cfg.generator, ps)
    np.testing.assert_allclose(wig, expected, atol=1e-12)
    assert wig.min() >= 0


@pytest.mark.parametrize("seed", range(30))
def test_commuting_collapse(seed):
    psi, gen, ps = _commuting_instance(seed)
    assert np.max(np.abs(quantum_modification(psi, gen, ps))) < 1e-12
    q = kd_distribution(psi, gen, ps).entries
    assert np.max(np.abs(q - wigner_formula(psi, gen, ps))) < 1e-12
    check = kd_identity_check(psi, gen, ps)
    assert check.max_residual < 1e-12 and not check.imag_flagged
    assert classicality_report(kd_distribution(psi, gen, ps)).classical


@pytest.mark.parametrize("seed", range(50))
def test_decomposition_real_and_imaginary_parts(seed):
    # Re q = Q + Tr((rho - rho')F)/2 and Im q = Tr((rho - rho')F^{pi/2})/2
    psi, cfg, ps = _random_instance(seed)
    q = kd_distribution(psi, cfg.generator, ps).entries
    wig = wigner_formula(psi, cfg.generator, ps)
    plain, rotated = modification_traces(psi, cfg.generator, ps)
    assert np.max(np.abs(q.real - wig - plain / 2)) < 1e-10
    assert np.max(np.abs(q.imag - rotated / 2)) < 1e-10
    check = kd_identity_check(psi, cfg.generator, ps)
    assert check.complex_residual < 1e-10
    # the summed real form is off by exactly Im q
    assert check.max_residual == pytest.approx(np.max(np.abs(q.imag)), abs=1e-10)


def test_classicality_witness():
    beta = -math.pi / 3
    basis = np.array([[math.cos(beta), -math.sin(beta)], [math.sin(beta), math.cos(beta)]])
    report = classicality_report(kd_distribution(PLUS, DIAG01, Postselection(basis, (0,))))
    assert report.min_real < -0.05 and not report.classical
    chiral = np.array([[1, 1], [1j, -1j]]) / math.sqrt(2)
    report = classicality_report(kd_distribution(PLUS, DIAG01, Postselection(chiral, (0,))))
    assert report.max_abs_imag > 0.1 and not report.classical


def test_three_level_exact_optimum_is_classical():
    psi_i, enc, ps = three_level_setup(ThreeLevelConfig.from_x(1.0, math.pi / 3, 0.0))
    psi = encode(psi_i, enc)
    assert classicality_report(kd_distribution(psi, enc.generator, ps)).classical
    ext = extended_kd_distribution(psi, enc.generator, ps)
    assert np.max(np.abs(ext.entries.imag)) < 1e-12
    # columns with <f_k|psi> != 0 inherit positivity through the factorization;
    # the f1 column (zero overlap) has off-diagonal entries -1/4
    assert ext.entries[:, :, 1:].real.min() >= -1e-12
    assert ext.entries[0, 2, 0].real == pytest.approx(-0.25)
    check = kd_identity_check(psi, enc.generator, ps)
    assert check.max_residual < 1e-10 and not check.imag_flagged


def test_theorem2_single_level():
    psi = Ket([1.0])
    result = theorem2_check(psi, HermitianOperator([[2.5]]), Postselection(np.eye(1), (0,)))
    assert result.uniform_cond48 and result.common_branch and result.kd_equals_wigner
    assert result.xi < 1e-8


def test_theorem2_common_branch():
    gen = HermitianOperator.diagonal([1.0, 2.0, 3.0])
    psi = Ket(np.array([1, 1, 0]) / math.sqrt(2))
    r = 1 / math.sqrt(2)
    basis = np.array([[r, r, 0], [0, 0, 1], [r, -r, 0]])
    result = theorem2_check(psi, gen, Postselection(basis, (0, 1)))
    assert not result.uniform_cond48
    assert result.common_branch and result.kd_equals_wigner
    assert result.xi < 1e-8


def test_theorem2_commuting_multi_support():
    gen = HermitianOperator.diagonal([-1.0, 0.5, 2.0])
    psi = Ket(np.array([0.6, 0.0, 0.8]))
    result = theorem2_check(psi, gen, Postselection(np.eye(3), (0, 2)))
    assert result.kd_equals_wigner
    assert not result.uniform_cond48 and not result.common_branch
    assert result.xi > 1.0


def test_theorem2_three_level():
    lam = 1.5
    psi_i, enc, ps = three_level_setup(ThreeLevelConfig.from_x(lam, math.pi / 4, 1e-8))
    result = theorem2_check(encode(psi_i, enc), enc.generator, ps)
    assert not result.uniform_cond48 and not result.kd_equals_wigner
    assert result.xi == pytest.approx(4 * lam**2, abs=1e-6)


def test_theorem2_vanishing_postselection():
    with pytest.raises(VanishingPostselectionError):
        theorem2_check(Ket.basis(2, 0), DIAG01, Postselection.computational(2, (1,)))
