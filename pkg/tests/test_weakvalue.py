import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psmetro.errors import (
    DimensionCapExceededError,
    DimensionMismatchError,
    NullVectorError,
    OrthogonalPrePostError,
    ZeroMeanError,
)
from psmetro.linalg import HermitianOperator, Ket, make_rng, operator_norm_sq, random_haar_ket, random_hermitian
from psmetro.weakvalue import (
    EntangledProbeConfig,
    MeterModel,
    branch_phases,
    efficiency_via_phases,
    entangled_probe,
    entangled_scaling_report,
    first_order_meter_average,
    geometric_phase,
    lambda_y_for_probability,
    lambda_y_for_weak_value,
    optimal_postselection,
    optimal_wv_and_prob,
    sigma_z,
    spin_half_pair,
    weak_value,
    weak_value_at_probability,
    weak_value_closed_form,
    wva_efficiency,
)

SIGMA_Z = sigma_z()
SIGMA_X = HermitianOperator([[0, 1], [1, 0]])
PLUS = Ket(np.array([1, 1]) / math.sqrt(2))
MINUS = Ket(np.array([1, -1]) / math.sqrt(2))
ZERO, ONE = Ket.basis(2, 0), Ket.basis(2, 1)


def test_weak_value_examples():
    assert weak_value(PLUS, ZERO, SIGMA_Z) == pytest.approx(1.0)
    psi = random_haar_ket(4, 1)
    gen = random_hermitian(4, 2)
    assert weak_value(psi, psi, gen) == pytest.approx(gen.expectation(psi), abs=1e-12)


@pytest.mark.parametrize("theta", [0.1, 0.6, 1.2, 2.5])
def test_spin_half_weak_value_is_secant(theta):
    psi_i, psi_f = spin_half_pair(theta, 0.3)
    assert weak_value(psi_i, psi_f, SIGMA_Z) == pytest.approx(1 / math.cos(theta), abs=1e-12)


def test_weak_value_orthogonal_raises():
    with pytest.raises(OrthogonalPrePostError):
        weak_value(ZERO, ONE, SIGMA_X)


def test_efficiency_examples():
    assert wva_efficiency(ZERO, ONE, SIGMA_Z) == 0.0
    with pytest.raises(DimensionMismatchError):
        wva_efficiency(ZERO, Ket.basis(3, 0), SIGMA_Z)


@pytest.mark.parametrize("seed", range(50))
def test_efficiency_two_factor_form(seed):
    rng = make_rng(seed)
    psi_i, psi_f, gen = random_haar_ket(5, rng), random_haar_ket(5, rng), random_hermitian(5, rng)
    p_s = abs(psi_f.inner(psi_i)) ** 2
    eta = wva_efficiency(psi_i, psi_f, gen)
    assert eta == pytest.approx(p_s * abs(weak_value(psi_i, psi_f, gen)) ** 2, abs=1e-10)
    assert eta <= operator_norm_sq(gen) + 1e-9


def test_optimal_postselection_examples():
    assert abs(optimal_postselection(PLUS, SIGMA_Z).inner(MINUS)) == pytest.approx(1.0)
    assert wva_efficiency(PLUS, optimal_postselection(PLUS, SIGMA_Z), SIGMA_Z) == pytest.approx(1.0)
    np.testing.assert_allclose(optimal_postselection(ZERO, SIGMA_X).amps, [0, 1])
    gen = random_hermitian(4, 5)
    vals, vecs = gen.spectrum
    top = Ket(vecs[:, int(np.argmax(vals**2))])
    assert wva_efficiency(top, optimal_postselection(top, gen), gen) == pytest.approx(
        operator_norm_sq(gen), abs=1e-10
    )


def test_optimal_postselection_null_vector():
    with pytest.raises(NullVectorError):
        optimal_postselection(ONE, HermitianOperator.diagonal([1.0, 0.0]))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32), dim=st.integers(2, 6))
def test_optimal_postselection_reaches_second_moment(seed, dim):
    rng = make_rng(seed)
    psi, gen = random_haar_ket(dim, rng), random_hermitian(dim, rng)
    v = gen.matrix @ psi.amps
    assert wva_efficiency(psi, optimal_postselection(psi, gen), gen) == pytest.approx(
        np.vdot(v, v).real, abs=1e-10
    )


@pytest.mark.parametrize(
    "n, lx, ly, aw, ps",
    [(2, 1.0, 1.0, 2.0, 1.0), (3, 1.0, 0.0, 3.0, 0.5), (2, 1.0, -0.9, 36.2, 0.01 / 3.62)],
)
def test_optimal_wv_and_prob_entangled(n, lx, ly, aw, ps):
    psi, gen = entangled_probe(EntangledProbeConfig(n, lx, ly))
    got_aw, got_ps = optimal_wv_and_prob(psi, gen)
    assert got_aw == pytest.approx(aw, rel=1e-10)
    assert got_ps == pytest.approx(ps, rel=1e-10)
    assert got_aw == pytest.approx(weak_value_closed_form(n, lx, ly), rel=1e-10)


def test_optimal_weak_value_matches_postselection():
    psi, gen = random_haar_ket(4, 8), random_hermitian(4, 9)
    aw, p_s = optimal_wv_and_prob(psi, gen)
    psi_f = optimal_postselection(psi, gen)
    assert weak_value(psi, psi_f, gen) == pytest.approx(aw, abs=1e-9)
    assert abs(psi_f.inner(psi)) ** 2 == pytest.approx(p_s, abs=1e-12)


def test_zero_mean_is_anomalous():
    psi, gen = entangled_probe(EntangledProbeConfig(4, 1.0, -1.0))
    assert abs(gen.expectation(psi)) < 1e-12
    with pytest.raises(ZeroMeanError):
        optimal_wv_and_prob(psi, gen)


def test_entangled_probe_single_system():
    cfg = EntangledProbeConfig(1, 0.7, -0.2, sub_dim=3)
    psi, gen = entangled_probe(cfg)
    np.testing.assert_allclose(psi.amps, [1 / math.sqrt(2), 1 / math.sqrt(2), 0])
    np.testing.assert_allclose(gen.matrix, np.diag([0.7, -0.2, 0.0]))


def _brute_force_moments(n, lx, ly):
    # independent construction: eigenvalue of each product basis state
    # is the sum of per-site eigenvalues of diag(lx, ly)
    ghz = {(0,) * n: 1 / math.sqrt(2), (1,) * n: 1 / math.sqrt(2)}
    site = (lx, ly)
    mean = sum(abs(a) ** 2 * sum(site[b] for b in bits) for bits, a in ghz.items())
    second = sum(abs(a) ** 2 * sum(site[b] for b in bits) ** 2 for bits, a in ghz.items())
    return mean, second


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("lx, ly", [(1.0, 0.0), (1.0, 0.5), (2.0, -0.3)])
def test_entangled_moments(n, lx, ly):
    psi, gen = entangled_probe(EntangledProbeConfig(n, lx, ly))
    mean, second = _brute_force_moments(n, lx, ly)
    v = gen.matrix @ psi.amps
    assert gen.expectation(psi) == pytest.approx(mean, abs=1e-10)
    assert gen.expectation(psi) == pytest.approx(n * (lx + ly) / 2, abs=1e-10)
    assert np.vdot(v, v).real == pytest.approx(second, abs=1e-10)


def test_entangled_dimension_cap():
    with pytest.raises(DimensionCapExceededError):
        entangled_probe(EntangledProbeConfig(13, 1.0, 0.0))


def test_scaling_report_regimes():
    near = entangled_scaling_report(EntangledProbeConfig(2, 1.0, -0.99))
    assert near.relative_gap < 0.05 and near.anomalous
    far = entangled_scaling_report(EntangledProbeConfig(2, 1.0, 0.0))
    assert far.prob == pytest.approx(0.5)
    assert far.approx_prob == pytest.approx(1.0)
    assert far.relative_gap == pytest.approx(1.0) and not far.anomalous


def test_scaling_report_target_roots():
    rep = entangled_scaling_report(EntangledProbeConfig(2, 1.0, -0.9), weak_target=36.2)
    assert min(rep.lambda_y_roots, key=lambda r: abs(r + 0.9)) == pytest.approx(-0.9)
    for root in rep.lambda_y_roots:
        assert weak_value_closed_form(2, 1.0, root) == pytest.approx(36.2)


def test_probability_roots():
    for root in lambda_y_for_probability(1.0, 0.1):
        _, p_s = optimal_wv_and_prob(*entangled_probe(EntangledProbeConfig(1, 1.0, root)))
        assert p_s == pytest.approx(0.1)
    assert math.isnan(lambda_y_for_weak_value(1, 1.0, 0.1)[0])


def test_weak_value_linear_in_n_at_fixed_probability():
    assert weak_value_at_probability(4, 1.0, 1e-3) == pytest.approx(
        2 * weak_value_at_probability(2, 1.0, 1e-3)
    )


def test_geometric_phase_examples():
    g = geometric_phase(PLUS, ZERO, PLUS)
    assert g.phase == 0.0 and not g.degenerate
    assert g.bargmann_product == pytest.approx(0.5)
    assert geometric_phase(ZERO, ONE, ZERO).degenerate


def test_geometric_phase_branch_is_half_open():
    # a real negative product maps to +pi, never -pi
    psi_i, psi_f = spin_half_pair(0.8, 0.0)
    g = geometric_phase(psi_i, ONE, psi_f)
    assert g.phase == math.pi


@pytest.mark.parametrize("theta, phi", [(0.3, 0.0), (1.0, 2.0), (2.0, -1.0)])
def test_spin_half_phase_difference_is_pi(theta, phi):
    psi_i, psi_f = spin_half_pair(theta, phi)
    up = geometric_phase(psi_i, ZERO, psi_f).phase
    down = geometric_phase(psi_i, ONE, psi_f).phase
    assert math.remainder(down - up - math.pi, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_efficiency_via_phases_matches(seed):
    rng = make_rng(seed)
    dim = 2 + seed % 5
    psi_i, psi_f, gen = random_haar_ket(dim, rng), random_haar_ket(dim, rng), random_hermitian(dim, rng)
    assert efficiency_via_phases(psi_i, psi_f, gen) == pytest.approx(
        wva_efficiency(psi_i, psi_f, gen), abs=1e-9
    )


def test_efficiency_via_phases_trivial_and_orthogonal():
    assert efficiency_via_phases(ZERO, ZERO, SIGMA_Z) == pytest.approx(1.0)
    # <psi_i|psi_f> = 0: every Bargmann invariant vanishes, fallback path
    assert efficiency_via_phases(ZERO, ONE, SIGMA_X) == pytest.approx(wva_efficiency(ZERO, ONE, SIGMA_X))


@pytest.mark.parametrize("seed", range(50))
def test_sign_law_at_optimum(seed):
    rng = make_rng(seed)
    psi, gen = random_haar_ket(4, rng), random_hermitian(4, rng)
    branches, _ = branch_phases(psi, optimal_postselection(psi, gen), gen)
    for br in branches:
        assert br.factor is not None
        assert abs(br.factor - br.sign) < 1e-9


def test_null_eigenvalue_flag():
    gen = HermitianOperator.diagonal([1.0, 0.0, -2.0])
    psi = Ket(np.ones(3) / math.sqrt(3))
    branches, _ = branch_phases(psi, optimal_postselection(psi, gen), gen)
    null = [b for b in branches if b.null_eigenvalue]
    assert len(null) == 1 and null[0].sign == 1 and null[0].phase.degenerate


@pytest.mark.parametrize(
    "aw, alpha, g, expected",
    [(1j, 1.0, 0.01, 0.02), (1.0, 1.0, 0.01, 0.0), (3 + 4j, 2j, 0.005, 0.06)],
)
def test_meter_first_order(aw, alpha, g, expected):
    assert first_order_meter_average(MeterModel(aw, alpha, g)) == pytest.approx(expected)


def test_meter_is_linear_in_coupling():
    a = first_order_meter_average(MeterModel(0.3 + 2j, 1 - 0.5j, 0.01))
    b = first_order_meter_average(MeterModel(0.3 + 2j, 1 - 0.5j, 0.03))
    assert b == pytest.approx(3 * a)


def test_meter_warns_on_strong_coupling():
    with pytest.warns(UserWarning):
        MeterModel(1.0, 1.0, 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        MeterModel(1.0, 1.0, 0.1)
