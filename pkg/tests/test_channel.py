import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import risbound as rb
from risbound.fim import ChannelParams

from conftest import small_radio


LAM = rb.SPEED_OF_LIGHT / 4.9e9


def test_steer_ula_broadside():
    v = rb.steer_ula(0.0, 6, LAM / 2, LAM)
    assert np.allclose(v, np.ones(6))


def test_steer_ula_endfire():
    v = rb.steer_ula(np.pi / 2, 4, LAM / 2, LAM)
    assert np.allclose(v, [1, -1, 1, -1], atol=1e-12)


def test_steer_ula_half_sine():
    # sin(angle) = 0.5 with half-wavelength spacing: pi/2 phase per element
    v = rb.steer_ula(np.arcsin(0.5), 3, LAM / 2, LAM)
    assert np.allclose(np.angle(v), [0.0, np.pi / 2, np.pi], atol=1e-12)


def test_steer_ula_unit_modulus_and_first_entry():
    v = rb.steer_ula(0.7, 16, LAM / 2, LAM)
    assert v[0] == 1.0 + 0.0j
    assert np.allclose(np.abs(v), 1.0, atol=1e-12)


def test_steer_upa_zenith_is_flat():
    v = rb.steer_upa(0.0, np.pi / 2, 4, LAM / 2, LAM)
    assert np.allclose(v, np.ones(16))


def test_steer_upa_zero_elevation_depends_on_b_only():
    L = 3
    v = rb.steer_upa(1.234, 0.0, L, LAM / 2, LAM)
    expected_col = np.exp(1j * np.pi * np.arange(L))  # (2 pi / lam) d = pi
    for b in range(L):
        assert np.allclose(v[b * L:(b + 1) * L], expected_col[b])


def test_steer_upa_indexing_order():
    # element a + (b-1)L: the a-term varies fastest
    L, az, el = 2, np.pi / 2, np.pi / 2
    v = rb.steer_upa(az, el, L, LAM / 2, LAM)
    assert np.allclose(v, [1, -1, 1, -1], atol=1e-12)


def test_steer_upa_against_loop_oracle():
    L, az, el, d = 3, 0.4, 1.1, LAM / 2
    v = rb.steer_upa(az, el, L, d, LAM)
    for a in range(1, L + 1):
        for b in range(1, L + 1):
            phase = (2 * np.pi / LAM) * d * (
                (b - 1) * np.cos(el) + (a - 1) * np.sin(el) * np.sin(az))
            assert v[(a - 1) + (b - 1) * L] == pytest.approx(np.exp(1j * phase), abs=1e-12)


def test_los_path_loss_paper_constants():
    d0 = np.sqrt(10600.0)
    pl_db, rho = rb.los_path_loss(d0, 4.9e9, 3.7)
    oracle = (10 * np.log10(64 * np.pi ** 3) + 37 * np.log10(d0) + 20 * np.log10(4.9))
    assert pl_db == pytest.approx(oracle, rel=1e-12)
    assert pl_db == pytest.approx(121.25, abs=0.01)
    assert rho == pytest.approx(10 ** (pl_db / 10), rel=1e-12)


def test_ris_path_loss_unit_distances():
    pl_db, _ = rb.ris_path_loss(1.0, 1.0, 4.9e9, 2.2)
    assert pl_db == pytest.approx(10 * np.log10(64 * np.pi ** 3) + 40 * np.log10(4.9), rel=1e-12)


def test_path_loss_doubling_law():
    base, _ = rb.los_path_loss(50.0, 4.9e9, 3.7)
    double, _ = rb.los_path_loss(100.0, 4.9e9, 3.7)
    assert double - base == pytest.approx(10 * 3.7 * np.log10(2.0), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(d1=st.floats(1.0, 500.0), d2=st.floats(1.0, 500.0), grow=st.floats(1.01, 5.0))
def test_path_loss_monotone_in_distance(d1, d2, grow):
    pl, _ = rb.ris_path_loss(d1, d2, 4.9e9, 2.2)
    pl_further, _ = rb.ris_path_loss(d1 * grow, d2, 4.9e9, 2.2)
    assert pl_further > pl


def test_shadowing_deterministic_is_zero(paper_scenario):
    assert np.array_equal(rb.sample_shadowing(paper_scenario), np.zeros(4))


def test_shadowing_sampled_reproducible(paper_scenario):
    sc = dataclasses.replace(
        paper_scenario,
        pathloss=dataclasses.replace(paper_scenario.pathloss,
                                     shadowing=rb.ShadowingMode.SAMPLED, shadow_seed=7))
    a = rb.sample_shadowing(sc)
    b = rb.sample_shadowing(sc)
    assert np.array_equal(a, b)
    assert np.any(a != 0.0)
    c = rb.sample_shadowing(sc, seed=8)
    assert np.any(a != c)


def test_default_precoder_properties(paper_scenario):
    pre = rb.default_precoder(paper_scenario)
    assert pre.F.shape == (32, 4)
    assert np.allclose(np.linalg.norm(pre.F, axis=0), 1.0, atol=1e-12)
    assert np.linalg.norm(pre.x) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_default_precoder_single_path():
    sc = rb.Scenario(q=[0.0, 0.0, 40.0], p=[90.0, 30.0, 0.0], alpha=1.0,
                     ris=(), radio=small_radio(0))
    pre = rb.default_precoder(sc)
    assert pre.F.shape == (8, 1)
    g = rb.compute_geometry(sc)
    beam = rb.steer_ula(g.theta_tx0, 8, sc.radio.d, sc.radio.wavelength) / np.sqrt(8)
    assert np.allclose(pre.F[:, 0], beam)


def test_default_precoder_beam_count_mismatch(paper_scenario):
    bad = dataclasses.replace(paper_scenario,
                              radio=dataclasses.replace(paper_scenario.radio, M_t=2))
    with pytest.raises(rb.ConfigError):
        rb.default_precoder(bad)


def test_phase_profile_wraps_and_freezes():
    prof = rb.PhaseProfile(theta=(np.array([-0.1, 7.0, 2.0]),))
    assert np.all(prof.theta[0] >= 0.0)
    assert np.all(prof.theta[0] < 2 * np.pi)
    assert prof.theta[0][0] == pytest.approx(2 * np.pi - 0.1)
    with pytest.raises(ValueError):
        prof.theta[0][0] = 1.0


@pytest.mark.parametrize("delta", [0.0, -0.2, 1.5])
def test_phase_profile_delta_bounds(delta):
    with pytest.raises(rb.InvariantError):
        rb.PhaseProfile(theta=(), delta=delta)


def test_phase_matrix_modulus():
    prof = rb.PhaseProfile(theta=(np.linspace(0, 6, 16),), delta=0.5)
    diag = rb.phase_matrix_diagonal(prof, 0)
    assert np.allclose(np.abs(diag), 0.5, rtol=1e-12)


@pytest.fixture(scope="module")
def small_setup(shrunk_scenario):
    sc = shrunk_scenario
    geo = rb.compute_geometry(sc)
    real = rb.channel_realization(sc, geo)
    phases = rb.random_phases(sc, seed=5)
    return sc, geo, real, phases


def test_channel_rank_one_structure(small_setup):
    # every reflected term equals a scalar cascade times a rank-1 outer product
    sc, geo, real, phases = small_setup
    radio = sc.radio
    lam, d = radio.wavelength, radio.d
    for k in range(1, sc.K + 1):
        H_k = rb.channel_matrix(sc, geo, phases, real, n=3, path=k)
        i = k - 1
        a_rx = rb.steer_ula(geo.theta_rx[k], radio.N_r, d, lam)
        a_tx = rb.steer_ula(geo.theta_tx_k[i], radio.N_t, d, lam)
        a_in = rb.steer_upa(geo.phi_in_a[i], geo.phi_in_e[i], sc.ris[i].L, d, lam)
        a_out = rb.steer_upa(geo.phi_out_a[i], geo.phi_out_e[i], sc.ris[i].L, d, lam)
        cascade = rb.ris_cascade(a_in, a_out, phases.theta[i], phases.delta)
        g = real.gamma[k] * real.h[k] * cascade * np.exp(
            1j * 2 * np.pi * radio.B * (3 / radio.N) * geo.tau[k])
        assert np.allclose(H_k, g * np.outer(a_rx, a_tx.conj()), atol=1e-12 * np.abs(g))
        assert np.linalg.matrix_rank(H_k) == 1


def test_channel_norm_independent_of_subcarrier(small_setup):
    # per-path norms: the subcarrier factor has unit modulus
    sc, geo, real, phases = small_setup
    for k in range(sc.K + 1):
        norms = [np.linalg.norm(rb.channel_matrix(sc, geo, phases, real, n, path=k))
                 for n in (1, 4, 9, 16)]
        assert np.allclose(norms, norms[0], rtol=1e-12)


def test_mean_signal_zero_gains(small_setup):
    sc, geo, _, phases = small_setup
    real = rb.channel_realization(sc, geo, h=np.zeros(sc.K + 1))
    assert np.allclose(rb.mean_signal(sc, geo, phases, real, 1), 0.0)


def test_mean_signal_single_path_collinear():
    sc = rb.Scenario(q=[0.0, 0.0, 40.0], p=[90.0, 30.0, 0.0], alpha=1.0,
                     ris=(), radio=small_radio(0))
    geo = rb.compute_geometry(sc)
    real = rb.channel_realization(sc, geo)
    phases = rb.PhaseProfile()
    a_rx = rb.steer_ula(geo.theta_rx[0], sc.radio.N_r, sc.radio.d, sc.radio.wavelength)
    mags = []
    for n in (1, 5, 16):
        mu = rb.mean_signal(sc, geo, phases, real, n)
        ratio = mu / a_rx
        assert np.allclose(ratio, ratio[0], rtol=1e-12)
        mags.append(np.abs(mu))
    # unit-modulus subcarrier factor: entrywise magnitude independent of n
    assert np.allclose(mags[0], mags[1], rtol=1e-12)
    assert np.allclose(mags[0], mags[2], rtol=1e-12)


def test_signal_model_matches_literal_route(small_setup):
    sc, geo, real, phases = small_setup
    model = rb.SignalModel(sc, geo, real)
    params = ChannelParams.from_geometry(geo, real)
    for n in (1, 7, 16):
        literal = rb.mean_signal(sc, geo, phases, real, n)
        fast = model.mu(params, phases, n)
        assert np.allclose(fast, literal, rtol=1e-12, atol=1e-18)


def test_beam_aligned_cascade_gain(small_setup):
    sc, geo, _, _ = small_setup
    aligned = rb.beam_aligned_phases(sc, geo)
    lam, d = sc.radio.wavelength, sc.radio.d
    for i, panel in enumerate(sc.ris):
        a_in = rb.steer_upa(geo.phi_in_a[i], geo.phi_in_e[i], panel.L, d, lam)
        a_out = rb.steer_upa(geo.phi_out_a[i], geo.phi_out_e[i], panel.L, d, lam)
        mag = abs(rb.ris_cascade(a_in, a_out, aligned.theta[i], aligned.delta))
        assert mag == pytest.approx(panel.n_elements, abs=1e-9)
