import math

import numpy as np
import pytest

from polcipher.services.channel import (
    P_X,
    ChannelConfig,
    Impairment,
    awgn,
    estimate_xi,
    global_mueller,
    impairment_distortion,
    impairment_mueller,
    post_impairment_snr_db,
    predicted_stokes_moments,
    run_trial,
    simulate_stokes_moments,
    simulate_stokes_snr,
    stokes_snr,
)
from polcipher.services.constellation import build_constellation
from polcipher.services.encipherment import CipherContext, PlainPattern, Scheme, random_pattern
from polcipher.services.mueller import jones_to_mueller
from polcipher.services.polarization import jones_to_stokes
from polcipher.utils.exceptions import InvalidArgumentError


def test_noise_variance_from_snr():
    assert ChannelConfig(snr_db=10.0).sigma_w2 == pytest.approx(0.05)
    assert ChannelConfig(snr_db=0.0).sigma_w2 == pytest.approx(P_X)
    assert ChannelConfig(snr_db=math.inf).sigma_w2 == 0.0


@pytest.mark.parametrize("snr_db", [math.nan, -math.inf])
def test_invalid_snr(snr_db):
    with pytest.raises(InvalidArgumentError):
        ChannelConfig(snr_db=snr_db)


def test_singular_channel():
    with pytest.raises(InvalidArgumentError):
        ChannelConfig(snr_db=10.0, channel=np.ones((2, 2)))


def test_awgn(rng):
    e = np.ones((50_000, 2), dtype=complex)
    np.testing.assert_array_equal(awgn(e, 0.0, rng), e)
    noise = awgn(e, 0.2, rng) - e
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(0.2, rel=0.03)
    with pytest.raises(InvalidArgumentError):
        awgn(e, -1.0, rng)


def test_predicted_moments():
    moments = predicted_stokes_moments(0.5, 0.5)
    assert moments.mean == (2.0, 0.0, 0.0, 0.0)
    np.testing.assert_allclose(moments.variance, (1.5, 1.5, 2.0, 2.0))


def test_simulated_moments_match_prediction(rng):
    sim = simulate_stokes_moments(0.5, 0.5, 200_000, rng)
    pred = predicted_stokes_moments(0.5, 0.5)
    assert sim.mean[0] == pytest.approx(pred.mean[0], rel=0.01)
    np.testing.assert_allclose(sim.variance, pred.variance, rtol=0.03)


def test_stokes_snr_crossover():
    snr = stokes_snr(0.5)
    assert snr[0] == pytest.approx(0.125)
    assert snr[1] == 0.0
    assert snr[2] == pytest.approx(0.125)
    assert snr[3] == pytest.approx(0.125)
    np.testing.assert_array_equal(stokes_snr(0.0), np.zeros(4))
    high = stokes_snr([2.0, 100.0])
    assert np.all(high[:, 0] > high[:, 2])


def test_simulated_snr_follows_closed_form(rng):
    simulated = simulate_stokes_snr(10.0, 200_000, rng)
    expected = stokes_snr(10.0)
    assert simulated[0] == pytest.approx(expected[0], rel=0.05)
    assert simulated[2] == pytest.approx(expected[2], rel=0.05)


def test_ideal_impairments_are_identity():
    np.testing.assert_allclose(Impairment.cross_pol(0.0).mueller(), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(Impairment.unbalanced(1.0).mueller(), np.eye(4), atol=1e-15)


def test_cross_pol_first_column():
    xi = 0.3
    m = Impairment.cross_pol(xi).mueller()
    np.testing.assert_allclose(m[:, 0], [1 + xi ** 2, 0.0, 2 * xi, 0.0], atol=1e-15)


def test_generic_impairment_matches_jones_route(rng):
    for _ in range(20):
        a, b, c = rng.uniform(0, 1, 3) * np.exp(1j * rng.uniform(0, 2 * math.pi, 3))
        imp = Impairment.generic(a, b, c)
        np.testing.assert_allclose(impairment_mueller(a, b, c), jones_to_mueller(imp.jones()),
                                   atol=1e-12)


def test_impairment_magnitude_is_bounded():
    with pytest.raises(InvalidArgumentError):
        Impairment.cross_pol(1.5)


def test_unbalanced_scales_lower_rows(rng):
    xi = 0.6
    mk = CipherContext.from_pattern(random_pattern(Scheme.GOLDEN, rng),
                                    build_constellation(4)).mueller
    mg = global_mueller(Impairment.unbalanced(xi).mueller(), mk)
    np.testing.assert_allclose(mg[2:], xi * mk[2:], atol=1e-12)


def test_xi_estimator():
    mk = np.eye(4)
    mk[1, 1:] = 1.0
    mg = np.zeros((4, 4))
    estimate = estimate_xi(mg, mk)
    assert estimate.value == pytest.approx(1.0)
    assert estimate.in_range

    mg[1:, 0] = 6.0
    estimate = estimate_xi(mg, mk)
    assert math.isnan(estimate.value)
    assert not estimate.in_range

    with pytest.raises(InvalidArgumentError):
        estimate_xi(mg, np.eye(4))


def test_noiseless_trial(rng):
    c = build_constellation(8)
    ctx = CipherContext.from_pattern(random_pattern(Scheme.GOLDEN, rng), c)
    eve = CipherContext.from_pattern(random_pattern(Scheme.GOLDEN, rng), c)
    bits = rng.integers(0, 2, 96)
    outcome = run_trial(ctx, ChannelConfig(snr_db=math.inf), bits, rng, eve_ctx=eve)
    np.testing.assert_array_equal(outcome.bits_legit, bits)
    assert outcome.bits_eve.shape == bits.shape
    assert outcome.bits_eve_wrong.shape == bits.shape


def test_impairment_distortion(rng):
    ctx = CipherContext.from_pattern(random_pattern(Scheme.GOLDEN, rng), build_constellation(8))
    assert impairment_distortion(ctx, None) == pytest.approx(0.0, abs=1e-20)
    small = impairment_distortion(ctx, Impairment.cross_pol(0.1))
    large = impairment_distortion(ctx, Impairment.cross_pol(0.8))
    assert 0.0 < small < large


def test_post_impairment_snr():
    c = build_constellation(4)
    assert post_impairment_snr_db(c, None, math.inf, trials=5) > 100.0
    ideal = post_impairment_snr_db(c, None, 20.0, trials=20, seed=5)
    impaired = post_impairment_snr_db(c, Impairment.cross_pol(0.5), 20.0, trials=20, seed=5)
    assert impaired < ideal


def test_plain_context_has_no_distortion():
    ctx = CipherContext.from_pattern(PlainPattern(), build_constellation(2))
    assert impairment_distortion(ctx, Impairment.unbalanced(1.0)) == pytest.approx(0.0, abs=1e-20)


def test_full_cross_pol_collapses_onto_slant(jones_batch):
    s = jones_to_stokes(jones_batch)
    out = s @ Impairment.cross_pol(1.0).mueller().T
    total = 2.0 * s[:, 0] + 2.0 * s[:, 2]
    np.testing.assert_allclose(out[:, 0], total, atol=1e-12)
    np.testing.assert_allclose(out[:, 2], total, atol=1e-12)
    np.testing.assert_allclose(out[:, [1, 3]], 0.0, atol=1e-12)


def test_quadrature_unbalance_swaps_slant_and_circular():
    expected = np.array([
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, -1],
        [0, 0, 1, 0],
    ])
    np.testing.assert_allclose(Impairment.unbalanced(1j).mueller(), expected, atol=1e-15)


@pytest.mark.parametrize("gamma", [0.0, -1.0, math.inf, math.nan])
def test_simulated_snr_needs_finite_positive_gamma(gamma, rng):
    with pytest.raises(InvalidArgumentError):
        simulate_stokes_snr(gamma, 100, rng)
