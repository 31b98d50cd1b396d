"""Path-gain families: closed forms vs independent oracles, sampler contracts."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fadecap.fading import (
    EULER_GAMMA,
    LOG_PI_E,
    Ar1Gaussian,
    IidGaussian,
    ZeroPath,
    ar1_spectral_density,
    entropy_rate_szego,
    path_spec_from_dict,
    path_spec_to_dict,
    sample_path,
    sample_paths,
    spectral_density,
    stats_of,
)
from fadecap.streams import substream

SZEGO_GRID = 2**16


class TestClosedForms:
    def test_unit_iid_gaussian(self):
        stats = stats_of(IidGaussian(1.0))
        assert stats.entropy_rate == pytest.approx(2.1447298858494002, abs=1e-12)
        assert stats.mean_log_gain == pytest.approx(-EULER_GAMMA, abs=1e-12)
        assert stats.alpha == 1.0
        assert stats.active

    def test_ar1_with_zero_pole_degenerates_to_iid(self):
        assert stats_of(Ar1Gaussian(1.0, 0.0)) == stats_of(IidGaussian(1.0))

    def test_ar1_entropy_rate_closed_form(self):
        stats = stats_of(Ar1Gaussian(2.0, 0.5))
        assert stats.entropy_rate == pytest.approx(LOG_PI_E + math.log(2.0 * 0.75), rel=1e-14)

    def test_zero_path_has_no_statistics(self):
        stats = stats_of(ZeroPath())
        assert stats.alpha == 0.0
        assert stats.entropy_rate is None
        assert stats.mean_log_gain is None
        assert not stats.active

    def test_invalid_specs_rejected(self):
        with pytest.raises(ValueError):
            IidGaussian(-1.0)
        with pytest.raises(ValueError):
            IidGaussian(0.0)
        with pytest.raises(ValueError):
            Ar1Gaussian(1.0, 1.0)
        with pytest.raises(ValueError):
            Ar1Gaussian(1.0, 0.8 + 0.7j)
        with pytest.raises(ValueError):
            Ar1Gaussian(math.inf, 0.1)


class TestSzegoOracle:
    def test_flat_spectrum(self):
        assert entropy_rate_szego(lambda lam: np.ones_like(lam), SZEGO_GRID) == pytest.approx(
            LOG_PI_E, abs=1e-12
        )

    def test_constant_scaling(self):
        got = entropy_rate_szego(lambda lam: 3.0 * np.ones_like(lam), SZEGO_GRID)
        assert got == pytest.approx(LOG_PI_E + math.log(3.0), abs=1e-12)

    @pytest.mark.parametrize(
        "alpha,a",
        [(1.0, 0.5), (2.0, 0.5), (1.0, 0.9), (0.25, -0.6), (1.0, 0.3 + 0.4j)],
    )
    def test_ar1_matches_closed_form(self, alpha, a):
        # the pole factor integrates to zero, leaving the innovation variance
        got = entropy_rate_szego(ar1_spectral_density(alpha, a), SZEGO_GRID)
        assert abs(got - stats_of(Ar1Gaussian(alpha, a)).entropy_rate) < 1e-6

    def test_iid_spectral_density_matches(self):
        got = entropy_rate_szego(spectral_density(IidGaussian(2.0)), SZEGO_GRID)
        assert abs(got - stats_of(IidGaussian(2.0)).entropy_rate) < 1e-10

    def test_nonpositive_density_rejected(self):
        with pytest.raises(ValueError):
            entropy_rate_szego(lambda lam: np.cos(lam), 1024)

    @settings(max_examples=25, deadline=None)
    @given(
        alpha=st.floats(min_value=0.05, max_value=20.0),
        a_mag=st.floats(min_value=0.0, max_value=0.95),
        a_phase=st.floats(min_value=0.0, max_value=2.0 * math.pi),
    )
    def test_property_szego_agrees_for_random_ar1(self, alpha, a_mag, a_phase):
        a = a_mag * complex(math.cos(a_phase), math.sin(a_phase))
        spec = Ar1Gaussian(alpha, a)
        got = entropy_rate_szego(spectral_density(spec), SZEGO_GRID)
        assert abs(got - stats_of(spec).entropy_rate) < 1e-5


class TestSamplers:
    def test_zero_path_samples_are_zero(self):
        assert np.array_equal(
            sample_path(ZeroPath(), 5, substream(0, 0)), np.zeros(5, dtype=complex)
        )

    def test_same_stream_gives_bit_identical_paths(self):
        for spec in (IidGaussian(1.0), Ar1Gaussian(1.0, 0.4 + 0.2j)):
            a = sample_path(spec, 128, substream(11, 3))
            b = sample_path(spec, 128, substream(11, 3))
            assert np.array_equal(a, b)

    def test_different_streams_differ(self):
        a = sample_path(IidGaussian(1.0), 64, substream(11, 0))
        b = sample_path(IidGaussian(1.0), 64, substream(11, 1))
        assert not np.array_equal(a, b)

    def test_iid_empirical_variance(self):
        h = sample_paths(IidGaussian(4.0), 1, 1_000_000, substream(42, 0))[:, 0]
        power = np.abs(h) ** 2
        sem = np.std(power, ddof=1) / math.sqrt(power.size)
        assert abs(np.mean(power) - 4.0) <= 3.0 * sem

    def test_ar1_lag_one_correlation(self):
        paths = sample_paths(Ar1Gaussian(1.0, 0.9), 2, 500_000, substream(43, 0))
        prod = (paths[:, 1] * np.conj(paths[:, 0])).real
        sem = np.std(prod, ddof=1) / math.sqrt(prod.size)
        assert abs(np.mean(prod) - 0.9) <= 3.0 * sem

    def test_ar1_lag_one_correlation_single_long_path(self):
        h = sample_path(Ar1Gaussian(1.0, 0.9), 1_000_000, substream(46, 0))
        corr = float(np.mean(h[1:] * np.conj(h[:-1])).real)
        assert abs(corr - 0.9) < 0.01  # samples are dependent; coarse tolerance

    def test_ar1_variance_stationary_at_every_sampled_index(self):
        paths = sample_paths(Ar1Gaussian(2.0, 0.7), 6, 300_000, substream(44, 0))
        for k in range(6):
            power = np.abs(paths[:, k]) ** 2
            sem = np.std(power, ddof=1) / math.sqrt(power.size)
            assert abs(np.mean(power) - 2.0) <= 3.0 * sem

    def test_mean_log_gain_stationary_at_every_sampled_index(self):
        spec = Ar1Gaussian(1.5, 0.8)
        expected = stats_of(spec).mean_log_gain
        paths = sample_paths(spec, 4, 400_000, substream(45, 0))
        for k in range(4):
            logs = np.log(np.abs(paths[:, k]) ** 2)
            sem = np.std(logs, ddof=1) / math.sqrt(logs.size)
            assert abs(np.mean(logs) - expected) <= 3.0 * sem

    def test_bad_lengths_rejected(self):
        with pytest.raises(ValueError):
            sample_path(IidGaussian(1.0), 0, substream(0, 0))


class TestSerialization:
    @pytest.mark.parametrize(
        "spec",
        [IidGaussian(1.5), Ar1Gaussian(0.5, 0.25 - 0.1j), ZeroPath()],
    )
    def test_round_trip(self, spec):
        assert path_spec_from_dict(path_spec_to_dict(spec)) == spec

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            path_spec_from_dict({"kind": "rayleigh", "alpha": 1.0})

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            path_spec_from_dict({"kind": "iid", "alpha": 1.0, "beta": 2.0})
