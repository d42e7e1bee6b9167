"""Pulse library: modified Hermite shapes, correlations, spectra.

Numerical oracles here are built from scipy's Hermite evaluation (a code
path independent of the production numpy.polynomial one) on grids at least
10x finer than the production sampling.
"""

import numpy as np
import pytest
from scipy.special import eval_hermitenorm

from mpulse import pulses
from mpulse.errors import ParameterError
from mpulse.pulses import (PulseSet, Spectrum, average_psd,
                           chip_confined_width, fourier_magnitude, load_pulse,
                           make_mhp, pulse_xcorr, save_pulse)

T_C = 1e-9
DT = T_C / 64
WIDTH = chip_confined_width(5, T_C)
FINE = DT / 16


def analytic_mhp(order, width, t):
    """Unit-energy analytic profile on the oracle grid via scipy Hermite."""
    grid = np.arange(-2e-9, 2e-9, FINE)
    base = eval_hermitenorm(order, grid / width) * np.exp(-grid**2 / (4 * width**2))
    norm = np.sqrt(np.sum(base * base) * FINE)
    return eval_hermitenorm(order, t / width) * np.exp(-t**2 / (4 * width**2)) / norm


def oracle_xcorr(order_a, order_b, lag, width=WIDTH):
    """Trapezoid quadrature of the analytic cross-correlation at 16x resolution."""
    t = np.arange(-2e-9, 2e-9, FINE)
    ya = analytic_mhp(order_a, width, t - lag)
    yb = analytic_mhp(order_b, width, t)
    return float(np.sum(ya * yb) * FINE)


@pytest.fixture(scope="module")
def mhp():
    return {o: make_mhp(o, WIDTH, DT) for o in range(6)}


class TestMakeMhp:
    def test_odd_orders_vanish_at_origin(self, mhp):
        for o in (1, 3, 5):
            assert mhp[o].samples[-mhp[o].start] == 0.0

    def test_unit_energy(self, mhp):
        for o, p in mhp.items():
            assert abs(p.energy - 1.0) < 1e-9

    def test_parity(self, mhp):
        for o, p in mhp.items():
            sign = 1.0 if o % 2 == 0 else -1.0
            assert np.allclose(p.samples, sign * p.samples[::-1], atol=1e-20)

    def test_orthogonality_of_orders_3_and_4(self, mhp):
        val = pulse_xcorr(mhp[3], mhp[4], 0.0)
        assert abs(val - oracle_xcorr(3, 4, 0.0)) < 1e-6
        assert abs(val) < 1e-6

    def test_all_distinct_order_pairs_orthogonal_at_lag_zero(self, mhp):
        for a in range(6):
            for b in range(a + 1, 6):
                assert abs(pulse_xcorr(mhp[a], mhp[b], 0.0)) < 1e-6

    def test_truncation_support_is_trimmed(self, mhp):
        p = mhp[4]
        assert abs(p.samples[0]) >= 1e-6 * np.abs(p.samples).max() * 0.99
        assert len(p.samples) == -2 * p.start + 1

    def test_invalid_parameters(self):
        with pytest.raises(ParameterError):
            make_mhp(3, -1e-10, DT)
        with pytest.raises(ParameterError):
            make_mhp(3, WIDTH, 0.0)
        with pytest.raises(ParameterError):
            make_mhp(11, WIDTH, DT)
        with pytest.raises(ParameterError):
            make_mhp(-1, WIDTH, DT)


class TestChipConfinedWidth:
    def test_support_fits_half_chip(self):
        for o in (3, 4, 5):
            p = make_mhp(o, chip_confined_width(o, T_C), DT)
            assert p.support <= 0.5 * T_C

    def test_shared_width_keeps_all_orders_confined(self, mhp):
        for o in range(6):
            assert mhp[o].support < 0.5 * T_C

    def test_autocorrelation_vanishes_at_chip_lags(self, mhp):
        # chip-confined means no spill into neighbouring chips at all
        for ell in (1, 2, 5):
            assert pulse_xcorr(mhp[4], mhp[4], ell * T_C) == 0.0


class TestPulseXcorr:
    def test_zero_lag_autocorrelation_is_energy(self, mhp):
        for p in mhp.values():
            assert pulse_xcorr(p, p, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_supports_give_exact_zero(self, mhp):
        p = mhp[3]
        assert pulse_xcorr(p, p, 2 * p.support + DT) == 0.0

    def test_off_grid_lag_matches_quadrature_oracle(self, mhp):
        # 0.1 ns is 6.4 samples: deliberately off the dt grid
        val = pulse_xcorr(mhp[3], mhp[4], 0.1e-9)
        assert abs(val - oracle_xcorr(3, 4, 0.1e-9)) < 1e-6

    def test_assorted_lags_match_oracle(self, mhp):
        for (a, b) in [(3, 5), (4, 4), (4, 5)]:
            for lag in (0.055e-9, 0.35e-9, -0.2e-9):
                got = pulse_xcorr(mhp[a], mhp[b], lag)
                assert abs(got - oracle_xcorr(a, b, lag)) < 1e-6

    def test_swap_symmetry(self, mhp):
        rng = np.random.default_rng(2)
        for lag in rng.uniform(-1e-9, 1e-9, size=8):
            fwd = pulse_xcorr(mhp[3], mhp[5], lag)
            rev = pulse_xcorr(mhp[5], mhp[3], -lag)
            assert fwd == pytest.approx(rev, abs=1e-9)

    def test_mismatched_dt_rejected(self, mhp):
        other = make_mhp(3, WIDTH, DT / 2)
        with pytest.raises(ParameterError):
            pulse_xcorr(mhp[3], other, 0.0)


class TestFourierMagnitude:
    def test_parseval(self, mhp):
        f = np.linspace(-0.5 / DT, 0.5 / DT, 4001)
        for o in (3, 4, 5):
            w2 = fourier_magnitude(mhp[o], f)
            assert np.trapezoid(w2, f) == pytest.approx(1.0, abs=1e-3)

    def test_even_in_frequency(self, mhp):
        f = np.linspace(-2e9, 2e9, 101)
        w2 = fourier_magnitude(mhp[4], f)
        assert np.allclose(w2, w2[::-1], rtol=1e-10)

    def test_peak_location_matches_dense_fft_oracle(self, mhp):
        p = mhp[3]
        # oracle: zero-padded FFT of the sampled pulse
        nfft = 1 << 16
        spec = np.abs(np.fft.rfft(p.samples, nfft)) ** 2
        ffft = np.fft.rfftfreq(nfft, DT)
        f = np.linspace(0, 0.5 / DT, 2048)
        mine = fourier_magnitude(p, f)
        df = f[1] - f[0]
        assert abs(f[np.argmax(mine)] - ffft[np.argmax(spec)]) <= df

    def test_nyquist_guard(self, mhp):
        with pytest.raises(ParameterError):
            fourier_magnitude(mhp[3], np.array([0.6 / DT]))


class TestAveragePsd:
    def test_single_pulse_shape(self, mhp):
        t_s = 18 * 30 * T_C
        f = np.linspace(0, 0.5 / DT, 257)
        psd = average_psd(PulseSet((mhp[3],)), t_s, f)
        assert np.allclose(psd.values, fourier_magnitude(mhp[3], f) / t_s)

    def test_total_power_is_inverse_symbol_time(self, mhp):
        t_s = 12 * 8 * T_C
        f = np.linspace(-0.5 / DT, 0.5 / DT, 8001)
        psd = average_psd(PulseSet((mhp[3], mhp[4], mhp[5])), t_s, f)
        assert psd.total_power() == pytest.approx(1.0 / t_s, rel=1e-3)

    def test_duplicated_pulse_types_collapse(self, mhp):
        t_s = 4 * 4 * T_C
        f = np.linspace(0, 20e9, 101)
        single = average_psd(PulseSet((mhp[4],)), t_s, f)
        double = average_psd(PulseSet((mhp[4], mhp[4])), t_s, f)
        assert np.allclose(single.values, double.values)

    def test_bad_symbol_time(self, mhp):
        with pytest.raises(ParameterError):
            average_psd(PulseSet((mhp[3],)), 0.0, np.array([0.0, 1e9]))


class TestPulseSet:
    def test_modulo_type_indexing(self, mhp):
        ps = PulseSet((mhp[3], mhp[4], mhp[5]))
        assert ps.pulse_for(0, 4) is mhp[4 % 3 + 3]
        assert ps.pulse_for(0, -1) is mhp[5]

    def test_per_user_ordering(self, mhp):
        ps = PulseSet((mhp[3], mhp[4]), orderings={2: (1, 0)})
        assert ps.pulse_for(1, 0) is mhp[3]
        assert ps.pulse_for(2, 0) is mhp[4]

    def test_bad_ordering_rejected(self, mhp):
        with pytest.raises(ParameterError):
            PulseSet((mhp[3], mhp[4]), orderings={1: (0, 0)})

    def test_non_unit_energy_rejected(self, mhp):
        bad = pulses.Pulse(mhp[3].samples * 2, mhp[3].start, DT, mhp[3].support)
        with pytest.raises(ParameterError):
            PulseSet((bad,))

    def test_mhp_constructor_default_width(self):
        ps = PulseSet.mhp([3, 4], T_C, samples_per_chip=64)
        assert ps.n_p == 2
        assert ps.dt == DT
        # default width keyed to the order-5 reference for comparability
        assert ps.pulses[0].width_scale == pytest.approx(WIDTH)


class TestSpectrumAndIo:
    def test_spectrum_validation(self):
        with pytest.raises(ParameterError):
            Spectrum(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        with pytest.raises(ParameterError):
            Spectrum(np.array([0.0, 1.0]), np.array([-1.0, 1.0]))

    def test_spectrum_csv(self, tmp_path, mhp):
        f = np.linspace(0, 1e9, 11)
        sp = Spectrum(f, np.ones(11))
        out = tmp_path / "spec.csv"
        sp.save_csv(out)
        text = out.read_text().splitlines()
        assert text[0] == "frequency_hz,psd"
        assert len(text) == 12

    def test_pulse_round_trip(self, tmp_path, mhp):
        path = tmp_path / "p4.txt"
        save_pulse(path, mhp[4])
        back = load_pulse(path)
        assert back.start == mhp[4].start
        assert back.dt == pytest.approx(DT, rel=1e-9)
        assert np.allclose(back.samples, mhp[4].samples, rtol=1e-12)

    def test_loader_rejects_scaled_pulse(self, tmp_path, mhp):
        path = tmp_path / "bad.txt"
        np.savetxt(path, np.column_stack([mhp[3].times(), 2 * mhp[3].samples]))
        with pytest.raises(ParameterError):
            load_pulse(path)

    def test_loader_rejects_jittered_grid(self, tmp_path, mhp):
        t = mhp[3].times().copy()
        t[5] += 0.2 * DT
        path = tmp_path / "bad2.txt"
        np.savetxt(path, np.column_stack([t, mhp[3].samples]))
        with pytest.raises(ParameterError):
            load_pulse(path)
