"""Combining weights, templates, and the two decision-variable engines."""

from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from mpulse.analysis import (TableBuilder, conditional_mai_matrix,
                             total_ifi_variance)
from mpulse.channel import (ChannelParams, ChannelRealization,
                            compose_received, convolve_pulse, sample_channels)
from mpulse.config import SystemConfig
from mpulse.errors import ParameterError, UnsupportedModeError
from mpulse.pulses import PulseSet
from mpulse.rake import (DecisionBreakdown, build_template, combining_weights,
                         correlate_decision, detect_bit,
                         semi_analytic_decision)
from mpulse.signal import gen_codes, schedule_symbol, synthesize_waveform
from mpulse.waveform import Waveform

T_C = 1e-9


def make_cfg(**over):
    base = dict(n_p=2, n_f=8, n_c=8, t_c=T_C, k_users=3,
                energies_db=(0.0, 6.0, 12.0), noise_sigma2=1.0, mode="sr",
                n_h=8, delta_chips=16, mhp_orders=(3, 4), seed=0)
    base.update(over)
    return SystemConfig(**base)


def make_setup(seed=5, params=None, **over):
    cfg = make_cfg(**over)
    pset = PulseSet.mhp(cfg.mhp_orders, cfg.t_c)
    rng = np.random.default_rng(seed)
    if params is None:
        params = ChannelParams(n_taps=6, mean_arrival=1.2e-9)
    chans = [c.snapped(cfg.dt)
             for c in sample_channels(params, cfg.t_f, cfg.k_users, rng)]
    weights = combining_weights(chans[0])
    tables = TableBuilder(cfg, pset).build(chans, weights)
    return SimpleNamespace(cfg=cfg, pset=pset, chans=chans, weights=weights,
                           tables=tables, rng=rng)


def draw_symbol_block(s, rng):
    """Codes, bits, and events for symbols -1..1 of every user."""
    cfg = s.cfg
    per_user, books = [], []
    for _ in range(cfg.k_users):
        codes = gen_codes(cfg, rng, 3 * cfg.n_f, first_frame=-cfg.n_f)
        books.append(codes)
        ev = []
        for i, b in enumerate(rng.choice([-1, 1], size=3)):
            ev.extend(schedule_symbol(cfg, int(b), codes, symbol=i - 1))
        per_user.append(ev)
    return books, per_user


def run_both_engines(seed, snap):
    """One noise-free trial through the waveform and table engines."""
    s = make_setup(seed)
    cfg = s.cfg
    books, per_user = draw_symbol_block(s, s.rng)
    taus = [0.0] + [float(s.rng.uniform(0, cfg.t_s * 0.9))
                    for _ in range(cfg.k_users - 1)]
    if snap:
        taus = [round(t / cfg.dt) * cfg.dt for t in taus]
    waves = [convolve_pulse(synthesize_waveform(cfg, ev, s.pset), s.chans[k])
             for k, ev in enumerate(per_user)]
    rx = compose_received(cfg, waves, taus)
    tpl = build_template(cfg, books[0], s.weights, s.chans[0], s.pset)
    y_wave = correlate_decision(rx, tpl)
    bd = semi_analytic_decision(cfg, s.tables, books[0], per_user, taus)
    return y_wave, bd


def unit_channel():
    return ChannelRealization(gains=np.ones(1), delays=np.zeros(1))


class TestCombiningWeights:
    def test_mrc_all_matches_gains(self):
        ch = ChannelRealization(gains=np.array([2.0, -1.0]),
                                delays=np.array([0.0, 1e-9]))
        w = combining_weights(ch)
        np.testing.assert_array_equal(w.beta, [2.0, -1.0])
        assert w.n_fingers == 2

    def test_selective_keeps_strongest(self):
        ch = ChannelRealization(gains=np.array([0.1, 0.9]),
                                delays=np.array([0.0, 1e-9]))
        w = combining_weights(ch, selection="selective", count=1)
        np.testing.assert_array_equal(w.beta, [0.0, 0.9])
        assert w.n_fingers == 1

    def test_partial_keeps_earliest(self):
        ch = ChannelRealization(gains=np.array([0.1, 0.9]),
                                delays=np.array([0.0, 1e-9]))
        w = combining_weights(ch, selection="partial", count=1)
        np.testing.assert_array_equal(w.beta, [0.1, 0.0])

    def test_selective_respects_magnitude(self):
        ch = ChannelRealization(gains=np.array([-0.8, 0.2, 0.5]),
                                delays=np.array([0.0, 1e-9, 2e-9]))
        w = combining_weights(ch, selection="selective", count=2)
        np.testing.assert_array_equal(w.beta, [-0.8, 0.0, 0.5])

    def test_egc_uses_signs(self):
        ch = ChannelRealization(gains=np.array([-0.3, 0.7]),
                                delays=np.array([0.0, 1e-9]))
        w = combining_weights(ch, scheme="egc")
        np.testing.assert_array_equal(w.beta, [-1.0, 1.0])

    def test_errors(self):
        ch = unit_channel()
        with pytest.raises(ParameterError, match="scheme"):
            combining_weights(ch, scheme="mmse")
        with pytest.raises(ParameterError, match="selection"):
            combining_weights(ch, selection="best")
        with pytest.raises(ParameterError, match="count"):
            combining_weights(ch, selection="partial")
        with pytest.raises(ParameterError):
            combining_weights(ch, selection="selective", count=5)


class TestBuildTemplate:
    def test_tr_mode_rejected(self):
        cfg = make_cfg(mode="tr", n_f=8, n_p=2, k_users=1,
                       energies_db=(0.0,))
        pset = PulseSet.mhp(cfg.mhp_orders, cfg.t_c)
        codes = gen_codes(cfg, np.random.default_rng(0), cfg.n_f)
        ch = unit_channel()
        with pytest.raises(UnsupportedModeError, match="tr"):
            build_template(cfg, codes, combining_weights(ch), ch, pset)

    def test_single_path_matches_scaled_waveform(self):
        cfg = make_cfg(k_users=1, energies_db=(0.0,))
        pset = PulseSet.mhp(cfg.mhp_orders, cfg.t_c)
        codes = gen_codes(cfg, np.random.default_rng(1), cfg.n_f)
        ch = unit_channel()
        tpl = build_template(cfg, codes, combining_weights(ch), ch, pset)
        synth = synthesize_waveform(cfg, schedule_symbol(cfg, 1, codes), pset)
        root = np.sqrt(cfg.n_f)
        gap = (tpl.energy() + cfg.n_f * synth.energy()
               - 2.0 * root * tpl.inner(synth))
        assert gap == pytest.approx(0.0, abs=1e-12 * tpl.energy())
        assert tpl.energy() == pytest.approx(cfg.n_f, rel=1e-9)

    def test_polarity_flip_is_local(self):
        s = make_setup(seed=7)
        codes = gen_codes(s.cfg, s.rng, s.cfg.n_f)
        flipped_pol = codes.polarity.copy()
        flipped_pol[3] = -flipped_pol[3]
        other = replace(codes, polarity=flipped_pol)
        t1 = build_template(s.cfg, codes, s.weights, s.chans[0], s.pset)
        t2 = build_template(s.cfg, other, s.weights, s.chans[0], s.pset)
        fingers = ChannelRealization(gains=s.weights.beta,
                                     delays=s.chans[0].delays)
        shape = convolve_pulse(s.pset.pulse_for(0, 3).as_waveform(), fingers)
        gap = t1.energy() + t2.energy() - 2.0 * t1.inner(t2)
        assert gap == pytest.approx(4.0 * shape.energy(), rel=1e-9)

    def test_weight_mismatch(self):
        s = make_setup()
        codes = gen_codes(s.cfg, s.rng, s.cfg.n_f)
        bad = combining_weights(unit_channel())
        with pytest.raises(ParameterError, match="tap count"):
            build_template(s.cfg, codes, bad, s.chans[0], s.pset)


@pytest.fixture(scope="module")
def clean():
    cfg = make_cfg(k_users=1, energies_db=(0.0,))
    pset = PulseSet.mhp(cfg.mhp_orders, cfg.t_c)
    codes = gen_codes(cfg, np.random.default_rng(2), cfg.n_f)
    ch = unit_channel()
    w = combining_weights(ch)
    tpl = build_template(cfg, codes, w, ch, pset)
    return SimpleNamespace(cfg=cfg, pset=pset, codes=codes, ch=ch, tpl=tpl)


class TestCorrelateDecision:
    def received_for(self, c, bit):
        wave = convolve_pulse(
            synthesize_waveform(c.cfg, schedule_symbol(c.cfg, bit, c.codes),
                                c.pset), c.ch)
        return compose_received(c.cfg, [wave], [0.0])

    def test_clean_decision_value(self, clean):
        root = np.sqrt(clean.cfg.energies[0] * clean.cfg.n_f)
        for bit in (1, -1):
            y = correlate_decision(self.received_for(clean, bit), clean.tpl)
            assert y == pytest.approx(bit * root, rel=1e-9)

    def test_antisymmetry(self, clean):
        y_pos = correlate_decision(self.received_for(clean, 1), clean.tpl)
        y_neg = correlate_decision(self.received_for(clean, -1), clean.tpl)
        assert y_neg == pytest.approx(-y_pos, rel=1e-12)

    def test_window_too_small(self, clean):
        short = Waveform.zeros(clean.tpl.start + 5, 50, clean.cfg.dt)
        with pytest.raises(ParameterError, match="window"):
            correlate_decision(short, clean.tpl)

    def test_guard_extends_requirement(self, clean):
        exact = Waveform.zeros(clean.tpl.start, len(clean.tpl),
                               clean.cfg.dt)
        assert correlate_decision(exact, clean.tpl) == 0.0
        with pytest.raises(ParameterError, match="window"):
            correlate_decision(exact, clean.tpl, guard_samples=1)

    def test_dt_mismatch(self, clean):
        other = Waveform.zeros(-10000, 30000, clean.cfg.dt * 2)
        with pytest.raises(ParameterError, match="dt"):
            correlate_decision(other, clean.tpl)


class TestDetectBit:
    def test_positive(self):
        assert detect_bit(2.3) == 1

    def test_negative(self):
        assert detect_bit(-1e-300) == -1

    def test_tie_goes_positive(self):
        assert detect_bit(0.0) == 1


class TestDecisionBreakdown:
    def test_total_is_exact_sum(self):
        bd = DecisionBreakdown(desired=0.1, ifi=-0.02, mai=0.005,
                               noise=0.3)
        assert bd.y == 0.1 + -0.02 + 0.005 + 0.3


class TestSemiAnalyticDecision:
    def test_matches_waveform_engine_on_grid(self):
        for seed in (0, 3, 9):
            y_wave, bd = run_both_engines(seed, snap=True)
            assert bd.y == pytest.approx(y_wave, rel=1e-10)
            assert detect_bit(bd.y) == detect_bit(y_wave)

    def test_off_grid_delays_stay_close(self):
        # the waveform engine snaps arrivals to the sample grid while the
        # table engine interpolates, so agreement is approximate
        for seed in (0, 3, 9):
            y_wave, bd = run_both_engines(seed, snap=False)
            assert bd.y == pytest.approx(y_wave, rel=0.15)

    def test_desired_term_formula(self):
        s = make_setup(k_users=1, energies_db=(0.0,))
        codes = gen_codes(s.cfg, s.rng, s.cfg.n_f)
        events = schedule_symbol(s.cfg, 1, codes)
        bd = semi_analytic_decision(s.cfg, s.tables, codes, [events], [0.0])
        expect = np.sqrt(s.cfg.energies[0] / s.cfg.n_f) \
            * (s.cfg.n_f / s.cfg.n_p) * float(np.sum(s.tables.desired_phi0))
        assert bd.desired == pytest.approx(expect, rel=1e-12)
        assert bd.mai == 0.0
        assert bd.noise == 0.0

    def test_single_path_has_no_spill(self):
        s = make_setup(k_users=1, energies_db=(0.0,),
                       params=ChannelParams(n_taps=1))
        codes = gen_codes(s.cfg, s.rng, 3 * s.cfg.n_f,
                          first_frame=-s.cfg.n_f)
        events = []
        for i in range(3):
            events.extend(schedule_symbol(s.cfg, 1, codes, symbol=i - 1))
        bd = semi_analytic_decision(s.cfg, s.tables, codes, [events], [0.0])
        assert abs(bd.ifi) <= 1e-12 * abs(bd.desired)

    def test_spill_comes_from_adjacent_frames_only(self):
        s = make_setup(k_users=1, energies_db=(0.0,), seed=13)
        codes = gen_codes(s.cfg, s.rng, 3 * s.cfg.n_f,
                          first_frame=-s.cfg.n_f)
        events = []
        for i, b in enumerate((1, -1, 1)):
            events.extend(schedule_symbol(s.cfg, b, codes, symbol=i - 1))
        near = [e for e in events if -1 <= e.frame <= s.cfg.n_f]
        full = semi_analytic_decision(s.cfg, s.tables, codes, [events],
                                      [0.0])
        trimmed = semi_analytic_decision(s.cfg, s.tables, codes, [near],
                                         [0.0])
        assert trimmed.desired == pytest.approx(full.desired, rel=1e-14)
        assert trimmed.ifi == pytest.approx(full.ifi, rel=1e-12)

    def test_noise_passthrough(self):
        s = make_setup(k_users=1, energies_db=(0.0,))
        codes = gen_codes(s.cfg, s.rng, s.cfg.n_f)
        events = schedule_symbol(s.cfg, 1, codes)
        bd = semi_analytic_decision(s.cfg, s.tables, codes, [events], [0.0],
                                    noise_value=0.37)
        assert bd.noise == 0.37
        assert bd.y == bd.desired + bd.ifi + bd.mai + 0.37

    def test_errors(self):
        s = make_setup()
        codes = gen_codes(s.cfg, s.rng, s.cfg.n_f)
        events = schedule_symbol(s.cfg, 1, codes)
        with pytest.raises(ParameterError, match="each of"):
            semi_analytic_decision(s.cfg, s.tables, codes, [events], [0.0])
        with pytest.raises(ParameterError, match="reference"):
            semi_analytic_decision(s.cfg, s.tables, codes,
                                   [events, [], []], [1e-9, 0.0, 0.0])
        tr_cfg = make_cfg(mode="tr", n_f=8, n_p=2)
        with pytest.raises(UnsupportedModeError):
            semi_analytic_decision(tr_cfg, s.tables, codes,
                                   [events, [], []], [0.0, 0.0, 0.0])


N_VARIANCE_TRIALS = 4000


@pytest.fixture(scope="module")
def measured():
    s = make_setup(seed=100, n_f=100, k_users=2, energies_db=(0.0, 6.0))
    cfg = s.cfg
    tau2 = round(0.4 * cfg.t_s / cfg.dt) * cfg.dt
    rng = np.random.default_rng(2024)
    vals = np.zeros((N_VARIANCE_TRIALS, 2))
    for t in range(N_VARIANCE_TRIALS):
        books, per_user = draw_symbol_block(s, rng)
        bd = semi_analytic_decision(cfg, s.tables, books[0], per_user,
                                    [0.0, tau2])
        vals[t] = (bd.ifi, bd.mai)
    return SimpleNamespace(s=s, tau2=tau2, ifi=vals[:, 0], mai=vals[:, 1])


class TestInterferenceVariance:
    """Empirical spill and interference variances over random codes.

    One long loop feeds both checks; the closed forms predict the
    variance of the table-engine components across code draws at a
    fixed interferer delay.
    """

    def test_ifi_variance_matches_closed_form(self, measured):
        expect = total_ifi_variance(measured.s.cfg, measured.s.tables)
        assert np.var(measured.ifi) == pytest.approx(expect, rel=0.05)

    def test_mai_variance_matches_closed_form(self, measured):
        cfg = measured.s.cfg
        row = conditional_mai_matrix(cfg, measured.s.tables,
                                     np.array([[measured.tau2]]))[0]
        expect = float(row.sum()) / (cfg.n_p * cfg.n_c ** 2)
        assert np.var(measured.mai) == pytest.approx(expect, rel=0.05)

    def test_components_have_zero_mean(self, measured):
        for arr in (measured.ifi, measured.mai):
            bound = 4.0 * np.std(arr) / np.sqrt(len(arr))
            assert abs(np.mean(arr)) < bound
