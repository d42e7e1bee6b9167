"""Closed-form link statistics and bit error probability.

The RAKE output for one symbol splits into a desired part, spill-over
interference from adjacent frames of the same user (IFI), interference
from other users (MAI), and filtered noise. For long random codes the
interference terms are asymptotically Gaussian, with variances that only
involve cross-correlations between channel-convolved pulse shapes and the
combined RAKE template shapes. This module precomputes those correlations
on the sample grid once per channel draw and evaluates the variances and
the resulting error probabilities.

Conventions: user 0 is the user of interest and the timing reference
(its arrival delay is zero); interferer delay vectors list users 1..K-1.
All variances are reported in the units of the per-type decomposition, so
the error probability is Q(desired / sqrt(sum of per-type variances)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .config import SystemConfig
from .errors import ConfigError, ParameterError
from .pulses import PulseSet
from .waveform import Waveform, cross_correlation, sample_index

SGA_GRID_POINTS = 512


def q_function(x):
    """Gaussian tail probability, accurate to better than 1e-12 relative."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def _interp_lookup(values: np.ndarray, span: int, dt: float, lags_s):
    """Linear interpolation of a lag table; zero outside the table."""
    pos = np.asarray(lags_s, dtype=float) / dt + span
    i0 = np.floor(pos).astype(np.int64)
    frac = pos - i0
    n = values.shape[0]
    v0 = np.where((i0 >= 0) & (i0 < n),
                  values[np.clip(i0, 0, n - 1)], 0.0)
    i1 = i0 + 1
    v1 = np.where((i1 >= 0) & (i1 < n),
                  values[np.clip(i1, 0, n - 1)], 0.0)
    return v0 * (1.0 - frac) + v1 * frac


@dataclass
class CorrelationTable:
    """Sampled cross-correlation between a received pulse shape and a
    template shape, on the dt lag grid spanning +/-(n_c+1) chips.

    values[i] approximates the correlation at lag (i - span)*dt, where
    the correlation at lag x integrates shape_a(t - x) * shape_b(t).
    Values are exactly zero once |lag| exceeds the combined support.
    """

    values: np.ndarray
    span: int
    dt: float
    user_a: int = 0
    type_a: int = 0
    weighted_a: bool = False
    user_b: int = 0
    type_b: int = 0
    weighted_b: bool = True

    @property
    def lag_start(self) -> int:
        return -self.span

    def at(self, lags_s):
        """Correlation at arbitrary lags (seconds), linearly interpolated."""
        return _interp_lookup(self.values, self.span, self.dt, lags_s)

    def at_samples(self, sample_lags):
        """Exact table values at integer sample lags."""
        idx = np.asarray(sample_lags) + self.span
        n = self.values.shape[0]
        return np.where((idx >= 0) & (idx < n),
                        self.values[np.clip(idx, 0, n - 1)], 0.0)

    def at_chips(self, chip_lags, samples_per_chip: int):
        return self.at_samples(np.asarray(chip_lags) * samples_per_chip)


def correlation_table(u: Waveform, v: Waveform, span: int,
                      **ids) -> CorrelationTable:
    """Reference construction of a CorrelationTable from two waveforms.

    Direct evaluation through full linear cross-correlation; the batched
    builder in TableBuilder must agree with this to rounding error.
    """
    conv, lag_start = cross_correlation(u, v)
    values = np.zeros(2 * span + 1)
    src_lo = max(lag_start, -span)
    src_hi = min(lag_start + len(conv) - 1, span)
    if src_lo <= src_hi:
        values[src_lo + span:src_hi + span + 1] = \
            conv[src_lo - lag_start:src_hi - lag_start + 1]
    return CorrelationTable(values=values, span=span, dt=u.dt, **ids)


@dataclass
class TrialTables:
    """All correlation tables needed to analyze one channel/weight draw.

    data[k, n, m] tabulates the correlation between user k's received
    type-n shape and the template's combined type-m shape; tdata holds
    template-template pairs. Both are indexed modulo n_p on types.
    """

    cfg: SystemConfig
    data: np.ndarray
    tdata: np.ndarray
    span: int

    @property
    def dt(self) -> float:
        return self.cfg.dt

    @property
    def desired_phi0(self) -> np.ndarray:
        """Per-type desired correlations at lag zero (user 0 vs template)."""
        n = np.arange(self.cfg.n_p)
        return self.data[0, n, n, self.span]

    @property
    def template_phi0(self) -> np.ndarray:
        """Per-type template self-correlations at lag zero."""
        n = np.arange(self.cfg.n_p)
        return self.tdata[n, n, self.span]

    def xcorr(self, user: int, n: int, m: int) -> CorrelationTable:
        """Table for user ``user``'s type-n shape against template type m."""
        if not 0 <= user < self.cfg.k_users:
            raise ConfigError(f"no tables for user {user}")
        n_p = self.cfg.n_p
        return CorrelationTable(values=self.data[user, n % n_p, m % n_p],
                                span=self.span, dt=self.dt, user_a=user,
                                type_a=n % n_p, weighted_a=False, user_b=0,
                                type_b=m % n_p, weighted_b=True)

    def template_xcorr(self, n: int, m: int) -> CorrelationTable:
        n_p = self.cfg.n_p
        return CorrelationTable(values=self.tdata[n % n_p, m % n_p],
                                span=self.span, dt=self.dt, user_a=0,
                                type_a=n % n_p, weighted_a=True, user_b=0,
                                type_b=m % n_p, weighted_b=True)

    def template_energy(self, codes, symbol: int = 0) -> float:
        """Exact energy of the assembled template for one symbol.

        Sums per-frame self terms plus the overlap cross terms between
        adjacent frames (farther frames cannot overlap when the channel
        spread fits inside a frame).
        """
        cfg = self.cfg
        frames = np.arange(symbol * cfg.n_f, (symbol + 1) * cfg.n_f)
        chips = np.asarray([int(codes.th_at(j)) for j in frames])
        d = np.asarray([int(codes.d_at(j)) for j in frames])
        types = frames % cfg.n_p
        total = float(np.sum(self.template_phi0[types]))
        spc = cfg.samples_per_chip
        for i in range(cfg.n_f - 1):
            lag = (chips[i] - chips[i + 1] - cfg.n_c) * spc
            cross = self.template_xcorr(types[i], types[i + 1]) \
                .at_samples(lag)
            total += 2.0 * d[i] * d[i + 1] * float(cross)
        return total


class TableBuilder:
    """Batched FFT construction of TrialTables, reused across trials.

    Pulse spectra and index maps depend only on the configuration and the
    pulse set, so they are computed once; per-trial work is limited to the
    tap-train FFTs and one batched inverse transform.
    """

    def __init__(self, cfg: SystemConfig, pset: PulseSet) -> None:
        if pset.n_p != cfg.n_p:
            raise ParameterError("pulse set size does not match n_p")
        if abs(pset.dt - cfg.dt) > 1e-9 * cfg.dt:
            raise ParameterError("pulse set sample step does not match")
        supports = [p.support for p in pset.pulses]
        if 2.0 * max(supports) > cfg.t_c * (1.0 + 1e-9):
            raise ParameterError(
                "pulse support too wide for the correlation table span")
        self.cfg = cfg
        self.pset = pset
        spc = cfg.samples_per_chip
        self.span = (cfg.n_c + 1) * spc
        need = 2 * self.span + 2
        self.nfft = 1 << (need - 1).bit_length()
        start = min(p.start for p in pset.pulses)
        padded = np.zeros((len(pset.pulses), self.nfft))
        for i, p in enumerate(pset.pulses):
            off = p.start - start
            padded[i, off:off + len(p.samples)] = p.samples
        spectra = np.fft.rfft(padded, self.nfft, axis=-1)
        # type -> pulse index per user, template side is user 0's ordering
        tmap = np.array([[pset.pulse_index(u, n) for n in range(cfg.n_p)]
                         for u in range(cfg.k_users)])
        pair = np.conj(spectra)[:, None, :] * spectra[None, :, :]
        self._pair_ku = pair[tmap[:, :, None, None], tmap[0][None, None, :,
                                                            None],
                             np.arange(pair.shape[-1])]
        self._pair_tt = pair[tmap[0][:, None, None], tmap[0][None, :, None],
                             np.arange(pair.shape[-1])]
        self._unroll = (np.arange(2 * self.span + 1) - self.span) % self.nfft

    def _train_fft(self, gains: np.ndarray, delays: np.ndarray) -> np.ndarray:
        dt = self.cfg.dt
        idx = np.array([sample_index(d, dt) for d in delays])
        if idx[-1] * dt > self.cfg.t_f * (1.0 + 1e-9):
            raise ParameterError("channel spread exceeds one frame")
        train = np.zeros(idx[-1] + 1)
        np.add.at(train, idx, gains)
        return np.fft.rfft(train, self.nfft)

    def build(self, channels, weights) -> TrialTables:
        """Tables for one draw: per-user channels plus user-0 RAKE weights.

        ``channels`` lists one ChannelRealization per user (user 0 first);
        ``weights`` carries the combining coefficients on user 0's taps.
        """
        cfg = self.cfg
        if len(channels) != cfg.k_users:
            raise ParameterError(
                f"need {cfg.k_users} channel realizations, "
                f"got {len(channels)}")
        beta = np.asarray(weights.beta, dtype=float)
        if beta.shape != channels[0].gains.shape:
            raise ParameterError("weights do not match user-0 tap count")
        g_fft = np.stack([self._train_fft(ch.gains, ch.delays)
                          for ch in channels])
        w_fft = self._train_fft(beta, channels[0].delays)
        spec = np.conj(g_fft)[:, None, None, :] * (w_fft * self._pair_ku)
        circ = np.fft.irfft(spec, self.nfft, axis=-1)
        data = circ[..., self._unroll] * cfg.dt
        tspec = np.conj(w_fft) * w_fft * self._pair_tt
        tcirc = np.fft.irfft(tspec, self.nfft, axis=-1)
        tdata = tcirc[..., self._unroll] * cfg.dt
        return TrialTables(cfg=cfg, data=data, tdata=tdata, span=self.span)


@dataclass
class InterferenceStats:
    """Second-order interference statistics for one delay vector.

    sigma2_ifi_1 and sigma2_ifi_2 are the per-type weighted lag sums of
    the adjacent-frame spill terms (the second is a cross moment and may
    be negative). sigma2_mai[k, n] is the per-user, per-type conditional
    MAI sum at the stored delays (row 0, the desired user, is zero).
    sigma2_noise is the total output-noise variance. desired_phi0 carries
    the per-type desired correlations needed by the error probability.
    """

    sigma2_ifi_1: np.ndarray
    sigma2_ifi_2: np.ndarray
    sigma2_mai: np.ndarray
    sigma2_noise: float
    desired_phi0: np.ndarray
    template_phi0: np.ndarray
    taus: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class BepResult:
    """A bit error probability estimate and how it was obtained."""

    value: float
    kind: str
    n_mc: int = 0
    ci_halfwidth: float = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ParameterError("probability outside [0, 1]")


def ifi_variance(cfg: SystemConfig, tables: TrialTables, n: int):
    """Per-type adjacent-frame interference sums (direct and cross).

    The direct sum weights squared correlations at positive chip lags of
    the next-type shape and negative chip lags of the previous-type shape;
    the cross sum couples the two orientations of the same type boundary.
    """
    spc = cfg.samples_per_chip
    l = np.arange(1, cfg.n_c + 1)
    fwd = tables.xcorr(0, n + 1, n).at_samples(l * spc)
    back = tables.xcorr(0, n - 1, n).at_samples(-l * spc)
    s1 = float(np.sum(l * (fwd ** 2 + back ** 2)))
    swapped = tables.xcorr(0, n, n + 1).at_samples(-l * spc)
    s2 = float(np.sum(l * fwd * swapped))
    return s1, s2


def total_ifi_variance(cfg: SystemConfig, tables: TrialTables) -> float:
    """Variance of the total self-interference in the decision variable."""
    acc = 0.0
    for n in range(cfg.n_p):
        s1, s2 = ifi_variance(cfg, tables, n)
        acc += s1 + 2.0 * s2
    e1 = float(cfg.energies[0])
    return e1 / (cfg.n_p * cfg.n_c ** 2) * acc


def _frame_window(cfg: SystemConfig, tau_lo: float, tau_hi: float):
    """Frame offsets whose lag interval can meet the correlation support.

    Deliberately one frame wider than strictly necessary on each side;
    out-of-support terms contribute exact zeros, so a generous window
    keeps every boundary sliver without special cases.
    """
    lo = int(np.floor(-2.0 - tau_hi / cfg.t_f)) - 1
    hi = int(np.ceil(2.0 - tau_lo / cfg.t_f)) + 1
    return range(lo, hi + 1)


def mai_variance(cfg: SystemConfig, tables: TrialTables, k: int, n: int,
                 tau0: float) -> float:
    """Conditional cross-user interference sum for user k, type n.

    Weighted double sum over frame offsets and chip lags of the squared
    correlation between user k's received shapes and the template shape,
    evaluated at the chip lattice shifted by the user's arrival delay.
    """
    if not 1 <= k < cfg.k_users:
        raise ParameterError(f"k must be an interferer index, got {k}")
    if not 0.0 <= tau0 < cfg.t_s:
        raise ParameterError("tau0 must lie in [0, t_s)")
    l = np.arange(-(cfg.n_c - 1), cfg.n_c)
    w = cfg.n_c - np.abs(l)
    total = 0.0
    for off in _frame_window(cfg, tau0, tau0):
        tab = tables.xcorr(k, n + off, n)
        lags = (off * cfg.n_c + l) * cfg.t_c + tau0
        total += float(np.sum(w * tab.at(lags) ** 2))
    return total


def conditional_mai_matrix(cfg: SystemConfig, tables: TrialTables,
                           taus: np.ndarray) -> np.ndarray:
    """Energy-weighted per-type MAI sums for a batch of delay vectors.

    ``taus`` has shape (draws, k_users-1); returns (draws, n_p) holding
    sum_k E_k * mai_variance(k, n, tau_k) for each draw. Vectorized over
    draws so asynchronous averaging stays cheap.
    """
    taus = np.atleast_2d(np.asarray(taus, dtype=float))
    if taus.shape[1] != cfg.k_users - 1:
        raise ParameterError(
            f"delay vectors need {cfg.k_users - 1} entries")
    if taus.size and (taus.min() < 0.0 or taus.max() >= cfg.t_s):
        raise ParameterError("delays must lie in [0, t_s)")
    draws = taus.shape[0]
    out = np.zeros((draws, cfg.n_p))
    if cfg.k_users == 1:
        return out
    l = np.arange(-(cfg.n_c - 1), cfg.n_c)
    w = (cfg.n_c - np.abs(l)).astype(float)
    window = _frame_window(cfg, float(taus.min()), float(taus.max()))
    energies = cfg.energies
    for k in range(1, cfg.k_users):
        tau_col = taus[:, k - 1][:, None]
        for n in range(cfg.n_p):
            acc = np.zeros(draws)
            for off in window:
                tab = tables.xcorr(k, n + off, n)
                lags = (off * cfg.n_c + l) * cfg.t_c + tau_col
                acc += np.sum(w * tab.at(lags) ** 2, axis=1)
            out[:, n] += float(energies[k]) * acc
    return out


def noise_variance(cfg: SystemConfig, tables: TrialTables) -> float:
    """Variance of the filtered-noise part of the decision variable."""
    return float(cfg.noise_sigma2 * (cfg.n_f / cfg.n_p)
                 * np.sum(tables.template_phi0))


def interference_stats(cfg: SystemConfig, tables: TrialTables,
                       taus) -> InterferenceStats:
    """Collect all second-order statistics for one interferer delay vector."""
    taus = np.asarray(taus, dtype=float).reshape(-1)
    if taus.shape != (cfg.k_users - 1,):
        raise ParameterError(
            f"delay vector needs {cfg.k_users - 1} entries")
    s1 = np.zeros(cfg.n_p)
    s2 = np.zeros(cfg.n_p)
    for n in range(cfg.n_p):
        s1[n], s2[n] = ifi_variance(cfg, tables, n)
    mai = np.zeros((cfg.k_users, cfg.n_p))
    for k in range(1, cfg.k_users):
        for n in range(cfg.n_p):
            mai[k, n] = mai_variance(cfg, tables, k, n, float(taus[k - 1]))
    return InterferenceStats(
        sigma2_ifi_1=s1, sigma2_ifi_2=s2, sigma2_mai=mai,
        sigma2_noise=noise_variance(cfg, tables),
        desired_phi0=tables.desired_phi0.copy(),
        template_phi0=tables.template_phi0.copy(), taus=taus)


def _bep_value(cfg: SystemConfig, desired_sum: float, ifi_per_type,
               mai_rows: np.ndarray, noise_per_type) -> np.ndarray:
    """Error probability for one or more per-type MAI rows.

    Numerator is sqrt(E_1/n_p) times the summed desired correlations;
    the denominator collects per-type variances: spill terms scaled by
    E_1/(n_c * n_c * n_f), MAI rows scaled by 1/(n_c * n_c * n_f), and
    the per-type noise variance.
    """
    e1 = float(cfg.energies[0])
    gain = cfg.n_c * cfg.n_c * cfg.n_f
    den2 = (np.sum(e1 * np.asarray(ifi_per_type) / gain)
            + np.sum(np.asarray(noise_per_type))
            + np.sum(np.atleast_2d(mai_rows), axis=1) / gain)
    if np.any(den2 <= 0.0):
        raise ParameterError(
            "degenerate configuration: no noise and no interference")
    num = np.sqrt(e1 / cfg.n_p) * desired_sum
    return q_function(num / np.sqrt(den2))


def bep_conditional(cfg: SystemConfig, stats: InterferenceStats) -> BepResult:
    """Error probability conditioned on the delay vector in ``stats``."""
    ifi_pt = stats.sigma2_ifi_1 + 2.0 * stats.sigma2_ifi_2
    mai_row = (cfg.energies[:, None] * stats.sigma2_mai).sum(axis=0)
    noise_pt = cfg.noise_sigma2 * stats.template_phi0
    value = _bep_value(cfg, float(np.sum(stats.desired_phi0)), ifi_pt,
                       mai_row[None, :], noise_pt)
    return BepResult(value=float(value[0]), kind="conditional")


def bep_sync(cfg: SystemConfig, tables: TrialTables) -> BepResult:
    """Error probability with all users frame-aligned (all delays zero)."""
    stats = interference_stats(cfg, tables, np.zeros(cfg.k_users - 1))
    out = bep_conditional(cfg, stats)
    return BepResult(value=out.value, kind="sync")


def _bep_components(cfg, tables):
    ifi_pt = np.zeros(cfg.n_p)
    for n in range(cfg.n_p):
        s1, s2 = ifi_variance(cfg, tables, n)
        ifi_pt[n] = s1 + 2.0 * s2
    noise_pt = cfg.noise_sigma2 * tables.template_phi0
    desired = float(np.sum(tables.desired_phi0))
    return desired, ifi_pt, noise_pt


def bep_async_mc(cfg: SystemConfig, tables: TrialTables, n_mc: int,
                 rng: np.random.Generator, period: float = None) -> BepResult:
    """Asynchronous error probability by delay-vector Monte Carlo.

    Averages the conditional value over ``n_mc`` delay vectors drawn
    uniformly on one pulse-cycle period (n_p frames) per interferer; the
    structure repeats with that period, so the short interval suffices.
    """
    if n_mc < 1:
        raise ParameterError("n_mc must be >= 1")
    if period is None:
        period = cfg.n_p * cfg.t_f
    desired, ifi_pt, noise_pt = _bep_components(cfg, tables)
    taus = rng.uniform(0.0, period, size=(n_mc, cfg.k_users - 1))
    mai_rows = conditional_mai_matrix(cfg, tables, taus)
    values = _bep_value(cfg, desired, ifi_pt, mai_rows, noise_pt)
    ci = None
    if n_mc >= 2:
        ci = 1.96 * float(np.std(values, ddof=1)) / np.sqrt(n_mc)
    elif n_mc == 1:
        ci = float("inf")
    if cfg.k_users == 1:
        ci = 0.0
    return BepResult(value=float(np.mean(values)), kind="async_mc",
                     n_mc=n_mc, ci_halfwidth=ci)


def bep_async_sga(cfg: SystemConfig, tables: TrialTables,
                  grid_points: int = SGA_GRID_POINTS) -> BepResult:
    """Asynchronous error probability with the averaged-variance shortcut.

    Replaces each conditional MAI sum by its delay average over one
    pulse-cycle period (midpoint rule on a uniform grid), then evaluates
    the conditional expression once.
    """
    if grid_points < 1:
        raise ParameterError("grid_points must be >= 1")
    desired, ifi_pt, noise_pt = _bep_components(cfg, tables)
    period = cfg.n_p * cfg.t_f
    grid = (np.arange(grid_points) + 0.5) * (period / grid_points)
    taus = np.repeat(grid[:, None], max(cfg.k_users - 1, 1), axis=1)
    if cfg.k_users == 1:
        taus = np.zeros((1, 0))
    mai_rows = conditional_mai_matrix(cfg, tables, taus)
    mean_row = mai_rows.mean(axis=0, keepdims=True)
    value = _bep_value(cfg, desired, ifi_pt, mean_row, noise_pt)
    return BepResult(value=float(value[0]), kind="async_sga",
                     n_mc=grid_points)


def _single_pulse_components(cfg, tables):
    if cfg.n_p != 1:
        raise ParameterError("single-pulse forms require n_p = 1")
    spc = cfg.samples_per_chip
    l = np.arange(1, cfg.n_c + 1)
    t00 = tables.xcorr(0, 0, 0)
    paired = t00.at_samples(-l * spc) + t00.at_samples(l * spc)
    gain = cfg.n_c * cfg.n_c * cfg.n_f
    e1 = float(cfg.energies[0])
    ifi = e1 * float(np.sum(l * paired ** 2)) / gain
    noise = cfg.noise_sigma2 * float(tables.template_phi0[0])
    desired = np.sqrt(e1) * float(tables.desired_phi0[0])
    return desired, ifi, noise


def _single_pulse_mai(cfg, tables, eps: np.ndarray) -> np.ndarray:
    """Per-row MAI variance for the one-pulse-type shortcut.

    Each squared correlation is sampled on the chip lattice shifted by
    the sub-chip part of the delay; the lattice covers the full
    correlation support including the boundary chips. The correlations
    enter squared (this is a variance).
    """
    eps = np.atleast_2d(np.mod(eps, cfg.t_c))
    g = np.arange(-(cfg.n_c + 1), cfg.n_c + 1)
    total = np.zeros(eps.shape[0])
    for k in range(1, cfg.k_users):
        tab = tables.xcorr(k, 0, 0)
        lags = g * cfg.t_c + eps[:, k - 1][:, None]
        total += float(cfg.energies[k]) * np.sum(tab.at(lags) ** 2, axis=1)
    return total / (cfg.n_c * cfg.n_f)


def bep_single_pulse(cfg: SystemConfig, tables: TrialTables,
                     eps) -> BepResult:
    """Conditional error probability via the one-pulse-type shortcut.

    ``eps`` holds one sub-chip offset per interferer; full delays are
    accepted and reduced modulo the chip time, which is the only part the
    single-pulse statistics depend on.
    """
    eps = np.asarray(eps, dtype=float).reshape(-1)
    if eps.shape != (cfg.k_users - 1,):
        raise ParameterError(
            f"offset vector needs {cfg.k_users - 1} entries")
    desired, ifi, noise = _single_pulse_components(cfg, tables)
    mai = float(_single_pulse_mai(cfg, tables, eps[None, :])[0])
    den2 = ifi + mai + noise
    if den2 <= 0.0:
        raise ParameterError(
            "degenerate configuration: no noise and no interference")
    return BepResult(value=float(q_function(desired / np.sqrt(den2))),
                     kind="conditional")


def bep_single_pulse_async(cfg: SystemConfig, tables: TrialTables,
                           n_mc: int, rng: np.random.Generator) -> BepResult:
    """Asynchronous average of the one-pulse-type shortcut over sub-chip
    offsets drawn uniformly in one chip."""
    if n_mc < 1:
        raise ParameterError("n_mc must be >= 1")
    desired, ifi, noise = _single_pulse_components(cfg, tables)
    eps = rng.uniform(0.0, cfg.t_c, size=(n_mc, cfg.k_users - 1))
    mai = _single_pulse_mai(cfg, tables, eps)
    den2 = ifi + mai + noise
    if np.any(den2 <= 0.0):
        raise ParameterError(
            "degenerate configuration: no noise and no interference")
    values = q_function(desired / np.sqrt(den2))
    ci = 1.96 * float(np.std(values, ddof=1)) / np.sqrt(n_mc) \
        if n_mc >= 2 else float("inf")
    if cfg.k_users == 1:
        ci = 0.0
    return BepResult(value=float(np.mean(values)), kind="async_mc",
                     n_mc=n_mc, ci_halfwidth=ci)
