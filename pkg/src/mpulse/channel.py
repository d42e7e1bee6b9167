"""Multipath channel model and received-signal composition.

Tap delays start at zero with exponential interarrivals; realizations whose
spread exceeds one frame are redrawn. Tap gains are lognormal magnitudes
with equiprobable signs, and the log-mean decays linearly in the tap index
so that the average total tap energy is one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .config import SystemConfig
from .errors import ConfigError, ParameterError
from .waveform import Waveform, sample_index

DEFAULT_N_TAPS = 20
DEFAULT_DECAY = 0.5
DEFAULT_SIGMA2_LN = 1.0
DEFAULT_MEAN_ARRIVAL = 1.5e-9

MIN_ACCEPT_PROB = 1e-6


@dataclass(frozen=True)
class ChannelParams:
    """Statistical description of the tapped multipath channel."""

    n_taps: int = DEFAULT_N_TAPS
    decay: float = DEFAULT_DECAY
    sigma2_ln: float = DEFAULT_SIGMA2_LN
    mean_arrival: float = DEFAULT_MEAN_ARRIVAL

    def __post_init__(self) -> None:
        if self.n_taps < 1:
            raise ParameterError("n_taps must be >= 1")
        if self.decay < 0:
            raise ParameterError("decay must be non-negative")
        if self.sigma2_ln < 0:
            raise ParameterError("sigma2_ln must be non-negative")
        if not self.mean_arrival > 0:
            raise ParameterError("mean_arrival must be positive")

    @property
    def omega0(self) -> float:
        """Average energy of tap 0, normalizing total energy to one."""
        if self.decay == 0:
            return 1.0 / self.n_taps
        return np.expm1(-self.decay) / np.expm1(-self.decay * self.n_taps)

    def mean_gain_log(self, taps) -> np.ndarray:
        """Location of the log-gain normal for each tap index."""
        taps = np.asarray(taps)
        return 0.5 * (np.log(self.omega0) - self.decay * taps
                      - 2.0 * self.sigma2_ln)

    def mean_tap_energy(self, taps) -> np.ndarray:
        return self.omega0 * np.exp(-self.decay * np.asarray(taps))

    def accept_probability(self, t_f: float) -> float:
        """Chance a raw draw keeps all taps inside one frame."""
        if self.n_taps == 1:
            return 1.0
        return float(gammainc(self.n_taps - 1, t_f / self.mean_arrival))


@dataclass
class ChannelRealization:
    """One draw of tap gains and delays (seconds, non-decreasing, tap 0
    at delay zero)."""

    gains: np.ndarray
    delays: np.ndarray

    def __post_init__(self) -> None:
        self.gains = np.asarray(self.gains, dtype=float)
        self.delays = np.asarray(self.delays, dtype=float)
        if self.gains.ndim != 1 or self.gains.shape != self.delays.shape:
            raise ParameterError("gains and delays must be 1-d, equal length")
        if len(self.gains) < 1:
            raise ParameterError("need at least one tap")
        if self.delays[0] != 0.0:
            raise ParameterError("first tap must sit at delay zero")
        if np.any(np.diff(self.delays) < 0):
            raise ParameterError("delays must be non-decreasing")
        if not (np.all(np.isfinite(self.gains))
                and np.all(np.isfinite(self.delays))):
            raise ParameterError("gains and delays must be finite")

    @property
    def n_taps(self) -> int:
        return len(self.gains)

    @property
    def spread(self) -> float:
        return float(self.delays[-1])

    def total_energy(self) -> float:
        return float(np.sum(self.gains ** 2))

    def snapped(self, dt: float) -> "ChannelRealization":
        """Copy with delays moved to the nearest sample instants."""
        snapped = np.array([sample_index(d, dt) * dt for d in self.delays])
        return ChannelRealization(gains=self.gains.copy(), delays=snapped)


def sample_channels(params: ChannelParams, t_f: float, n: int,
                    rng: np.random.Generator) -> list:
    """Draw n independent realizations whose spread fits inside t_f."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    p = params.accept_probability(t_f)
    if p < MIN_ACCEPT_PROB:
        raise ConfigError(
            f"channel spread almost never fits one frame "
            f"(accept probability {p:.2e}); lower n_taps or mean_arrival")
    l_ix = np.arange(params.n_taps)
    mu = params.mean_gain_log(l_ix)
    sigma = np.sqrt(params.sigma2_ln)
    out = []
    while len(out) < n:
        want = n - len(out)
        m = int(np.ceil(want / p * 1.2)) + 16
        if params.n_taps == 1:
            delays = np.zeros((m, 1))
        else:
            gaps = rng.exponential(params.mean_arrival,
                                   size=(m, params.n_taps - 1))
            delays = np.concatenate(
                [np.zeros((m, 1)), np.cumsum(gaps, axis=1)], axis=1)
        logs = rng.normal(0.0, 1.0, size=(m, params.n_taps))
        signs = rng.integers(0, 2, size=(m, params.n_taps)) * 2 - 1
        gains = signs * np.exp(mu + sigma * logs)
        ok = np.flatnonzero(delays[:, -1] <= t_f)
        for row in ok[:want]:
            out.append(ChannelRealization(gains=gains[row].copy(),
                                          delays=delays[row].copy()))
    return out


def sample_channel(params: ChannelParams, t_f: float,
                   rng: np.random.Generator) -> ChannelRealization:
    return sample_channels(params, t_f, 1, rng)[0]


def convolve_pulse(pulse, ch: ChannelRealization) -> Waveform:
    """Received shape of one transmitted pulse through the channel.

    Tap delays are rounded to the sample grid; coinciding taps add up.
    """
    dt = pulse.dt
    idx = np.array([sample_index(d, dt) for d in ch.delays])
    train = np.zeros(idx[-1] + 1)
    np.add.at(train, idx, ch.gains)
    samples = np.convolve(pulse.samples, train)
    return Waveform(samples=samples, start=pulse.start, dt=dt)


def compose_received(cfg: SystemConfig, waves, delays_s, rng=None,
                     window=None) -> Waveform:
    """Superpose per-user received waveforms at their arrival delays and
    add white noise of variance noise_sigma2 per unit time.

    ``waves`` holds one channel-convolved transmit waveform per user;
    entry k is scaled by sqrt of user k's received energy. ``window`` is an
    optional (start_index, n_samples) pair selecting the observation span;
    by default the union of all shifted waveforms is kept.
    """
    if len(waves) != cfg.k_users or len(delays_s) != cfg.k_users:
        raise ParameterError(
            f"need {cfg.k_users} waveforms and delays, "
            f"got {len(waves)} and {len(delays_s)}")
    if delays_s[0] != 0.0:
        raise ParameterError("user 1 is the timing reference: delay 0")
    for d in delays_s:
        if not 0.0 <= d < cfg.t_s:
            raise ParameterError("user delays must lie in [0, t_s)")
    dt = waves[0].dt
    shifts = [sample_index(d, dt) for d in delays_s]
    if window is None:
        start = min(w.start + s for w, s in zip(waves, shifts))
        stop = max(w.end + s for w, s in zip(waves, shifts))
        window = (start, stop - start + 1)
    out = Waveform.zeros(window[0], window[1], dt)
    amps = np.sqrt(cfg.energies)
    for wave, shift, amp in zip(waves, shifts, amps):
        out.add(wave, shift=shift, scale=float(amp))
    if rng is not None and cfg.noise_sigma2 > 0:
        out.samples += rng.normal(
            0.0, np.sqrt(cfg.noise_sigma2 / dt), size=len(out.samples))
    return out


def save_channels(path, realizations) -> None:
    """Write realizations as CSV rows: user, tap, gain, delay_ns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user", "tap", "gain", "delay_ns"])
        for user, ch in enumerate(realizations):
            for tap in range(ch.n_taps):
                writer.writerow([user, tap, f"{ch.gains[tap]:.17e}",
                                 f"{ch.delays[tap] * 1e9:.17e}"])


def load_channels(path) -> list:
    """Read realizations written by save_channels."""
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["user", "tap", "gain", "delay_ns"]:
            raise ConfigError(f"{path}: unexpected channel CSV header")
        for user, tap, gain, delay_ns in reader:
            rows.setdefault(int(user), []).append(
                (int(tap), float(gain), float(delay_ns) * 1e-9))
    out = []
    for user in range(len(rows)):
        if user not in rows:
            raise ConfigError(f"{path}: missing rows for user {user}")
        taps = sorted(rows[user])
        if [t[0] for t in taps] != list(range(len(taps))):
            raise ConfigError(f"{path}: non-contiguous taps for user {user}")
        out.append(ChannelRealization(
            gains=np.array([t[1] for t in taps]),
            delays=np.array([t[2] for t in taps])))
    return out
