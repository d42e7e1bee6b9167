"""Unit-energy pulse shapes, their spectra, and cross-correlations.

The built-in family is the modified Hermite set: an order-n probabilists'
Hermite polynomial under a Gaussian envelope,

    h_n(t) = k_n * He_n(t / tau) * exp(-t^2 / (4 tau^2)),

orthogonal across orders at zero lag for a shared width tau. Pulses are
sampled on a uniform grid, truncated where |amplitude| falls below 1e-6 of
the peak, and renormalized to unit energy on that grid.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite_e

from .errors import ParameterError
from .waveform import Waveform, cross_correlation

MAX_MHP_ORDER = 10
TRUNCATION_RATIO = 1e-6
# Orders 5 and below share one default width so that order sets compared
# against each other see identical chip occupancy.
DEFAULT_WIDTH_REFERENCE_ORDER = 5


@dataclass
class Pulse:
    """A truncated, unit-energy pulse sampled at spacing dt.

    samples[i] is the amplitude at time (start + i) * dt; all samples with
    |t| > support are identically zero (they are simply not stored).
    width_scale records the generating time-dilation parameter where one
    exists (None for imported raw samples).
    """

    samples: np.ndarray
    start: int
    dt: float
    support: float
    label: str = "pulse"
    width_scale: float | None = None

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or len(self.samples) == 0:
            raise ParameterError("pulse samples must be a non-empty 1-D array")
        if not self.dt > 0:
            raise ParameterError("dt must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ParameterError("pulse samples must be finite")
        if self.support < 0:
            raise ParameterError("support must be non-negative")

    @property
    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples) * self.dt)

    def times(self) -> np.ndarray:
        return (self.start + np.arange(len(self.samples))) * self.dt

    def as_waveform(self) -> Waveform:
        return Waveform(self.samples, self.start, self.dt)


def _hermite_profile(order: int, x: np.ndarray) -> np.ndarray:
    """He_order(x) * exp(-x^2 / 4), unnormalized."""
    coeffs = np.zeros(order + 1)
    coeffs[order] = 1.0
    return hermite_e.hermeval(x, coeffs) * np.exp(-0.25 * x * x)


def _validate_order(order: int) -> None:
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool):
        raise ParameterError("order must be an integer")
    if order < 0 or order > MAX_MHP_ORDER:
        raise ParameterError(
            f"order must lie in [0, {MAX_MHP_ORDER}], got {order}")


@functools.lru_cache(maxsize=32)
def _normalized_truncation_point(order: int) -> float:
    """Outermost |x| where the unit-width profile reaches the truncation ratio."""
    x_max = 16.0 + 2.0 * order
    x = np.arange(0.0, x_max, 5e-4)
    h = np.abs(_hermite_profile(order, x))
    threshold = TRUNCATION_RATIO * h.max()
    keep = np.nonzero(h >= threshold)[0]
    return float(x[keep[-1]])


def chip_confined_width(order: int, t_c: float, safety: float = 0.98) -> float:
    """Width scale placing the truncated support inside half a chip.

    With this width the full pulse occupies strictly less than one chip,
    so single-path frames never spill into their neighbours.
    """
    _validate_order(order)
    if not t_c > 0:
        raise ParameterError("t_c must be positive")
    return safety * (0.5 * t_c) / _normalized_truncation_point(order)


def make_mhp(order: int, width_scale: float, dt: float) -> Pulse:
    """Build the order-n modified Hermite pulse on a dt grid.

    Parameters
    ----------
    order : int
        Polynomial order, 0 through 10.
    width_scale : float
        The tau in h_n(t) = k_n He_n(t/tau) exp(-t^2/(4 tau^2)), seconds.
    dt : float
        Sample spacing, seconds.
    """
    _validate_order(order)
    if not width_scale > 0:
        raise ParameterError("width_scale must be positive")
    if not dt > 0:
        raise ParameterError("dt must be positive")
    half = int(np.ceil((16.0 + 2.0 * order) * width_scale / dt))
    idx = np.arange(-half, half + 1)
    h = _hermite_profile(order, idx * dt / width_scale)
    peak = np.abs(h).max()
    keep = np.nonzero(np.abs(h) >= TRUNCATION_RATIO * peak)[0]
    k = int(max(abs(idx[keep[0]]), abs(idx[keep[-1]])))
    sl = slice(half - k, half + k + 1)
    samples = h[sl] / np.sqrt(np.dot(h[sl], h[sl]) * dt)
    return Pulse(samples, -k, dt, support=k * dt, label=f"mhp{order}",
                 width_scale=width_scale)


def _fractional_delay(samples: np.ndarray, frac: float) -> np.ndarray:
    """Band-limited delay of a well-sampled pulse by frac in (0, 1) samples.

    Valid because the pulses carry essentially no energy near Nyquist; the
    returned array is one sample longer than the input.
    """
    n = len(samples)
    nfft = 1 << int(np.ceil(np.log2(n + 16)))
    spec = np.fft.rfft(samples, nfft)
    spec *= np.exp(-2j * np.pi * np.fft.rfftfreq(nfft) * frac)
    return np.fft.irfft(spec, nfft)[:n + 1]


def pulse_xcorr(a: Pulse, b: Pulse, lag: float) -> float:
    """phi_{ab}(lag) = integral of a(t - lag) b(t) dt.

    Off-grid lags shift ``a`` by the fractional sample spectrally before
    the aligned Riemann sum, so accuracy is resolution-limited rather than
    interpolation-limited. Lags beyond the joint support return zero.
    """
    if a.dt != b.dt:
        raise ParameterError("pulses must share a sample spacing")
    if lag < 0:
        # canonical orientation makes the swap symmetry exact
        return pulse_xcorr(b, a, -lag)
    pos = lag / a.dt
    m = int(np.floor(pos))
    frac = pos - m
    if frac == 0.0:
        ua, ustart = a.samples, a.start
    else:
        ua, ustart = _fractional_delay(a.samples, frac), a.start
    # inner product of a shifted by m samples against b
    lo = max(ustart + m, b.start)
    hi = min(ustart + m + len(ua), b.start + len(b.samples))
    if lo >= hi:
        return 0.0
    x = ua[lo - ustart - m:hi - ustart - m]
    y = b.samples[lo - b.start:hi - b.start]
    return float(np.dot(x, y) * a.dt)


def fourier_magnitude(p: Pulse, freqs: np.ndarray) -> np.ndarray:
    """|W(f)|^2 of the pulse on an arbitrary frequency grid (Hz).

    Evaluated as a direct Riemann-sum transform; the grid must stay within
    the Nyquist band |f| <= 1/(2 dt).
    """
    freqs = np.asarray(freqs, dtype=float)
    nyquist = 0.5 / p.dt
    if np.any(np.abs(freqs) > nyquist * (1 + 1e-12)):
        raise ParameterError("frequency grid exceeds the Nyquist band")
    t = p.times()
    out = np.empty(len(freqs))
    # chunked to bound the size of the exponent matrix
    step = max(1, int(4e6) // max(1, len(t)))
    for i in range(0, len(freqs), step):
        f = freqs[i:i + step]
        w = np.exp(-2j * np.pi * np.outer(f, t)) @ p.samples * p.dt
        out[i:i + step] = np.abs(w) ** 2
    return out


@dataclass
class Spectrum:
    """A non-negative spectral density sampled on an ascending grid."""

    freq: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.freq = np.asarray(self.freq, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.freq.shape != self.values.shape or self.freq.ndim != 1:
            raise ParameterError("freq and values must be matching 1-D arrays")
        if np.any(np.diff(self.freq) <= 0):
            raise ParameterError("frequency grid must be strictly ascending")
        if np.any(self.values < 0):
            raise ParameterError("spectral density must be non-negative")

    def total_power(self) -> float:
        return float(np.trapezoid(self.values, self.freq))

    def save_csv(self, path) -> None:
        header = "frequency_hz,psd"
        data = np.column_stack([self.freq, self.values])
        np.savetxt(path, data, delimiter=",", header=header, comments="",
                   fmt="%.12e")


@dataclass
class PulseSet:
    """The cyclic set of per-frame pulse types.

    ``orderings`` optionally remaps type indices per user; by default every
    user cycles through the base list in order.
    """

    pulses: tuple
    orderings: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.pulses = tuple(self.pulses)
        if len(self.pulses) < 1:
            raise ParameterError("a pulse set needs at least one pulse")
        dts = {p.dt for p in self.pulses}
        if len(dts) != 1:
            raise ParameterError("all pulses in a set must share dt")
        for p in self.pulses:
            if abs(p.energy - 1.0) > 1e-9:
                raise ParameterError(
                    f"pulse {p.label} is not unit energy ({p.energy:.12f})")
        for user, perm in self.orderings.items():
            if sorted(perm) != list(range(len(self.pulses))):
                raise ParameterError(
                    f"ordering for user {user} is not a permutation")

    @property
    def n_p(self) -> int:
        return len(self.pulses)

    @property
    def dt(self) -> float:
        return self.pulses[0].dt

    @property
    def max_support(self) -> float:
        return max(p.support for p in self.pulses)

    def pulse_index(self, user: int, n: int) -> int:
        """Index into ``pulses`` for type ``n mod n_p`` of ``user``."""
        idx = n % self.n_p
        perm = self.orderings.get(user)
        return perm[idx] if perm is not None else idx

    def pulse_for(self, user: int, n: int) -> Pulse:
        """Pulse transmitted in a frame of type ``n mod n_p`` by ``user``."""
        return self.pulses[self.pulse_index(user, n)]

    @classmethod
    def mhp(cls, orders, t_c: float, samples_per_chip: int = 64,
            width_scale: float | None = None) -> "PulseSet":
        """Modified Hermite set on a chip-divisible grid.

        The default width is shared across orders and sized so that order
        max(5, max(orders)) stays chip confined; sharing one width keeps
        cross-correlation structure comparable between order sets.
        """
        orders = list(orders)
        if len(orders) == 0:
            raise ParameterError("orders must be non-empty")
        if not isinstance(samples_per_chip, (int, np.integer)) or samples_per_chip < 2:
            raise ParameterError("samples_per_chip must be an integer >= 2")
        if width_scale is None:
            ref = max(DEFAULT_WIDTH_REFERENCE_ORDER, max(orders))
            width_scale = chip_confined_width(ref, t_c)
        dt = t_c / int(samples_per_chip)
        return cls(tuple(make_mhp(o, width_scale, dt) for o in orders))


def average_psd(pset: PulseSet, t_s: float, freqs: np.ndarray) -> Spectrum:
    """Two-sided average power spectral density of the randomized signal.

    Phi(f) = (1 / (n_p * t_s)) * sum_n |W_n(f)|^2, where t_s is the symbol
    duration. Polarity randomization removes spectral lines, so the density
    is the pulse-energy spectrum scaled by the pulse rate.
    """
    if not t_s > 0:
        raise ParameterError("t_s must be positive")
    total = np.zeros(len(np.asarray(freqs)))
    for p in pset.pulses:
        total += fourier_magnitude(p, freqs)
    return Spectrum(np.asarray(freqs, dtype=float),
                    total / (pset.n_p * t_s))


def save_pulse(path, pulse: Pulse) -> None:
    """Write a pulse as two-column text: time_seconds, amplitude."""
    np.savetxt(path, np.column_stack([pulse.times(), pulse.samples]),
               fmt="%.17e")


def load_pulse(path, label: str = "import") -> Pulse:
    """Read a two-column (time_seconds, amplitude) pulse file.

    Validates uniform sample spacing and unit energy, then renormalizes the
    residual rounding error away.
    """
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise ParameterError("pulse file must have two columns and >= 2 rows")
    t, y = data[:, 0], data[:, 1]
    steps = np.diff(t)
    dt = float(np.median(steps))
    if dt <= 0 or np.any(np.abs(steps - dt) > 1e-6 * dt):
        raise ParameterError("pulse file must be uniformly sampled")
    energy = float(np.dot(y, y) * dt)
    if abs(energy - 1.0) > 1e-6:
        raise ParameterError(f"imported pulse is not unit energy ({energy:.8f})")
    start = int(round(t[0] / dt))
    if abs(start * dt - t[0]) > 1e-6 * dt:
        raise ParameterError("pulse start time must sit on the dt grid")
    support = max(abs(t[0]), abs(t[-1]))
    return Pulse(y / np.sqrt(energy), start, dt, support, label=label)
