"""Uniformly sampled waveforms on a shared integer time grid.

Every engine-level signal lives on a grid with spacing dt; a waveform keeps
its sample array plus the integer index of its first sample, so signals of
different extents combine without resampling. Chip and frame boundaries are
exact grid multiples by construction, which keeps the waveform-domain and
correlation-domain engines numerically identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig

from .errors import ParameterError


def sample_index(t: float, dt: float) -> int:
    """Nearest grid index for time t (snap-to-grid convention)."""
    return int(round(t / dt))


@dataclass
class Waveform:
    """Samples y[i] taken at times (start + i) * dt."""

    samples: np.ndarray
    start: int
    dt: float

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1:
            raise ParameterError("waveform samples must be 1-D")
        if not self.dt > 0:
            raise ParameterError("dt must be positive")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def end(self) -> int:
        """Index one past the last sample."""
        return self.start + len(self.samples)

    def times(self) -> np.ndarray:
        return (self.start + np.arange(len(self.samples))) * self.dt

    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples) * self.dt)

    def copy(self) -> "Waveform":
        return Waveform(self.samples.copy(), self.start, self.dt)

    @classmethod
    def zeros(cls, start: int, n: int, dt: float) -> "Waveform":
        return cls(np.zeros(n), start, dt)

    def add(self, other: "Waveform", shift: int = 0, scale: float = 1.0) -> None:
        """Accumulate ``other`` (delayed by ``shift`` samples) into this buffer.

        Portions falling outside this buffer are clipped.
        """
        if other.dt != self.dt:
            raise ParameterError("sample spacings differ")
        lo = other.start + shift
        hi = lo + len(other)
        a = max(lo, self.start)
        b = min(hi, self.end)
        if a >= b:
            return
        self.samples[a - self.start:b - self.start] += \
            scale * other.samples[a - lo:b - lo]

    def inner(self, other: "Waveform") -> float:
        """Integral of the product over the common support."""
        if other.dt != self.dt:
            raise ParameterError("sample spacings differ")
        a = max(self.start, other.start)
        b = min(self.end, other.end)
        if a >= b:
            return 0.0
        x = self.samples[a - self.start:b - self.start]
        y = other.samples[a - other.start:b - other.start]
        return float(np.dot(x, y) * self.dt)


def cross_correlation(u: Waveform, v: Waveform) -> tuple[np.ndarray, int]:
    """Sampled phi_{uv}(x) = integral of u(t - x) v(t) dt on the lag grid.

    Returns ``(values, lag_start)`` where ``values[i]`` approximates
    phi((lag_start + i) * dt). The Riemann sum is spectrally accurate for
    the smooth, rapidly decaying pulses used here.
    """
    if u.dt != v.dt:
        raise ParameterError("sample spacings differ")
    conv = _sig.convolve(v.samples, u.samples[::-1], method="auto")
    lag_start = (v.start - u.start) - (len(u) - 1)
    return conv * u.dt, lag_start
