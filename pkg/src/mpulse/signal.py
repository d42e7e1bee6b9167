"""Transmit-side signal model: hopping codes, pulse schedules, waveforms.

A symbol occupies n_f frames of n_c chips each. Frame j carries one pulse of
type ``j mod n_p`` at chip offset ``c_j``, with polarity ``d_j``. In "sr"
mode every frame carries the data bit directly. In "tr" mode frames come in
reference/data pairs: the two frames of a pair reuse the same hopping and
polarity codes, the reference pulse carries bit ``b1`` and the data pulse,
``reference_separation`` seconds later, carries ``b2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import MODE_STORED, MODE_TRANSMITTED, SystemConfig
from .errors import ParameterError
from .pulses import PulseSet
from .waveform import Waveform, sample_index


@dataclass
class CodeBook:
    """Per-user hopping and polarity codes over a contiguous frame range."""

    th: np.ndarray
    polarity: np.ndarray
    first_frame: int = 0

    def __post_init__(self) -> None:
        self.th = np.asarray(self.th, dtype=np.int64)
        self.polarity = np.asarray(self.polarity, dtype=np.int64)
        if self.th.ndim != 1 or self.polarity.shape != self.th.shape:
            raise ParameterError("th and polarity must be 1-d, equal length")
        if not np.all(np.abs(self.polarity) == 1):
            raise ParameterError("polarity codes must be +1 or -1")
        if np.any(self.th < 0):
            raise ParameterError("hopping codes must be non-negative")

    @property
    def n_frames(self) -> int:
        return len(self.th)

    def _index(self, frame):
        # plain-int fast path: these lookups sit inside per-frame loops
        if isinstance(frame, (int, np.integer)):
            i = int(frame) - self.first_frame
            if 0 <= i < self.n_frames:
                return i
        else:
            idx = np.asarray(frame) - self.first_frame
            if idx.size and 0 <= idx.min() and idx.max() < self.n_frames:
                return idx
            if not idx.size:
                return idx
        raise ParameterError(
            f"frame {frame} outside code range "
            f"[{self.first_frame}, {self.first_frame + self.n_frames})")

    def th_at(self, frame):
        return self.th[self._index(frame)]

    def d_at(self, frame):
        return self.polarity[self._index(frame)]


def gen_codes(cfg: SystemConfig, rng: np.random.Generator, n_frames: int,
              first_frame: int = 0) -> CodeBook:
    """Draw hopping and polarity codes for a contiguous frame range.

    Hopping codes are uniform on {0, ..., th_alphabet-1}; polarity codes are
    equiprobable +/-1. In "tr" mode the range must align to whole pair
    blocks so the two frames of each pair can share codes.
    """
    if n_frames < 1:
        raise ParameterError("n_frames must be >= 1")
    if cfg.mode == MODE_TRANSMITTED:
        block = 2 * cfg.n_p
        if first_frame % block != 0 or n_frames % block != 0:
            raise ParameterError(
                "tr codes must cover whole reference/data pair blocks")
        half = n_frames // 2
        th = np.empty(n_frames, dtype=np.int64)
        d = np.empty(n_frames, dtype=np.int64)
        th_half = rng.integers(0, cfg.th_alphabet, size=half)
        d_half = rng.integers(0, 2, size=half) * 2 - 1
        th2 = th.reshape(-1, 2, cfg.n_p)
        d2 = d.reshape(-1, 2, cfg.n_p)
        th2[:, 0, :] = th_half.reshape(-1, cfg.n_p)
        th2[:, 1, :] = th2[:, 0, :]
        d2[:, 0, :] = d_half.reshape(-1, cfg.n_p)
        d2[:, 1, :] = d2[:, 0, :]
        return CodeBook(th=th, polarity=d, first_frame=first_frame)
    th = rng.integers(0, cfg.th_alphabet, size=n_frames)
    d = rng.integers(0, 2, size=n_frames) * 2 - 1
    return CodeBook(th=th, polarity=d, first_frame=first_frame)


@dataclass(frozen=True)
class PulseEvent:
    """One transmitted pulse: where, which type, with what sign."""

    time: float
    pulse_type: int
    sign: int
    user: int
    frame: int


def _check_bits(bits: np.ndarray, what: str) -> None:
    if not np.all(np.abs(bits) == 1):
        raise ParameterError(f"{what} must be +1 or -1")


def schedule_symbol(cfg: SystemConfig, bits, codes: CodeBook,
                    symbol: int = 0, user: int = 0) -> list:
    """Expand one symbol into its n_f pulse events, sorted by time.

    ``bits`` is a single +/-1 value in "sr" mode. In "tr" mode it is a
    ``(b1, b2)`` pair, each entry either a scalar or an array with one value
    per reference/data pair in the symbol.
    """
    frame0 = symbol * cfg.n_f
    events = []
    if cfg.mode == MODE_STORED:
        b = np.asarray(bits)
        if b.size != 1:
            raise ParameterError("sr mode carries one bit per symbol")
        b = int(b.reshape(()))
        _check_bits(np.asarray(b), "bit")
        frames = np.arange(frame0, frame0 + cfg.n_f)
        th = codes.th_at(frames)
        d = codes.d_at(frames)
        for i, j in enumerate(frames):
            events.append(PulseEvent(
                time=j * cfg.t_f + int(th[i]) * cfg.t_c,
                pulse_type=int(j) % cfg.n_p,
                sign=b * int(d[i]),
                user=user,
                frame=int(j),
            ))
        events.sort(key=lambda e: (e.time, e.pulse_type))
        return events

    n_pairs = cfg.n_f // (2 * cfg.n_p)
    try:
        b1_raw, b2_raw = bits
    except (TypeError, ValueError) as exc:
        raise ParameterError("tr mode needs a (b1, b2) bit pair") from exc
    b1 = np.broadcast_to(np.asarray(b1_raw, dtype=np.int64).reshape(-1),
                         (n_pairs,)) if np.asarray(b1_raw).size == 1 \
        else np.asarray(b1_raw, dtype=np.int64)
    b2 = np.broadcast_to(np.asarray(b2_raw, dtype=np.int64).reshape(-1),
                         (n_pairs,)) if np.asarray(b2_raw).size == 1 \
        else np.asarray(b2_raw, dtype=np.int64)
    if b1.shape != (n_pairs,) or b2.shape != (n_pairs,):
        raise ParameterError(f"tr bits must broadcast to {n_pairs} pairs")
    _check_bits(b1, "b1")
    _check_bits(b2, "b2")
    t_n = cfg.reference_separation
    for p in range(n_pairs):
        for n in range(cfg.n_p):
            f_ref = frame0 + 2 * p * cfg.n_p + n
            f_dat = f_ref + cfg.n_p
            base = f_ref * cfg.t_f
            events.append(PulseEvent(
                time=base + int(codes.th_at(f_ref)) * cfg.t_c,
                pulse_type=n,
                sign=int(b1[p]) * int(codes.d_at(f_ref)),
                user=user,
                frame=f_ref,
            ))
            events.append(PulseEvent(
                time=base + t_n + int(codes.th_at(f_dat)) * cfg.t_c,
                pulse_type=n,
                sign=int(b2[p]) * int(codes.d_at(f_dat)),
                user=user,
                frame=f_dat,
            ))
    events.sort(key=lambda e: (e.time, e.pulse_type))
    return events


def synthesize_waveform(cfg: SystemConfig, events, pset: PulseSet,
                        pad: float = None) -> Waveform:
    """Render pulse events to a sampled waveform at unit symbol energy.

    Each pulse is scaled by 1/sqrt(n_f) so one symbol's n_f pulses carry
    unit energy in total. ``pad`` seconds of silence (default one frame)
    are kept on each side.
    """
    if not events:
        raise ParameterError("no events to synthesize")
    dt = cfg.dt
    if abs(pset.dt - dt) > 1e-9 * dt:
        raise ParameterError("pulse set sample step does not match config")
    if pad is None:
        pad = cfg.t_f
    t_lo = min(e.time for e in events)
    t_hi = max(e.time for e in events)
    lead = max(p.support for p in pset.pulses) + pad
    start = sample_index(t_lo - lead, dt)
    stop = sample_index(t_hi + lead, dt)
    wave = Waveform.zeros(start, stop - start + 1, dt)
    amp = 1.0 / np.sqrt(cfg.n_f)
    for ev in events:
        pulse = pset.pulse_for(ev.user, ev.pulse_type)
        wave.add(pulse.as_waveform(), shift=sample_index(ev.time, dt),
                 scale=ev.sign * amp)
    return wave
