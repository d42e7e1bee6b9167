"""RAKE reception: combining weights, templates, and decision variables.

The receiver correlates the received waveform with a template that stacks
one combined pulse per frame, polarity-coded like the transmit side. The
same decision variable can be computed two ways: by direct waveform
correlation, or semi-analytically by summing correlation-table lookups
over every (transmitted pulse, template frame) pair. The two paths agree
to discretization error and serve as mutual cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import TrialTables
from .channel import ChannelRealization, convolve_pulse
from .config import MODE_STORED, SystemConfig
from .errors import ParameterError, UnsupportedModeError
from .pulses import PulseSet
from .signal import CodeBook
from .waveform import Waveform, sample_index

SCHEME_MRC = "mrc"
SCHEME_EGC = "egc"
SELECT_ALL = "all"
SELECT_PARTIAL = "partial"
SELECT_SELECTIVE = "selective"


@dataclass
class RakeWeights:
    """Combining coefficients over all channel taps; unused taps are 0."""

    beta: np.ndarray
    scheme: str = SCHEME_MRC
    selection: str = SELECT_ALL

    def __post_init__(self) -> None:
        self.beta = np.asarray(self.beta, dtype=float)
        if self.beta.ndim != 1 or len(self.beta) < 1:
            raise ParameterError("beta must be a non-empty 1-d array")
        if not np.all(np.isfinite(self.beta)):
            raise ParameterError("beta must be finite")

    @property
    def n_fingers(self) -> int:
        return int(np.count_nonzero(self.beta))


def combining_weights(ch: ChannelRealization, scheme: str = SCHEME_MRC,
                      selection: str = SELECT_ALL,
                      count: int = None) -> RakeWeights:
    """Weights for a RAKE variant on one channel realization.

    ``selection`` picks which taps participate: every tap, the first
    ``count`` taps in delay order, or the ``count`` strongest taps.
    ``scheme`` sets the weight on a participating tap: the tap gain
    itself, or just its sign.
    """
    if scheme not in (SCHEME_MRC, SCHEME_EGC):
        raise ParameterError(f"unknown scheme {scheme!r}")
    if selection not in (SELECT_ALL, SELECT_PARTIAL, SELECT_SELECTIVE):
        raise ParameterError(f"unknown selection {selection!r}")
    mask = np.zeros(ch.n_taps, dtype=bool)
    if selection == SELECT_ALL:
        mask[:] = True
    else:
        if count is None:
            raise ParameterError(f"{selection} selection needs a count")
        if not 1 <= count <= ch.n_taps:
            raise ParameterError(
                f"count must lie in [1, {ch.n_taps}], got {count}")
        if selection == SELECT_PARTIAL:
            mask[:count] = True
        else:
            order = np.argsort(np.abs(ch.gains), kind="stable")[::-1]
            mask[order[:count]] = True
    beta = np.where(mask, ch.gains if scheme == SCHEME_MRC
                    else np.sign(ch.gains), 0.0)
    return RakeWeights(beta=beta, scheme=scheme, selection=selection)


def build_template(cfg: SystemConfig, codes: CodeBook, weights: RakeWeights,
                   ch: ChannelRealization, pset: PulseSet,
                   bit_index: int = 0) -> Waveform:
    """Sampled correlation template for one symbol of user 0.

    Each frame contributes its polarity code times the combined shape:
    the frame's pulse type convolved with the weighted tap train of the
    receiver's own channel. No energy normalization is applied.
    """
    if cfg.mode != MODE_STORED:
        raise UnsupportedModeError(
            "templates are only defined for sr mode; tr reception uses "
            "delay-and-multiply, which is out of scope")
    if len(weights.beta) != ch.n_taps:
        raise ParameterError("weights do not match channel tap count")
    dt = cfg.dt
    if abs(pset.dt - dt) > 1e-9 * dt:
        raise ParameterError("pulse set sample step does not match config")
    fingers = ChannelRealization(gains=weights.beta, delays=ch.delays)
    combined = [convolve_pulse(pset.pulse_for(0, n).as_waveform(), fingers)
                for n in range(cfg.n_p)]
    frames = range(bit_index * cfg.n_f, (bit_index + 1) * cfg.n_f)
    shifts = [sample_index(j * cfg.t_f + int(codes.th_at(j)) * cfg.t_c, dt)
              for j in frames]
    start = min(s + combined[j % cfg.n_p].start
                for j, s in zip(frames, shifts))
    stop = max(s + combined[j % cfg.n_p].end
               for j, s in zip(frames, shifts))
    out = Waveform.zeros(start, stop - start + 1, dt)
    for j, s in zip(frames, shifts):
        out.add(combined[j % cfg.n_p], shift=s,
                scale=float(codes.d_at(j)))
    return out


def correlate_decision(received: Waveform, template: Waveform,
                       guard_samples: int = 0) -> float:
    """Decision variable: inner product of received signal and template.

    The received window must cover the template support plus the
    requested guard on each side, so no template content is silently
    clipped.
    """
    if abs(received.dt - template.dt) > 1e-9 * template.dt:
        raise ParameterError("received and template must share dt")
    if (received.start > template.start - guard_samples
            or received.end < template.end + guard_samples):
        raise ParameterError(
            "received window too small for template plus guard")
    return received.inner(template)


def detect_bit(y: float) -> int:
    """Threshold detector; the tie at exactly zero resolves to +1."""
    return 1 if y >= 0 else -1


@dataclass
class DecisionBreakdown:
    """Decision variable split into its physical components.

    The total is recomputed from the parts, so the identity
    y = desired + ifi + mai + noise holds exactly.
    """

    desired: float
    ifi: float
    mai: float
    noise: float
    y: float = field(init=False)

    def __post_init__(self) -> None:
        self.y = self.desired + self.ifi + self.mai + self.noise


def semi_analytic_decision(cfg: SystemConfig, tables: TrialTables,
                           codes: CodeBook, user_events, taus,
                           noise_value: float = 0.0,
                           symbol: int = 0) -> DecisionBreakdown:
    """Decision variable for one symbol from correlation-table lookups.

    ``user_events`` lists each user's pulse events (user 0 first),
    covering at least the symbols whose pulses can reach the template;
    ``taus`` gives each user's arrival delay (user 0 must be 0). The
    noise contribution is passed in, so the same draw can be shared with
    the waveform-domain path.

    Contributions classify by origin: user-0 pulses landing on their own
    template frame are desired signal, other user-0 pulses are
    adjacent-frame spill (ifi), and all other users' pulses are mai.
    """
    if cfg.mode != MODE_STORED:
        raise UnsupportedModeError("semi-analytic path supports sr only")
    if len(user_events) != cfg.k_users or len(taus) != cfg.k_users:
        raise ParameterError(
            f"need events and delay for each of {cfg.k_users} users")
    if taus[0] != 0.0:
        raise ParameterError("user 0 is the timing reference: delay 0")
    frames = np.arange(symbol * cfg.n_f, (symbol + 1) * cfg.n_f)
    t_frame = frames * cfg.t_f + codes.th_at(frames) * cfg.t_c
    d_frame = codes.d_at(frames).astype(float)
    desired = 0.0
    ifi = 0.0
    mai = 0.0
    for k, events in enumerate(user_events):
        if not events:
            continue
        amp = float(np.sqrt(cfg.energies[k] / cfg.n_f))
        times = np.array([e.time for e in events]) + float(taus[k])
        signs = np.array([e.sign for e in events], dtype=float)
        ev_frames = np.array([e.frame for e in events])
        ev_types = np.array([e.pulse_type for e in events])
        for n in range(cfg.n_p):
            sel = ev_types == n
            if not np.any(sel):
                continue
            for m in range(cfg.n_p):
                cols = frames % cfg.n_p == m
                lags = times[sel][:, None] - t_frame[cols][None, :]
                phi = tables.xcorr(k, n, m).at(lags)
                contrib = amp * signs[sel][:, None] * \
                    d_frame[cols][None, :] * phi
                if k == 0:
                    own = ev_frames[sel][:, None] == frames[cols][None, :]
                    desired += float(np.sum(contrib[own]))
                    ifi += float(np.sum(contrib[~own]))
                else:
                    mai += float(np.sum(contrib))
    return DecisionBreakdown(desired=desired, ifi=ifi, mai=mai,
                             noise=float(noise_value))
