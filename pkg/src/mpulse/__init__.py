"""Multi-pulse UWB impulse-radio link simulator and analysis engine.

The package splits into a waveform layer (pulses, signal construction,
channels, RAKE correlation) and an analysis layer (correlation tables,
closed-form interference statistics, error probabilities). The harness
module drives both at experiment scale and cross-validates them; the
``mpulse`` console script fronts the harness.
"""

from .analysis import (BepResult, CorrelationTable, InterferenceStats,
                       TableBuilder, TrialTables, bep_async_mc,
                       bep_async_sga, bep_conditional, bep_single_pulse,
                       bep_single_pulse_async, bep_sync,
                       conditional_mai_matrix, ifi_variance,
                       interference_stats, mai_variance, noise_variance,
                       q_function, total_ifi_variance)
from .channel import (ChannelParams, ChannelRealization, compose_received,
                      convolve_pulse, sample_channels)
from .config import SystemConfig, load_config, save_config
from .errors import ConfigError, ParameterError, UnsupportedModeError
from .harness import (BepCurve, ExperimentSpec, IfiStudyReport, PsdReport,
                      ValidationReport, run_ber_sweep, run_gaussianity_check,
                      run_ifi_study, run_psd_experiment, run_validate,
                      wilson_interval, write_results)
from .pulses import (Pulse, PulseSet, Spectrum, average_psd,
                     chip_confined_width, fourier_magnitude, load_pulse,
                     make_mhp, pulse_xcorr, save_pulse)
from .rake import (DecisionBreakdown, RakeWeights, build_template,
                   combining_weights, correlate_decision, detect_bit,
                   semi_analytic_decision)
from .signal import CodeBook, PulseEvent, gen_codes, schedule_symbol, \
    synthesize_waveform
from .waveform import Waveform, cross_correlation

__version__ = "0.1.0"

__all__ = [
    "BepCurve", "BepResult", "ChannelParams", "ChannelRealization",
    "CodeBook", "ConfigError", "CorrelationTable", "DecisionBreakdown",
    "ExperimentSpec", "IfiStudyReport", "InterferenceStats",
    "ParameterError", "PsdReport", "Pulse", "PulseEvent", "PulseSet",
    "RakeWeights", "Spectrum", "SystemConfig", "TableBuilder",
    "TrialTables", "UnsupportedModeError", "ValidationReport", "Waveform",
    "average_psd", "bep_async_mc", "bep_async_sga", "bep_conditional",
    "bep_single_pulse", "bep_single_pulse_async", "bep_sync",
    "build_template", "chip_confined_width", "combining_weights",
    "compose_received", "conditional_mai_matrix", "convolve_pulse",
    "correlate_decision", "cross_correlation", "detect_bit",
    "fourier_magnitude", "gen_codes", "ifi_variance", "interference_stats",
    "load_config", "load_pulse", "mai_variance", "make_mhp",
    "noise_variance", "pulse_xcorr", "q_function", "run_ber_sweep",
    "run_gaussianity_check", "run_ifi_study", "run_psd_experiment",
    "run_validate", "sample_channels", "save_config", "save_pulse",
    "schedule_symbol", "semi_analytic_decision", "synthesize_waveform",
    "total_ifi_variance", "wilson_interval", "write_results",
]
