"""Figure rendering for experiment reports.

Each function takes a report produced by the harness plus a destination
path, writes a single PNG, and returns the path as a string. The Agg
backend is forced so rendering works without a display.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_ber_curve(curve, path, title: str = None) -> str:
    """Error-rate sweep: simulated points with intervals plus theory.

    Zero-error points cannot be drawn on a log axis and are omitted;
    points that stopped short of the error target are hollow.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    snr = np.asarray(curve.snr_db, dtype=float)
    sim = np.asarray(curve.sim_bep, dtype=float)
    lo = np.asarray(curve.ci_lo, dtype=float)
    hi = np.asarray(curve.ci_hi, dtype=float)
    shown = sim > 0
    solid = shown & ~curve.low_confidence
    hollow = shown & curve.low_confidence
    for mask, face, label in ((solid, "C0", "simulated"),
                              (hollow, "none", "simulated (few errors)")):
        if not mask.any():
            continue
        yerr = np.vstack([np.clip(sim[mask] - lo[mask], 0, None),
                          np.clip(hi[mask] - sim[mask], 0, None)])
        ax.errorbar(snr[mask], sim[mask], yerr=yerr, fmt="o", color="C0",
                    markerfacecolor=face, capsize=3, label=label)
    theory = np.asarray(curve.theory_mc_bep, dtype=float)
    if np.any(theory > 0):
        ax.plot(snr, np.where(theory > 0, theory, np.nan), "C1-",
                label="conditional theory (channel averaged)")
    sga = np.asarray(curve.sga_bep, dtype=float)
    if np.any(sga > 0):
        ax.plot(snr, np.where(sga > 0, sga, np.nan), "C2--",
                label="Gaussian approximation")
    ax.set_yscale("log")
    ax.set_xlabel("symbol energy to noise variance (dB)")
    ax.set_ylabel("bit error probability")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_psd(report, path, title: str = None) -> str:
    """Empirical versus analytic transmit spectrum with the energy band."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ghz = np.asarray(report.freq, dtype=float) / 1e9
    emp = np.asarray(report.empirical, dtype=float)
    ana = np.asarray(report.analytic, dtype=float)
    ax.plot(ghz, np.where(emp > 0, emp, np.nan), "C0-", lw=0.8,
            label="measured")
    ax.plot(ghz, np.where(ana > 0, ana, np.nan), "C1--", label="analytic")
    lo, hi = report.band
    ax.axvspan(lo / 1e9, hi / 1e9, color="C2", alpha=0.12,
               label="99% energy band")
    ax.set_yscale("log")
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("power spectral density (V$^2$/Hz)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    ax.set_title(title or
                 f"band error {report.rms_rel_error:.1%} "
                 f"({report.n_symbols} symbols)")
    return _save(fig, path)


def plot_ifi_study(report, path, title: str = None) -> str:
    """Per-draw spill power distributions for the two pulse sets."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    single = np.asarray(report.per_draw_single, dtype=float)
    multi = np.asarray(report.per_draw_multi, dtype=float)
    pos = (single > 0) & (multi > 0)
    logs = np.log10(single[pos])
    logm = np.log10(multi[pos])
    bins = np.linspace(min(logs.min(), logm.min()),
                       max(logs.max(), logm.max()), 60)
    ax.hist(logs, bins=bins, alpha=0.55, color="C0", label="one pulse type")
    ax.hist(logm, bins=bins, alpha=0.55, color="C1", label="two pulse types")
    ax.axvline(np.log10(report.mean_power_single), color="C0", ls="--")
    ax.axvline(np.log10(report.mean_power_multi), color="C1", ls="--")
    ax.set_xlabel("log10 spill power per symbol")
    ax.set_ylabel("channel draws")
    ax.legend()
    ax.set_title(title or
                 f"mean power ratio {report.ratio:.3f} "
                 f"over {report.n_draws} draws")
    return _save(fig, path)


def plot_gaussianity(rows, path, title: str = None) -> str:
    """Variance match and normality statistics versus pulses per type."""
    fig, axes = plt.subplots(3, 1, figsize=(6.4, 7.2), sharex=True)
    comps = sorted({r["component"] for r in rows})
    for ci, comp in enumerate(comps):
        sel = sorted((r for r in rows if r["component"] == comp),
                     key=lambda r: r["ratio"])
        ratios = [r["ratio"] for r in sel]
        style = dict(color=f"C{ci}", marker="o", label=comp)
        axes[0].plot(ratios, [r["var_ratio"] for r in sel], **style)
        axes[1].plot(ratios, [r["skew"] for r in sel], **style)
        axes[2].plot(ratios, [r["excess_kurtosis"] for r in sel], **style)
    axes[0].axhline(1.0, color="k", lw=0.8, alpha=0.5)
    axes[0].set_ylabel("empirical / closed-form variance")
    for level in (-0.1, 0.1):
        axes[1].axhline(level, color="k", lw=0.8, ls=":", alpha=0.6)
    axes[1].set_ylabel("skewness")
    for level in (-0.2, 0.2):
        axes[2].axhline(level, color="k", lw=0.8, ls=":", alpha=0.6)
    axes[2].set_ylabel("excess kurtosis")
    axes[2].set_xlabel("pulses per symbol / pulse types")
    axes[2].set_xscale("log")
    axes[2].set_xticks(sorted({r["ratio"] for r in rows}))
    axes[2].get_xaxis().set_major_formatter(plt.ScalarFormatter())
    for ax in axes:
        ax.grid(True, alpha=0.3)
    axes[0].legend()
    if title:
        axes[0].set_title(title)
    return _save(fig, path)


def plot_validation(report, path, title: str = None) -> str:
    """Agreement scatter between the table and waveform engines."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 4.4))
    ys = np.array([r["y_semi"] for r in report.rows])
    yw = np.array([r["y_waveform"] for r in report.rows])
    span = max(np.abs(ys).max(), np.abs(yw).max()) * 1.05
    ax1.plot([-span, span], [-span, span], "k-", lw=0.8, alpha=0.5)
    ax1.plot(ys, yw, "C0.", ms=4, alpha=0.6)
    ax1.set_xlabel("table-engine decision")
    ax1.set_ylabel("waveform-engine decision")
    ax1.set_aspect("equal")
    ax1.grid(True, alpha=0.3)
    gaps = np.array([r["rel_gap"] for r in report.rows])
    # zero gaps happen when both engines agree to the last bit
    floor = 1e-17
    ax2.hist(np.log10(np.maximum(gaps, floor)), bins=40, color="C0")
    ax2.set_xlabel("log10 relative gap")
    ax2.set_ylabel("trials")
    ax2.grid(True, alpha=0.3)
    fig.suptitle(title or
                 f"max gap {report.max_rel_gap:.2e} over "
                 f"{report.n_trials} trials")
    return _save(fig, path)
