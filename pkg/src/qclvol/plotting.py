"""Matplotlib figures written next to the CSV outputs.

Everything renders through the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.titlesize": 11,
    "legend.fontsize": 9,
    "lines.linewidth": 1.0,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def figure_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_suffix(".png")


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_series(r, v, path, r_label="r", v_label=r"$\sigma^2$", limit=2000) -> Path:
    n = min(len(r), limit)
    with plt.rc_context(RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 4.5), sharex=True)
        ax1.plot(np.arange(n), r[:n], color="tab:blue")
        ax1.set_ylabel(r_label)
        ax2.plot(np.arange(n), v[:n], color="tab:red")
        ax2.set_ylabel(v_label)
        ax2.set_xlabel("t")
        return _save(fig, path)


def plot_fit(teacher, fitted, path, limit=500) -> Path:
    n = min(len(teacher), limit)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(7, 3.5))
        ax.plot(np.arange(n), teacher[:n], label="original", color="black")
        ax.plot(np.arange(n), fitted[:n], label="QCL", color="tab:red", linestyle="--")
        ax.set_xlabel("t")
        ax.set_ylabel("volatility (scaled)")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_crosscorr(lags, values, path, d=2.0, n=None) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.plot(lags, values, marker=".", linestyle="none", color="tab:blue")
        ax.axhline(0.0, color="grey", linewidth=0.6)
        if n:
            band = 3.0 / np.sqrt(n)
            ax.axhspan(-band, band, color="grey", alpha=0.15, linewidth=0)
        ax.set_xlabel("j")
        ax.set_ylabel(f"$C_{{{d:g}}}(j)$")
        return _save(fig, path)


def plot_decay(lags, values, tau, amplitude, path) -> Path:
    lags = np.asarray(lags)
    values = np.asarray(values)
    pos = (lags >= 1) & (values < 0)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.semilogy(lags[pos], -values[pos], marker="o", markersize=3, linestyle="none")
        if np.isfinite(tau):
            j = np.linspace(1, lags[pos].max() if pos.any() else 1, 200)
            ax.semilogy(j, amplitude * np.exp(-j / tau), color="tab:red", label=rf"$\tau$ = {tau:.1f}")
            ax.legend(frameon=False)
        ax.set_xlabel("j")
        ax.set_ylabel(r"$-C(j)$")
        return _save(fig, path)


def plot_acf(lags, acf, path) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar(lags, acf, width=0.6, color="tab:blue")
        ax.axhline(0.0, color="grey", linewidth=0.6)
        ax.set_xlabel("lag")
        ax.set_ylabel("ACF")
        return _save(fig, path)


def plot_mfdfa(qs, hq, spec_qs, alpha, f_alpha, path) -> Path:
    with plt.rc_context(RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
        ax1.plot(qs, hq, marker="o", markersize=3)
        ax1.set_xlabel("q")
        ax1.set_ylabel("h(q)")
        ax2.plot(alpha, f_alpha, marker="o", markersize=3)
        ax2.set_xlabel(r"$\alpha$")
        ax2.set_ylabel(r"$f(\alpha)$")
        return _save(fig, path)


def plot_rolling(starts, h2, path) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(7, 3.5))
        ax.plot(starts, h2, color="tab:blue")
        ax.axhline(0.5, color="grey", linestyle=":", linewidth=0.8)
        ax.axhline(float(np.mean(h2)), color="tab:red", linewidth=0.8, label=f"mean = {np.mean(h2):.3f}")
        ax.set_xlabel("window start")
        ax.set_ylabel("h(2)")
        ax.legend(frameon=False)
        return _save(fig, path)
