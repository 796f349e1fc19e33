"""Figure rendering for report outputs.

Every analysis/pointwise report can emit PNG figures next to its delimited
output files.  Rendering uses the Agg backend so it works headless; figures
are plain diagnostics (log-log structure fits, scaling function, spectrum,
tau), no interactive machinery.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import matplotlib.pyplot as plt

_FIGSIZE = (6.4, 4.2)


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def plot_structure(sf, path, p_subset=(-2.0, -1.0, 0.5, 1.0, 2.0)):
    """log2 S(j, p) against j for a handful of p values, with markers."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for p in p_subset:
        i = int(np.argmin(np.abs(sf.p_grid - p)))
        ax.plot(sf.j_values, sf.log2_S[:, i], "o-", ms=3.5,
                label=f"p = {sf.p_grid[i]:.2f}")
    ax.set_xlabel("scale j")
    ax.set_ylabel(r"$\log_2 S(j, p)$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_scaling(sf, path, predicted=None):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(sf.p_grid, sf.omega, "o-", ms=3, label="estimated")
    if predicted is not None:
        ax.plot(predicted.p_grid, predicted.omega, "--", label="predicted")
    ax.set_xlabel("p")
    ax.set_ylabel(r"$\omega(p)$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_spectrum(spec, path, analytic=None, label="Legendre estimate"):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    finite = np.isfinite(spec.D)
    ax.plot(spec.h_grid[finite], spec.D[finite], "o-", ms=3, label=label)
    if analytic is not None:
        hs, Ds = analytic
        ax.plot(hs, Ds, "--", label="analytic")
    ax.set_xlabel("h")
    ax.set_ylabel("D(h)")
    ax.set_ylim(-0.05, 1.15)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_tau(tau, path, analytic=None):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(tau.q_grid, tau.tau, "o-", ms=3, label="estimated")
    if analytic is not None:
        qs, ts = analytic
        ax.plot(qs, ts, "--", label="analytic")
    ax.set_xlabel("q")
    ax.set_ylabel(r"$\tau(q)$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def plot_local_leaders(series_list, path, fit_range=None):
    """log2 d_j(x0) against j for one or more points, fit window shaded."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for series in series_list:
        pos = series.d_values > 0
        ax.plot(series.j_values[pos], np.log2(series.d_values[pos]), "o-",
                ms=3, label=f"x0 = {series.x0:.4g}")
    if fit_range is not None:
        ax.axvspan(fit_range[0], fit_range[1], alpha=0.12, color="gray")
    ax.set_xlabel("scale j")
    ax.set_ylabel(r"$\log_2 d_j(x_0)$")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, path)
