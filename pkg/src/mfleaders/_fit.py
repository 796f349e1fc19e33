"""Least-squares helpers shared by the exponent and scaling estimators."""

from __future__ import annotations

import numpy as np


def linfit(x, y):
    """Ordinary least-squares line fit; returns (slope, intercept, r2).

    R^2 is defined as 1 - SS_res/SS_tot, with the convention that exactly
    collinear data (including constant y) reports 1.0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xbar = x.mean()
    ybar = y.mean()
    sxx = np.sum((x - xbar) ** 2)
    if sxx == 0.0:
        raise ValueError("degenerate fit: all abscissae equal")
    slope = np.sum((x - xbar) * (y - ybar)) / sxx
    intercept = ybar - slope * xbar
    ss_res = np.sum((y - slope * x - intercept) ** 2)
    ss_tot = np.sum((y - ybar) ** 2)
    if ss_tot <= 0.0:
        r2 = 1.0
    else:
        r2 = max(0.0, 1.0 - ss_res / ss_tot)
    return float(slope), float(intercept), float(r2)


def linfit_columns(x, Y):
    """Column-wise least squares: fit Y[:, i] against x for every i.

    Returns (slopes, intercepts, r2s) as 1-D arrays of length Y.shape[1].
    """
    x = np.asarray(x, dtype=float)
    Y = np.asarray(Y, dtype=float)
    xbar = x.mean()
    dx = x - xbar
    sxx = np.sum(dx**2)
    if sxx == 0.0:
        raise ValueError("degenerate fit: all abscissae equal")
    ybar = Y.mean(axis=0)
    dY = Y - ybar
    slopes = dx @ dY / sxx
    intercepts = ybar - slopes * xbar
    resid = dY - np.outer(dx, slopes)
    ss_res = np.sum(resid**2, axis=0)
    ss_tot = np.sum(dY**2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(ss_tot > 0.0, 1.0 - ss_res / ss_tot, 1.0)
    return slopes, intercepts, np.clip(r2, 0.0, 1.0)
