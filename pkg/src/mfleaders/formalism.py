"""Structure functions, scaling functions, and Legendre-transform spectra.

Function side: S(j, p) = 2^-j sum_{|lambda| = 2^-j} d_lambda^p with the sum
restricted to nonzero leaders (the restriction is what makes negative p
meaningful); omega(p) is the least-squares slope of log2 S(j, p) against -j
over a scale window, and the spectrum estimate is the Legendre bound
D(h) = inf_{p != 0} (h p - omega(p) + d), with negative values standing for
the empty set (-inf).

Measure side: tau(q) is the slope of log sum* mu(lambda)^q against -n log b,
tau*(alpha) = inf_q (alpha q - tau(q)) bounds the measure spectrum, and
``predicted_scaling`` transports a measure's tau to the scaling function of
the wavelet series built from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ._fit import linfit_columns
from .errors import (
    DegenerateLevelError,
    DomainError,
    EmptyRangeError,
    ExtrapolationError,
)
from .leaders import LeaderPyramid
from .measures import BAdicMeasure

__all__ = [
    "StructureFunction",
    "ScalingFunction",
    "SpectrumEstimate",
    "TauFunction",
    "default_p_grid",
    "default_h_grid",
    "structure_function",
    "scaling_function",
    "legendre_spectrum",
    "measure_tau",
    "measure_legendre",
    "predicted_scaling",
    "transference_H",
]

LN2 = math.log(2.0)


def default_p_grid() -> np.ndarray:
    """81 points on [-10, 10] plus +-0.1 so the Legendre step can straddle 0
    with a small |p|."""
    return np.unique(np.concatenate([np.linspace(-10.0, 10.0, 81), [-0.1, 0.1]]))


def default_structure_window(J: int) -> tuple[int, int]:
    """Scale window for structure-function fits: [ceil(J/2), J-5] (at least 4
    scales).  The ceiling sits two levels below the pointwise default because
    the extreme-|p| sums are dominated by single leaders, whose finest-level
    values carry the largest sampling bias; that bias is amplified |p|-fold by
    the Legendre transform at the spectrum's support edges."""
    j1 = math.ceil(J / 2)
    return (j1, max(j1 + 3, J - 5))


def default_h_grid() -> np.ndarray:
    return np.linspace(0.0, 2.0, 201)


@dataclass
class StructureFunction:
    """log2 S(j, p) on a (scale, p) grid, plus nonzero-leader bookkeeping."""

    p_grid: np.ndarray
    j_values: np.ndarray
    log2_S: np.ndarray  # shape (len(j_values), len(p_grid))
    nonzero_counts: np.ndarray
    excluded_counts: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass
class ScalingFunction:
    """omega(p) with per-p fit quality and a concavity diagnostic."""

    p_grid: np.ndarray
    omega: np.ndarray
    r2: np.ndarray
    fit_range: tuple[int, int] | None
    concavity_defect: float = 0.0  # max positive discrete second difference
    meta: dict = field(default_factory=dict)

    def omega_at(self, p: float) -> float:
        return float(np.interp(p, self.p_grid, self.omega))


@dataclass
class SpectrumEstimate:
    """Sampled (h, D(h)) curve; -inf marks empty iso-Holder sets.

    ``raw`` keeps the Legendre values before the empty-set mapping (they can
    be slightly negative); inequality checks against analytic spectra should
    use ``at_raw`` so that a bound sitting at 0 within estimation noise is
    not collapsed to -inf.
    """

    h_grid: np.ndarray
    D: np.ndarray
    source: str  # "function-leaders" | "measure-tau" | "analytic"
    raw: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.raw is None:
            self.raw = self.D.copy()

    def apex(self) -> tuple[float, float]:
        i = int(np.argmax(self.D))
        return float(self.h_grid[i]), float(self.D[i])

    def at(self, h: float) -> float:
        finite = np.isfinite(self.D)
        if not finite.any():
            return -math.inf
        hs, Ds = self.h_grid[finite], self.D[finite]
        if h < hs.min() or h > hs.max():
            return -math.inf
        return float(np.interp(h, hs, Ds))

    def at_raw(self, h: float) -> float:
        if h < self.h_grid.min() or h > self.h_grid.max():
            return -math.inf
        return float(np.interp(h, self.h_grid, self.raw))


@dataclass
class TauFunction:
    """Measure-side scaling function tau(q) with fit diagnostics."""

    q_grid: np.ndarray
    tau: np.ndarray
    r2: np.ndarray
    depth_range: tuple[int, int]
    base: int = 2
    meta: dict = field(default_factory=dict)

    def tau_at(self, q: float) -> float:
        if q < self.q_grid.min() - 1e-12 or q > self.q_grid.max() + 1e-12:
            raise ExtrapolationError(
                f"q={q} outside tabulated grid [{self.q_grid.min()}, {self.q_grid.max()}]"
            )
        return float(np.interp(q, self.q_grid, self.tau))


def structure_function(
    lp: LeaderPyramid,
    p_grid: np.ndarray | None = None,
    j_range: tuple[int, int] | None = None,
) -> StructureFunction:
    """S(j, p) over the requested scale window, nonzero leaders only."""
    p_grid = default_p_grid() if p_grid is None else np.asarray(p_grid, dtype=float)
    if j_range is None:
        j_range = (1, lp.J - 1)
    j1, j2 = j_range
    if not 0 <= j1 <= j2 <= lp.J - 1:
        raise EmptyRangeError(f"scale range [{j1}, {j2}] outside pyramid levels")
    js = np.arange(j1, j2 + 1)
    log2_S = np.empty((js.size, p_grid.size))
    nonzero = np.empty(js.size, dtype=int)
    excluded = np.empty(js.size, dtype=int)
    for i, j in enumerate(js):
        d = lp.levels[j]
        pos = d[d > 0.0]
        nonzero[i] = pos.size
        excluded[i] = d.size - pos.size
        if pos.size == 0:
            raise DegenerateLevelError(f"level {j} has no nonzero leaders")
        logd = np.log(pos)
        # log2 S = -j + logsumexp(p * ln d) / ln 2
        log2_S[i] = -j + logsumexp(np.outer(p_grid, logd), axis=1) / LN2
    return StructureFunction(
        p_grid=p_grid,
        j_values=js,
        log2_S=log2_S,
        nonzero_counts=nonzero,
        excluded_counts=excluded,
        meta=dict(lp.meta),
    )


def scaling_function(
    sf: StructureFunction,
    fit_range: tuple[int, int] | None = None,
) -> ScalingFunction:
    """omega(p): per-p least-squares slope of log2 S(j, p) against -j."""
    if fit_range is None:
        fit_range = (int(sf.j_values[0]), int(sf.j_values[-1]))
    j1, j2 = fit_range
    sel = (sf.j_values >= j1) & (sf.j_values <= j2)
    if sel.sum() < 4:
        raise EmptyRangeError(f"fit range [{j1}, {j2}] has fewer than 4 scales")
    x = -sf.j_values[sel].astype(float)
    slopes, _, r2 = linfit_columns(x, sf.log2_S[sel])
    defect = _concavity_defect(sf.p_grid, slopes)
    return ScalingFunction(
        p_grid=sf.p_grid.copy(),
        omega=slopes,
        r2=r2,
        fit_range=(j1, j2),
        concavity_defect=defect,
        meta=dict(sf.meta),
    )


def _concavity_defect(grid: np.ndarray, values: np.ndarray) -> float:
    """Largest positive increase between successive chord slopes (0 when the
    sampled curve is concave); robust to nonuniform grids."""
    if values.size < 3:
        return 0.0
    slopes = np.diff(values) / np.diff(grid)
    return float(max(0.0, np.max(np.diff(slopes))))


def legendre_spectrum(
    omega: ScalingFunction,
    h_grid: np.ndarray | None = None,
    d: float = 1.0,
) -> SpectrumEstimate:
    """D(h) = min over grid p != 0 of (h p - omega(p) + d); negative -> -inf.

    The infimum over p in R* has the limit value d - omega(0) as p -> 0; when
    the grid carries p = 0 that limit joins the candidate set, which keeps the
    estimate bounded by d without ever using p = 0 itself.
    """
    h_grid = default_h_grid() if h_grid is None else np.asarray(h_grid, dtype=float)
    p = omega.p_grid
    if p.min() >= 0.0 or p.max() <= 0.0:
        raise DomainError("Legendre transform needs a p-grid straddling 0")
    nz = np.abs(p) > 1e-12
    values = np.min(
        np.outer(h_grid, p[nz]) - omega.omega[nz][None, :] + d, axis=1
    )
    zero = np.abs(p) <= 1e-12
    if zero.any():
        limit_value = d - float(omega.omega[zero][0])
        values = np.minimum(values, limit_value)
    D = np.where(values < 0.0, -math.inf, values)
    return SpectrumEstimate(
        h_grid=h_grid,
        D=D,
        source="function-leaders",
        raw=values,
        meta={"d": d, "fit_range": omega.fit_range},
    )


def measure_tau(
    m: BAdicMeasure,
    q_grid: np.ndarray | None = None,
    depth_range: tuple[int, int] | None = None,
) -> TauFunction:
    """tau(q): slope of log sum*_{|lambda|=b^-n} mu(lambda)^q vs -n log b."""
    q_grid = (
        np.unique(np.concatenate([np.linspace(-10.0, 10.0, 81), [-0.1, 0.1]]))
        if q_grid is None
        else np.asarray(q_grid, dtype=float)
    )
    if depth_range is None:
        depth_range = (max(1, m.depth // 2), m.depth)
    n1, n2 = depth_range
    if not 1 <= n1 <= n2 <= m.depth:
        raise EmptyRangeError(f"depth range [{n1}, {n2}] outside measure depth")
    ns = np.arange(n1, n2 + 1)
    logS = np.empty((ns.size, q_grid.size))
    for i, n in enumerate(ns):
        mass = m.masses(n)
        pos = mass[mass > 0.0]
        if pos.size == 0:
            raise DegenerateLevelError(f"measure level {n} has empty support")
        logS[i] = logsumexp(np.outer(q_grid, np.log(pos)), axis=1)
    x = -ns.astype(float) * math.log(m.b)
    slopes, _, r2 = linfit_columns(x, logS)
    return TauFunction(
        q_grid=q_grid,
        tau=slopes,
        r2=r2,
        depth_range=(n1, n2),
        base=m.b,
        meta={"tag": m.tag, "seed": m.seed},
    )


def measure_legendre(
    tau: TauFunction,
    alpha_grid: np.ndarray | None = None,
) -> SpectrumEstimate:
    """tau*(alpha) = min over grid q of (alpha q - tau(q)); negative -> -inf."""
    alpha_grid = (
        np.linspace(0.0, 3.0, 301) if alpha_grid is None
        else np.asarray(alpha_grid, dtype=float)
    )
    q = tau.q_grid
    if q.min() >= 0.0 or q.max() <= 0.0:
        raise DomainError("measure Legendre needs a q-grid spanning q < 0 < q")
    values = np.min(np.outer(alpha_grid, q) - tau.tau[None, :], axis=1)
    D = np.where(values < 0.0, -math.inf, values)
    return SpectrumEstimate(
        h_grid=alpha_grid,
        D=D,
        source="measure-tau",
        raw=values,
        meta={"base": tau.base, "depth_range": tau.depth_range},
    )


def predicted_scaling(
    tau: TauFunction,
    s0: float,
    p0: float,
    d: float = 1.0,
    p_grid: np.ndarray | None = None,
) -> ScalingFunction:
    """Transference prediction for the scaling function of the wavelet series
    with coefficients 2^{-j(s0 - d/p0)} mu(lambda)^{1/p0}:

        omega(p) = p (s0 - d/p0) + tau(p / p0) + d.

    The formula is the Legendre-consistent transport of tau: plugging it into
    inf_p {H p - omega(p) + d} returns tau*(alpha) at H = s0 - d/p0 + alpha
    d/p0.  Sanity anchors: omega(0) = tau(0) + d = 0 for a fully supported
    probability measure, and the Lebesgue measure (tau(q) = q - 1) yields the
    monofractal line omega(p) = p * (s0 - d/p0 + d/p0).
    """
    if p0 <= 0:
        raise DomainError(f"p0 must be positive, got {p0}")
    p_grid = default_p_grid() if p_grid is None else np.asarray(p_grid, dtype=float)
    qs = p_grid / p0
    if qs.min() < tau.q_grid.min() - 1e-12 or qs.max() > tau.q_grid.max() + 1e-12:
        raise ExtrapolationError(
            "requested p-grid maps outside the tabulated q-grid of tau"
        )
    omega = p_grid * (s0 - d / p0) + np.interp(qs, tau.q_grid, tau.tau) + d
    return ScalingFunction(
        p_grid=p_grid,
        omega=omega,
        r2=np.full(p_grid.size, np.nan),
        fit_range=None,
        concavity_defect=_concavity_defect(p_grid, omega),
        meta={"predicted_from": "measure-tau", "s0": s0, "p0": p0, "d": d},
    )


def transference_H(alpha0: float, s0: float, p0: float, d: float = 1.0) -> float:
    """Exponent image of a measure exponent under the transference series:
    H = s0 - d/p0 + alpha0 d/p0.  Requires s0 > d/p0 (uniform regularity)."""
    if s0 <= d / p0:
        raise DomainError(f"need s0 > d/p0, got s0={s0}, d/p0={d / p0}")
    if alpha0 < 0:
        raise DomainError(f"alpha0 must be nonnegative, got {alpha0}")
    return s0 - d / p0 + alpha0 * d / p0
