"""Wavelet leaders, local leaders, pointwise exponents, and the oscillation oracle.

The leader of a cube is the sup of |c| over the cube and all its descendants;
the local leader d_j(x0) takes that sup over the clamped 3-neighborhood of the
level-j cube containing x0.  For a uniformly Holder function the lower and
upper exponents coincide at x0 exactly when log d_j(x0) / (-j log 2) converges,
which is what the ``limit`` estimation mode targets; the ``liminf`` and
``limsup`` modes bracket the two exponents from the normalized log-leader
sequence.  The oscillation oracle measures regularity straight from finite
differences, with no wavelet in the loop, and is used to cross-check the
leader-based estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._fit import linfit
from .dyadic import cube_of_point, neighbors3
from .errors import (
    DomainError,
    EmptyRangeError,
    NormalizationError,
    ResolutionError,
)
from .wavelet import LINF, CoefficientPyramid, Signal, seam_contaminated

__all__ = [
    "LeaderPyramid",
    "LocalLeaderSeries",
    "ExponentEstimate",
    "CertificateRecord",
    "compute_leaders",
    "local_leaders",
    "default_fit_window",
    "estimate_exponent",
    "irregularity_certificate",
    "oscillation",
    "oscillation_exponents",
]


@dataclass
class LeaderPyramid:
    """d_{j,k} = sup over lambda' inside cube (j,k) of |c_{lambda'}|."""

    J: int
    levels: list[np.ndarray]
    meta: dict = field(default_factory=dict)

    def leader(self, j: int, k: int) -> float:
        return float(self.levels[j][k])


@dataclass
class LocalLeaderSeries:
    """d_j(x0) for j = 0..J-1 with per-scale seam-contamination flags."""

    x0: float
    j_values: np.ndarray
    d_values: np.ndarray
    contaminated: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.j_values = np.asarray(self.j_values, dtype=int)
        self.d_values = np.asarray(self.d_values, dtype=float)
        self.contaminated = np.asarray(self.contaminated, dtype=bool)
        drop = np.diff(self.d_values)
        if drop.size and np.max(drop) > 1e-12 * max(1.0, self.d_values.max()):
            raise AssertionError(
                "local leader sequence must be nonincreasing in j"
            )


@dataclass
class ExponentEstimate:
    """Pointwise exponent bracket from a local-leader (or oscillation) series.

    ``liminf``/``limsup`` are the min/max of L_j = log2 d_j / (-j) over the
    fit window; ``regression`` is the least-squares slope of log2 d_j against
    -j.  ``limit`` repeats the regression value when the bracket is tight
    (limsup - liminf <= coincident_gap) and is None otherwise.  All exponent
    fields are +inf when a zero leader falls inside the window (points outside
    the support of the analyzed object).
    """

    x0: float
    liminf: float
    limsup: float
    regression: float
    r2: float
    fit_range: tuple[int, int]
    mode: str = "limit"
    limit: float | None = None
    coincident_gap: float = 0.5
    meta: dict = field(default_factory=dict)

    @property
    def value(self) -> float | None:
        if self.mode == "liminf":
            return self.liminf
        if self.mode == "limsup":
            return self.limsup
        return self.limit

    @property
    def infinite(self) -> bool:
        return math.isinf(self.liminf)


def compute_leaders(pyramid: CoefficientPyramid) -> LeaderPyramid:
    """Bottom-up leader recursion d_{j,k} = max(|c_{j,k}|, children)."""
    if pyramid.tag != LINF:
        raise NormalizationError(
            f"leaders require an Linf pyramid, got tag {pyramid.tag!r}"
        )
    J = pyramid.J
    levels: list[np.ndarray] = [None] * J
    levels[J - 1] = np.abs(pyramid.levels[J - 1])
    for j in range(J - 2, -1, -1):
        child_max = levels[j + 1].reshape(-1, 2).max(axis=1)
        levels[j] = np.maximum(np.abs(pyramid.levels[j]), child_max)
    meta = dict(pyramid.meta)
    return LeaderPyramid(J=J, levels=levels, meta=meta)


def local_leaders(lp: LeaderPyramid, x0: float) -> LocalLeaderSeries:
    """d_j(x0) = max leader over the clamped 3-neighborhood of lambda_j(x0)."""
    if not 0.0 <= x0 < 1.0:
        raise DomainError(f"point {x0!r} outside [0, 1)")
    support = len(_wavelet_taps_hint(lp))
    ds = np.empty(lp.J)
    flags = np.empty(lp.J, dtype=bool)
    for j in range(lp.J):
        cube = cube_of_point(x0, j)
        ds[j] = max(lp.levels[j][c.k] for c in neighbors3(cube))
        flags[j] = seam_contaminated(x0, j, support)
    return LocalLeaderSeries(
        x0=x0,
        j_values=np.arange(lp.J),
        d_values=ds,
        contaminated=flags,
        meta=dict(lp.meta),
    )


def _wavelet_taps_hint(lp: LeaderPyramid) -> tuple:
    # support length for contamination flags; synthetic pyramids have no
    # wavelet attached and get the pointlike convention (no contamination)
    name = lp.meta.get("wavelet")
    if isinstance(name, str) and name.startswith("db"):
        return (0.0,) * (2 * int(name[2:]))
    return ()


def default_fit_window(J: int) -> tuple[int, int]:
    """[ceil(J/2), J-3]: finest two levels dropped for sampling bias, coarse
    half dropped for transient bias."""
    return (math.ceil(J / 2), J - 3)


def estimate_exponent(
    series: LocalLeaderSeries,
    fit_range: tuple[int, int] | None = None,
    mode: str = "limit",
    ignore_contamination: bool = False,
    coincident_gap: float = 0.5,
) -> ExponentEstimate:
    """Exponent estimates from the normalized log-leader sequence.

    ``fit_range`` is the inclusive scale window [j1, j2], defaulting to
    :func:`default_fit_window`.  Contaminated scales inside the window raise
    unless explicitly waived.
    """
    if mode not in ("liminf", "limsup", "limit"):
        raise ValueError(f"unknown estimation mode {mode!r}")
    J = int(series.j_values.max()) + 1
    if fit_range is None:
        fit_range = default_fit_window(J)
    j1, j2 = fit_range
    if j2 - j1 < 4:
        raise EmptyRangeError(f"fit range [{j1}, {j2}] shorter than 4 scales")
    if j1 < 1 or j2 > J - 1:
        raise EmptyRangeError(f"fit range [{j1}, {j2}] outside available scales")
    sel = (series.j_values >= j1) & (series.j_values <= j2)
    if not ignore_contamination and series.contaminated[sel].any():
        raise DomainError(
            f"scales {series.j_values[sel & series.contaminated].tolist()} near "
            f"x0={series.x0} are seam-contaminated; pass ignore_contamination=True "
            "to waive"
        )
    js = series.j_values[sel].astype(float)
    ds = series.d_values[sel]
    if np.any(ds == 0.0):
        inf = math.inf
        return ExponentEstimate(
            x0=series.x0, liminf=inf, limsup=inf, regression=inf, r2=float("nan"),
            fit_range=(j1, j2), mode=mode, limit=inf, coincident_gap=coincident_gap,
            meta={"zero_leaders": True},
        )
    L = np.log2(ds) / (-js)
    lo, hi = float(L.min()), float(L.max())
    slope, _, r2 = linfit(-js, np.log2(ds))
    limit = slope if (hi - lo) <= coincident_gap else None
    return ExponentEstimate(
        x0=series.x0, liminf=lo, limsup=hi, regression=slope, r2=r2,
        fit_range=(j1, j2), mode=mode, limit=limit, coincident_gap=coincident_gap,
    )


@dataclass
class CertificateRecord:
    """Pointwise irregularity certificates from the local-leader sequence.

    Certificate (a), sufficient for irregularity with exponent ``alpha``:
    d_j(x0) >= C 2^{-j alpha} for all scales; ``c_lower`` is the largest such
    C on the window and ``slope_lower`` the fitted log2-trend of C(j) =
    d_j 2^{j alpha} (a decaying trend means no fixed C works).

    Certificate (b), necessary under uniform Holder regularity: with
    M = floor(alpha) + 1, sup_{j'<=j} 2^{j' M} d_{j'}(x0) >= C 2^{j(M-alpha)}
    / j^beta; ``c_upper``/``slope_upper`` are the analogous quantities.

    A certificate passes when its C clears ``c_threshold`` and its trend slope
    is not decaying faster than ``-slope_tol``.
    """

    x0: float
    alpha: float
    beta: float
    c_lower: float
    slope_lower: float
    passes_lower: bool
    c_upper: float
    slope_upper: float
    passes_upper: bool
    c_lower_by_scale: np.ndarray
    c_upper_by_scale: np.ndarray
    j_values: np.ndarray
    c_threshold: float
    slope_tol: float

    def to_dict(self) -> dict:
        return {
            "x0": self.x0,
            "alpha": self.alpha,
            "beta": self.beta,
            "sufficient": {
                "C": self.c_lower,
                "log2_C_slope": self.slope_lower,
                "passes": self.passes_lower,
                "C_by_scale": self.c_lower_by_scale.tolist(),
            },
            "necessary": {
                "C": self.c_upper,
                "log2_C_slope": self.slope_upper,
                "passes": self.passes_upper,
                "C_by_scale": self.c_upper_by_scale.tolist(),
            },
            "j_values": self.j_values.tolist(),
            "c_threshold": self.c_threshold,
            "slope_tol": self.slope_tol,
        }


def irregularity_certificate(
    series: LocalLeaderSeries,
    alpha: float,
    beta_param: float = 2.0,
    fit_range: tuple[int, int] | None = None,
    c_threshold: float = 1e-8,
    slope_tol: float = 0.025,
) -> CertificateRecord:
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if beta_param <= 1:
        raise DomainError(f"beta must exceed 1, got {beta_param}")
    J = int(series.j_values.max()) + 1
    if fit_range is None:
        fit_range = (1, J - 1)
    j1, j2 = fit_range
    sel = (series.j_values >= max(j1, 1)) & (series.j_values <= j2)
    js = series.j_values[sel].astype(float)
    ds = series.d_values[sel]

    M = math.floor(alpha) + 1
    with np.errstate(divide="ignore"):
        c_low = ds * np.exp2(js * alpha)
        # running sup over j' <= j uses the full series from scale 0
        sup_term = np.maximum.accumulate(
            series.d_values * np.exp2(series.j_values * M)
        )[sel]
        c_up = sup_term * js**beta_param * np.exp2(-js * (M - alpha))

    def _summary(c):
        cmin = float(np.min(c))
        if np.all(c > 0):
            slope, _, _ = linfit(js, np.log2(c))
        else:
            slope = -math.inf
        return cmin, slope

    c_lower, slope_lower = _summary(c_low)
    c_upper, slope_upper = _summary(c_up)
    return CertificateRecord(
        x0=series.x0,
        alpha=alpha,
        beta=beta_param,
        c_lower=c_lower,
        slope_lower=slope_lower,
        passes_lower=(c_lower >= c_threshold and slope_lower >= -slope_tol),
        c_upper=c_upper,
        slope_upper=slope_upper,
        passes_upper=(c_upper >= c_threshold and slope_upper >= -slope_tol),
        c_lower_by_scale=c_low,
        c_upper_by_scale=c_up,
        j_values=js.astype(int),
        c_threshold=c_threshold,
        slope_tol=slope_tol,
    )


def _difference_sup(values: np.ndarray, max_shift: int, M: int) -> float:
    """sup over 1 <= s <= max_shift and valid x of |Delta^M_{s*step} v(x)|."""
    weights = [(-1) ** (M - m) * math.comb(M, m) for m in range(M + 1)]
    best = 0.0
    n = values.size
    for s in range(1, max_shift + 1):
        span = M * s
        if span >= n:
            break
        acc = np.zeros(n - span)
        for m, w in enumerate(weights):
            acc += w * values[m * s : n - span + m * s]
        best = max(best, float(np.max(np.abs(acc))))
    return best


def oscillation(f, x0: float, r: float, M: int = 1, resolution: float | None = None) -> float:
    """Brute-force finite-difference oscillation sup_{|h|<=r} |Delta_h^M f|
    over windows [x, x + M h] inside the ball B(x0, r).

    ``f`` is a callable evaluated on a fresh grid (default step r/64) or a
    :class:`Signal`, in which case its own grid is used (periodic extension)
    and must resolve the ball to at least r/16.
    """
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    if M < 1:
        raise DomainError(f"difference order must be >= 1, got {M}")
    if isinstance(f, Signal):
        n = f.samples.size
        step = 1.0 / n
        if step > r / 16:
            raise ResolutionError(
                f"signal step {step} too coarse for radius {r} (need <= r/16)"
            )
        i_lo = math.floor((x0 - r - f.offset * step) * n)
        i_hi = math.ceil((x0 + r - f.offset * step) * n)
        idx = np.arange(i_lo, i_hi + 1)
        values = f.samples[idx % n]
    else:
        step = resolution if resolution is not None else r / 64
        if step > r / 16:
            raise ResolutionError(
                f"resolution {step} too coarse for radius {r} (need <= r/16)"
            )
        npts = int(round(2 * r / step)) + 1
        xs = x0 - r + step * np.arange(npts)
        values = np.asarray(f(xs), dtype=float)
    max_shift = int(math.floor(r / step))
    return _difference_sup(values, max_shift, M)


def oscillation_exponents(
    f,
    x0: float,
    radii,
    M: int = 1,
    coincident_gap: float = 0.5,
) -> ExponentEstimate:
    """Wavelet-free exponent oracle from H(r) = log2(osc(r) + r^2) / log2 r."""
    radii = np.asarray(sorted(radii, reverse=True), dtype=float)
    if radii.size < 6:
        raise EmptyRangeError("need at least 6 oscillation radii")
    osc = np.array([oscillation(f, x0, r, M) for r in radii])
    x = np.log2(radii)
    y = np.log2(osc + radii**2)
    L = y / x
    slope, _, r2 = linfit(x, y)
    lo, hi = float(L.min()), float(L.max())
    limit = slope if (hi - lo) <= coincident_gap else None
    jr = (int(round(-x.max())), int(round(-x.min())))
    return ExponentEstimate(
        x0=x0, liminf=lo, limsup=hi, regression=slope, r2=r2,
        fit_range=jr, mode="limit", limit=limit, coincident_gap=coincident_gap,
        meta={"oracle": "oscillation", "M": M, "radii": radii.tolist()},
    )
