"""Reference constructions with known pointwise exponents and spectra.

Each generator returns its object (a :class:`~mfleaders.wavelet.Signal` or a
:class:`~mfleaders.wavelet.CoefficientPyramid`) together with a
:class:`GroundTruth` packaging the known lower/upper exponent functions and,
when available, the analytic spectrum, so verification code can be generic
over constructions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import rho_phi
from .errors import DomainError, ProfileValidationError
from .formalism import transference_H
from .measures import BAdicMeasure
from .wavelet import LINF, CoefficientPyramid, Signal, WaveletSpec

__all__ = [
    "HolderProfile",
    "GroundTruth",
    "sawtooth",
    "weierstrass",
    "prescribed_series",
    "two_exponent_series",
    "davenport",
    "davenport_value",
    "transference_series",
]


@dataclass(frozen=True)
class HolderProfile:
    """Target exponent profile t -> H(t) on [0, 1].

    kinds: constant(c) | affine(c0, c1) | sinusoid(base, amp[, freq])
    | piecewise-linear(ts, vs) | table(ts, vs)
    """

    kind: str
    params: tuple

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            (c,) = self.params
            return np.full_like(t, c)
        if self.kind == "affine":
            c0, c1 = self.params
            return c0 + c1 * t
        if self.kind == "sinusoid":
            base, amp, *rest = self.params
            freq = rest[0] if rest else 1.0
            return base + amp * np.sin(2.0 * math.pi * freq * t)
        if self.kind in ("piecewise-linear", "table"):
            ts, vs = self.params
            return np.interp(t, ts, vs)
        raise ProfileValidationError(f"unknown profile kind {self.kind!r}")

    def sample(self, n: int = 4097) -> np.ndarray:
        return self(np.linspace(0.0, 1.0, n))

    @property
    def bounds(self) -> tuple[float, float]:
        v = self.sample()
        return float(v.min()), float(v.max())

    @property
    def lipschitz(self) -> float:
        v = self.sample()
        return float(np.max(np.abs(np.diff(v))) * (v.size - 1))

    def validate(self, lo: float = 0.0, hi: float = 1.0,
                 strict_hi: bool = True) -> None:
        a, b = self.bounds
        bad_hi = b >= hi if strict_hi else b > hi
        if a <= lo or bad_hi:
            raise ProfileValidationError(
                f"profile range [{a:.4f}, {b:.4f}] must lie in "
                f"({lo}, {hi}{')' if strict_hi else ']'}"
            )


def constant_profile(c: float) -> HolderProfile:
    return HolderProfile("constant", (c,))


@dataclass
class GroundTruth:
    """Known regularity of a generated object.

    ``lower``/``upper`` map t to the lower/upper exponents; ``spectrum`` maps
    h to the known spectrum value (or is None when unknown).  ``spectrum_kind``
    says which spectrum: "lower", "upper", or "both" when they coincide.
    """

    description: str
    lower: object
    upper: object
    spectrum: object = None
    spectrum_kind: str = "both"
    spectrum_support: tuple[float, float] | None = None
    extra: dict = field(default_factory=dict)

    def check_order(self, ts) -> bool:
        lo = np.asarray([self.lower(t) for t in ts], dtype=float)
        hi = np.asarray([self.upper(t) for t in ts], dtype=float)
        return bool(np.all(lo <= hi + 1e-12))


def sawtooth(x):
    """<x> = x - [x] - 1/2, in [-1/2, 1/2)."""
    x = np.asarray(x, dtype=float)
    out = x - np.floor(x) - 0.5
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Weierstrass-type series


def weierstrass(
    profile: HolderProfile,
    lam: int = 2,
    J: int = 14,
    Jmax: int | None = None,
) -> tuple[Signal, GroundTruth]:
    """Samples of sum_{j<=Jmax} lam^{-j H(t)} sin(2 pi lam^j t) on the 2^J grid.

    Requires an integer lam >= 2 and a Lipschitz profile with sup H < 1; the
    truncation Jmax defaults to the smallest depth that brings the geometric
    tail bound lam^{-Jmax a} / (1 - lam^{-a}) (a = min H) below 1e-10.
    """
    if lam < 2 or int(lam) != lam:
        raise DomainError(f"lam must be an integer >= 2, got {lam}")
    profile.validate(0.0, 1.0, strict_hi=True)
    a, _ = profile.bounds
    min_terms = math.ceil(J * math.log(2) / math.log(lam)) + 8
    if Jmax is None:
        tail_terms = math.ceil(
            (10 * math.log(10) - math.log(1 - lam ** (-a))) / (a * math.log(lam))
        )
        Jmax = max(min_terms, tail_terms + 1)
    elif Jmax < min_terms:
        raise DomainError(f"Jmax must be at least {min_terms}, got {Jmax}")

    n = 1 << J
    H = profile(np.arange(n) / n)
    # lam^j * i / 2^J mod 1 computed exactly: m_j = (lam^j * i) mod 2^J stays
    # below 2^J so the int64 recursion never overflows for lam * 2^J < 2^63
    m = np.arange(n, dtype=np.int64)
    w = np.zeros(n)
    loglam = math.log(lam)
    for j in range(Jmax + 1):
        w += np.exp(-j * H * loglam) * np.sin((2.0 * math.pi / n) * m)
        m = (lam * m) % n
    tail = lam ** (-(Jmax + 1) * a) / (1.0 - lam ** (-a))
    sig = Signal(
        samples=w,
        offset=0.0,
        meta={"construction": "weierstrass", "lam": lam, "Jmax": Jmax,
              "tail_bound": tail, "profile": (profile.kind, profile.params)},
    )
    gt = GroundTruth(
        description=f"Weierstrass-type series, lam={lam}, H {profile.kind}",
        lower=lambda t: float(profile(t)),
        upper=lambda t: float(profile(t)),
        spectrum=None,
        extra={"pointwise": "strong: lower == upper == H(t)"},
    )
    return sig, gt


# ---------------------------------------------------------------------------
# Prescribed-exponent wavelet series


def _log_floor(j: int) -> float:
    """1 / log2(j), the coarse-scale coefficient floor; +inf for j <= 1."""
    if j <= 1:
        return math.inf
    return 1.0 / math.log2(j)


def prescribed_series(
    profile: HolderProfile,
    wavelet: WaveletSpec | None = None,
    J: int = 14,
) -> tuple[CoefficientPyramid, GroundTruth]:
    """Pyramid with c_{j,k} = 2^{-j max(1/log2 j, H(k 2^-j))}.

    The log floor only bites at coarse scales (for H >= 1/log2 j the
    coefficients are exactly 2^{-j H}); levels 0 and 1 are zero since the
    floor is infinite there.  Both pointwise exponents equal H everywhere.
    """
    profile.validate(0.0, 1.0, strict_hi=True)
    levels = []
    for j in range(J):
        if j <= 1:
            levels.append(np.zeros(1 << j))
            continue
        k = np.arange(1 << j)
        H = np.maximum(_log_floor(j), profile(k / (1 << j)))
        levels.append(np.exp2(-j * H))
    pyr = CoefficientPyramid(
        J=J, tag=LINF, levels=levels, scaling=np.zeros(1),
        meta={
            "construction": "prescribed",
            "profile": (profile.kind, profile.params),
            "wavelet": wavelet.name if wavelet is not None else None,
        },
    )
    gt = GroundTruth(
        description=f"prescribed-exponent series, H {profile.kind}",
        lower=lambda t: float(profile(t)),
        upper=lambda t: float(profile(t)),
        spectrum=None,
        extra={"pointwise": "strong: lower == upper == H(t)"},
    )
    return pyr, gt


# ---------------------------------------------------------------------------
# Two-exponent wavelet series


def _mollify(values: np.ndarray, lipschitz_cap: float,
             current_lip: float) -> np.ndarray:
    """Edge-clamped moving average so the discrete Lipschitz constant is
    capped: a box of width w bounds the slope by 2 sup|H| / w."""
    if current_lip <= lipschitz_cap or values.size < 3:
        return values
    width = 2.0 * float(np.max(np.abs(values))) / lipschitz_cap
    half = max(1, int(0.5 * width * values.size))
    kernel = np.ones(2 * half + 1) / (2 * half + 1)
    padded = np.concatenate(
        [np.full(half, values[0]), values, np.full(half, values[-1])]
    )
    return np.convolve(padded, kernel, mode="valid")


def _block_index(j: int, start: int, ratio: float) -> int:
    """Index of the geometric alternation block containing scale j.

    Blocks are [s_l, s_{l+1}) with s_l = ceil(start * ratio^l); scales below
    the first boundary belong to block 0.
    """
    if j < start:
        return 0
    l = 0
    while math.ceil(start * ratio ** (l + 1)) <= j:
        l += 1
    return l


def two_exponent_series(
    profile_lo: HolderProfile,
    profile_hi: HolderProfile,
    wavelet: WaveletSpec | None = None,
    J: int = 14,
    block_ratio: float = 2.5,
    block_start: int = 2,
) -> tuple[CoefficientPyramid, GroundTruth]:
    """Pyramid whose lower/upper exponents are the two profiles.

    Scales alternate between the profiles over geometrically growing blocks
    (block l covers [ceil(start r^l), ceil(start r^{l+1})); even blocks take
    the low profile, odd blocks the high one).  The geometric growth is what
    lets the high exponent survive in the leaders: at the start of a high
    block the sup over finer scales is still governed by the block itself,
    because the next low block is a factor ``block_ratio`` deeper.  A strict
    per-level alternation would be flattened to the low exponent by the
    leader sup.  Each level's profile is mollified so its Lipschitz constant
    stays below j.
    """
    for prof in (profile_lo, profile_hi):
        prof.validate(0.0, 1.0, strict_hi=True)
    grid = np.linspace(0.0, 1.0, 4097)
    lo_v, hi_v = profile_lo(grid), profile_hi(grid)
    if np.any(lo_v > hi_v + 1e-12):
        raise ProfileValidationError(
            "low profile exceeds high profile somewhere on [0, 1]"
        )
    if block_ratio <= 7.0 / 3.0:
        raise DomainError(
            "block_ratio must exceed 7/3 so high-block starts are not "
            "shadowed by the next low block"
        )
    levels = []
    for j in range(J):
        prof = profile_lo if _block_index(j, block_start, block_ratio) % 2 == 0 else profile_hi
        k = np.arange(1 << j)
        vals = prof(k / (1 << j))
        vals = _mollify(vals, float(j) if j > 0 else math.inf, prof.lipschitz)
        levels.append(np.exp2(-j * vals))
    pyr = CoefficientPyramid(
        J=J, tag=LINF, levels=levels, scaling=np.zeros(1),
        meta={
            "construction": "two-exponent",
            "profiles": [
                (profile_lo.kind, profile_lo.params),
                (profile_hi.kind, profile_hi.params),
            ],
            "block_ratio": block_ratio,
            "block_start": block_start,
            "wavelet": wavelet.name if wavelet is not None else None,
        },
    )
    gt = GroundTruth(
        description="two-exponent series",
        lower=lambda t: float(profile_lo(t)),
        upper=lambda t: float(profile_hi(t)),
        spectrum=None,
        extra={"pointwise": "lower == H_lo(t), upper == H_hi(t)"},
    )
    return pyr, gt


# ---------------------------------------------------------------------------
# Davenport series


def davenport_value(x, beta: float, terms: int = 60):
    """Pointwise evaluation of sum_l <2^l x> / 2^{l beta}."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for l in range(terms + 1):
        acc += sawtooth(np.ldexp(x, l)) * 2.0 ** (-l * beta)
    return float(acc) if acc.ndim == 0 else acc


def davenport(
    beta: float,
    J: int = 14,
    L: int | None = None,
) -> tuple[Signal, GroundTruth]:
    """Davenport series f_beta sampled at half-step offsets on the 2^J grid.

    The half-step offset keeps samples away from the jump locations (dyadic
    rationals), where one-sided values are convention-dependent; the jumps
    themselves remain visible to leaders at all coarser scales.  Ground truth:
    lower exponent beta / phi(x), lower spectrum h / beta on [0, beta], upper
    exponent beta off the dyadics and 0 on them.
    """
    if beta <= 1.0:
        raise DomainError(f"beta must exceed 1, got {beta}")
    min_L = math.ceil(J + 40.0 / beta)
    if L is None:
        L = min_L
    elif L < min_L:
        raise DomainError(f"need L >= {min_L} for a negligible tail, got {L}")
    n = 1 << J
    # frac(2^l (i + 1/2) / 2^J) = ((2^l (2 i + 1)) mod 2^{J+1}) / 2^{J+1},
    # exact in int64 while 2^{J+2} < 2^63
    m = (2 * np.arange(n, dtype=np.int64) + 1) % (2 << J)
    denom = float(2 << J)
    samples = np.zeros(n)
    for l in range(L + 1):
        samples += (m / denom - 0.5) * 2.0 ** (-l * beta)
        m = (2 * m) % (2 << J)
    sig = Signal(
        samples=samples, offset=0.5,
        meta={"construction": "davenport", "beta": beta, "terms": L},
    )

    def lower(t, _beta=beta):
        rate = rho_phi(Fraction(t).limit_denominator(10**12), N=512)
        return 0.0 if math.isinf(rate.phi) else _beta / rate.phi

    def upper(t, _beta=beta):
        frac = Fraction(t).limit_denominator(10**12)
        den = frac.denominator
        return 0.0 if den & (den - 1) == 0 else _beta

    def spectrum(h, _beta=beta):
        return h / _beta if 0.0 <= h <= _beta else -math.inf

    def jump(level: int, _beta=beta) -> float:
        """Jump amplitude at an odd-numerator dyadic k / 2^level."""
        return 2.0 ** (-level * _beta) / (1.0 - 2.0 ** (-_beta))

    gt = GroundTruth(
        description=f"Davenport series, beta={beta}",
        lower=lower,
        upper=upper,
        spectrum=spectrum,
        spectrum_kind="lower",
        spectrum_support=(0.0, beta),
        extra={
            "upper_spectrum_points": {beta: 1.0, 0.0: 0.0},
            "jump": jump,
            "beta": beta,
        },
    )
    return sig, gt


# ---------------------------------------------------------------------------
# Transference series from a b-adic measure


def transference_series(
    m: BAdicMeasure,
    s0: float,
    p0: float,
    wavelet: WaveletSpec | None = None,
    J: int = 14,
) -> tuple[CoefficientPyramid, GroundTruth]:
    """Pyramid with c_{j,k} = 2^{-j(s0 - 1/p0)} mu(lambda_{j,k})^{1/p0}.

    Requires a base-2 measure materialized to depth >= J - 1 and s0 > 1/p0.
    The measure's multifractality transports to the function side: the
    spectrum at H = s0 - 1/p0 + alpha/p0 equals the measure spectrum at
    alpha.  The analytic spectrum callable uses the closed-form tau when the
    measure is multinomial.
    """
    if m.b != 2:
        raise DomainError(f"transference series needs a dyadic measure, got b={m.b}")
    H_check = transference_H(0.0, s0, p0)  # validates s0 > 1/p0
    del H_check
    if m.depth < J - 1:
        raise DomainError(f"measure depth {m.depth} < J - 1 = {J - 1}")
    levels = [
        np.exp2(-j * (s0 - 1.0 / p0)) * m.masses(j) ** (1.0 / p0) for j in range(J)
    ]
    pyr = CoefficientPyramid(
        J=J, tag=LINF, levels=levels, scaling=np.zeros(1),
        meta={
            "construction": "transference",
            "s0": s0, "p0": p0,
            "measure": {"tag": m.tag, "seed": m.seed, "meta": dict(m.meta)},
        },
    )

    spectrum = None
    support = None
    extra = {"s0": s0, "p0": p0}
    if m.tag == "multinomial":
        weights = np.asarray(m.meta["weights"], dtype=float)

        def tau_analytic(q, _w=weights):
            q = np.asarray(q, dtype=float)
            return -np.log2(np.sum(_w[None, :] ** q[..., None], axis=-1))

        def spectrum(h, _w=weights, _s0=s0, _p0=p0):
            alpha = (h - _s0 + 1.0 / _p0) * _p0
            qs = np.linspace(-60.0, 60.0, 4801)
            val = float(np.min(alpha * qs - tau_analytic(qs)))
            return val if val >= 0.0 else -math.inf

        alpha_lo = float(-np.log2(weights.max()))
        alpha_hi = float(-np.log2(weights.min()))
        support = (
            transference_H(alpha_lo, s0, p0),
            transference_H(alpha_hi, s0, p0),
        )
        extra["tau_analytic"] = tau_analytic

    def pointwise(t, _m=m, _s0=s0, _p0=p0):
        """Common lower/upper exponent via the measure exponent at t."""
        from .measures import measure_alpha  # local import avoids a cycle

        est = measure_alpha(_m, t)
        if math.isinf(est.alpha):
            return math.inf
        return transference_H(max(est.alpha, 0.0), _s0, _p0)

    gt = GroundTruth(
        description=f"transference series over {m.tag} measure, s0={s0}, p0={p0}",
        lower=pointwise,
        upper=pointwise,
        spectrum=spectrum,
        spectrum_kind="both",
        spectrum_support=support,
        extra=extra,
    )
    return pyr, gt
