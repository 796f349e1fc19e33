"""Orthonormal filter banks and L-infinity normalized coefficient pyramids.

Signals are uniform point samples of a 1-periodic function on [0, 1), length
2^J.  The analysis is the standard periodized Mallat cascade; the pyramid
stores either

* ``L2`` coefficients, the continuous-normalization values <f, psi_{j,k}> with
  psi_{j,k} = 2^{j/2} psi(2^j x - k), or
* ``Linf`` coefficients c_{j,k} = 2^{j/2} * c^{L2}_{j,k} = 2^j int f psi(2^j x - k),

so a unit Linf coefficient corresponds to a wavelet atom of unit amplitude
regardless of scale.  Point samples stand in for the level-J scaling
projections; the induced error is concentrated at the finest scales, which the
fit-window defaults in :mod:`mfleaders.leaders` drop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._daubechies import DAUBECHIES_LOWPASS, HOLDER_REGULARITY
from .errors import NormalizationError, SignalLengthError

__all__ = [
    "WaveletSpec",
    "Signal",
    "CoefficientPyramid",
    "daubechies",
    "analyze",
    "synthesize",
    "renormalize",
    "seam_contaminated",
]

L2 = "L2"
LINF = "Linf"


@dataclass(frozen=True)
class WaveletSpec:
    """A compactly supported orthonormal wavelet filter bank."""

    name: str
    vanishing_moments: int
    lowpass: tuple[float, ...]
    regularity: float

    def __post_init__(self):
        h = np.asarray(self.lowpass)
        if abs(h.sum() - math.sqrt(2)) > 1e-12:
            raise ValueError(f"{self.name}: filter taps do not sum to sqrt(2)")
        L = len(h)
        for k in range(1, L // 2):
            if abs(np.dot(h[: L - 2 * k], h[2 * k :])) > 1e-10:
                raise ValueError(f"{self.name}: shifted self-inner-product not zero")
        if abs(np.dot(h, h) - 1.0) > 1e-10:
            raise ValueError(f"{self.name}: filter is not unit norm")

    @property
    def support_len(self) -> int:
        return len(self.lowpass)

    @property
    def highpass(self) -> np.ndarray:
        h = np.asarray(self.lowpass)
        g = h[::-1].copy()
        g[1::2] *= -1.0
        return g


def daubechies(r: int) -> WaveletSpec:
    """Daubechies extremal-phase wavelet with r vanishing moments (2..10)."""
    if r not in DAUBECHIES_LOWPASS:
        raise ValueError(f"daubechies: r must be in 2..10, got {r}")
    return WaveletSpec(
        name=f"db{r}",
        vanishing_moments=r,
        lowpass=DAUBECHIES_LOWPASS[r],
        regularity=HOLDER_REGULARITY[r],
    )


@dataclass
class Signal:
    """Uniform samples of a real function on [0, 1)."""

    samples: np.ndarray
    offset: float = 0.0  # sample i sits at (i + offset) * 2^-J
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        n = self.samples.size
        if n < 8 or n & (n - 1):
            raise SignalLengthError(f"signal length {n} is not a power of two >= 8")

    @property
    def J(self) -> int:
        return self.samples.size.bit_length() - 1

    def grid(self) -> np.ndarray:
        n = self.samples.size
        return (np.arange(n) + self.offset) / n


@dataclass
class CoefficientPyramid:
    """Per-scale wavelet coefficients c_{j,k}, j = 0..J-1, 2^j entries each.

    ``scaling`` holds the coarse scaling coefficients after a full cascade (a
    single value for periodized signals).  ``tag`` is ``"L2"`` or ``"Linf"``.
    """

    J: int
    tag: str
    levels: list[np.ndarray]
    scaling: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in (L2, LINF):
            raise NormalizationError(f"unknown normalization tag {self.tag!r}")
        if len(self.levels) != self.J:
            raise ValueError(f"expected {self.J} levels, got {len(self.levels)}")
        self.levels = [np.asarray(lv, dtype=float) for lv in self.levels]
        for j, lv in enumerate(self.levels):
            if lv.size != 1 << j:
                raise ValueError(f"level {j} holds {lv.size} values, expected {1 << j}")
        self.scaling = np.asarray(self.scaling, dtype=float)

    def copy(self) -> "CoefficientPyramid":
        return CoefficientPyramid(
            J=self.J,
            tag=self.tag,
            levels=[lv.copy() for lv in self.levels],
            scaling=self.scaling.copy(),
            meta=dict(self.meta),
        )


def _analysis_step(a: np.ndarray, h: np.ndarray, g: np.ndarray):
    """One periodized decimating filter step: returns (approx, detail)."""
    n = a.size
    approx = np.zeros(n // 2)
    detail = np.zeros(n // 2)
    for m, (hm, gm) in enumerate(zip(h, g)):
        rolled = np.roll(a, -m)[::2]
        approx += hm * rolled
        detail += gm * rolled
    return approx, detail


def _synthesis_step(approx: np.ndarray, detail: np.ndarray, h: np.ndarray, g: np.ndarray):
    n = 2 * approx.size
    ua = np.zeros(n)
    ud = np.zeros(n)
    ua[::2] = approx
    ud[::2] = detail
    out = np.zeros(n)
    for m, (hm, gm) in enumerate(zip(h, g)):
        out += hm * np.roll(ua, m) + gm * np.roll(ud, m)
    return out


def analyze(signal: Signal, wavelet: WaveletSpec) -> CoefficientPyramid:
    """Full periodized decomposition of a signal into an Linf-tagged pyramid."""
    s = signal.samples
    J = signal.J
    if J < 3:
        raise SignalLengthError(f"need J >= 3 decomposition levels, got J={J}")
    h = np.asarray(wavelet.lowpass)
    g = wavelet.highpass
    raw_details: list[np.ndarray] = [None] * J
    a = s
    for j in range(J - 1, -1, -1):
        a, d = _analysis_step(a, h, g)
        raw_details[j] = d
    # raw cascade outputs are 2^{J/2} times the continuous-normalization
    # coefficients; rescale so the tag contract c_Linf = 2^{j/2} c_L2 holds
    levels = [raw_details[j] * 2.0 ** ((j - J) / 2.0) for j in range(J)]
    scaling = a * 2.0 ** (-J / 2.0)
    meta = {
        "wavelet": wavelet.name,
        "boundary": "periodic",
        "source": "samples",
        "sample_offset": signal.offset,
    }
    meta.update({k: v for k, v in signal.meta.items() if k not in meta})
    return CoefficientPyramid(J=J, tag=LINF, levels=levels, scaling=scaling, meta=meta)


def synthesize(pyramid: CoefficientPyramid, wavelet: WaveletSpec,
               expect_tag: str = LINF) -> Signal:
    """Invert :func:`analyze`.  The pyramid must carry the expected tag;
    convert explicitly with :func:`renormalize` first if it does not."""
    if pyramid.tag != expect_tag:
        raise NormalizationError(
            f"pyramid tag {pyramid.tag!r} != expected {expect_tag!r}; "
            "renormalize explicitly before synthesis"
        )
    p = renormalize(pyramid, LINF) if pyramid.tag != LINF else pyramid
    J = p.J
    h = np.asarray(wavelet.lowpass)
    g = wavelet.highpass
    a = p.scaling * 2.0 ** (J / 2.0)
    for j in range(J):
        raw_detail = p.levels[j] * 2.0 ** ((J - j) / 2.0)
        a = _synthesis_step(a, raw_detail, h, g)
    return Signal(samples=a, offset=float(p.meta.get("sample_offset", 0.0)),
                  meta={"synthesized_with": wavelet.name})


def renormalize(pyramid: CoefficientPyramid, target: str) -> CoefficientPyramid:
    """Convert between L2 and Linf tags: c_Linf = 2^{j/2} c_L2.

    Scaling by exact powers of two, so a round trip is bitwise identical;
    renormalizing to the current tag returns an identical copy.
    """
    if target not in (L2, LINF):
        raise NormalizationError(f"unknown normalization tag {target!r}")
    out = pyramid.copy()
    if pyramid.tag == target:
        return out
    sign = 1.0 if target == LINF else -1.0
    out.levels = [lv * 2.0 ** (sign * j / 2.0) for j, lv in enumerate(out.levels)]
    out.tag = target
    return out


def seam_contaminated(x0: float, j: int, support_len: int) -> bool:
    """Whether level-j quantities at x0 can feel the periodic seam at 0 == 1."""
    dist = min(x0, 1.0 - x0)
    return dist < 2.0 * support_len * 2.0 ** (-j)
