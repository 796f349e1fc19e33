"""b-adic measures: multinomial products, random multiplicative cascades,
quasi-Bernoulli diagnostics, and measure-side pointwise exponents.

Masses live on the b-adic tree as per-level arrays; level n holds the b^n
cell masses mu(I_w) for words w of length n.  Multinomial measures are exact
products and exactly refinement-consistent; cascades store the martingale
values W_{w1} W_{w1 w2} ... W_w per node, which are only consistent in
expectation (the ``approximate`` flag).

Randomness comes from numpy's Philox counter-based generator keyed by
(seed, level), so realizations are bit-reproducible across platforms and the
per-level draws are independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._fit import linfit
from .errors import (
    DegenerateLevelError,
    DomainError,
    EmptyRangeError,
    WeightValidationError,
)

__all__ = [
    "BAdicMeasure",
    "CascadeSpec",
    "MeasureAlphaEstimate",
    "multinomial",
    "lebesgue",
    "cascade",
    "quasi_bernoulli_constant",
    "measure_alpha",
]

RNG_ALGORITHM = "philox4x64 keyed by (seed, level)"


@dataclass
class BAdicMeasure:
    """Per-level masses on a b-adic tree.

    ``consistency`` is ``"exact"`` when children sum to their parent at every
    node (multinomial) and ``"approximate"`` for martingale constructions
    (cascades), where the identity only holds in expectation.
    """

    b: int
    depth: int
    levels: list[np.ndarray]
    tag: str = "external"
    seed: int | None = None
    consistency: str = "exact"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.b < 2:
            raise DomainError(f"base must be >= 2, got {self.b}")
        if len(self.levels) != self.depth + 1:
            raise ValueError(
                f"expected {self.depth + 1} level arrays, got {len(self.levels)}"
            )
        self.levels = [np.asarray(lv, dtype=float) for lv in self.levels]
        for n, lv in enumerate(self.levels):
            if lv.size != self.b**n:
                raise ValueError(f"level {n} holds {lv.size} masses, expected {self.b**n}")
            if np.any(lv < 0):
                raise WeightValidationError("masses must be nonnegative")
        if self.consistency == "exact":
            for n in range(self.depth):
                kids = self.levels[n + 1].reshape(-1, self.b).sum(axis=1)
                if not np.allclose(kids, self.levels[n], rtol=0, atol=1e-12):
                    raise WeightValidationError(
                        f"children do not sum to parents at level {n}"
                    )

    def masses(self, level: int) -> np.ndarray:
        return self.levels[level]

    def mass(self, level: int, k: int) -> float:
        return float(self.levels[level][k])

    def sigma_mass(self, level: int, k: int, sigma: int) -> float | None:
        """Mass of the sigma-shifted cell; None when shifted out of [0, 1)."""
        kk = k + sigma
        if not 0 <= kk < self.b**level:
            return None
        return float(self.levels[level][kk])

    def cell_index(self, x: float, level: int) -> int:
        if not 0.0 <= x < 1.0:
            raise DomainError(f"point {x!r} outside [0, 1)")
        return min(int(math.floor(x * self.b**level)), self.b**level - 1)


def multinomial(b: int, weights, depth: int) -> BAdicMeasure:
    """Multinomial measure: mu(I_w) = prod_l m_{w_l}."""
    w = np.asarray(weights, dtype=float)
    if w.size != b:
        raise WeightValidationError(f"need {b} weights, got {w.size}")
    if np.any(w <= 0.0) or np.any(w >= 1.0):
        raise WeightValidationError("weights must lie in (0, 1)")
    if abs(w.sum() - 1.0) > 1e-12:
        raise WeightValidationError(f"weights must sum to 1, got {w.sum()!r}")
    levels = [np.array([1.0])]
    for _ in range(depth):
        levels.append((levels[-1][:, None] * w[None, :]).ravel())
    return BAdicMeasure(
        b=b, depth=depth, levels=levels, tag="multinomial",
        consistency="exact", meta={"weights": w.tolist()},
    )


def lebesgue(depth: int, b: int = 2) -> BAdicMeasure:
    """Uniform measure: every depth-n cell has mass b^-n."""
    return multinomial(b, np.full(b, 1.0 / b), depth)


@dataclass(frozen=True)
class CascadeSpec:
    """Weight law for a random multiplicative cascade.

    Laws are restricted to families with closed-form moments so the mean
    constraint E(W) = 1/b is verified symbolically at construction:

    * ``two-point``: W = v1 w.p. prob, v2 w.p. 1 - prob
    * ``lognormal``: W = exp(sigma Z - sigma^2/2) / b
    * ``uniform-scaled``: W = 2 U / b with U ~ Uniform(0, 1)
    """

    b: int
    law: str
    params: tuple = ()

    def __post_init__(self):
        if self.b < 2:
            raise WeightValidationError(f"base must be >= 2, got {self.b}")
        ew = self.mean_weight()
        if abs(ew - 1.0 / self.b) > 1e-12:
            raise WeightValidationError(
                f"law {self.law}{self.params} has E(W) = {ew}, needs 1/b = {1 / self.b}"
            )

    def mean_weight(self) -> float:
        if self.law == "two-point":
            v1, v2, prob = self.params
            if v1 <= 0 or v2 <= 0 or not 0 < prob < 1:
                raise WeightValidationError("two-point law needs v1, v2 > 0, 0 < prob < 1")
            return prob * v1 + (1 - prob) * v2
        if self.law == "lognormal":
            (sigma,) = self.params
            if sigma <= 0:
                raise WeightValidationError("lognormal law needs sigma > 0")
            return 1.0 / self.b  # E exp(sigma Z - sigma^2/2) = 1 exactly
        if self.law == "uniform-scaled":
            if self.params:
                raise WeightValidationError("uniform-scaled law takes no parameters")
            return 1.0 / self.b
        raise WeightValidationError(f"unknown weight law {self.law!r}")

    def mean_w_log_w(self) -> float:
        """E(W ln W) in closed form, for the non-degeneracy diagnostic."""
        if self.law == "two-point":
            v1, v2, prob = self.params
            return prob * v1 * math.log(v1) + (1 - prob) * v2 * math.log(v2)
        if self.law == "lognormal":
            (sigma,) = self.params
            return (sigma**2 / 2.0 - math.log(self.b)) / self.b
        if self.law == "uniform-scaled":
            # E[W ln W], W = 2U/b: (2/b) (int u ln u du + ln(2/b)/2)
            return (2.0 / self.b) * (-0.25 + 0.5 * math.log(2.0 / self.b))
        raise WeightValidationError(f"unknown weight law {self.law!r}")

    def nondegeneracy_report(self) -> dict:
        """Two readings of the cascade non-degeneracy condition.

        The literal reading -1 - log_b E(W) evaluates to 0 under the mean
        constraint; the standard criterion is tau'(1) = -b E(W ln W) / ln b
        > 0.  Both are reported; nothing is enforced.
        """
        lnb = math.log(self.b)
        literal = -1.0 - math.log(self.mean_weight()) / lnb
        standard = -self.b * self.mean_w_log_w() / lnb
        return {
            "literal_reading": literal,
            "standard_reading": standard,
            "nondegenerate": standard > 0.0,
        }

    def draw(self, n: int, seed: int, level: int) -> np.ndarray:
        rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, level], dtype=np.uint64))
        )
        if self.law == "two-point":
            v1, v2, prob = self.params
            return np.where(rng.random(n) < prob, v1, v2)
        if self.law == "lognormal":
            (sigma,) = self.params
            return np.exp(sigma * rng.standard_normal(n) - sigma**2 / 2.0) / self.b
        if self.law == "uniform-scaled":
            u = rng.random(n)
            u[u == 0.0] = np.nextafter(0.0, 1.0)  # keep W almost surely positive
            return 2.0 * u / self.b
        raise WeightValidationError(f"unknown weight law {self.law!r}")


def cascade(spec: CascadeSpec, depth: int, seed: int) -> BAdicMeasure:
    """Random multiplicative cascade at finite depth.

    Level-n cells carry mu_n(I_w) = W_{w_1} W_{w_1 w_2} ... W_{w_1..w_n}; the
    expected total mass at every level is 1 and realizations are
    bit-reproducible given (spec, depth, seed).
    """
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    b = spec.b
    levels = [np.array([1.0])]
    warn = spec.nondegeneracy_report()
    for n in range(1, depth + 1):
        weights = spec.draw(b**n, seed, n)
        levels.append(np.repeat(levels[-1], b) * weights)
    return BAdicMeasure(
        b=b, depth=depth, levels=levels, tag="cascade",
        seed=seed, consistency="approximate",
        meta={
            "law": spec.law,
            "params": list(spec.params),
            "rng": RNG_ALGORITHM,
            "nondegeneracy": warn,
        },
    )


def quasi_bernoulli_constant(m: BAdicMeasure, depth_v: int, depth_w: int) -> float:
    """Brute-force quasi-Bernoulli constant over all word pairs (v, w):
    C = max of max(mu(I_vw) / (mu(I_v) mu(I_w)), inverse), zero masses skipped."""
    if depth_v < 1 or depth_w < 1:
        raise EmptyRangeError("word depths must be >= 1")
    if depth_v + depth_w > m.depth:
        raise EmptyRangeError(
            f"need depth_v + depth_w <= {m.depth}, got {depth_v + depth_w}"
        )
    mv = m.masses(depth_v)
    mw = m.masses(depth_w)
    mvw = m.masses(depth_v + depth_w).reshape(mv.size, mw.size)
    prod = np.outer(mv, mw)
    ok = (prod > 0.0) & (mvw > 0.0)
    if not ok.any():
        raise DegenerateLevelError("no word pair has positive mass")
    ratio = mvw[ok] / prod[ok]
    return float(max(ratio.max(), (1.0 / ratio).max()))


@dataclass
class MeasureAlphaEstimate:
    """Pointwise measure exponents: per-shift estimates and their minimum.

    For each sigma in {-1, 0, 1}, L_j = log mu^sigma(lambda_j(x)) / (-j log b)
    over the depth window; the headline alpha values take the minimum over
    shifts, matching the iso-Holder sets built from min_sigma alpha^sigma.
    Shifts that fall out of the domain, or whose masses vanish somewhere in
    the window, contribute +inf.
    """

    x: float
    alpha_liminf: float
    alpha_limsup: float
    alpha: float
    per_sigma: dict
    depth_range: tuple[int, int]

    @property
    def infinite(self) -> bool:
        return math.isinf(self.alpha)


def measure_alpha(
    m: BAdicMeasure,
    x: float,
    depth_range: tuple[int, int] | None = None,
) -> MeasureAlphaEstimate:
    if depth_range is None:
        depth_range = (max(1, m.depth // 2), m.depth)
    n1, n2 = depth_range
    if not 1 <= n1 < n2 <= m.depth:
        raise EmptyRangeError(f"depth range [{n1}, {n2}] invalid for depth {m.depth}")
    ns = np.arange(n1, n2 + 1)
    lnb = math.log(m.b)
    per_sigma: dict[int, dict] = {}
    for sigma in (-1, 0, 1):
        vals = []
        for n in ns:
            k = m.cell_index(x, n)
            mass = m.sigma_mass(n, k, sigma)
            vals.append(np.nan if mass is None else mass)
        vals = np.asarray(vals, dtype=float)
        in_domain = ~np.isnan(vals)
        if not in_domain.all() or np.any(vals[in_domain] == 0.0):
            per_sigma[sigma] = {
                "liminf": math.inf, "limsup": math.inf, "regression": math.inf,
                "r2": float("nan"),
                "out_of_domain": bool((~in_domain).any()),
            }
            continue
        L = np.log(vals) / (-ns * lnb)
        slope, _, r2 = linfit(-ns * lnb, np.log(vals))
        per_sigma[sigma] = {
            "liminf": float(L.min()), "limsup": float(L.max()),
            "regression": float(slope), "r2": r2, "out_of_domain": False,
        }
    return MeasureAlphaEstimate(
        x=x,
        alpha_liminf=min(s["liminf"] for s in per_sigma.values()),
        alpha_limsup=min(s["limsup"] for s in per_sigma.values()),
        alpha=min(s["regression"] for s in per_sigma.values()),
        per_sigma=per_sigma,
        depth_range=(n1, n2),
    )
