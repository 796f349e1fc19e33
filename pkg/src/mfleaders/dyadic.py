"""b-adic grid arithmetic, base-p expansions, and dyadic approximation rates.

Everything here is exact-integer or rational arithmetic underneath: floats are
converted to ``fractions.Fraction`` (every float is a dyadic rational, so the
conversion is lossless) and digits are produced by multiply-and-floor with
integer carries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .errors import DomainError, EmptyRangeError

__all__ = [
    "Cube",
    "Expansion",
    "ApproxRate",
    "cube_of_point",
    "neighbors3",
    "shift_sigma",
    "expand",
    "theta_p",
    "rho_phi",
]


@dataclass(frozen=True)
class Cube:
    """Half-open b-adic interval [k*b^-j, (k+1)*b^-j)."""

    j: int
    k: int
    b: int = 2

    def __post_init__(self):
        if self.j < 0:
            raise DomainError(f"cube level must be nonnegative, got {self.j}")
        if self.b < 2:
            raise DomainError(f"cube base must be >= 2, got {self.b}")

    @property
    def width(self) -> float:
        return float(self.b) ** (-self.j)

    @property
    def left(self) -> float:
        return self.k * self.width

    def contains(self, x: float) -> bool:
        return self.left <= x < self.left + self.width

    def parent(self) -> "Cube":
        if self.j == 0:
            raise DomainError("root cube has no parent")
        return Cube(self.j - 1, self.k // self.b, self.b)

    def children(self) -> tuple["Cube", ...]:
        return tuple(
            Cube(self.j + 1, self.b * self.k + i, self.b) for i in range(self.b)
        )


@dataclass(frozen=True)
class Expansion:
    """Truncated base-p expansion of a number in [0, 1).

    ``proper`` is a window-local flag: it is cleared when the stored digits end
    in a run of (p-1)s, since such a window cannot certify properness.  Digits
    produced by :func:`expand` are always those of the proper expansion, so the
    flag only reports what the finite window shows.
    """

    p: int
    digits: tuple[int, ...]
    proper: bool = field(default=True)

    def __post_init__(self):
        if self.p < 2:
            raise DomainError(f"expansion base must be >= 2, got {self.p}")
        for d in self.digits:
            if not 0 <= d < self.p:
                raise DomainError(f"digit {d} out of range for base {self.p}")

    def value(self) -> Fraction:
        """Re-sum the stored digits (exact)."""
        acc = Fraction(0)
        q = Fraction(1)
        for d in self.digits:
            q /= self.p
            acc += d * q
        return acc


@dataclass(frozen=True)
class ApproxRate:
    """Rate of approximation by p-adic rationals, estimated at finite depth.

    ``positions``/``run_lengths`` are the run starts m_k and lengths delta_k of
    the constant-digit runs tiling the binary expansion; runs are measured
    inclusively (the digit at m_k counts, so delta_k >= 1).  ``rho`` is the
    finite-depth estimate of limsup delta_k / m_k and ``phi = rho + 1``; both
    are ``inf`` for p-adic rationals whose terminating zero tail starts inside
    the depth-N window.
    """

    positions: tuple[int, ...]
    run_lengths: tuple[int, ...]
    rho: float
    phi: float
    depth: int

    def __post_init__(self):
        if math.isfinite(self.rho) and abs(self.phi - (self.rho + 1.0)) > 1e-12:
            raise DomainError("phi must equal rho + 1 for finite rho")


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    return Fraction(float(x))  # exact: floats are dyadic rationals


def cube_of_point(x: float, j: int, b: int = 2) -> Cube:
    """Level-j cube containing x, i.e. k = floor(x * b^j)."""
    if not 0.0 <= x < 1.0:
        raise DomainError(f"point {x!r} outside [0, 1)")
    if j < 0:
        raise DomainError(f"level must be nonnegative, got {j}")
    k = math.floor(x * b**j)
    k = min(k, b**j - 1)  # guard float roundup at the right edge
    return Cube(j, k, b)


def neighbors3(c: Cube) -> tuple[Cube, ...]:
    """The same-level cubes {k-1, k, k+1}, clamped to [0, b^j)."""
    top = c.b**c.j
    ks = [k for k in (c.k - 1, c.k, c.k + 1) if 0 <= k < top]
    return tuple(Cube(c.j, k, c.b) for k in ks)


def shift_sigma(c: Cube, sigma: int) -> Cube | None:
    """Same-level cube with index k + sigma; None when out of [0, b^j)."""
    if sigma not in (-1, 0, 1):
        raise DomainError(f"sigma must be in {{-1, 0, 1}}, got {sigma}")
    k = c.k + sigma
    if not 0 <= k < c.b**c.j:
        return None
    return Cube(c.j, k, c.b)


def expand(x, p: int, N: int) -> Expansion:
    """Proper base-p expansion of x in [0,1), truncated at depth N.

    p-adic rationals come out in the terminating (all-zero-tail) form.  The
    computation is exact for any float or Fraction input.
    """
    if N < 1:
        raise EmptyRangeError(f"depth must be >= 1, got {N}")
    if p < 2:
        raise DomainError(f"base must be >= 2, got {p}")
    frac = _as_fraction(x)
    if not 0 <= frac < 1:
        raise DomainError(f"point {x!r} outside [0, 1)")
    num, den = frac.numerator, frac.denominator
    digits = []
    for _ in range(N):
        num *= p
        d, num = divmod(num, den)
        digits.append(int(d))
    proper = not digits or digits[-1] != p - 1
    return Expansion(p=p, digits=tuple(digits), proper=proper)


def theta_p(x, p: int, N: int = 64) -> float:
    """inf{l : x_l != 0} - 1 within depth N; inf when all stored digits vanish."""
    exp = expand(x, p, N)
    for i, d in enumerate(exp.digits):
        if d != 0:
            return i  # digit index l = i + 1, so theta = l - 1 = i
    return math.inf


def _runs(digits: tuple[int, ...], p: int) -> tuple[list[int], list[int]]:
    """Run starts m_k and inclusive lengths delta_k over the digit window.

    Runs start at digits equal to 0 or p-1 and count the consecutive repeats
    of that digit including the starting position; the next run starts at the
    first qualifying digit at or after m_k + delta_k.
    """
    N = len(digits)
    positions, lengths = [], []
    l = 1
    while l <= N:
        if digits[l - 1] in (0, p - 1):
            d = digits[l - 1]
            length = 1
            while l + length <= N and digits[l + length - 1] == d:
                length += 1
            positions.append(l)
            lengths.append(length)
            l += length
        else:
            l += 1
    return positions, lengths


def rho_phi(x, N: int = 256) -> ApproxRate:
    """Dyadic approximation rate rho_2(x) and phi(x) = rho_2(x) + 1.

    The limsup of delta_k / m_k is estimated by the maximum over runs whose
    start exceeds N/4 (early runs bias the estimate upward); when no run
    starts that late, the last observed run is used.  Dyadic rationals whose
    terminating zero tail begins inside the depth-N window report rho = phi =
    inf; a tail that starts beyond the window is invisible and the estimate
    stays finite.
    """
    if N < 8:
        raise EmptyRangeError(f"depth must be >= 8, got {N}")
    frac = _as_fraction(x)
    if not 0 <= frac < 1:
        raise DomainError(f"point {x!r} outside [0, 1)")
    exp = expand(frac, 2, N)
    digits = exp.digits

    # exact termination check: the proper expansion of num/den ends at digit
    # ceil(log2(den)) when den is a power of two
    den = frac.denominator
    terminates = den & (den - 1) == 0  # power of two <=> dyadic rational
    if terminates:
        last_one = den.bit_length() - 1  # digits are zero beyond this index
        if last_one < N:  # infinite zero run starts at last_one + 1 <= N
            positions, lengths = _runs(digits, 2)
            return ApproxRate(
                positions=tuple(positions),
                run_lengths=tuple(lengths),
                rho=math.inf,
                phi=math.inf,
                depth=N,
            )

    positions, lengths = _runs(digits, 2)
    if not positions:
        return ApproxRate((), (), math.inf, math.inf, N)
    ratios = [
        (d / m) for m, d in zip(positions, lengths) if m > N / 4
    ]
    if not ratios:
        ratios = [lengths[-1] / positions[-1]]
    rho = max(ratios)
    return ApproxRate(
        positions=tuple(positions),
        run_lengths=tuple(lengths),
        rho=rho,
        phi=rho + 1.0,
        depth=N,
    )
