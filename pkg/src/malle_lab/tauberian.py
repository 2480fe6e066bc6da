"""Real-variable layer of the power-saving Tauberian machinery.

Smoothed partial sums N_k, k-fold forward differences, the two-sided
sandwich that recovers N from N_k, and the closed-form exponents that the
contour-shifting argument produces from a meromorphy width delta and a
vertical growth exponent xi.  The contour integrals themselves are never
computed; this is the finitely checkable part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence


@dataclass(frozen=True)
class StepSequence:
    """Weighted points (n, a_n) with n >= 1, supporting smoothed partial sums."""

    points: tuple[tuple[int, float], ...]

    @staticmethod
    def from_pairs(pairs: Sequence[tuple[int, float]]) -> "StepSequence":
        pts = tuple(sorted((int(n), float(a)) for n, a in pairs))
        if any(n < 1 for n, _ in pts):
            raise ValueError("support must be at positive integers")
        return StepSequence(pts)

    def partial_sum(self, x: float) -> float:
        return math.fsum(a for n, a in self.points if n < x)

    def is_nonnegative(self) -> bool:
        return all(a >= 0 for _, a in self.points)


def smoothed_sum(seq: StepSequence, k: int, x: float) -> float:
    """k-fold iterated integral of the partial-sum function, in closed form.

    N_k(x) = (1/k!) sum over n < x of a_n (x - n)^k; k = 0 recovers N.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return seq.partial_sum(x)
    scale = 1.0 / math.factorial(k)
    return scale * math.fsum(a * (x - n) ** k for n, a in seq.points if n < x)


def difference(f: Callable[[float], float], y: float, k: int, x: float) -> float:
    """k-fold forward difference with step y via the binomial expansion."""
    if y <= 0:
        raise ValueError("the step y must be positive")
    if k < 1:
        raise ValueError("k must be at least 1")
    terms = [(-1) ** (k - j) * math.comb(k, j) * f(x + j * y) for j in range(k + 1)]
    return math.fsum(terms)


def sandwich_check(
    seq: StepSequence, k: int, y: float, x: float
) -> tuple[float, float, bool]:
    """Two-sided bound trapping N(x) between difference quotients of N_k.

    Returns (lower, upper, holds).  A violation for nonnegative input is a
    bug in the caller or here, never a property of the sequence.
    """
    if not seq.is_nonnegative():
        raise ValueError("the sandwich needs nonnegative coefficients")
    if x - k * y <= 0:
        raise ValueError("need x - k y > 0")
    nk = lambda t: smoothed_sum(seq, k, t)
    lower = y**-k * difference(nk, y, k, x - k * y)
    upper = y**-k * difference(nk, y, k, x)
    middle = seq.partial_sum(x)
    # the inequality is exact in real arithmetic; the tolerance only covers
    # cancellation in the binomial difference, which is amplified by y^-k
    # and the magnitude of the smoothed values entering it
    scale = max(abs(nk(x + j * y)) for j in range(k + 1)) + 1.0
    eps = 1e-12 * (2.0**k * scale * y**-k + abs(middle) + 1.0)
    holds = lower <= middle + eps and middle <= upper + eps
    return lower, upper, holds


@dataclass(frozen=True)
class TauberianParams:
    """Inputs to the exponent algebra: abscissa, meromorphy width, growth, k."""

    sigma_a: Fraction
    delta: Fraction
    xi: Fraction
    k: int

    def __post_init__(self):
        if self.delta < 0 or self.xi < 0:
            raise ValueError("delta and xi must be nonnegative")
        if self.k < 1:
            raise ValueError("k must be a positive integer")


@dataclass(frozen=True)
class SavingExponents:
    error_exponent: Fraction
    t_exponent: Fraction
    y_exponent: Fraction
    limit_exponent: Fraction  # k -> infinity: sigma_a - delta/(xi+1)


def saving_exponent(params: TauberianParams) -> SavingExponents:
    """Error, T, and y exponents for the optimal truncation at this k."""
    m = max(params.xi - 1, Fraction(0))
    denom = (params.k + 1) * params.xi + params.k - m
    if denom == 0:
        raise ValueError("degenerate parameters: (k+1) xi + k - max(xi-1, 0) = 0")
    saving = (params.k - m) * params.delta / denom
    return SavingExponents(
        error_exponent=params.sigma_a - saving,
        t_exponent=(params.k + 1) * params.delta / denom,
        y_exponent=1 - saving,
        limit_exponent=params.sigma_a - params.delta / (params.xi + 1),
    )


def fit_exponent(
    counts: Sequence[tuple[float, float]],
    main_term: Callable[[float], float],
) -> tuple[float, float]:
    """Least-squares slope of log |N(X) - main(X)| against log X.

    Returns (slope, half-width of a 95 percent confidence interval); an
    identically zero error term yields (-inf, 0).
    """
    if len(counts) < 10:
        raise ValueError("need at least 10 sample points")
    xs = sorted(x for x, _ in counts)
    if xs[0] <= 0 or xs[-1] / xs[0] < 100:
        raise ValueError("samples must span at least two decades")
    pts = []
    for x, n in counts:
        resid = abs(n - main_term(x))
        if resid > 0:
            pts.append((math.log(x), math.log(resid)))
    if not pts:
        return float("-inf"), 0.0
    mean_x = math.fsum(u for u, _ in pts) / len(pts)
    mean_y = math.fsum(v for _, v in pts) / len(pts)
    sxx = math.fsum((u - mean_x) ** 2 for u, _ in pts)
    sxy = math.fsum((u - mean_x) * (v - mean_y) for u, v in pts)
    slope = sxy / sxx
    if len(pts) > 2:
        resid_ss = math.fsum(
            (v - mean_y - slope * (u - mean_x)) ** 2 for u, v in pts
        )
        se = math.sqrt(resid_ss / (len(pts) - 2) / sxx)
    else:
        se = 0.0
    return slope, 1.96 * se
