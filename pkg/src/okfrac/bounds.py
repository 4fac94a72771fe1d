"""Closed-form performance bounds and the phase-split parameter optimization.

Everything here is a pure function of the phase parameters c, d (and where
finite-size effects matter, the item count n). Transcendentals are evaluated
in 64-bit floats; the final stage of the optimizer switches to 40-digit
arithmetic because the maximum over d is locally flat and float golden-section
cannot localize it to the required 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath

from .errors import AlternatingSumUnstable, ConvergenceFailure, DomainError

# Phase split achieving the best proven guarantee, rounded to five decimals.
# Used as the CLI defaults.
DEFAULT_C = 0.47521
DEFAULT_D = 0.60138

# Above this index the alternating binomial sum in p_lower cancels
# catastrophically in float64; callers must opt into the exact summation.
_FLOAT_SUM_LIMIT = 60

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundParams:
    """Validated parameter bundle for bound evaluation."""

    c: float
    d: float
    n: Optional[int] = None

    def __post_init__(self):
        if not (0 < self.c <= self.d <= 1):
            raise DomainError(f"need 0 < c <= d <= 1, got c={self.c}, d={self.d}")
        if self.n is not None and self.n < 1:
            raise DomainError(f"need n >= 1, got n={self.n}")


@dataclass(frozen=True)
class OptimizationResult:
    c_star: float
    d_star: float
    z_star: float
    ratio: float
    constraint_gap: float


@lru_cache(maxsize=1)
def d_min() -> float:
    """Smaller root of 2 - 2d + ln d in (0, 1).

    Below it the many-item bound is vacuous. The other root is d = 1.
    """
    f = lambda d: 2.0 - 2.0 * d + math.log(d)
    lo, hi = 1e-12, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def mu_bar(d: float) -> float:
    """Maximum utilization for which the all-rounds packing bound stays positive."""
    if not 0.0 < d < 1.0:
        raise DomainError(f"mu_bar needs d in (0,1), got {d}")
    return 2.0 + math.log(d) / (1.0 - d)


def p_lower(i: int, c: float, d: float, exact: bool = False) -> float:
    """Lower bound on the probability that the i-th most profitable item is the
    first one the secretary phase accepts.

    For i = 1 this is c*ln(d/c). The general form adds an alternating binomial
    sum which is summed exactly over rationals when `exact` is set; without it,
    indices above 60 raise AlternatingSumUnstable.
    """
    if i < 1:
        raise DomainError(f"rank i must be >= 1, got {i}")
    if not (0.0 < c <= d <= 1.0):
        raise DomainError(f"need 0 < c <= d <= 1, got c={c}, d={d}")
    lead = c * math.log(d / c)
    if i == 1:
        return lead
    if exact:
        cf, df = Fraction(c), Fraction(d)
        total = Fraction(0)
        for k in range(1, i):
            total += Fraction(math.comb(i - 1, k) * (-1) ** k, k) * (df**k - cf**k)
        return lead + c * float(total)
    if i > _FLOAT_SUM_LIMIT:
        raise AlternatingSumUnstable(
            f"float summation unreliable for i={i} > {_FLOAT_SUM_LIMIT}; pass exact=True"
        )
    total = 0.0
    for k in range(1, i):
        total += math.comb(i - 1, k) * (-1) ** k * (d**k - c**k) / k
    return lead + c * total


def q_lower(mu: float, d: float) -> float:
    """Lower bound on the expected packed share (relative to the offline
    fraction) of an item whose utilization is `mu`, under the knapsack phase
    started with an empty knapsack.

    Clamped at the maximum utilization mu_bar(d). Defined at mu = 0 by its
    continuous extension 2 - 2d + ln d.
    """
    mb = mu_bar(d)
    if mb <= 0.0:
        raise DomainError(f"d={d} is at or below the vacuous-bound root {d_min():.6f}")
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"utilization must lie in [0,1], got {mu}")
    if mu == 0.0:
        return 2.0 - 2.0 * d + math.log(d)
    m = min(mu, mb)
    slope = 1.0 - d - math.log(1.0 / d)
    return ((1.0 - d) * m - slope * math.log1p(-m)) / mu


def prob_pack_round(ell: int, n: int, d: float, delta: float) -> float:
    """Per-round lower bound on packing at least a delta-share of a fixed item
    in round ell of the knapsack phase. May be negative (vacuous)."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not 0.0 < d <= 1.0:
        raise DomainError(f"need d in (0,1], got {d}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"need delta in (0,1), got {delta}")
    if ell <= d * n:
        raise DomainError(f"round ell={ell} is not after the phase boundary d*n={d * n}")
    return (1.0 - math.log(ell / (d * n)) / (1.0 - delta)) / n


def prob_pack_total(n: Optional[int], d: float, delta: float) -> float:
    """All-rounds lower bound on packing at least a delta-share of a fixed item.

    `n=None` gives the asymptotic form. Negative exactly when delta exceeds
    the maximum utilization (up to the vanishing finite-size term).
    """
    if not 0.0 < d <= 1.0:
        raise DomainError(f"need d in (0,1], got {d}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"need delta in (0,1), got {delta}")
    if n is None or n == math.inf:
        finite = 1.0
    else:
        if n < 1:
            raise DomainError(f"need n >= 1, got {n}")
        finite = 1.0 + 1.0 / n
    return (1.0 - d) + (1.0 - d - finite * math.log(1.0 / d)) / (1.0 - delta)


def z_single(c: float, d: float) -> float:
    """Upper bound on the guarantee coming from single-item optima:
    p(1) + (c/d) q(1)."""
    if not 0.0 < c <= d:
        raise DomainError(f"need 0 < c <= d, got c={c}, d={d}")
    return c * math.log(d / c) + (c / d) * q_lower(1.0, d)


def z_many(c: float, d: float) -> float:
    """Upper bound on the guarantee coming from many small items:
    (c/d) q(0)."""
    if not 0.0 < c <= d <= 1.0:
        raise DomainError(f"need 0 < c <= d <= 1, got c={c}, d={d}")
    if d < 1.0 and mu_bar(d) <= 0.0:
        raise DomainError(f"d={d} is at or below the vacuous-bound root {d_min():.6f}")
    return (c / d) * (2.0 - 2.0 * d + math.log(d))


def excess_constants(c: float, d: float) -> tuple[float, float]:
    """The two slack constants certifying that per-item excess covers per-item
    deficit in the many-item case; both must be nonnegative for a valid split.

    The first applies when the largest utilization stays below mu_bar, the
    second when it exceeds it. Both are evaluated at the given (c, d); the
    second one is a fine cancellation and is only meaningfully nonzero away
    from the exact optimizer.
    """
    if not 0.0 < c <= d:
        raise DomainError(f"need 0 < c <= d, got c={c}, d={d}")
    mb = mu_bar(d)
    if mb <= 0.0:
        raise DomainError(f"d={d} is at or below the vacuous-bound root {d_min():.6f}")
    p1 = c * math.log(d / c)
    slope = 1.0 - d - math.log(1.0 / d)
    first = p1 - (c / d) * slope * (2.0 + math.log1p(-mb) / mb + math.log(mb) / (1.0 - mb))
    second = p1 + (c / d) * (
        (1.0 - d) * mb - slope * math.log1p(-mb) - 2.0 + 2.0 * d + math.log(1.0 / d)
    )
    return first, second


# ---------------------------------------------------------------------------
# Parameter optimization. For each d the two z-bounds cross at a unique c
# (their ratio-to-c residual is strictly decreasing), so c(d) comes from
# bisection; the resulting univariate z(d) is maximized by golden-section,
# then re-localized at 40-digit precision.
# ---------------------------------------------------------------------------


def _q1_q0(d):
    one = d / d  # 1 in the operand's arithmetic (float or mpf)
    log = mpmath.log if isinstance(d, mpmath.mpf) else math.log
    mb = 2 * one + log(d) / (one - d)
    slope = one - d - log(one / d)
    q1 = (one - d) * mb - slope * log(one - mb)
    q0 = 2 * one - 2 * d + log(d)
    return q1, q0


def _c_given_d(d, tol):
    """Solve z_single(c, d) = z_many(c, d) for c in (0, d] by bisection on the
    strictly decreasing residual ln(d/c) + (q(1) - q(0))/d."""
    log = mpmath.log if isinstance(d, mpmath.mpf) else math.log
    q1, q0 = _q1_q0(d)
    kappa = (q1 - q0) / d
    resid = lambda c: log(d / c) + kappa
    lo, hi = d * 1e-12, d
    if resid(hi) >= 0:
        return hi
    if resid(lo) <= 0:
        raise ConvergenceFailure(f"no crossing for d={d}")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if resid(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _z_of_d(d, c_tol):
    try:
        c = _c_given_d(d, c_tol)
    except (ConvergenceFailure, ValueError):
        return None
    q1, q0 = _q1_q0(d)
    return (c / d) * q0


def _golden_max(f, lo, hi, tol, ratio):
    x1 = hi - ratio * (hi - lo)
    x2 = lo + ratio * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(500):
        if hi - lo <= tol:
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + ratio * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - ratio * (hi - lo)
            f1 = f(x1)
    return (lo + hi) / 2


def grid_sweep(points: int = 200) -> list[tuple[float, float, float, float]]:
    """Coarse scan of (d, c(d), z(d), 1/z(d)) across the feasible range."""
    dm = d_min()
    rows = []
    for k in range(1, points + 1):
        d = dm + (1.0 - 2e-6 - dm) * k / (points + 1) + 1e-6
        z = _z_of_d(d, 1e-13)
        if z is None or z <= 0:
            continue
        c = _c_given_d(d, 1e-13)
        rows.append((d, c, z, 1.0 / z))
    return rows


def optimize_params(tolerance: float = 1e-10, equal_cd: bool = False) -> OptimizationResult:
    """Maximize the guarantee z over the feasible phase splits.

    Standard mode searches c in (0, d] for every d, which puts the optimum at
    the crossing of the two z-bounds; `equal_cd` pins c = d (no secretary-only
    window) and maximizes the then-binding single-item bound. The returned
    `constraint_gap` is |z_single - z_many| at the optimum; it is only small
    in standard mode, where the crossing defines c.
    """
    if not tolerance > 0:
        raise ConvergenceFailure(f"tolerance must be positive, got {tolerance}")
    dm = d_min()

    if equal_cd:
        objective = lambda d: min(z_single(d, d), z_many(d, d))
    else:
        objective = lambda d: _z_of_d(d, 1e-13)

    def safe(d):
        try:
            z = objective(d)
        except DomainError:
            return -math.inf
        return -math.inf if z is None else z

    # Coarse scan: verifies the maximum is interior and unique at grid scale
    # before any local search.
    points = 400
    grid = [dm + (1.0 - 2e-6 - dm) * k / (points + 1) + 1e-6 for k in range(1, points + 1)]
    values = [safe(d) for d in grid]
    best = max(range(points), key=values.__getitem__)
    if not math.isfinite(values[best]):
        raise ConvergenceFailure("no feasible d in the search range")
    if best == 0 or best == points - 1:
        raise ConvergenceFailure("maximum not bracketed by the coarse scan")

    d0 = _golden_max(safe, grid[best - 1], grid[best + 1], 1e-7, _GOLDEN)

    # High-precision relocalization: the float objective is flat within ~1e-7
    # of the maximum, far too wide for the requested tolerance.
    with mpmath.workdps(40):
        gr = (mpmath.sqrt(5) - 1) / 2
        c_tol = mpmath.mpf(10) ** (-25)

        if equal_cd:

            def mp_obj(d):
                q1, q0 = _q1_q0(d)
                return min(q1, q0)

        else:

            def mp_obj(d):
                c = _c_given_d(d, c_tol)
                q1, q0 = _q1_q0(d)
                return (c / d) * q0

        lo = mpmath.mpf(repr(d0)) - mpmath.mpf("1e-5")
        hi = mpmath.mpf(repr(d0)) + mpmath.mpf("1e-5")
        d_star = _golden_max(mp_obj, lo, hi, mpmath.mpf(repr(tolerance)) / 10, gr)
        c_star = d_star if equal_cd else _c_given_d(d_star, c_tol)
        z_star = mp_obj(d_star)
        q1, q0 = _q1_q0(d_star)
        lead = c_star * mpmath.log(d_star / c_star)
        gap = abs((lead + (c_star / d_star) * q1) - (c_star / d_star) * q0)

        return OptimizationResult(
            c_star=float(c_star),
            d_star=float(d_star),
            z_star=float(z_star),
            ratio=float(1 / z_star),
            constraint_gap=float(gap),
        )
