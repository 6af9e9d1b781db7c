"""Routh-Hurwitz tableau, stability predicate and marginal loop gain.

The marginal gain K_m is located numerically by bisection over the Hurwitz
predicate rather than symbolically from the s^1-row test function: tableau
entries become nested rational functions of K after two reductions, and a
numeric predicate is robust at any degree.

Strictness: any tableau patch (zero pivot or vanished row) indicates
imaginary-axis or degenerate roots, so a patched polynomial is never
reported as Hurwitz.  The design constraint set needs strict positivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .poly import Polynomial

# Pivot replacement is scaled to the source polynomial: absolute epsilons
# break on characteristic polynomials with 1e-3-scale coefficients.
EPS_FACTOR = 1e-9
ZERO_FACTOR = 1e-12
_BISECT_RTOL = 1e-9
_PRESCAN_POINTS = 32


@dataclass
class RouthTable:
    rows: list[list[float]]
    first_column: list[float]
    sign_changes: int
    epsilon_substitutions: int


@dataclass
class MarginalGainResult:
    """Outcome of the marginal-gain search.

    k_m is math.inf when the loop is still Hurwitz at the top of the
    bracket (unbounded flag) and 0.0 when it is not Hurwitz even at the
    bottom (never_stable flag).  stable_at_k / stability_ratio are filled
    only when an operating gain was supplied and k_m is finite.
    """

    k_m: float
    unbounded: bool = False
    never_stable: bool = False
    stable_at_k: Optional[bool] = None
    stability_ratio: Optional[float] = None

    @property
    def finite(self) -> bool:
        return not self.unbounded and not self.never_stable


def routh_table(p: Polynomial) -> RouthTable:
    """Standard Routh tableau with classical degenerate-case completion.

    A zero pivot in an otherwise nonzero row is replaced by
    EPS_FACTOR * max|coeff|; an all-zero row is replaced by the derivative
    of the auxiliary polynomial from the row above.  Both patches are
    counted in epsilon_substitutions.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no Routh table")
    n = p.degree
    if n < 1:
        raise ValueError("degree must be >= 1")
    coeffs = list(p.coeffs)
    scale = max(abs(c) for c in coeffs)
    zero_tol = ZERO_FACTOR * scale
    eps_value = EPS_FACTOR * scale

    width = n // 2 + 1
    rows = [coeffs[0::2], coeffs[1::2]]
    for r in rows:
        r.extend([0.0] * (width - len(r)))
    patches = 0

    for r in range(2, n + 1):
        prev = rows[-1]
        prev2 = rows[-2]
        if all(abs(x) <= zero_tol for x in prev):
            # Auxiliary polynomial lives in the row above (power n - r + 2).
            power = n - r + 2
            for j in range(width):
                k = power - 2 * j
                prev[j] = prev2[j] * k if k >= 1 else 0.0
            patches += 1
        if abs(prev[0]) <= zero_tol:
            prev[0] = eps_value
            patches += 1
        pivot = prev[0]
        new = [0.0] * width
        for j in range(width - 1):
            new[j] = (pivot * prev2[j + 1] - prev2[0] * prev[j + 1]) / pivot
        rows.append(new)

    first = []
    for row in rows:
        x = row[0]
        if abs(x) <= zero_tol:
            x = eps_value
            row[0] = x
            patches += 1
        first.append(x)

    changes = sum(1 for a, b in zip(first, first[1:]) if (a > 0) != (b > 0))
    return RouthTable(rows=rows, first_column=first, sign_changes=changes,
                      epsilon_substitutions=patches)


def is_hurwitz(p: Polynomial) -> bool:
    """True iff the tableau has no first-column sign change and no patches."""
    table = routh_table(p)
    return table.sign_changes == 0 and table.epsilon_substitutions == 0


def marginal_gain(
    poly_of_k: Callable[[float], Polynomial],
    k_lo: float,
    k_hi: float,
    k_actual: Optional[float] = None,
) -> MarginalGainResult:
    """Largest gain in [k_lo, k_hi] below which the loop stays Hurwitz.

    A 32-point log-spaced pre-scan verifies there is a single
    stable->unstable transition in the bracket; bisection then refines the
    boundary to relative tolerance 1e-9.  Returns the unbounded flag when
    the loop is Hurwitz at k_hi and the never-stable flag when it is not
    Hurwitz at k_lo.
    """
    if not (0 < k_lo < k_hi):
        raise ValueError("need 0 < k_lo < k_hi")

    ks = [k_lo * (k_hi / k_lo) ** (i / (_PRESCAN_POINTS - 1)) for i in range(_PRESCAN_POINTS)]
    flags = [is_hurwitz(poly_of_k(k)) for k in ks]

    if not flags[0]:
        return MarginalGainResult(k_m=0.0, never_stable=True)
    seen_unstable = False
    for f in flags:
        if not f:
            seen_unstable = True
        elif seen_unstable:
            raise ValueError("multiple stability transitions")
    if all(flags):
        return MarginalGainResult(k_m=math.inf, unbounded=True)

    i = flags.index(False)
    lo, hi = ks[i - 1], ks[i]
    while (hi - lo) > _BISECT_RTOL * hi:
        mid = math.sqrt(lo * hi)
        if is_hurwitz(poly_of_k(mid)):
            lo = mid
        else:
            hi = mid
    k_m = math.sqrt(lo * hi)

    result = MarginalGainResult(k_m=k_m)
    if k_actual is not None and k_actual > 0:
        result.stable_at_k = is_hurwitz(poly_of_k(k_actual))
        result.stability_ratio = stability_ratio(k_m, k_actual)
    return result


def stability_ratio(k_m: float, k: float) -> float:
    """SR = K_m / K, a gain-margin surrogate."""
    if k_m <= 0 or k <= 0 or not math.isfinite(k_m):
        raise ValueError("stability ratio needs finite positive gains")
    return k_m / k


def estimate_gain_crossover(w_pc: float, k: float, k_m: float) -> float:
    """Crossover estimate w_gc = w_pc * sqrt(K / K_m); an estimate only."""
    if w_pc <= 0 or k <= 0 or k_m <= 0:
        raise ValueError("inputs must be > 0")
    if k > k_m:
        raise ValueError("estimate undefined above marginal gain")
    return w_pc * math.sqrt(k / k_m)
