"""First-order rational realizations of fractional differ-integrators.

A fractional element s^q (0 < |q| < 1) is realized as the lead/lag stage
(s + alpha)/(alpha s + 1); shifted variants K(s^q + a) and K(s + a)^q move
the stage's phase extremum away from 1 rad/s.  The iterative square-root
style refinement produces higher-order realizations from the same seed.

Sign convention: q > 0 is a differentiator (alpha < 1, phase boost),
q < 0 an integrator (alpha > 1, phase droop).  The two published
unsigned conversion formulas are dispatched on the sign of q, which is a
far less error-prone interface than a side condition on alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lti import RationalTF
from .poly import ONE, Polynomial, poly_add, poly_mul

DIFFERINTEGRATOR = "differintegrator"
SHIFTED_SUM = "shifted_sum"      # K(s^q + a)
SHIFTED_POW = "shifted_pow"      # K(s + a)^q
STAGE_KINDS = (DIFFERINTEGRATOR, SHIFTED_SUM, SHIFTED_POW)


def alpha_from_order(q: float) -> float:
    """Realization parameter alpha for a fractional order q, 0 < |q| < 1.

    Differentiator (q > 0): alpha = (1 - q)/(1 + q) < 1.
    Integrator (q < 0):     alpha = (1 + |q|)/(1 - |q|) > 1.
    """
    if q == 0 or abs(q) >= 1:
        raise ValueError("order must satisfy 0 < |q| < 1")
    if q > 0:
        return (1.0 - q) / (1.0 + q)
    return (1.0 + abs(q)) / (1.0 - abs(q))


def order_from_alpha(alpha: float) -> float:
    """Signed fractional order realized by (s + alpha)/(alpha s + 1)."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if alpha < 1.0:
        return (1.0 - alpha) / (1.0 + alpha)
    return -(alpha - 1.0) / (alpha + 1.0)


@dataclass(frozen=True)
class FoStage:
    """Symbolic description of one fractional element before realization.

    q and alpha are stored consistently (each determines the other through
    the sign-dispatched conversion); a is the frequency shift (0 for the
    plain differ-integrator) and gain_k the stage gain.
    """

    kind: str
    q: float
    a: float
    gain_k: float
    alpha: float

    def __post_init__(self):
        if self.kind not in STAGE_KINDS:
            raise ValueError(f"unknown stage kind {self.kind!r}")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.a < 0:
            raise ValueError("shift a must be >= 0")
        if self.gain_k <= 0:
            raise ValueError("gain_k must be > 0")
        if abs(self.q) >= 1:
            raise ValueError("order must satisfy |q| < 1")
        expected = 1.0 if self.q == 0 else alpha_from_order(self.q)
        if not math.isclose(self.alpha, expected, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError("q and alpha are inconsistent")

    @classmethod
    def from_order(cls, kind: str, q: float, a: float = 0.0, gain_k: float = 1.0) -> "FoStage":
        alpha = 1.0 if q == 0 else alpha_from_order(q)
        return cls(kind, q, a, gain_k, alpha)

    @classmethod
    def from_alpha(cls, kind: str, alpha: float, a: float = 0.0, gain_k: float = 1.0) -> "FoStage":
        return cls(kind, order_from_alpha(alpha), a, gain_k, alpha)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "q": self.q, "a": self.a,
                "gain_k": self.gain_k, "alpha": self.alpha}


def realize_first_order(stage: FoStage) -> RationalTF:
    """First-order rational realization of the stage (delay-free).

    differintegrator: K (s + alpha)/(alpha s + 1)
    shifted_sum:      K [(1 + a*alpha) s + (a + alpha)]/(alpha s + 1)
    shifted_pow:      K (s + alpha + a)/(alpha s + 1 + alpha a)
    """
    al, a, k = stage.alpha, stage.a, stage.gain_k
    if stage.kind == DIFFERINTEGRATOR:
        num = [k, k * al]
        den = [al, 1.0]
    elif stage.kind == SHIFTED_SUM:
        num = [k * (1.0 + a * al), k * (a + al)]
        den = [al, 1.0]
    else:  # SHIFTED_POW; a = 0 degenerates to the plain stage
        num = [k, k * (al + a)]
        den = [al, 1.0 + al * a]
    return RationalTF(Polynomial(num), Polynomial(den), 0.0)


def validity_band(stage: FoStage) -> tuple[float, float]:
    """Frequency interval over which the first-order stage tracks s^q.

    Plain stage: [min(alpha, 1/alpha), max(alpha, 1/alpha)]; shifted_sum:
    the interval bounded by 1/alpha and (alpha + a)/(1 + alpha a).  Outside
    it the stage is just a lead/lag, not a fractional element.
    """
    al = stage.alpha
    if stage.kind == SHIFTED_SUM:
        lo, hi = 1.0 / al, (al + stage.a) / (1.0 + al * stage.a)
    elif stage.kind == SHIFTED_POW:
        lo, hi = (1.0 + al * stage.a) / al, al + stage.a
    else:
        lo, hi = al, 1.0 / al
    return (min(lo, hi), max(lo, hi))


def peak_frequency(stage: FoStage) -> float:
    """Frequency of the stage's phase extremum (rad/s).

    shifted_sum: w_r = sqrt((alpha + a) / (alpha (1 + alpha a)))
    shifted_pow: w_r = sqrt((alpha + a) (1 + alpha a) / alpha)

    Both equal the geometric mean of the realized zero and pole corners, so
    they coincide exactly with the numeric zero of d(phase)/dw.
    """
    al, a = stage.alpha, stage.a
    if stage.kind == SHIFTED_SUM:
        return math.sqrt((al + a) / (al * (1.0 + al * a)))
    if stage.kind == SHIFTED_POW:
        return math.sqrt((al + a) * (1.0 + al * a) / al)
    raise ValueError("peak_frequency applies to shifted stages only")


def phase_boost(stage: FoStage, w_r: float) -> float:
    """Phase added by a shifted_pow stage at w_r, in degrees.

    phi_m = atan((1 - alpha^2)/(2 alpha w_r)): negative for alpha > 1
    (droop), positive for alpha < 1 (boost).  Exact at the stage's own
    peak_frequency.
    """
    if stage.kind != SHIFTED_POW:
        raise ValueError("phase_boost applies to shifted_pow stages")
    if w_r <= 0:
        raise ValueError("w_r must be > 0")
    al = stage.alpha
    return math.degrees(math.atan((1.0 - al * al) / (2.0 * al * w_r)))


def carlson_iterate(g_num: Polynomial, g_den: Polynomial,
                    p: int, m: int, iterations: int) -> RationalTF:
    """Iterative rational approximation of H = G^(m/p) starting from H0 = 1.

    H_i = H_{i-1} * [(p-m) H_{i-1}^2 + (p+m) G] / [(p+m) H_{i-1}^2 + (p-m) G]

    Implemented with the squared term as published even for m != 1; only
    the p=2, m=1 square-root case is anchored by tests, general (p, m) is
    experimental.  All rational arithmetic is expanded with no
    cancellation; each iteration is normalized by the denominator's leading
    coefficient to keep coefficients bounded.
    """
    if not (p > m >= 1):
        raise ValueError("need p > m >= 1")
    if not 1 <= iterations <= 6:
        raise ValueError("iterations must be in 1..6 (order grows geometrically)")
    if g_num.is_zero:
        raise ValueError("G must be nonzero")

    hn, hd = ONE, ONE
    pm, pp = float(p - m), float(p + m)
    for _ in range(iterations):
        hn2 = poly_mul(hn, hn)
        hd2 = poly_mul(hd, hd)
        bracket_num = poly_add(poly_mul(hn2, g_den).scaled(pm), poly_mul(g_num, hd2).scaled(pp))
        bracket_den = poly_add(poly_mul(hn2, g_den).scaled(pp), poly_mul(g_num, hd2).scaled(pm))
        hn = poly_mul(hn, bracket_num)
        hd = poly_mul(hd, bracket_den)
        if hd.is_zero:
            raise ValueError("iteration produced zero denominator")
        lead = hd.coeffs[0]
        hn = hn.scaled(1.0 / lead)
        hd = hd.scaled(1.0 / lead)
    return RationalTF(hn, hd, 0.0)
