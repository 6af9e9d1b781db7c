"""Rational transfer functions with dead time.

Provides series composition, frequency response, gain/phase margins and the
closed-loop characteristic polynomial used by the Routh-based shaper design.
No pole-zero cancellation is ever performed: cancellation with floating
coefficients is ill-conditioned and the Routh machinery needs the fully
expanded polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .poly import ONE, Polynomial, poly_add, poly_mul

POLE_EPS = 1e-300
_BISECT_RTOL = 1e-9


@dataclass(frozen=True)
class RationalTF:
    """num(s)/den(s) * exp(-delay*s), delay in seconds (0 when absent)."""

    num: Polynomial
    den: Polynomial
    delay: float = 0.0

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("denominator is the zero polynomial")
        if self.delay < 0:
            raise ValueError("delay must be >= 0")

    @property
    def is_proper(self) -> bool:
        return self.num.degree <= self.den.degree

    def scaled(self, gain: float) -> "RationalTF":
        """gain * G(s); the gain multiplies the numerator only."""
        return RationalTF(self.num.scaled(gain), self.den, self.delay)

    def rational_part(self) -> "RationalTF":
        """The same TF with the dead time removed."""
        return RationalTF(self.num, self.den, 0.0)


def tf(num, den, delay: float = 0.0) -> RationalTF:
    """Convenience constructor from coefficient lists (descending powers)."""
    return RationalTF(Polynomial(num), Polynomial(den), delay)


def unity() -> RationalTF:
    return RationalTF(ONE, ONE, 0.0)


@dataclass
class MarginReport:
    """Crossover frequencies and margins found inside a scan band.

    Fields are None when the corresponding crossing does not occur in the
    band.  gain_margin is the plain ratio 1/|G(j w_pc)| (not dB); phase
    margin is in degrees.
    """

    gain_crossover_wgc: Optional[float] = None
    phase_crossover_wpc: Optional[float] = None
    gain_margin: Optional[float] = None
    phase_margin: Optional[float] = None


def series(a: RationalTF, b: RationalTF) -> RationalTF:
    """Cascade a*b: numerators and denominators multiply, delays add."""
    return RationalTF(poly_mul(a.num, b.num), poly_mul(a.den, b.den), a.delay + b.delay)


def cascade(*tfs: RationalTF) -> RationalTF:
    out = unity()
    for g in tfs:
        out = series(out, g)
    return out


def pid_tf(kp: float, ki: float, kd: float) -> RationalTF:
    """(kd s^2 + kp s + ki) / s, with degenerate leading terms normalized.

    A controller with ki == 0 has no integrator and reduces to kd s + kp.
    """
    if kp == 0 and ki == 0 and kd == 0:
        raise ValueError("empty controller")
    if ki == 0:
        return RationalTF(Polynomial([kd, kp]), ONE, 0.0)
    return RationalTF(Polynomial([kd, kp, ki]), Polynomial([1.0, 0.0]), 0.0)


def freq_response(g: RationalTF, w: float) -> complex:
    """G(jw) = num(jw)/den(jw) * exp(-j w delay)."""
    s = 1j * w
    d = g.den(s)
    if abs(d) < POLE_EPS:
        raise ValueError("pole on frequency axis")
    val = g.num(s) / d
    if g.delay:
        val *= np.exp(-1j * w * g.delay)
    return complex(val)


def freq_response_grid(g: RationalTF, ws: np.ndarray) -> np.ndarray:
    """Vectorized frequency response over an array of frequencies."""
    s = 1j * np.asarray(ws, dtype=float)
    den = g.den(s)
    if np.any(np.abs(den) < POLE_EPS):
        raise ValueError("pole on frequency axis")
    val = g.num(s) / den
    if g.delay:
        val = val * np.exp(-1j * np.asarray(ws) * g.delay)
    return val


def phase_deg_unwrapped(g: RationalTF, ws: np.ndarray) -> np.ndarray:
    """Open-loop phase in degrees, unwrapped by nearest-branch continuation."""
    return np.degrees(np.unwrap(np.angle(freq_response_grid(g, ws))))


def _continued_phase(g: RationalTF, w: float, w_ref: float, phase_ref: float) -> float:
    """Unwrapped phase (rad) at w, continuing the branch anchored at w_ref."""
    val = freq_response(g, w)
    raw = math.atan2(val.imag, val.real)
    delta = raw - ((phase_ref + math.pi) % (2 * math.pi) - math.pi)
    delta = (delta + math.pi) % (2 * math.pi) - math.pi
    return phase_ref + delta


def _bisect_crossing(fn, a: float, b: float) -> float:
    """Root of fn (sign change assumed inside [a, b]) on a log-frequency axis."""
    fa = fn(a)
    if fa == 0.0:
        return a
    while (b - a) > _BISECT_RTOL * b:
        mid = math.sqrt(a * b)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fa > 0) != (fm > 0):
            b = mid
        else:
            a, fa = mid, fm
    return math.sqrt(a * b)


def margins(g: RationalTF, w_lo: float, w_hi: float, n_grid: int) -> MarginReport:
    """Scan [w_lo, w_hi] for gain and phase crossovers and refine them.

    The grid is log-spaced; crossings of |G| = 1 and of unwrapped phase =
    -180 deg are bracketed by sign changes and refined by bisection.  Only
    the first (lowest frequency) crossing of each kind is reported; delay
    systems have infinitely many phase crossings, so callers choose the
    band deliberately.
    """
    if not (0 < w_lo < w_hi):
        raise ValueError("need 0 < w_lo < w_hi")
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    ws = np.geomspace(w_lo, w_hi, n_grid)
    resp = freq_response_grid(g, ws)
    mag = np.abs(resp)
    phase = np.unwrap(np.angle(resp))

    report = MarginReport()

    logmag = np.log10(mag)
    for i in range(len(ws) - 1):
        if logmag[i] == 0.0 or (logmag[i] > 0) != (logmag[i + 1] > 0):
            w_gc = _bisect_crossing(lambda w: math.log10(abs(freq_response(g, w))), ws[i], ws[i + 1])
            ph_gc = _continued_phase(g, w_gc, ws[i], phase[i])
            report.gain_crossover_wgc = w_gc
            report.phase_margin = math.degrees(ph_gc) + 180.0
            break

    target = phase + math.pi
    for i in range(len(ws) - 1):
        if target[i] == 0.0 or (target[i] > 0) != (target[i + 1] > 0):
            anchor_w, anchor_ph = ws[i], phase[i]

            def fn(w):
                return _continued_phase(g, w, anchor_w, anchor_ph) + math.pi

            w_pc = _bisect_crossing(fn, ws[i], ws[i + 1])
            report.phase_crossover_wpc = w_pc
            report.gain_margin = 1.0 / abs(freq_response(g, w_pc))
            break

    return report


def char_poly(
    plant: RationalTF,
    controller: RationalTF,
    shaper: RationalTF,
    k: float,
    gain_scale: float = 1.0,
) -> Polynomial:
    """Closed-loop characteristic polynomial den + k*gain_scale*num.

    num/den is the expanded series product shaper*controller*plant.  The
    default gain_scale of 1 matches the published tableau for this loop
    structure; passing 1/alpha reinstates the alternative normalization in
    which the shaper carries a 1/alpha prefactor (config switch
    ``divide_gain_by_alpha``).
    """
    loop = cascade(shaper, controller, plant)
    if loop.delay != 0.0:
        raise ValueError("rationalize delay first")
    return poly_add(loop.den, loop.num.scaled(k * gain_scale))


def pade(delay: float, order: int) -> RationalTF:
    """Diagonal Pade approximant of exp(-delay*s); result has delay 0."""
    if delay <= 0:
        raise ValueError("delay must be > 0")
    if not 1 <= order <= 5:
        raise ValueError("order out of range (1..5)")
    n = order
    # N(x) = sum C(n,k) * (2n-k)!/(2n)! * x^k;  e^{-Ls} ~ N(-Ls)/N(Ls)
    c = [math.comb(n, k) * math.factorial(2 * n - k) / math.factorial(2 * n) for k in range(n + 1)]
    num = [c[k] * (-delay) ** k for k in range(n, -1, -1)]
    den = [c[k] * delay ** k for k in range(n, -1, -1)]
    return RationalTF(Polynomial(num), Polynomial(den), 0.0)


def rationalize(g: RationalTF, pade_order: int) -> RationalTF:
    """Replace dead time by a Pade stage so Routh analysis can be applied."""
    if g.delay == 0.0:
        return g
    return series(pade(g.delay, pade_order), g.rational_part())


def dc_gain(g: RationalTF) -> float:
    """G(0); raises on a pole at the origin."""
    d = g.den(0.0)
    if abs(d) < POLE_EPS:
        raise ValueError("pole at the origin")
    return g.num(0.0) / d
