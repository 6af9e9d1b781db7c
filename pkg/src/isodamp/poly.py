"""Real-coefficient polynomial arithmetic in descending powers of s.

Every transfer function, Routh tableau and characteristic equation in the
toolkit is built on this representation.  Coefficients are stored with the
leading (highest-power) coefficient first so that index 0 of a Routh row
always holds the pivot.
"""

from __future__ import annotations

from dataclasses import dataclass

# Leading coefficients below this magnitude are treated as floating-point
# cancellation residue and stripped; otherwise a spurious degree would
# corrupt the size of downstream Routh tableaus.
NORM_EPS = 1e-12


def _normalize(coeffs) -> tuple[float, ...]:
    cs = [float(c) for c in coeffs]
    if not cs:
        return (0.0,)
    i = 0
    while i < len(cs) - 1 and abs(cs[i]) < NORM_EPS:
        i += 1
    cs = cs[i:]
    if len(cs) == 1 and abs(cs[0]) < NORM_EPS:
        return (0.0,)
    return tuple(cs)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with real coefficients, descending powers of s.

    ``coeffs[0]`` is the leading coefficient; it is nonzero except for the
    zero polynomial, which is represented as ``(0.0,)``.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _normalize(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, s):
        return poly_eval(self, s)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return poly_mul(self, other)

    def scaled(self, c: float) -> "Polynomial":
        """c * p(s)."""
        return Polynomial([c * a for a in self.coeffs])

    def monic(self) -> "Polynomial":
        """p(s) divided by its leading coefficient."""
        if self.is_zero:
            raise ValueError("zero polynomial has no monic form")
        lead = self.coeffs[0]
        return Polynomial([a / lead for a in self.coeffs])

    def derivative(self) -> "Polynomial":
        n = self.degree
        if n == 0:
            return Polynomial([0.0])
        return Polynomial([c * (n - i) for i, c in enumerate(self.coeffs[:-1])])


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    """a(s) + b(s), normalized."""
    ca, cb = a.coeffs, b.coeffs
    n = max(len(ca), len(cb))
    pa = (0.0,) * (n - len(ca)) + ca
    pb = (0.0,) * (n - len(cb)) + cb
    return Polynomial([x + y for x, y in zip(pa, pb)])


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    """a(s) * b(s); degree is additive for nonzero inputs."""
    if a.is_zero or b.is_zero:
        return Polynomial([0.0])
    out = [0.0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        for j, y in enumerate(b.coeffs):
            out[i + j] += x * y
    return Polynomial(out)


def poly_eval(p: Polynomial, s):
    """Horner evaluation of p at s (scalar or numpy array, real or complex)."""
    acc = s * 0 + p.coeffs[0]
    for c in p.coeffs[1:]:
        acc = acc * s + c
    return acc


ONE = Polynomial([1.0])
ZERO = Polynomial([0.0])
S = Polynomial([1.0, 0.0])
