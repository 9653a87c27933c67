"""Divisors with three cone points on the sphere and the existence gates.

The marked points are always 0, 1 and infinity.  Any other triple of
distinct points can be brought there by :func:`mobius_to_standard`.
"""

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidDivisor, TwoIntegers

INTEGER_TOL = 1e-9

POINTS = (0.0, 1.0, math.inf)


def parse_order(text):
    """Parse a cone order given as a decimal or as ``num/den``.

    Returns ``(value, exact)``.  Decimal and fraction strings denote exact
    rationals, so ``exact`` is a :class:`Fraction`; it is None only for
    inputs such as ``inf`` or ``nan`` that have no rational value.
    """
    text = str(text).strip()
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError):
        return float(text), None
    return float(frac), frac


@dataclass(frozen=True)
class Divisor:
    """Cone orders at 0, 1 and infinity.

    ``exact`` optionally carries rational values; when present the
    integrality tests are exact instead of using ``INTEGER_TOL``.
    """

    beta: tuple
    exact: tuple = field(default=(None, None, None), compare=False)

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != 3:
            raise InvalidDivisor("a divisor needs exactly three cone orders")
        for b in beta:
            if not math.isfinite(b) or b <= -1.0:
                raise InvalidDivisor(f"cone order {b} must be > -1")
        object.__setattr__(self, "beta", beta)
        exact = tuple(self.exact) if self.exact is not None else (None,) * 3
        object.__setattr__(self, "exact", exact)

    @classmethod
    def parse(cls, text):
        """Build from ``"b1,b2,b3"`` where each entry may be ``num/den``."""
        parts = [p for p in str(text).split(",") if p.strip()]
        if len(parts) != 3:
            raise InvalidDivisor(f"expected three comma separated orders, got {text!r}")
        values, exact = zip(*(parse_order(p) for p in parts))
        return cls(values, exact)

    @property
    def B(self):
        """Half cone angles ``pi*(beta_j + 1)``."""
        return tuple(math.pi * (b + 1.0) for b in self.beta)

    @property
    def points(self):
        return POINTS

    def exact_value(self, j):
        """Rational value of the j-th order (the binary value of the float if none was given)."""
        ex = self.exact[j]
        return ex if ex is not None else Fraction(self.beta[j])

    def is_integer(self, j, tol=INTEGER_TOL):
        ex = self.exact[j]
        if ex is not None:
            return ex.denominator == 1
        b = self.beta[j]
        return abs(b - round(b)) <= tol

    def integer_indices(self, tol=INTEGER_TOL):
        return tuple(j for j in range(3) if self.is_integer(j, tol))

    def permuted(self, perm):
        """Divisor whose j-th order is ``beta[perm[j]]``."""
        return Divisor(tuple(self.beta[p] for p in perm), tuple(self.exact[p] for p in perm))

    def to_json(self):
        return [float(b) for b in self.beta]


class ReducibilityClass(enum.Enum):
    IRREDUCIBLE = "irreducible"
    H1_REDUCIBLE = "H1-reducible"
    H3_REDUCIBLE = "H3-reducible"


def classify_reducibility(d):
    """Monodromy class forced by the integrality pattern of the orders.

    Raises TwoIntegers when exactly two orders are integral, since then no
    metric of any class has this divisor.
    """
    n_int = len(d.integer_indices())
    if n_int == 3:
        return ReducibilityClass.H3_REDUCIBLE
    if n_int == 1:
        return ReducibilityClass.H1_REDUCIBLE
    if n_int == 0:
        return ReducibilityClass.IRREDUCIBLE
    raise TwoIntegers(
        f"exactly two integral orders in {d.beta}: no metric with this divisor "
        "exists in any class")


def cone_cosines(d):
    cos = []
    for j, B in enumerate(d.B):
        # exact values at integral orders keep L(d) = 1 exactly there
        cos.append((-1.0) ** (round(d.beta[j]) + 1) if d.is_integer(j) else math.cos(B))
    return cos


def trace_condition_value(d):
    """``cos^2 B1 + cos^2 B2 + cos^2 B3 + 2 cos B1 cos B2 cos B3``."""
    c1, c2, c3 = cone_cosines(d)
    return c1 * c1 + c2 * c2 + c3 * c3 + 2.0 * c1 * c2 * c3


@dataclass(frozen=True)
class Existence:
    exists: bool
    margin: float


def irreducible_exists(d):
    """Decide existence of an irreducible metric; ``margin = 1 - L(d)``.

    When ``exists`` holds the metric is unique.
    """
    margin = 1.0 - trace_condition_value(d)
    return Existence(margin > 0.0, margin)


def mobius_to_standard(p1, p2, p3):
    """Return the Mobius map sending ``(p1, p2, p3)`` to ``(0, 1, inf)``.

    Points are complex numbers or ``math.inf``.  The map is returned as a
    2x2 complex matrix acting by ``(a z + b) / (c z + d)``.
    """
    pts = [p1, p2, p3]
    if any(isinstance(p, float) and math.isinf(p) for p in pts):
        if p3 == math.inf:
            m = np.array([[1.0, -p1], [0.0, p2 - p1]], dtype=complex)
        elif p1 == math.inf:
            # z -> (p2 - p3) / (z - p3)
            m = np.array([[0.0, p2 - p3], [1.0, -p3]], dtype=complex)
        else:
            # z -> (z - p1) / (z - p3)
            m = np.array([[1.0, -p1], [1.0, -p3]], dtype=complex)
    else:
        p1, p2, p3 = (complex(p) for p in pts)
        if len({p1, p2, p3}) < 3:
            raise InvalidDivisor("marked points must be distinct")
        m = np.array([[(p2 - p3), -p1 * (p2 - p3)],
                      [(p2 - p1), -p3 * (p2 - p1)]], dtype=complex)
    return m / np.sqrt(np.linalg.det(m))
