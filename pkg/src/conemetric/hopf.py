"""Hopf differential of a three-point divisor and Schwarzian derivatives.

The quadratic differential is ``Q = q(z) dz^2`` with

    q(z) = (c3 z^2 + (c2 - c1 - c3) z + c1) / (2 z^2 (z - 1)^2),
    c_j = -beta_j (beta_j + 2) / 2,

so that ``2 Q`` has the Laurent leading term ``-beta_j(beta_j+2)/2 (z-p_j)^-2``
at each cone point.  In the chart ``w = 1/z`` the same differential reads
``q_w(w) dw^2`` with ``q_w(w) = (c3 + (c2 - c1 - c3) w + c1 w^2) / (2 w^2 (1-w)^2)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDerivative, PoleHit

POLE_TOL = 1e-12
CHART_SWITCH = 2.0


def cone_coefficient(beta):
    return -beta * (beta + 2.0) / 2.0


@dataclass(frozen=True)
class HopfDifferential:
    c: tuple

    @classmethod
    def from_json(cls, data):
        return cls(tuple(float(x) for x in data["c"]))

    def to_json(self):
        return {"c": [float(x) for x in self.c]}

    @property
    def numerator(self):
        """Coefficients of ``c3 z^2 + (c2-c1-c3) z + c1``, highest power first."""
        c1, c2, c3 = self.c
        return np.array([c3, c2 - c1 - c3, c1], dtype=float)

    @property
    def is_zero(self):
        return all(x == 0.0 for x in self.c)

    def zeros(self):
        """Zeros of Q in C minus {0, 1}, sorted lexicographically by (re, im)."""
        num = np.trim_zeros(self.numerator, "f")
        if len(num) < 2:
            return []
        roots = np.roots(num).astype(complex)
        return sorted(roots, key=lambda r: (round(r.real, 12), round(r.imag, 12)))

    def q(self, z):
        return evaluate_Q(self, z)

    def q_w(self, w):
        """Coefficient of Q in the chart ``w = 1/z``."""
        c1, c2, c3 = self.c
        w = np.asarray(w, dtype=complex)
        return 0.5 * (c3 + (c2 - c1 - c3) * w + c1 * w * w) / (w * w * (1.0 - w) ** 2)


def hopf_from_divisor(d):
    return HopfDifferential(tuple(cone_coefficient(b) for b in d.beta))


def evaluate_Q(q, z):
    """Coefficient of Q in the z chart at ``z`` (scalar or array).

    Points with ``|z| > 2`` are evaluated through the w chart and pulled back
    with the factor ``(dw/dz)^2 = w^4``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) < POLE_TOL) or np.any(np.abs(z - 1.0) < POLE_TOL):
        raise PoleHit(f"Q has a pole at 0 and 1; got z={z}")
    c1, c2, c3 = q.c
    far = np.abs(z) > CHART_SWITCH
    zn = np.where(far, 0.5, z)
    w = 1.0 / np.where(far, z, 2.0)
    near_val = 0.5 * (c3 * zn * zn + (c2 - c1 - c3) * zn + c1) / (zn * zn * (zn - 1.0) ** 2)
    far_val = q.q_w(w) * w ** 4
    out = np.where(far, far_val, near_val)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RationalDifferential:
    """``c z^mu (z-1)^nu num(z) / den(z) dz`` with polynomial coefficient lists.

    Coefficient lists are highest power first (numpy ``polyval`` order).
    """

    numerator: tuple
    denominator: tuple
    mu: float = 0.0
    nu: float = 0.0
    scale: complex = 1.0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not np.any(np.asarray(self.denominator) != 0):
            raise ValueError("denominator is identically zero")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = self.scale * np.polyval(self.numerator, z) / np.polyval(self.denominator, z)
        if self.mu:
            val = val * z ** self.mu
        if self.nu:
            val = val * (z - 1.0) ** self.nu
        return val


# -- Schwarzian derivative ---------------------------------------------------

def stencil_points(z, h, kind="circle", n=16):
    """Sample locations for :func:`schwarzian_of_samples`."""
    if kind == "line5":
        return z + h * np.arange(-2, 3)
    if kind == "circle":
        return z + h * np.exp(2j * np.pi * np.arange(n) / n)
    raise ValueError(f"unknown stencil {kind!r}")


def derivatives_from_samples(samples, h, kind="circle"):
    """First three derivatives at the stencil centre."""
    g = np.asarray(samples, dtype=complex)
    if kind == "line5":
        gm2, gm1, g0, gp1, gp2 = g
        d1 = (-gp2 + 8 * gp1 - 8 * gm1 + gm2) / (12 * h)
        d2 = (-gp2 + 16 * gp1 - 30 * g0 + 16 * gm1 - gm2) / (12 * h * h)
        d3 = (gp2 - 2 * gp1 + 2 * gm1 - gm2) / (2 * h ** 3)
        return d1, d2, d3
    if kind == "circle":
        # Taylor coefficients via the discrete Cauchy integral on |zeta - z| = h
        coeffs = np.fft.fft(g) / len(g)
        return coeffs[1] / h, 2 * coeffs[2] / h ** 2, 6 * coeffs[3] / h ** 3
    raise ValueError(f"unknown stencil {kind!r}")


def schwarzian_of_samples(samples, h, kind="circle"):
    """Schwarzian ``(g''/g')' - (g''/g')^2 / 2`` from samples of g.

    ``kind="line5"`` is the 5-point central stencil along the real direction
    (error O(h^2), roundoff ~ eps/h^3).  ``kind="circle"`` samples g on a
    circle of radius h and is spectrally accurate while the circle stays
    inside the disk of holomorphy; it is the default.
    """
    d1, d2, d3 = derivatives_from_samples(samples, h, kind)
    if abs(d1) < 1e-10:
        raise DegenerateDerivative(f"|g'| = {abs(d1):.3g} at stencil centre")
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def default_step(z, singular=(0.0, 1.0), kind="circle"):
    dist = min(abs(z - s) for s in singular)
    return (0.25 if kind == "circle" else 1e-4) * dist


def schwarzian(g, z, h=None, kind="circle", singular=(0.0, 1.0)):
    """Schwarzian of a callable g at z using :func:`schwarzian_of_samples`."""
    if h is None:
        h = default_step(z, singular, kind)
    pts = stencil_points(z, h, kind)
    return schwarzian_of_samples(g(pts), h, kind)


def schwarzian_power(k, z):
    """Closed form ``(1 - k^2) / (2 z^2)`` for ``g = z^k``."""
    return (1.0 - k * k) / (2.0 * z * z)


def moebius(a, g):
    """``a * g = (a11 g + a12) / (a21 g + a22)``."""
    return (a[0, 0] * g + a[0, 1]) / (a[1, 0] * g + a[1, 1])
