"""CMC-1 surfaces in hyperbolic space with three Type I ends at 0, 1 and infinity.

For orders beta satisfying the irreducibility condition the Hopf differential
is the same Q as for the cone metric, with simple zeros q1, q2, and the
hyperbolic Gauss map is the degree two map

    G(z) = z + (q1 - q2)^2 / (2 (2z - q1 - q2)),

branched exactly at q1 and q2.  The frame equation is
``dF F^-1 = [[G, -G^2], [1, -G]] Q / dG`` and the immersion is ``x = F F*``
after the monodromy of F has been conjugated into SU(2).

Writing ``E = 2z - s`` (``s = q1 + q2``), ``N = z E + d^2 / 2`` (``d = q1 - q2``)
and ``Q = (c3/2) (z - q1)(z - q2) / (z^2 (z - 1)^2) dz^2`` we get
``G = N / E``, ``G' = (E^2 - d^2) / E^2`` and ``Q / dG = (c3/8) E^2 / (z^2 (z-1)^2) dz``,
so the frame equation is regular away from 0, 1 and infinity.

Points of hyperbolic space are positive Hermitian matrices of determinant 1;
``[[a, b], [conj b, d]]`` corresponds to the point ``(b / d, 1 / d)`` of the
upper half-space model.
"""

import math
from dataclasses import dataclass

import numpy as np

from .divisor import ReducibilityClass, classify_reducibility, irreducible_exists
from .errors import ConditionViolated, InvalidDivisor, NonUnitaryMonodromy, PoleHit
from .hopf import evaluate_Q, hopf_from_divisor
from .metriceval import LOG2, IrreducibleMetric, conical_order_estimate, sample_grid
from .monodromy import MonodromyTriple, outer_loop_z, standard_loops, unitarize
from .pathint import FrameODE, IntegratorConfig, develop_frames, integrate_frame

UNITARY_TOL = 1e-7


@dataclass(frozen=True)
class SurfaceSpec:
    divisor: object
    q1: complex
    q2: complex
    c3: float

    @classmethod
    def from_divisor(cls, d):
        """Umbilic points from the numerator of Q, ordered by (re, im)."""
        if classify_reducibility(d) is not ReducibilityClass.IRREDUCIBLE or not irreducible_exists(d).exists:
            raise ConditionViolated(f"orders {d.beta} do not give an irreducible metric")
        c1, c2, c3 = hopf_from_divisor(d).c
        if c3 == 0.0:
            raise InvalidDivisor("Q has no double pole at infinity")
        q1, q2 = sorted(np.roots([c3, c2 - c1 - c3, c1]).astype(complex),
                        key=lambda q: (round(q.real, 12), round(q.imag, 12)))
        for q in (q1, q2):
            if min(abs(q), abs(q - 1.0)) < 1e-12:
                raise InvalidDivisor(f"umbilic point {q} coincides with an end")
        return cls(d, complex(q1), complex(q2), float(c3))

    @property
    def s(self):
        return self.q1 + self.q2

    @property
    def d2(self):
        return (self.q1 - self.q2) ** 2

    def parts(self, z):
        """``(E, N, E^2 - d^2)`` at z."""
        z = np.asarray(z, dtype=complex)
        E = 2.0 * z - self.s
        return E, z * E + 0.5 * self.d2, E * E - self.d2

    def to_json(self):
        return {"beta": list(self.divisor.beta), "q1": [self.q1.real, self.q1.imag],
                "q2": [self.q2.real, self.q2.imag]}


def surface_gauss_map(s, z):
    E, N, _ = s.parts(z)
    if np.any(E == 0) and s.d2 != 0:
        raise PoleHit(f"G has a pole at {s.s / 2}")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(E == 0, z, N / E) if s.d2 == 0 else N / E
    return complex(out) if np.ndim(out) == 0 else out


def surface_gauss_derivative(s, z):
    E, _, W = s.parts(z)
    return W / (E * E)


def gauss_schwarzian(s, z):
    """Schwarzian of G; zero when ``q1 = q2``."""
    E, _, W = s.parts(z)
    a = 0.5 * s.d2
    # G' = W / E^2, G'' = 8a / E^3, G''' = -48a / E^4
    return -48.0 * a / (E * E * W) - 1.5 * (8.0 * a / (E * W)) ** 2


def surface_hopf(s, z):
    return evaluate_Q(hopf_from_divisor(s.divisor), z)


class SurfaceODE(FrameODE):
    """``dF/dz = (c3/8) E^2 / (z^2 (z-1)^2) [[G, -G^2], [1, -G]] F`` written polynomially."""

    def __init__(self, spec):
        self.spec = spec

    def coefficient(self, z):
        z = np.asarray(z, dtype=complex)
        E, N, _ = self.spec.parts(z)
        k = self.spec.c3 / 8.0 / (z * z * (z - 1.0) ** 2)
        out = np.empty(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = k * N * E
        out[..., 0, 1] = -k * N * N
        out[..., 1, 0] = k * E * E
        out[..., 1, 1] = -k * N * E
        return out


def surface_monodromy(s, cfg=None, check_tol=1e-7):
    """Monodromy of the surface frame; gamma_3 is the clockwise circle ``|z| = 3``."""
    cfg = cfg or IntegratorConfig()
    ode = SurfaceODE(s)
    g1, g2, _ = standard_loops()
    M1 = integrate_frame(g1, ode, cfg)
    M2 = integrate_frame(g2, ode, cfg)
    M3 = integrate_frame(outer_loop_z(), ode, cfg)
    dev = float(np.max(np.abs(M1 @ M2 @ M3 - np.eye(2))))
    if dev > check_tol * max(1.0, float(np.max(np.abs(M3)))):
        raise ConditionViolated(f"M1 M2 M3 differs from id by {dev:.3g}")
    return MonodromyTriple((M1, M2, M3))


class SurfaceMetric(IrreducibleMetric):
    """The pseudometric ``(-K) ds^2`` of the surface, with divisor
    ``beta_1 p_1 + beta_2 p_2 + beta_3 p_3 + q1 + q2``.

    ``g = -v/u`` with ``(u, v) = (1, -G) F P`` and ``lambda = 2 |G'| / |(u, v)|^2``.
    """

    def __init__(self, spec, cfg=None):
        self.spec = spec
        self.divisor = spec.divisor
        self.cfg = cfg or IntegratorConfig()
        ode = SurfaceODE(spec)
        self.odes = (ode, ode.in_w_chart())
        self.monodromy = surface_monodromy(spec, self.cfg)
        try:
            self.unitarization = unitarize(self.monodromy)
        except Exception as exc:
            raise NonUnitaryMonodromy(str(exc)) from exc
        self.P = self.unitarization.P
        self.sampling_cfg = IntegratorConfig(self.cfg.rtol, self.cfg.atol, self.cfg.max_step_fraction,
                                             r_min=min(self.cfg.r_min, 1e-7))

    def _log_lambda_from_frames(self, j, y, F):
        y = np.asarray(y, dtype=complex)
        z = 1.0 / y if j == 2 else y
        E, N, W = self.spec.parts(z)
        # (1, -G) scaled by E keeps the pole of G out of the arithmetic
        row = np.stack([E, -N], axis=-1)
        v = np.einsum("...i,...ij->...j", row, F @ self.P)
        out = LOG2 + np.log(np.abs(W)) - np.log(np.sum(np.abs(v) ** 2, axis=-1))
        return out - 2.0 * np.log(np.abs(y)) if j == 2 else out

    def _gauge_frames(self, j, y, F):
        if j == 2:
            raise NotImplementedError("surface stencils are only available in the z chart")
        G = surface_gauss_map(self.spec, y)
        u = F[..., 0, :] - G[..., None] * F[..., 1, :]
        return np.stack([u, F[..., 1, :]], axis=-2)

    def _gauge_coefficient(self, j, y):
        # u' = -G' f, f' = (Q/dG) u
        y = np.asarray(y, dtype=complex)
        E, _, W = self.spec.parts(y)
        B = np.zeros(y.shape + (2, 2), dtype=complex)
        B[..., 0, 1] = -W / (E * E)
        B[..., 1, 0] = self.spec.c3 / 8.0 * E * E / (y * y * (y - 1.0) ** 2)
        return B

    def _log_lambda_from_gauge(self, Y):
        raise NotImplementedError("use the frame based evaluation")

    def curvature_from_frames(self, *args, **kwargs):
        raise NotImplementedError("curvature of the surface metric is not sampled")

    def schwarzian(self, z, fraction=0.25, n=32):
        """Schwarzian of g in the z chart (``|z| <= 2``)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(np.abs(z) > 2.0):
            raise ValueError("surface Schwarzian is evaluated for |z| <= 2")
        sing = (0.0, 1.0, self.spec.s / 2.0)
        return np.array([self.ring_schwarzian(0, z0, fraction, n, sing) for z0 in z])


def schwarzian_relation_residual(metric, z):
    """``|S(g) - S(G) - 2Q|`` at the points z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    lhs = metric.schwarzian(z) - gauss_schwarzian(metric.spec, z)
    return np.abs(lhs - 2.0 * surface_hopf(metric.spec, z))


# -- immersion ---------------------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicPoint:
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        if np.max(np.abs(x - x.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(x))):
            raise ValueError("matrix is not Hermitian")
        object.__setattr__(self, "x", x)

    @property
    def det(self):
        return float(np.linalg.det(self.x).real)

    def upper_half_space(self):
        """``(b / d, 1 / d)`` for ``x = [[a, b], [conj b, d]]``."""
        b, d = self.x[0, 1], self.x[1, 1].real
        return complex(b / d), 1.0 / d


def immerse_frames(F, P):
    """``x = (F P)(F P)*`` for a stack of frames; normalized to det 1."""
    FP = np.asarray(F) @ P
    x = FP @ np.conj(np.swapaxes(FP, -1, -2))
    x = 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))
    det = np.linalg.det(x).real
    return x / np.sqrt(det)[..., None, None]


def immerse(metric, z):
    """Points of the immersion at z (developed along canonical routes)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    F = develop_frames(metric.odes[0], z.ravel(), metric.sampling_cfg)
    return immerse_frames(F, metric.P).reshape(z.shape + (2, 2))


def loop_invariance(metric):
    """``max_j |M_j X^-1 M_j* - X^-1|`` relative to ``|X^-1|``: x at the basepoint after each loop."""
    Xi = metric.P @ metric.P.conj().T
    scale = float(np.max(np.abs(Xi)))
    return max(float(np.max(np.abs(M @ Xi @ M.conj().T - Xi))) / scale for M in metric.monodromy.M)


def upper_half_space(x):
    """Stack of Hermitian matrices to ``(re, im, height)`` triples."""
    x = np.asarray(x)
    b, d = x[..., 0, 1], x[..., 1, 1].real
    return np.stack([(b / d).real, (b / d).imag, 1.0 / d], axis=-1)


# -- first order data -------------------------------------------------------------

def dsharp_metric(s, z):
    """Density of ``(1 + |G|^2)^2 |Q/dG|^2`` with respect to ``|dz|^2``."""
    z = np.asarray(z, dtype=complex)
    E, N, _ = s.parts(z)
    k = abs(s.c3) / 8.0 / np.abs(z * z * (z - 1.0) ** 2)
    out = (k * (np.abs(E) ** 2 + np.abs(N) ** 2)) ** 2
    return float(out) if out.ndim == 0 else out


def total_abs_curvature(s):
    """``2 pi (4 + sum beta)``, the area of the metric with the two umbilic points added."""
    d = s.divisor if isinstance(s, SurfaceSpec) else s
    if not irreducible_exists(d).exists:
        raise ConditionViolated(f"orders {d.beta} do not satisfy the irreducibility condition")
    ta = 2.0 * math.pi * (4.0 + sum(d.beta))
    if ta < 4.0 * math.pi - 1e-12:
        raise ConditionViolated(f"total absolute curvature {ta} below 4 pi")
    return ta


def numerical_total_area(metric, res=120):
    return sample_grid(metric, res, curvature=False).area


def umbilic_order_estimate(metric, q, r_range=(1e-4, 1e-2), n_radii=21, n_rays=8):
    """Slope of ``log lambda`` against ``log |z - q|`` (expected 1)."""
    radii = np.geomspace(r_range[1], r_range[0], n_radii)
    theta = 2 * math.pi * (np.arange(n_rays) + 0.5) / n_rays
    X = q + radii[None, :] * np.exp(1j * theta)[:, None]
    logl = metric.log_lambda(0, X.ravel())
    lr = np.tile(np.log(radii), n_rays)
    return float(np.polyfit(lr, logl, 1)[0])


def cone_orders(metric):
    """Estimated orders at 0, 1, infinity, q1 and q2.

    Near an end ``lambda ~ r^beta (1 + O(r^(2 beta + 2)))``, which is a
    linear correction for beta = -1/2, so the fit window sits closer in.
    """
    out = [conical_order_estimate(j, metric, r_range=(1e-6, 1e-4)) for j in range(3)]
    out += [umbilic_order_estimate(metric, q) for q in (metric.spec.q1, metric.spec.q2)]
    return out


def dsharp_grid(s, n=100, extent=3.0):
    """ds^2-sharp density on an n by n grid of ``[-extent, extent]^2`` minus the ends."""
    t = np.linspace(-extent, extent, n)
    Z = t[None, :] + 1j * t[:, None]
    Z = Z[(np.abs(Z) > 1e-9) & (np.abs(Z - 1.0) > 1e-9)]
    return Z, dsharp_metric(s, Z)


# -- mesh export -------------------------------------------------------------------

def mesh(metric, n=40, extent=2.5, hole=0.08):
    """Triangulated sample of x over a square in the z plane with the ends cut out.

    Returns vertices in upper half-space coordinates and triangles as
    index triples.
    """
    t = np.linspace(-extent, extent, n)
    Z = t[None, :] + 1j * t[:, None]
    keep = (np.abs(Z) > hole) & (np.abs(Z - 1.0) > hole)
    idx = -np.ones(Z.shape, dtype=int)
    idx[keep] = np.arange(int(keep.sum()))
    verts = upper_half_space(immerse(metric, Z[keep]))
    tris = []
    for i in range(n - 1):
        for j in range(n - 1):
            a, b, c, d = idx[i, j], idx[i, j + 1], idx[i + 1, j], idx[i + 1, j + 1]
            if min(a, b, c, d) < 0:
                continue
            tris += [(a, b, d), (a, d, c)]
    return verts, np.array(tris, dtype=int)


def write_obj(path, verts, tris):
    with open(path, "w") as fh:
        fh.write("# upper half-space coordinates (Re, Im, height)\n")
        for v in verts:
            fh.write(f"v {v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
        for t in tris:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def surface_summary(metric, res=120):
    _, ds = dsharp_grid(metric.spec)
    ta = total_abs_curvature(metric.spec)
    area = numerical_total_area(metric, res)
    return {"TA": ta, "area": area, "area_rel_err": area / ta - 1.0,
            "cone_orders": cone_orders(metric), "dsharp_min": float(np.min(ds)),
            "loop_invariance": loop_invariance(metric),
            "umbilics": [[metric.spec.q1.real, metric.spec.q1.imag],
                         [metric.spec.q2.real, metric.spec.q2.imag]]}
