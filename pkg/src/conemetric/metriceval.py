"""Sampling of cone spherical metrics: conformal factor, curvature, area, cone orders.

The sphere is covered by three congruent regions, one around each cone
point.  Region j is ``{|x| <= 1, Re x <= 1/2}`` in the chart ``x = z``,
``x = 1 - z`` or ``x = 1/z`` (j = 0, 1, 2).  Each region contains exactly one
cone point, at its centre ``x = 0``, and the other two lie at distance at
least 1.  Inside a region we use polar coordinates about the centre.

A metric source returns ``log lambda`` in chart coordinates, where
``dsigma^2 = lambda^2 |dx|^2``.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .divisor import Divisor
from .errors import FitDiverged, SingularityTooClose
from .hopf import hopf_from_divisor
from .monodromy import compute_monodromy, unitarize
from .pathint import (DivisorODE, IntegratorConfig, develop_frames,
                      develop_segments)

LOG2 = math.log(2.0)
EXCLUSION_RADIUS = 1e-3
STENCIL_POINTS = 16
STEP_FRACTION = 0.02
SAMPLING_CONFIG = IntegratorConfig(r_min=1e-7)

# chart coordinate x -> z as Mobius matrices
CHARTS = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[-1, 1], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
)


def chart_to_z(j, x):
    a, b, c, d = CHARTS[j].ravel()
    x = np.asarray(x, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (a * x + b) / (c * x + d)


def conformal_factor(g_value, dg_value):
    """``2 |dg| / (1 + |g|^2)``, evaluated through ``1/g`` when ``|g| > 1``."""
    g = np.asarray(g_value, dtype=complex)
    dg = np.asarray(dg_value, dtype=complex)
    ag = np.abs(g)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        big = 2.0 * np.abs(dg) / ag ** 2 / (1.0 + 1.0 / ag ** 2)
        small = 2.0 * np.abs(dg) / (1.0 + ag ** 2)
    out = np.where(ag > 1.0, big, small)
    return float(out) if out.ndim == 0 else out


def circle_laplacian(center_value, ring_values, h):
    """``4 (mean over the ring - centre) / h^2``; 4 ring points give the 5-point stencil."""
    return 4.0 * (np.mean(ring_values, axis=-1) - center_value) / (h * h)


# -- metric sources --------------------------------------------------------------

class MetricSource:
    """Interface: ``log_lambda(j, x)`` in chart j; optional batched overrides."""

    divisor: Divisor

    def log_lambda(self, j, x):
        raise NotImplementedError

    def lam(self, j, x):
        return np.exp(self.log_lambda(j, x))

    def lambda_z(self, z):
        """Conformal factor in the z chart."""
        return self.lam(0, z)

    def ray_values(self, j, X, curvature=False, n=STENCIL_POINTS, alpha=STEP_FRACTION):
        """``log lambda`` (and curvature) on an array of chart points.

        Rows of X are rays towards the centre; subclasses may exploit this.
        """
        X = np.asarray(X, dtype=complex)
        logl = self.log_lambda(j, X)
        if not curvature:
            return logl, None
        return logl, self.curvature(j, X.ravel(), n=n, alpha=alpha, center=logl.ravel()).reshape(X.shape)

    def ring_log_lambda(self, j, x, h, n):
        x = np.asarray(x, dtype=complex)
        ring = x[:, None] + h[:, None] * np.exp(2j * np.pi * np.arange(n) / n)[None, :]
        return self.log_lambda(j, ring)

    def curvature(self, j, x, n=STENCIL_POINTS, alpha=STEP_FRACTION, h=None, center=None,
                  richardson=True):
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        phi0 = self.log_lambda(j, x) if center is None else center
        if h is None:
            h = stencil_radius(x, phi0, alpha)
        h = np.broadcast_to(np.asarray(h, dtype=float), x.shape).astype(float)
        lap = circle_laplacian(phi0, self.ring_log_lambda(j, x, h, n), h)
        if richardson:
            lap2 = circle_laplacian(phi0, self.ring_log_lambda(j, x, h / 2, n), h / 2)
            lap = (4.0 * lap2 - lap) / 3.0
        return -lap / np.exp(2.0 * phi0)


def _dist_to_singular(x):
    x = np.asarray(x, dtype=complex)
    return np.minimum(np.abs(x), np.abs(x - 1.0))


def stencil_radius(y, logl, alpha=STEP_FRACTION):
    """Ring radius ``alpha min(dist to {0, 1}, 1/lambda)``.

    ``1/lambda`` is the coordinate length of a unit of metric length; where
    the metric concentrates, log lambda varies on that scale.
    """
    return alpha * np.minimum(_dist_to_singular(y), np.exp(-np.asarray(logl)))


class ExplicitMetric(MetricSource):
    """Pull-back of the round metric by an explicit developing map.

    ``g`` lives in a normalized coordinate ``zeta = M z`` (M a Mobius matrix).
    """

    def __init__(self, g, divisor, M=None):
        self.g = g
        self.divisor = divisor
        self.M = np.eye(2, dtype=complex) if M is None else np.asarray(M, dtype=complex)
        self._K = [self.M @ C for C in CHARTS]

    @classmethod
    def from_solution(cls, s):
        return cls(s.g, s.divisor, s.chart_map)

    def log_lambda(self, j, x):
        K = self._K[j]
        x = np.asarray(x, dtype=complex)
        den = K[1, 0] * x + K[1, 1]
        zeta = (K[0, 0] * x + K[0, 1]) / den
        log_abs_g = self.g.log_abs(zeta)
        return (LOG2 + self.g.log_abs_derivative(zeta) - np.logaddexp(0.0, 2.0 * log_abs_g)
                + math.log(abs(np.linalg.det(K))) - 2.0 * np.log(np.abs(den)))

    def g_z(self, z):
        """Developing map as a function of z (principal branch)."""
        M = self.M
        return self.g((M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1]))

    def schwarzian(self, z):
        """Schwarzian of g in the z coordinate (chain rule through M)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        M = self.M
        den = M[1, 0] * z + M[1, 1]
        zeta = (M[0, 0] * z + M[0, 1]) / den
        return self.g.schwarzian(zeta) * (np.linalg.det(M) / den ** 2) ** 2


class IrreducibleMetric(MetricSource):
    """Metric developed from the frame equation and a unitarizing matrix P.

    In charts 0 and 1 the ODE coordinate is z (``z = x`` or ``z = 1 - x``);
    in chart 2 it is ``w = x``.  ``lambda = 2 / |row F P|^2`` with the row
    ``(1, -z)`` or ``(w, -1)``.
    """

    def __init__(self, divisor, cfg=None, P=None):
        self.divisor = divisor
        self.cfg = cfg or IntegratorConfig()
        self.q = hopf_from_divisor(divisor)
        self.odes = (DivisorODE(self.q), DivisorODE(self.q).in_w_chart())
        if P is None:
            m = compute_monodromy(divisor, self.cfg)
            self.monodromy = m
            self.unitarization = unitarize(m)
            P = self.unitarization.P
        self.P = np.asarray(P, dtype=complex)
        self.sampling_cfg = IntegratorConfig(self.cfg.rtol, self.cfg.atol, self.cfg.max_step_fraction,
                                             r_min=min(self.cfg.r_min, 1e-7))

    @staticmethod
    def _ode_coord(j, x):
        x = np.asarray(x, dtype=complex)
        return 1.0 - x if j == 1 else x

    def _ode(self, j):
        return self.odes[1] if j == 2 else self.odes[0]

    def _row(self, j, y):
        y = np.asarray(y, dtype=complex)
        if j == 2:
            return np.stack([y, -np.ones_like(y)], axis=-1)
        return np.stack([np.ones_like(y), -y], axis=-1)

    def _log_lambda_from_frames(self, j, y, F):
        v = np.einsum("...i,...ij->...j", self._row(j, y), F @ self.P)
        return LOG2 - np.log(np.sum(np.abs(v) ** 2, axis=-1))

    def frames(self, j, x):
        y = self._ode_coord(j, x)
        flat = np.atleast_1d(y).ravel()
        F = develop_frames(self._ode(j), flat, self.sampling_cfg)
        return F.reshape(np.shape(y) + (2, 2))

    def log_lambda(self, j, x):
        y = self._ode_coord(j, x)
        return self._log_lambda_from_frames(j, y, self.frames(j, x))

    def g_z(self, z):
        """Developing map ``-v/u`` of the unitarized frame (canonical routes)."""
        z = np.asarray(z, dtype=complex)
        F = develop_frames(self.odes[0], np.atleast_1d(z).ravel(), self.sampling_cfg) @ self.P
        u = F[:, 0, 0] - z.ravel() * F[:, 1, 0]
        v = F[:, 0, 1] - z.ravel() * F[:, 1, 1]
        return (-v / u).reshape(z.shape)

    def _gauge_coefficient(self, j, y):
        """Coefficient of the ODE for ``(row F, second frame row)``.

        With ``u = row F`` the frame equation reduces to ``u' = -f, f' = q u``
        (z chart, ``f = F[1]``) or ``u' = f, f' = -q_w u`` (w chart,
        ``f = F[0]``).  Stepping this pair keeps rounding relative to the
        small quantity u instead of the large frame entries.
        """
        A = self._ode(j).coefficient(y)
        B = np.zeros_like(A)
        if j == 2:
            B[..., 0, 1] = 1.0
            B[..., 1, 0] = -A[..., 0, 1]
        else:
            B[..., 0, 1] = -1.0
            B[..., 1, 0] = A[..., 1, 0]
        return B

    def _gauge_frames(self, j, y, F):
        row = self._row(j, y)
        u = np.einsum("...i,...ij->...j", row, F)
        f = F[..., 0, :] if j == 2 else F[..., 1, :]
        return np.stack([u, f], axis=-2)

    def ring_schwarzian(self, j, y0, fraction=0.25, n=32, singular=(0.0, 1.0)):
        """Schwarzian of g in the ODE coordinate of chart j at ``y0``.

        Samples come from single gauged steps out of the centre frame, so
        the ring sees one branch of g; the step is exact through fifth order
        in the displacement, which covers the third Taylor coefficient.  g
        is first rotated so that it vanishes at the centre, and the ring
        radius stays below ``fraction / lambda``, which keeps the pole of the
        rotated map outside the ring.
        """
        from .hopf import schwarzian_of_samples
        y = np.array([y0], dtype=complex)
        F = develop_frames(self._ode(j), y, self.sampling_cfg)
        lam = math.exp(float(self._log_lambda_from_frames(j, y, F)[0]))
        Y = self._gauge_frames(j, y, F)
        v = (Y[0, 0, :] @ self.P)
        v = v / np.linalg.norm(v)
        R = self.P @ np.array([[np.conj(v[0]), -v[1]], [np.conj(v[1]), v[0]]])
        h = fraction * min(min(abs(y0 - p) for p in singular), 1.0 / lam)
        ring = np.exp(2j * np.pi * np.arange(n) / n)
        Ys = self._step_gauge(j, np.full(n, y0), np.repeat(Y, n, 0), y0 + h * ring)
        V = Ys[:, 0, :] @ R
        return schwarzian_of_samples(-V[:, 1] / V[:, 0], h)

    def schwarzian(self, z, fraction=0.25, n=32):
        """Schwarzian of the developing map in the z coordinate.

        Points with ``|z| > 2`` are handled in the w chart, where the row
        ``(w, -1) F`` is w times the z chart row, so g has the same formula.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        for i, z0 in enumerate(z):
            if abs(z0) > 2.0:
                out[i] = self.ring_schwarzian(2, 1.0 / z0, fraction, n) / z0 ** 4
            else:
                out[i] = self.ring_schwarzian(0, z0, fraction, n)
        return out

    def _step_gauge(self, j, y, Y, targets):
        """One Dormand-Prince step of the gauged system from ``(y, Y)`` to each target.

        The step map is holomorphic in the displacement and exact through
        fifth order, so circle averages built from it are accurate far
        beyond the one-step error.
        """
        from .pathint import _A, _B5, _C
        delta = targets - y
        k = []
        for i in range(7):
            acc = Y + sum(a * kk for a, kk in zip(_A[i], k) if a) if i else Y
            k.append(self._gauge_coefficient(j, y + _C[i] * delta) @ acc * delta[..., None, None])
        return Y + sum(b * kk for b, kk in zip(_B5, k) if b)

    def _log_lambda_from_gauge(self, Y):
        v = Y[..., 0, :] @ self.P
        return LOG2 - np.log(np.sum(np.abs(v) ** 2, axis=-1))

    def curvature_from_frames(self, j, y, F, n=STENCIL_POINTS, alpha=STEP_FRACTION, h=None,
                              richardson=True, chunk=20000):
        y = np.atleast_1d(np.asarray(y, dtype=complex))
        F = np.asarray(F).reshape(y.shape + (2, 2))
        Y = self._gauge_frames(j, y, F)
        phi0 = self._log_lambda_from_gauge(Y)
        if h is None:
            h = stencil_radius(y, phi0, alpha)
        h = np.broadcast_to(np.asarray(h, dtype=float), y.shape)
        ring = np.exp(2j * np.pi * np.arange(n) / n)
        out = np.empty(y.shape)
        for s in range(0, y.size, chunk):
            sl = slice(s, s + chunk)
            laps = []
            for scale in ((1.0, 0.5) if richardson else (1.0,)):
                hh = h[sl] * scale
                tgt = y[sl, None] + hh[:, None] * ring[None, :]
                Ys = self._step_gauge(j, np.repeat(y[sl, None], n, 1), np.repeat(Y[sl, None], n, 1), tgt)
                laps.append(circle_laplacian(phi0[sl], self._log_lambda_from_gauge(Ys), hh))
            lap = (4.0 * laps[1] - laps[0]) / 3.0 if richardson else laps[0]
            out[sl] = -lap / np.exp(2.0 * phi0[sl])
        return out

    def curvature(self, j, x, n=STENCIL_POINTS, alpha=STEP_FRACTION, h=None, center=None,
                  richardson=True):
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        y = self._ode_coord(j, x)
        return self.curvature_from_frames(j, y, self.frames(j, x), n, alpha, h, richardson)

    def ray_values(self, j, X, curvature=False, n=STENCIL_POINTS, alpha=STEP_FRACTION):
        """Develop along each row of X (ordered from the outer end inwards)."""
        X = np.asarray(X, dtype=complex)
        Y = self._ode_coord(j, X)
        start, end = Y[:, 0], Y[:, -1]
        F0 = develop_frames(self._ode(j), start, self.sampling_cfg)
        span = end - start
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.real((Y - start[:, None]) / span[:, None])
        tau_common = tau[0]
        if not np.allclose(tau, tau_common[None, :], atol=1e-12):
            raise ValueError("rays must share their relative node positions")
        frames = np.empty(Y.shape + (2, 2), dtype=complex)
        frames[:, 0] = F0
        if Y.shape[1] > 1:
            out = develop_segments(self._ode(j), start, end, F0, self.sampling_cfg, tau_common[1:])
            frames[:, 1:] = np.moveaxis(out, 0, 1)
        logl = self._log_lambda_from_frames(j, Y, frames)
        if not curvature:
            return logl, None
        K = self.curvature_from_frames(j, Y.ravel(), frames.reshape(-1, 2, 2), n, alpha)
        return logl, K.reshape(Y.shape)


def metric_source(d, cfg=None):
    """Metric source for a divisor: irreducible, or explicit for reducible classes."""
    from .divisor import ReducibilityClass, classify_reducibility
    from .reducible import solve_h1, solve_h3
    cls = classify_reducibility(d)
    if cls is ReducibilityClass.IRREDUCIBLE:
        return IrreducibleMetric(d, cfg)
    sols = solve_h3(d) if cls is ReducibilityClass.H3_REDUCIBLE else solve_h1(d)
    return ExplicitMetric.from_solution(sols[0])


# -- point evaluation ------------------------------------------------------------

def curvature_sample(z, h, source, n=4, richardson=False):
    """``K = -Laplacian(log lambda) / lambda^2`` at z with a ring of n points of radius h.

    ``n = 4`` is the classic five-point Laplacian.  Raises SingularityTooClose
    when z is within 10 h of 0 or 1.
    """
    z = complex(z)
    if min(abs(z), abs(z - 1.0)) <= 10 * h:
        raise SingularityTooClose(f"z={z} within {10 * h:g} of a cone point")
    return float(source.curvature(0, np.array([z]), n=n, h=h, richardson=richardson)[0])


# -- polar grid over the three regions ----------------------------------------------

def region_radius(theta):
    c = np.cos(theta)
    with np.errstate(divide="ignore"):
        return np.where(c > 0.5, 1.0 / (2.0 * np.maximum(c, 1e-300)), 1.0)


def _gauss(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def polar_nodes(res, beta, r_in=EXCLUSION_RADIUS):
    """Angles, radial parameters and weights for one region.

    Radii are ``r = R(theta) t^p`` with ``p = 1/(beta + 1)``, which turns the
    area density ``r^(2 beta + 1) dr`` into a regular function of t.  The
    angular rule is split at the corners ``theta = +-pi/3`` of the region.
    """
    n1 = max(2, int(round(res / 3)))
    th1, w1 = _gauss(n1, -math.pi / 3, math.pi / 3)
    th2, w2 = _gauss(max(2, res - n1), math.pi / 3, 5 * math.pi / 3)
    theta = np.concatenate([th1, th2])
    wtheta = np.concatenate([w1, w2])
    p = 1.0 / (beta + 1.0)
    t_in = r_in ** (1.0 / p)
    t, wt = _gauss(res, t_in, 1.0)
    t, wt = t[::-1], wt[::-1]  # outer end first
    return theta, wtheta, t, wt, p, t_in


@dataclass
class MetricSampleGrid:
    z: np.ndarray
    chart: np.ndarray
    x: np.ndarray
    lam: np.ndarray
    K_est: np.ndarray
    cell_area: np.ndarray
    retained: np.ndarray
    res: int
    exclusion_radii: tuple
    inner_area: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def area(self):
        return float(np.sum(self.cell_area) + self.inner_area)

    @property
    def max_curvature_deviation(self):
        K = self.K_est[self.retained]
        return float(np.max(np.abs(K - 1.0))) if K.size else float("nan")

    def write_csv(self, path):
        lam_z = self.lam * np.where(self.chart == 2, np.abs(self.x) ** 2, 1.0)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["z_re", "z_im", "lambda", "K_est", "chart", "retained"])
            for z, lz, k, c, r in zip(self.z, lam_z, self.K_est, self.chart, self.retained):
                w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(lz)),
                            repr(float(k)), int(c), int(r)])


def roundoff_bound(logl, h, eps=np.finfo(float).eps):
    """Rough bound on the curvature error caused by rounding in ``log lambda``.

    The ring average loses about ``eps (1 + |log lambda|)`` and is divided by
    ``h^2 lambda^2``; the Richardson combination amplifies this about 6x.
    """
    return 24.0 * eps * (1.0 + np.abs(logl)) / (h * h * np.exp(2.0 * logl))


def sample_grid(source, res=200, r_in=EXCLUSION_RADIUS, curvature=True, roundoff_limit=1e-6,
                alpha=STEP_FRACTION):
    """Evaluate the metric on the polar grids of the three regions.

    Curvature is retained at nodes whose rounding bound (see
    :func:`roundoff_bound`) is below ``roundoff_limit``.  Near cone points of
    positive order ``lambda`` tends to 0 and curvature cannot be resolved
    in double precision there.
    """
    zs, charts, xs, lams, Ks, cells, keep = [], [], [], [], [], [], []
    inner = 0.0
    radii = []
    for j in range(3):
        beta = source.divisor.beta[j]
        theta, wtheta, t, wt, p, t_in = polar_nodes(res, beta, r_in)
        R = region_radius(theta)
        r = R[:, None] * t[None, :] ** p
        X = r * np.exp(1j * theta)[:, None]
        logl, K = source.ray_values(j, X, curvature=curvature, alpha=alpha)
        lam = np.exp(logl)
        jac = r * p * R[:, None] * t[None, :] ** (p - 1.0)
        cell = wtheta[:, None] * wt[None, :] * jac * lam ** 2
        # analytic closure of the inner disk with lambda ~ C r^beta fitted on the innermost ring
        C2 = lam[:, -1] ** 2 / r[:, -1] ** (2 * beta)
        r0 = R * t_in ** p
        inner += float(np.sum(wtheta * C2 * r0 ** (2 * beta + 2) / (2 * beta + 2)))
        if K is None:
            K = np.full(X.shape, np.nan)
            ok = np.zeros(X.shape, dtype=bool)
        else:
            h = stencil_radius(X, logl, alpha)
            ok = (r >= r_in * 0.5) & (roundoff_bound(logl, h) < roundoff_limit)
        radii.append(float(np.min(r[ok])) if ok.any() else float("nan"))
        zs.append(chart_to_z(j, X).ravel())
        charts.append(np.full(X.size, j))
        xs.append(X.ravel())
        lams.append(lam.ravel())
        Ks.append(K.ravel())
        cells.append(cell.ravel())
        keep.append(ok.ravel())
    return MetricSampleGrid(np.concatenate(zs), np.concatenate(charts), np.concatenate(xs),
                            np.concatenate(lams), np.concatenate(Ks), np.concatenate(cells),
                            np.concatenate(keep), res, tuple(radii), inner)


def total_area(source, res=200, r_in=EXCLUSION_RADIUS):
    """Area of the metric over the sphere (expected ``2 pi (2 + sum beta)``)."""
    return sample_grid(source, res, r_in, curvature=False).area


def expected_area(d):
    return 2.0 * math.pi * (2.0 + sum(d.beta))


# -- cone orders ---------------------------------------------------------------------

def conical_order_estimate(j, source, r_range=(1e-4, 1e-2), n_radii=21, n_rays=8, max_residual=0.1):
    """Slope of ``log lambda`` against ``log r`` near cone point j (0, 1 or inf).

    The fan of rays is symmetric, so first order angular terms cancel in
    the fit.  Raises FitDiverged when the largest fit residual exceeds
    ``max_residual``.
    """
    radii = np.geomspace(r_range[1], r_range[0], n_radii)
    theta = 2 * math.pi * (np.arange(n_rays) + 0.5) / n_rays
    X = radii[None, :] * np.exp(1j * theta)[:, None]
    logl, _ = source.ray_values(j, X)
    lr = np.broadcast_to(np.log(radii)[None, :], X.shape).ravel()
    A = np.stack([lr, np.ones_like(lr)], axis=1)
    coef, *_ = np.linalg.lstsq(A, logl.ravel(), rcond=None)
    resid = float(np.max(np.abs(A @ coef - logl.ravel())))
    if resid > max_residual or not np.isfinite(resid):
        raise FitDiverged(f"log-log fit residual {resid:.3g} at cone point {j}")
    return float(coef[0])


# -- consistency checks --------------------------------------------------------------

def schwarzian_residual(source, z):
    """``|S(g) - 2 Q|`` at the points z (z chart)."""
    from .hopf import evaluate_Q
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.abs(source.schwarzian(z) - 2.0 * evaluate_Q(hopf_from_divisor(source.divisor), z))


def monodromy_invariance(source, z, loops=1):
    """Spread of lambda(z) over developments that first wind around 0 and 1.

    Only meaningful for :class:`IrreducibleMetric`.
    """
    from .monodromy import standard_loops
    from .pathint import integrate_frame
    z = complex(z)
    base = float(source.lam(0, np.array([z]))[0])
    values = [base]
    for loop in standard_loops()[:2]:
        M = integrate_frame(loop, source.odes[0], source.cfg)
        F = develop_frames(source.odes[0], np.array([z]), source.sampling_cfg, F0=M)
        values.append(float(np.exp(source._log_lambda_from_frames(0, np.array([z]), F))[0]))
    return max(abs(v - base) for v in values)


def summary_json(grid, d, cone_orders):
    return {
        "area": grid.area,
        "expected_area": expected_area(d),
        "cone_order_estimates": list(cone_orders),
        "max_curvature_deviation": grid.max_curvature_deviation,
        "retained_points": int(np.sum(grid.retained)),
        "total_points": int(grid.z.size),
        "min_retained_radius": list(grid.exclusion_radii),
    }


def write_summary(path, summary):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2)
