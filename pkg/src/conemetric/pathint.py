"""Integration of the frame equation ``dF F^-1 = A(z) dz`` along paths.

For a divisor with Hopf differential ``Q = q dz^2`` and hyperbolic Gauss map
``G = z`` the coefficient is ``A(z) = q(z) [[z, -z^2], [1, -z]]``, a rank one
nilpotent matrix.  Paths are chains of line segments and circular arcs in
C minus {0, 1}; the same machinery runs in the chart ``w = 1/z``.

The stepper is an embedded Dormand-Prince 5(4) pair over arc length.  After
every accepted step the frame is divided by the square root of its
determinant; the determinant stays within rounding of 1, so the principal
root is the continuous one.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import PathTooClose, StepUnderflow
from .hopf import evaluate_Q

SINGULAR = (0.0, 1.0)


# -- paths -------------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    @property
    def length(self):
        return abs(self.end - self.start)

    def point(self, s):
        L = self.length
        return self.start + (self.end - self.start) * (np.asarray(s) / L if L else 0.0)

    def velocity(self, s):
        L = self.length
        v = (self.end - self.start) / L if L else 0.0
        return np.full(np.shape(s), v, dtype=complex)

    def reversed(self):
        return Line(self.end, self.start)

    def conjugate(self):
        return Line(complex(self.start).conjugate(), complex(self.end).conjugate())

    def min_distance(self, p):
        d = self.end - self.start
        if d == 0:
            return abs(self.start - p)
        t = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
        t = min(1.0, max(0.0, t))
        return abs(self.start + t * d - p)

    def to_json(self):
        return {"type": "line", "start": _cj(self.start), "end": _cj(self.end)}


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    angle_start: float
    angle_end: float

    @property
    def length(self):
        return self.radius * abs(self.angle_end - self.angle_start)

    @property
    def start(self):
        return self.center + self.radius * np.exp(1j * self.angle_start)

    @property
    def end(self):
        return self.center + self.radius * np.exp(1j * self.angle_end)

    def _angle(self, s):
        sign = 1.0 if self.angle_end >= self.angle_start else -1.0
        return self.angle_start + sign * np.asarray(s) / self.radius, sign

    def point(self, s):
        a, _ = self._angle(s)
        return self.center + self.radius * np.exp(1j * a)

    def velocity(self, s):
        a, sign = self._angle(s)
        return sign * 1j * np.exp(1j * a)

    def reversed(self):
        return Arc(self.center, self.radius, self.angle_end, self.angle_start)

    def conjugate(self):
        return Arc(complex(self.center).conjugate(), self.radius, -self.angle_start, -self.angle_end)

    def min_distance(self, p):
        rel = p - self.center
        if rel == 0:
            return self.radius
        phi = math.atan2(rel.imag, rel.real)
        lo, hi = sorted((self.angle_start, self.angle_end))
        # shift phi into [lo, lo + 2 pi)
        phi = lo + (phi - lo) % (2 * math.pi)
        if phi <= hi:
            return abs(abs(rel) - self.radius)
        return min(abs(self.start - p), abs(self.end - p))

    def to_json(self):
        return {"type": "arc", "center": _cj(self.center), "radius": self.radius,
                "angle_start": self.angle_start, "angle_end": self.angle_end}


def _cj(z):
    z = complex(z)
    return [z.real, z.imag]


def _segment_from_json(d):
    if d["type"] == "line":
        return Line(complex(*d["start"]), complex(*d["end"]))
    if d["type"] == "arc":
        return Arc(complex(*d["center"]), float(d["radius"]),
                   float(d["angle_start"]), float(d["angle_end"]))
    raise ValueError(f"unknown segment type {d['type']!r}")


@dataclass(frozen=True)
class PathSpec:
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for a, b in zip(segs, segs[1:]):
            if abs(complex(a.end) - complex(b.start)) > 1e-12 * (1 + abs(complex(a.end))):
                raise ValueError(f"segments do not chain: {a.end} != {b.start}")

    @classmethod
    def polyline(cls, *points):
        return cls(tuple(Line(complex(a), complex(b)) for a, b in zip(points, points[1:])))

    @property
    def basepoint(self):
        return complex(self.segments[0].start)

    @property
    def start(self):
        return self.basepoint

    @property
    def end(self):
        return complex(self.segments[-1].end)

    @property
    def length(self):
        return sum(s.length for s in self.segments)

    def __add__(self, other):
        return PathSpec(self.segments + other.segments)

    def reversed(self):
        return PathSpec(tuple(s.reversed() for s in reversed(self.segments)))

    def conjugate(self):
        return PathSpec(tuple(s.conjugate() for s in self.segments))

    def min_distance(self, points=SINGULAR):
        return min(seg.min_distance(p) for seg in self.segments for p in points)

    def to_json(self):
        return {"segments": [s.to_json() for s in self.segments]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(_segment_from_json(d) for d in data["segments"]))


def circle_loop(center, radius, basepoint, ccw=True):
    """Loop from ``basepoint`` to the circle, once around it and back.

    The approach is a straight segment to the point of the circle nearest to
    the basepoint.
    """
    rel = basepoint - center
    a0 = math.atan2(rel.imag, rel.real)
    attach = center + radius * np.exp(1j * a0)
    a1 = a0 + (2 * math.pi if ccw else -2 * math.pi)
    return PathSpec((Line(basepoint, attach), Arc(center, radius, a0, a1), Line(attach, basepoint)))


def canonical_route(target, start=-1.0):
    """Three-leg path from ``start`` (on the negative real axis) to ``target``.

    The path rises vertically from ``start``, runs horizontally at height
    ``H >= 1`` and descends vertically onto ``target`` without crossing the
    real axis, so its distance to 0 and 1 never drops below that of the
    target itself (or 1).
    """
    target = complex(target)
    sgn = 1.0 if target.imag >= 0 else -1.0
    H = sgn * max(1.0, abs(target.imag))
    pts = [start, start + 1j * H, target.real + 1j * H, target]
    pts = [p for i, p in enumerate(pts) if i == 0 or abs(p - pts[i - 1]) > 0]
    if len(pts) == 1:
        return PathSpec((Line(start, start),))
    return PathSpec.polyline(*pts)


# -- the ODE -----------------------------------------------------------------

@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step_fraction: float = 0.1
    r_min: float = 0.05
    renormalize: bool = True
    max_steps: int = 200000

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


def null_matrix(G):
    """``[[G, -G^2], [1, -G]]`` stacked over the shape of G."""
    G = np.asarray(G, dtype=complex)
    out = np.empty(G.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = G
    out[..., 0, 1] = -G * G
    out[..., 1, 0] = 1.0
    out[..., 1, 1] = -G
    return out


def ode_coefficient(z, q):
    """``A(z) = [[z, -z^2], [1, -z]] q(z)`` for the divisor equation."""
    z = np.asarray(z, dtype=complex)
    return null_matrix(z) * np.asarray(evaluate_Q(q, z))[..., None, None]


class FrameODE:
    """``dF/dz = coefficient(z) F`` in the z chart, singular only at 0 and 1.

    Subclasses override :meth:`coefficient`.  :meth:`in_w_chart` gives the
    same equation in ``w = 1/z``; its singular set is again {0, 1}.
    """

    chart = "z"
    singular = SINGULAR

    def coefficient(self, z):
        raise NotImplementedError

    def in_w_chart(self):
        return WChartODE(self)


class DivisorODE(FrameODE):
    def __init__(self, q):
        self.q = q

    def coefficient(self, z):
        return ode_coefficient(z, self.q)

    def in_w_chart(self):
        return DivisorODEW(self.q)


class WChartODE(FrameODE):
    chart = "w"

    def __init__(self, base):
        self.base = base

    def coefficient(self, w):
        w = np.asarray(w, dtype=complex)
        return self.base.coefficient(1.0 / w) * (-1.0 / (w * w))[..., None, None]

    def in_w_chart(self):
        return self.base


class DivisorODEW(FrameODE):
    """The divisor equation written in ``w = 1/z``: ``q_w(w) [[-w, 1], [-w^2, w]]``."""

    chart = "w"

    def __init__(self, q):
        self.q = q

    def coefficient(self, w):
        w = np.asarray(w, dtype=complex)
        m = np.empty(w.shape + (2, 2), dtype=complex)
        m[..., 0, 0] = -w
        m[..., 0, 1] = 1.0
        m[..., 1, 0] = -w * w
        m[..., 1, 1] = w
        return m * np.asarray(self.q.q_w(w))[..., None, None]

    def in_w_chart(self):
        return DivisorODE(self.q)


# -- Dormand-Prince 5(4) -------------------------------------------------------

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def renormalize_det(F):
    det = F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]
    return F / np.sqrt(det)[..., None, None]


def dopri_solve(rhs, s0, s1, y0, cfg, hmax=None, outputs=(), renorm=None):
    """Integrate ``y' = rhs(s, y)`` from s0 to s1 (s1 > s0).

    ``y0`` may carry any leading batch shape; one step size is shared by the
    batch.  ``hmax(s)`` caps the step.  Returns ``(y_end, [y at outputs])``
    where ``outputs`` are increasing parameters inside ``[s0, s1]``.
    """
    span = s1 - s0
    y = np.array(y0, dtype=complex)
    outs = []
    targets = [o for o in outputs] + [s1]
    if span <= 0:
        return y, [y.copy() for _ in outputs]
    h = min(span, hmax(s0) if hmax else span) * 0.5
    s = s0
    k0 = rhs(s, y)
    steps = 0
    floor = 1e-14 * span
    ti = 0
    while ti < len(targets):
        target = targets[ti]
        if target - s <= floor:
            if ti < len(targets) - 1:
                outs.append(y.copy())
            ti += 1
            continue
        if hmax is not None:
            h = min(h, hmax(s))
        last = h >= target - s
        step = target - s if last else h
        k = [k0]
        for i in range(1, 7):
            acc = y + step * sum(a * kk for a, kk in zip(_A[i], k) if a)
            k.append(rhs(s + _C[i] * step, acc))
        y_new = acc  # row 6 of the tableau equals the 5th order weights
        err_vec = step * sum(e * kk for e, kk in zip(_E, k) if e)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale)) if y.size else 0.0
        steps += 1
        if steps > cfg.max_steps:
            raise StepUnderflow(f"exceeded {cfg.max_steps} steps")
        if err <= 1.0:
            s = target if last else s + step
            y = y_new
            if renorm is not None:
                y = renorm(y)
                k0 = rhs(s, y)
            else:
                k0 = k[6]
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = step * fac if not last else max(h, step * fac)
        else:
            h = step * max(0.2, 0.9 * err ** -0.2)
            if h < floor:
                raise StepUnderflow(f"step {h:.3g} below {floor:.3g} at s={s}")
    return y, outs


# -- integration along paths -------------------------------------------------

def _check_path(path, ode, cfg):
    d = path.min_distance(ode.singular)
    if d < cfg.r_min:
        raise PathTooClose(f"path comes within {d:.3g} of a singular point (r_min={cfg.r_min})")


def integrate_segment(seg, ode, cfg, F_init, outputs=()):
    def rhs(s, F):
        z = seg.point(s)
        return (ode.coefficient(z) @ F) * seg.velocity(s)[..., None, None]

    def hmax(s):
        z = seg.point(s)
        dist = min(abs(z - p) for p in ode.singular)
        return max(cfg.max_step_fraction * dist, 1e-300)

    renorm = renormalize_det if cfg.renormalize else None
    return dopri_solve(rhs, 0.0, seg.length, F_init, cfg, hmax, outputs, renorm)


def integrate_frame(path, q_or_ode, cfg=None, F_init=None, check=True):
    """Frame at the end of ``path`` solving ``dF/dz = A(z) F``, ``F(start) = F_init``.

    ``q_or_ode`` is a HopfDifferential or a :class:`FrameODE` (possibly in
    the w chart, in which case the path lives in the w plane).
    """
    cfg = cfg or IntegratorConfig()
    ode = q_or_ode if isinstance(q_or_ode, FrameODE) else DivisorODE(q_or_ode)
    F = np.eye(2, dtype=complex) if F_init is None else np.array(F_init, dtype=complex)
    if check:
        _check_path(path, ode, cfg)
    for seg in path.segments:
        if seg.length == 0:
            continue
        F, _ = integrate_segment(seg, ode, cfg, F)
    return F


def conjugate_symmetry_check(path, q_or_ode, cfg=None):
    """``max |conj(F along conj(path)) - F along path|`` with ``F(start) = id``.

    The coefficient satisfies ``conj(A(conj z)) = A(z)`` and the path starts
    on the real axis, so the deviation measures integration error only.
    """
    if abs(path.start.imag) > 1e-14:
        raise ValueError("path must start on the real axis")
    F = integrate_frame(path, q_or_ode, cfg)
    Fc = integrate_frame(path.conjugate(), q_or_ode, cfg)
    return float(np.max(np.abs(np.conj(Fc) - F)))


def develop_segments(ode, starts, ends, F0, cfg=None, outputs=(1.0,)):
    """Integrate a batch of straight segments with one shared step size.

    Segment j is ``z = starts[j] + t (ends[j] - starts[j])`` for t in [0, 1];
    ``F0`` is one frame or one per segment.  Returns the frames at the
    parameters ``outputs`` (increasing, in (0, 1]) as an array of shape
    ``(len(outputs), n, 2, 2)``.
    """
    cfg = cfg or IntegratorConfig()
    starts = np.atleast_1d(np.asarray(starts, dtype=complex))
    delta = np.atleast_1d(np.asarray(ends, dtype=complex)) - starts
    n = len(starts)
    F0 = np.broadcast_to(np.asarray(F0, dtype=complex), (n, 2, 2)).copy()
    outputs = [float(o) for o in outputs]
    if n == 0 or not outputs:
        return np.empty((len(outputs), n, 2, 2), dtype=complex)
    singular = np.asarray(ode.singular, dtype=complex)
    moving = np.abs(delta) > 0
    speed = np.where(moving, np.abs(delta), 1.0)

    def rhs(t, F):
        z = starts + t * delta
        z = np.where(moving, z, 2.0)  # stationary rows: any regular point
        return (ode.coefficient(z) @ F) * delta[:, None, None]

    def hmax(t):
        z = starts + t * delta
        dist = np.min(np.abs(z[:, None] - singular[None, :]), axis=1) / speed
        return max(cfg.max_step_fraction * float(np.min(np.where(moving, dist, np.inf))), 1e-300)

    if not np.any(moving):
        return np.broadcast_to(F0, (len(outputs), n, 2, 2)).copy()
    renorm = renormalize_det if cfg.renormalize else None
    y_end, outs = dopri_solve(rhs, 0.0, outputs[-1], F0, cfg, hmax, outputs[:-1], renorm)
    return np.array(outs + [y_end])


def route_points(points, start=-1.0):
    """Corner points of :func:`canonical_route` for many targets at once."""
    points = np.asarray(points, dtype=complex)
    sgn = np.where(points.imag >= 0, 1.0, -1.0)
    H = sgn * np.maximum(1.0, np.abs(points.imag))
    return [np.full(points.shape, start, dtype=complex), start + 1j * H, points.real + 1j * H, points]


def develop_frames(ode, points, cfg=None, start=-1.0, F0=None):
    """Frames at ``points`` continued from ``F(start) = F0`` along canonical routes.

    All routes are integrated as one batch.  The routes avoid the real axis
    except at their endpoints, so the result is the principal branch on
    the plane slit along the real axis outside ``[start, ...)``.
    """
    cfg = cfg or IntegratorConfig()
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    singular = np.asarray(ode.singular, dtype=complex)
    if points.size:
        d = float(np.min(np.abs(points[:, None] - singular[None, :])))
        if d < cfg.r_min:
            raise PathTooClose(f"target within {d:.3g} of a singular point (r_min={cfg.r_min})")
    F = np.eye(2, dtype=complex) if F0 is None else np.asarray(F0, dtype=complex)
    corners = route_points(points, start)
    for a, b in zip(corners, corners[1:]):
        F = develop_segments(ode, a, b, F, cfg)[-1]
    return F
