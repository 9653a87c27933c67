"""Loop monodromy of the frame equation, unitarization and deformation class.

Loops are based at ``z0 = -1``.  ``gamma_1`` and ``gamma_2`` go once
counterclockwise around circles of radius 0.4 about 0 and 1 (the corridor
to 1 passes below the real axis); ``gamma_3`` goes once clockwise around
``|z| = 3``, which is the positive loop about infinity, and is integrated in
the chart ``w = 1/z``.  With ``F(z0) = id`` continuation along a loop
replaces F by ``F M``, and the three monodromies satisfy ``M1 M2 M3 = id``.
"""

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._json import matrix_from_json, matrix_to_json
from .divisor import cone_cosines
from .errors import (ConditionViolated, Indeterminate, NoInvariantForm,
                     NotUnitarizable, ReducibleInput)
from .hopf import hopf_from_divisor
from .pathint import (Arc, DivisorODE, IntegratorConfig, Line, PathSpec,
                      circle_loop, integrate_frame)

BASEPOINT = -1.0
LOOP_RADIUS = 0.4
OUTER_RADIUS = 3.0
IRREDUCIBLE_TOL = 1e-8
CENTRAL_TOL = 1e-8


def standard_loops(basepoint=BASEPOINT, radius=LOOP_RADIUS, outer=OUTER_RADIUS):
    """``(gamma_1, gamma_2, gamma_3_w)``; the last one lives in the w plane."""
    g1 = circle_loop(0.0, radius, basepoint)
    attach = 1.0 - 1j * radius
    a0 = -math.pi / 2
    g2 = PathSpec((Line(basepoint, attach), Arc(1.0, radius, a0, a0 + 2 * math.pi),
                   Line(attach, basepoint)))
    g3w = circle_loop(0.0, 1.0 / outer, 1.0 / basepoint)
    return g1, g2, g3w


def outer_loop_z(basepoint=BASEPOINT, outer=OUTER_RADIUS):
    """``gamma_3`` drawn in the z plane: clockwise around ``|z| = outer``."""
    return PathSpec((Line(basepoint, -outer), Arc(0.0, outer, math.pi, -math.pi),
                     Line(-outer, basepoint)))


@dataclass
class MonodromyTriple:
    M: tuple
    basepoint: float = BASEPOINT
    radii: tuple = (LOOP_RADIUS, LOOP_RADIUS, OUTER_RADIUS)
    closure_residual: float = field(default=float("nan"))

    def __post_init__(self):
        self.M = tuple(np.asarray(m, dtype=complex) for m in self.M)
        if math.isnan(self.closure_residual):
            self.closure_residual = closure_residual(self.M)

    @property
    def traces(self):
        return tuple(complex(np.trace(m)) for m in self.M)

    def to_json(self):
        return {"M": [matrix_to_json(m) for m in self.M], "basepoint": self.basepoint,
                "radii": list(self.radii), "closure_residual": self.closure_residual}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(matrix_from_json(m) for m in data["M"]), data.get("basepoint", BASEPOINT),
                   tuple(data.get("radii", (LOOP_RADIUS, LOOP_RADIUS, OUTER_RADIUS))))


def closure_residual(M):
    return float(np.max(np.abs(M[0] @ M[1] @ M[2] - np.eye(2))))


def compute_monodromy(d, cfg=None, check_tol=1e-7):
    """Monodromies of the three standard loops for divisor ``d``.

    M3 is integrated in the w chart and compared with ``(M1 M2)^-1``;
    ConditionViolated is raised when they differ by more than ``check_tol``
    relative to the size of the matrices.
    """
    cfg = cfg or IntegratorConfig()
    q = hopf_from_divisor(d)
    ode = DivisorODE(q)
    g1, g2, g3w = standard_loops()
    M1 = integrate_frame(g1, ode, cfg)
    M2 = integrate_frame(g2, ode, cfg)
    M3 = integrate_frame(g3w, ode.in_w_chart(), cfg)
    M3_alt = np.linalg.inv(M1 @ M2)
    scale = max(1.0, float(np.max(np.abs(M3_alt))))
    dev = float(np.max(np.abs(M3 - M3_alt)))
    if dev > check_tol * scale:
        raise ConditionViolated(f"M3 differs from (M1 M2)^-1 by {dev:.3g}")
    return MonodromyTriple((M1, M2, M3))


def verify_traces(m, d):
    """``|tr M_j + 2 cos B_j|`` for j = 1, 2, 3."""
    cos = cone_cosines(d)
    return tuple(abs(t + 2.0 * c) for t, c in zip(m.traces, cos))


# -- unitary triples in SU(2) ----------------------------------------------------

@dataclass(frozen=True)
class LemmaAValue:
    value: float
    attainable: bool


def lemma_a_value(C, tol=0.0):
    """``cos^2 C1 + cos^2 C2 + cos^2 C3 + 2 cos C1 cos C2 cos C3``.

    Unitary matrices with eigenvalues ``-exp(+-i C_j)`` and product id exist
    exactly when this is at most 1.
    """
    c1, c2, c3 = (math.cos(x) for x in C)
    value = c1 * c1 + c2 * c2 + c3 * c3 + 2.0 * c1 * c2 * c3
    return LemmaAValue(value, value <= 1.0 + tol)


@dataclass(frozen=True)
class StandardTriple:
    a: tuple
    C: tuple

    def product(self):
        return self.a[0] @ self.a[1] @ self.a[2]

    def to_json(self):
        return {"a": [matrix_to_json(m) for m in self.a], "C": list(self.C)}


def _triple_from_angles(C, boundary_tol=0.0):
    c1, c2, c3 = (math.cos(x) for x in C)
    s1 = math.sin(C[0])
    if abs(s1) < 1e-14:
        raise NotUnitarizable(f"sin C1 = {s1:.3g}; the first generator is central")
    e = np.exp(1j * C[0])
    a1 = np.diag([-e, -np.conj(e)])
    p = -1j * (np.conj(e) * c2 + c3) / s1
    q2 = 1.0 - abs(p) ** 2
    if q2 <= -boundary_tol or (boundary_tol == 0.0 and q2 <= 0.0):
        raise NotUnitarizable(f"|p|^2 = {abs(p) ** 2:.12g} >= 1: no unitary triple")
    q = math.sqrt(max(q2, 0.0))
    if q2 < 0:
        p /= abs(p)
    a2 = np.array([[p, -q], [q, np.conj(p)]], dtype=complex)
    a3 = np.linalg.inv(a1 @ a2)
    return StandardTriple((a1, a2, a3), tuple(C))


def standard_triple(d):
    """Unitary triple with ``tr a_j = -2 cos B_j`` and ``a1 a2 a3 = id``.

    ``a1`` is diagonal and the off-diagonal entry ``q`` of ``a2`` is real and
    positive.  Raises NotUnitarizable when ``L(d) >= 1``.
    """
    return _triple_from_angles(d.B if hasattr(d, "B") else tuple(d))


def boundary_triple(C, tol=1e-9):
    """Unitary triple for angles with ``lemma_a_value(C) = 1`` (up to ``tol``).

    On the boundary the off-diagonal entry vanishes, so the result is the
    diagonal (commuting) solution.
    """
    val = lemma_a_value(C).value
    if abs(val - 1.0) > tol:
        raise ConditionViolated(f"lemma_a_value = {val!r}, not on the boundary")
    C = tuple(C)
    for sign in itertools.product((1, -1), repeat=3):
        total = sum(s * c for s, c in zip(sign, C))
        if abs(np.exp(1j * total) + 1.0) < 1e-6:
            a = tuple(np.diag([-np.exp(1j * s * c), -np.exp(-1j * s * c)]) for s, c in zip(sign, C))
            return StandardTriple(a, C)
    raise ConditionViolated("no sign pattern closes the diagonal triple")


diagonal_triple = boundary_triple


# -- unitarization -------------------------------------------------------------

@dataclass
class Unitarization:
    P: np.ndarray
    U: tuple
    X: np.ndarray
    uniqueness_residual: float = float("nan")

    def to_json(self):
        return {"P": matrix_to_json(self.P), "U": [matrix_to_json(u) for u in self.U],
                "X": matrix_to_json(self.X), "uniqueness_residual": self.uniqueness_residual}


def _normalize(v):
    return v / np.linalg.norm(v)


def common_eigenvector_distance(A, B):
    """Smallest residual ``|B v - (v* B v) v|`` over unit eigenvectors v of A (and vice versa)."""
    best = math.inf
    for X, Y in ((A, B), (B, A)):
        if np.max(np.abs(X - X[0, 0] * np.eye(2))) < 1e-12 * max(1.0, abs(X[0, 0])):
            # scalar: every eigenvector of Y is common
            return 0.0
        _, vecs = np.linalg.eig(X)
        for k in range(2):
            v = _normalize(vecs[:, k])
            w = Y @ v
            best = min(best, float(np.linalg.norm(w - (v.conj() @ w) * v)))
    return best


def _hermitian_basis():
    return [np.array([[1, 0], [0, 0]], dtype=complex), np.array([[0, 0], [0, 1]], dtype=complex),
            np.array([[0, 1], [1, 0]], dtype=complex), np.array([[0, 1j], [-1j, 0]], dtype=complex)]


def invariant_form(mats):
    """Positive Hermitian X with ``M* X M = X`` for all given M, ``det X = 1``.

    Also returns the ratio of the two smallest singular values of the linear
    system; a small ratio means the invariant form is unique up to scale.
    """
    basis = _hermitian_basis()
    rows = []
    for M in mats:
        cols = []
        for E in basis:
            R = M.conj().T @ E @ M - E
            cols.append(np.concatenate([R.real.ravel(), R.imag.ravel()]))
        rows.append(np.array(cols).T)
    system = np.vstack(rows)
    _, s, vt = np.linalg.svd(system)
    x = vt[-1]
    X = sum(c * E for c, E in zip(x, basis))
    X = 0.5 * (X + X.conj().T)
    ev = np.linalg.eigvalsh(X)
    if ev[0] < 0 < ev[1] or min(abs(ev)) < 1e-12 * max(abs(ev)):
        raise NoInvariantForm(f"kernel element has eigenvalues {ev}; not definite")
    if ev[1] < 0:
        X = -X
    X = X / math.sqrt(np.linalg.det(X).real)
    ratio = s[-1] / s[-2] if s[-2] > 0 else math.inf
    if s[-1] > 1e-6 * max(1.0, s[0]):
        raise NoInvariantForm(f"no common invariant form (smallest singular value {s[-1]:.3g})")
    return X, ratio


def hermitian_power(X, power):
    w, V = np.linalg.eigh(X)
    return (V * w ** power) @ V.conj().T


def unitarize(m, tol=IRREDUCIBLE_TOL):
    """Conjugate an irreducible triple into SU(2).

    Returns P with ``U_j = P^-1 M_j P`` unitary.  ``P = X^(-1/2)`` where X
    is the invariant positive Hermitian form, so ``P P* = X^-1``.
    """
    M = m.M if isinstance(m, MonodromyTriple) else tuple(np.asarray(x, dtype=complex) for x in m)
    for t in (np.trace(x) for x in M):
        if abs(t.imag) > 1e-6 or abs(t.real) > 2.0 + 1e-6:
            raise NoInvariantForm(f"trace {t} is not that of an SU(2) element")
    if common_eigenvector_distance(M[0], M[1]) < tol:
        raise ReducibleInput("M1 and M2 share an eigenvector")
    X, _ = invariant_form(M[:2])
    X2, _ = invariant_form(M[1:])
    P = hermitian_power(X, -0.5)
    Pinv = hermitian_power(X, 0.5)
    U = tuple(Pinv @ x @ P for x in M)
    return Unitarization(P, U, X, float(np.max(np.abs(X - X2))))


# -- deformation class ---------------------------------------------------------

class DeformationTag(enum.Enum):
    POINT = "Point"
    GEODESIC_LINE = "GeodesicLine"
    WHOLE_H3 = "WholeH3"


@dataclass(frozen=True)
class DeformationClass:
    tag: DeformationTag
    T: object = None

    def to_json(self):
        out = {"tag": self.tag.value}
        if self.T is not None:
            out["T"] = matrix_to_json(self.T)
        return out


def _is_central(U, tol):
    return min(np.max(np.abs(U - np.eye(2))), np.max(np.abs(U + np.eye(2)))) < tol


def log_direction(U):
    """Unit trace-free anti-Hermitian T with U in the one parameter group exp(R T) (up to sign)."""
    w, V = np.linalg.eig(U)
    V = np.linalg.qr(V)[0] if abs(np.vdot(V[:, 0], V[:, 1])) > 1e-8 else V / np.linalg.norm(V, axis=0)
    theta = np.angle(w[0])
    T = V @ np.diag([1j * theta, -1j * theta]) @ V.conj().T
    T = 0.5 * (T - T.conj().T)
    T -= 0.5 * np.trace(T) * np.eye(2)
    return T / np.linalg.norm(T)


def classify_deformation(U, tol=CENTRAL_TOL):
    """Point, GeodesicLine or WholeH3 according to the generators ``U``."""
    U = [np.asarray(u, dtype=complex) for u in U]
    noncentral = [u for u in U if not _is_central(u, tol)]
    if not noncentral:
        return DeformationClass(DeformationTag.WHOLE_H3)
    for a, b in itertools.combinations(U, 2):
        if np.max(np.abs(a @ b - b @ a)) >= tol:
            return DeformationClass(DeformationTag.POINT)
    return DeformationClass(DeformationTag.GEODESIC_LINE, log_direction(noncentral[0]))


# -- developing map ------------------------------------------------------------

def develop_g(z, F, tol=1e-12):
    """Secondary Gauss map ``g = -(F12 - z F22) / (F11 - z F21)``."""
    F = np.asarray(F)
    num = F[..., 0, 1] - z * F[..., 1, 1]
    den = F[..., 0, 0] - z * F[..., 1, 0]
    if np.ndim(num) == 0:
        if abs(num) < tol and abs(den) < tol:
            raise Indeterminate(f"0/0 in g at z={z}")
        return complex(-num / den) if den != 0 else complex(math.inf)
    return -num / den
