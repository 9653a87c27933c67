"""Reducible metrics: residue systems and explicit developing maps.

A reducible metric with three cone points has a developing map of the form
``g = z^mu a(z) / b(z)`` (``mu = 0`` when the monodromy is trivial) with

    dg = c z^nu (z - 1)^m / b(z)^2 dz,     b(z) = prod (z - a_j).

The antiderivative has no logarithmic terms exactly when

    nu / a_j + m / (a_j - 1) - sum_{k != j} 2 / (a_j - a_k) = 0     (j = 1..N).

Using ``sum_{k != j} 1/(a_j - a_k) = b''(a_j) / (2 b'(a_j))`` this system says
that ``z(z-1) b'' - ((nu+m) z - nu) b'`` vanishes on the roots of b, i.e. it is
a constant multiple of b.  Comparing coefficients gives the recurrence

    b_k (k - N)(k + N - 1 - nu - m) = (k + 1)(k - nu) b_{k+1},   b_N = 1,

so the monic b is unique whenever the left factors do not vanish.  The
system then has a solution (unique up to order) iff this b has N simple
roots away from 0 and 1.  The recurrence is run in exact rational
arithmetic, which makes negative answers rigorous.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._json import complex_to_json
from .divisor import INTEGER_TOL, Divisor, mobius_to_standard
from .errors import (IntegrationObstruction, InvalidDivisor, NoSolution,
                     ParityError)

ROOT_SEPARATION = 1e-8
RESIDUE_TOL = 1e-9


# -- exact polynomial helpers (coefficients low -> high, Fractions) ----------

def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _derivative(p):
    return _trim([k * p[k] for k in range(1, len(p))] or [Fraction(0)])


def _remainder(a, b):
    a = _trim(a)
    b = _trim(b)
    while len(a) >= len(b) and any(a):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[i + shift] -= f * bc
        a = _trim(a[:-1]) if len(a) > 1 else [Fraction(0)]
    return a


def _gcd_degree(a, b):
    a, b = _trim(a), _trim(b)
    while any(b):
        a, b = b, _remainder(a, b)
    return len(_trim(a)) - 1


def stieltjes_polynomial(nu, m, N):
    """Monic degree-N polynomial whose roots solve the residue system.

    Returns exact coefficients (low to high) or None when the recurrence
    degenerates (``nu + m`` equal to ``k + N - 1`` for some ``k < N``).
    """
    nu, m = Fraction(nu), Fraction(m)
    b = [Fraction(0)] * (N + 1)
    b[N] = Fraction(1)
    for k in range(N - 1, -1, -1):
        den = (k - N) * (k + N - 1 - nu - m)
        if den == 0:
            return None
        b[k] = (k + 1) * (k - nu) * b[k + 1] / den
    return b


def _inverse_differences(a):
    """``1/(a_j - a_k)`` with zeros on the diagonal."""
    diff = a[:, None] - a[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    return inv


def residue_system(roots, nu, m):
    """Left-hand sides of the residue system at ``roots``."""
    a = np.asarray(roots, dtype=complex)
    return nu / a + m / (a - 1.0) - 2.0 * np.sum(_inverse_differences(a), axis=1)


def _jacobian(a, nu, m):
    inv2 = _inverse_differences(a) ** 2
    J = -2.0 * inv2
    np.fill_diagonal(J, -nu / a ** 2 - m / (a - 1.0) ** 2 + 2.0 * np.sum(inv2, axis=1))
    return J


def cleared_system(roots, nu, m):
    """Residue system multiplied through by ``a_j (a_j - 1)``.

    Newton on the cleared form converges from far better starting points
    than on the original rational form, whose residual decays like 1/a.
    """
    a = np.asarray(roots, dtype=complex)
    return residue_system(a, nu, m) * a * (a - 1.0)


def _cleared_jacobian(a, nu, m):
    w = a * (a - 1.0)
    return _jacobian(a, nu, m) * w[:, None] + np.diag(residue_system(a, nu, m) * (2.0 * a - 1.0))


def _newton(a, nu, m, iters, tol):
    """Damped Newton (backtracking on the cleared residual); returns the last iterate."""
    a = np.array(a, dtype=complex)
    for _ in range(iters):
        G = cleared_system(a, nu, m)
        norm = np.linalg.norm(G)
        if not np.isfinite(norm) or norm < tol:
            break
        try:
            step = np.linalg.solve(_cleared_jacobian(a, nu, m), G)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-3 and not np.linalg.norm(cleared_system(a - t * step, nu, m)) < norm:
            t *= 0.5
        a = a - t * step
    return a


def newton_polish(roots, nu, m, iters=30):
    return _newton(roots, nu, m, iters, 1e-15 * max(1.0, abs(nu) + abs(m)))


def _separated(roots):
    a = np.asarray(roots, dtype=complex)
    if np.min(np.abs(a), initial=np.inf) <= ROOT_SEPARATION:
        return False
    if np.min(np.abs(a - 1.0), initial=np.inf) <= ROOT_SEPARATION:
        return False
    for x, y in itertools.combinations(a, 2):
        if abs(x - y) <= ROOT_SEPARATION:
            return False
    return True


def _sort_roots(roots):
    return tuple(sorted((complex(r) for r in roots), key=lambda r: (round(r.real, 12), round(r.imag, 12))))


def solve_residue_system(nu, m, N, starts=200, seed=0):
    """All solutions of the residue system (there is at most one up to order).

    Raises NoSolution with ``proven=True`` when the exact polynomial has a
    repeated root or a root at 0 or 1.  When the recurrence degenerates the
    multistart Newton search is used instead and failure is not proven.
    """
    if N < 0 or int(N) != N:
        raise NoSolution(f"N = {N} is not a non-negative integer", proven=True)
    N = int(N)
    if N == 0:
        return ()
    b = stieltjes_polynomial(nu, m, N)
    if b is None:
        found = multistart_newton(float(nu), float(m), N, starts=starts, seed=seed)
        if not found:
            raise NoSolution(f"no root set found for nu={nu}, m={m}, N={N}", proven=False)
        return found[0]
    if b[0] == 0 or sum(b) == 0:
        raise NoSolution(f"the root polynomial vanishes at 0 or 1 (nu={nu}, m={m}, N={N})",
                         proven=True)
    if _gcd_degree(b, _derivative(b)) > 0:
        raise NoSolution(f"the root polynomial has a repeated root (nu={nu}, m={m}, N={N})",
                         proven=True)
    coeffs = np.array([float(x) for x in reversed(b)])
    roots = newton_polish(np.roots(coeffs), float(nu), float(m))
    if not _separated(roots):
        raise NoSolution("polished roots collide numerically", proven=False)
    return _sort_roots(roots)


def multistart_newton(nu, m, N, starts=200, seed=0, radius=3.0, guard=0.05, iters=60):
    """Independent search for solutions by damped Newton from random starts.

    Start points are uniform in the disk ``|z - 1/2| < radius`` minus guard
    disks around 0 and 1.  Distinct root sets (unordered distance > 1e-6)
    are returned sorted.
    """
    rng = np.random.default_rng(seed)
    scale = max(1.0, abs(nu) + abs(m))
    found = []
    for _ in range(starts):
        pts = []
        while len(pts) < N:
            z = 0.5 + radius * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
            if abs(z) > guard and abs(z - 1) > guard:
                pts.append(z)
        a = _newton(np.array(pts), nu, m, iters, 1e-13 * scale)
        if not np.all(np.isfinite(a)) or not _separated(a):
            continue
        if np.linalg.norm(residue_system(a, nu, m) * (1.0 + np.abs(a))) > 1e-10 * scale:
            continue
        if not any(unordered_distance(a, s) < 1e-6 for s in found):
            found.append(_sort_roots(a))
    return found


def unordered_distance(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if len(r) else 0.0


# -- developing maps -----------------------------------------------------------

def _poly(coeffs):
    """numpy poly1d from coefficients highest power first."""
    return np.poly1d(np.asarray(coeffs, dtype=complex))


@dataclass
class ExplicitDevelopingMap:
    """``g(z) = z^mu num(z) / den(z)`` (principal branch of ``z^mu``).

    Polynomials are stored highest power first.  ``|g|`` and ``|g'|`` are
    single-valued even when ``mu`` is not an integer.  When ``critical =
    (lead, e, m)`` is given, ``g' = lead z^e (z-1)^m / den^2`` is used in
    factored form; the expanded numerator of g' loses accuracy near a
    high-order zero.
    """

    numerator: np.ndarray
    denominator: np.ndarray
    mu: float = 0.0
    critical: tuple = None

    def __post_init__(self):
        self.numerator = np.trim_zeros(np.asarray(self.numerator, dtype=complex), "f")
        self.denominator = np.trim_zeros(np.asarray(self.denominator, dtype=complex), "f")
        num, den = _poly(self.numerator), _poly(self.denominator)
        if self.mu == 0.0:
            self._dnum = np.poly1d(num.deriv() * den - num * den.deriv())
            self._dexp = 0.0
        else:
            z = np.poly1d([1.0, 0.0])
            self._dnum = np.poly1d(self.mu * num * den + z * (num.deriv() * den - num * den.deriv()))
            self._dexp = self.mu - 1.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = np.polyval(self.numerator, z) / np.polyval(self.denominator, z)
        return val * z ** self.mu if self.mu else val

    def branch(self, z0):
        """g with the branch of ``z^mu`` continuous on the disk ``|z - z0| < |z0|``."""
        z0 = complex(z0)
        if not self.mu:
            return self
        scale = z0 ** self.mu

        def g(z):
            z = np.asarray(z, dtype=complex)
            return scale * (z / z0) ** self.mu * np.polyval(self.numerator, z) / np.polyval(self.denominator, z)
        return g

    def poles(self):
        return np.roots(self.denominator) if len(self.denominator) > 1 else np.zeros(0, dtype=complex)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        if self.critical is not None:
            lead, e, m = self.critical
            return lead * z ** e * (z - 1.0) ** m / np.polyval(self.denominator, z) ** 2
        val = np.polyval(self._dnum.coeffs, z) / np.polyval(self.denominator, z) ** 2
        return val * z ** self._dexp if self._dexp else val

    def schwarzian(self, z):
        """Closed-form Schwarzian from ``g' = z^(mu-1) P / den^2``.

        With ``l = (log g')'`` it is ``l' - l^2 / 2``; no sampling is involved.
        """
        z = np.asarray(z, dtype=complex)
        D = _poly(self.denominator)
        d0, d1, d2 = D(z), D.deriv()(z), D.deriv(2)(z)
        if self.critical is not None:
            _, e, m = self.critical
            ell = e / z + m / (z - 1.0) - 2.0 * d1 / d0
            dell = -e / z ** 2 - m / (z - 1.0) ** 2 - 2.0 * (d2 * d0 - d1 ** 2) / d0 ** 2
            return dell - 0.5 * ell ** 2
        P = np.poly1d(self._dnum.coeffs)
        e = self._dexp
        p0, p1, p2 = P(z), P.deriv()(z), P.deriv(2)(z)
        ell = e / z + p1 / p0 - 2.0 * d1 / d0
        dell = -e / z ** 2 + (p2 * p0 - p1 ** 2) / p0 ** 2 - 2.0 * (d2 * d0 - d1 ** 2) / d0 ** 2
        return dell - 0.5 * ell ** 2

    def log_abs(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            return (np.log(np.abs(np.polyval(self.numerator, z)))
                    - np.log(np.abs(np.polyval(self.denominator, z))) + self.mu * np.log(np.abs(z)))

    def log_abs_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            if self.critical is not None:
                lead, e, m = self.critical
                return (math.log(abs(lead)) + e * np.log(np.abs(z)) + m * np.log(np.abs(z - 1.0))
                        - 2.0 * np.log(np.abs(np.polyval(self.denominator, z))))
            return (np.log(np.abs(np.polyval(self._dnum.coeffs, z)))
                    - 2.0 * np.log(np.abs(np.polyval(self.denominator, z)))
                    + self._dexp * np.log(np.abs(z)))

    @property
    def degree(self):
        """Degree as a map of the sphere (meaningful for ``mu = 0``)."""
        return max(len(self.numerator), len(self.denominator)) - 1

    def scaled(self, t):
        crit = None if self.critical is None else (self.critical[0] * t,) + tuple(self.critical[1:])
        return ExplicitDevelopingMap(self.numerator * t, self.denominator, self.mu, crit)

    def to_json(self):
        return {"numerator": [complex_to_json(c) for c in self.numerator],
                "denominator": [complex_to_json(c) for c in self.denominator],
                "mu": float(self.mu), "nu": 0.0}


@dataclass
class ReducibleSolution:
    kind: str
    N: int
    roots: tuple
    nu: float
    m: float
    beta: tuple = None
    divisor: Divisor = None
    perm: tuple = (0, 1, 2)
    case: str = None
    mu: float = 0.0
    nu3: float = None
    c: complex = 1.0
    g: ExplicitDevelopingMap = None
    residue: float = field(default=float("nan"))

    @property
    def chart_map(self):
        """Mobius matrix from the input coordinate to the normalized one."""
        pts = tuple((0.0, 1.0, math.inf)[p] for p in self.perm)
        return mobius_to_standard(*pts)

    def to_json(self):
        out = {"class": self.kind, "case": self.case, "N": self.N,
               "roots": [complex_to_json(r) for r in self.roots],
               "exponents": {"nu1": self.nu, "m": self.m, "mu": self.mu, "nu3": self.nu3},
               "c": complex_to_json(self.c), "permutation": list(self.perm),
               "residue": self.residue}
        if self.beta is not None:
            out["beta_normalized"] = list(self.beta)
        if self.g is not None:
            out["g"] = self.g.to_json()
        return out


def _local_power(z, center, nu):
    """``z^nu`` on a disk around ``center`` (branch continuous on the disk)."""
    if float(nu).is_integer():
        return z ** int(nu)
    return center ** nu * (1.0 + (z - center) / center) ** nu


def residue_check(s, points=64):
    """Largest residue of dg at the roots, by the trapezoid rule on small circles.

    Each circle has radius half the distance from the root to the nearest
    other root or to 0 and 1.  Certified when the result is below
    ``1e-9 |c|``.
    """
    roots = np.asarray(s.roots, dtype=complex)
    if roots.size == 0:
        return 0.0
    others = np.concatenate([roots, [0.0, 1.0]])
    theta = 2 * math.pi * np.arange(points) / points
    worst = 0.0
    for j, a in enumerate(roots):
        dist = np.abs(others - a)
        dist[j] = np.inf
        rho = 0.5 * dist.min()
        z = a + rho * np.exp(1j * theta)
        f = (s.c * _local_power(z, a, s.nu) * (z - 1.0) ** int(round(s.m))
             / np.prod((z[:, None] - roots[None, :]) ** 2, axis=1))
        res = np.mean(f * (z - a))
        worst = max(worst, abs(res))
    return float(worst)


def _h3_map(roots, nu, m):
    """Rational antiderivative of ``z^nu (z-1)^m / b^2`` with ``g(0) = 0``, ``|g(1)| = 1``."""
    roots = np.asarray(roots, dtype=complex)
    numer = np.poly1d(np.polymul(np.poly([0.0] * int(nu)) if nu else [1.0],
                                 np.poly([1.0] * int(m)) if m else [1.0]))
    b = np.poly1d(np.poly(roots)) if roots.size else np.poly1d([1.0])
    quot, _ = np.polydiv(numer.coeffs, np.polymul(b.coeffs, b.coeffs))
    poly_part = np.polyint(np.poly1d(quot))
    A, R = [], []
    for j, a in enumerate(roots):
        rest = np.poly1d(np.poly(np.delete(roots, j))) if roots.size > 1 else np.poly1d([1.0])
        r2 = rest * rest
        A.append(numer(a) / r2(a))
        # derivative of numer / rest^2 at a
        R.append((numer.deriv()(a) * r2(a) - numer(a) * r2.deriv()(a)) / r2(a) ** 2)
    scale = max(1.0, max((abs(x) for x in A), default=1.0))
    if R and max(abs(x) for x in R) > 1e-8 * scale:
        raise IntegrationObstruction(f"nonzero residue {max(abs(x) for x in R):.3g} in dg")

    def h(z):
        return poly_part(z) - sum(Aj / (z - a) for Aj, a in zip(A, roots))

    h0 = h(0.0)
    num = np.polymul((poly_part - h0).coeffs, b.coeffs)
    for j, Aj in enumerate(A):
        rest = np.poly(np.delete(roots, j)) if roots.size > 1 else np.array([1.0])
        num = np.polysub(num, Aj * rest)
    c = 1.0 / abs(h(1.0) - h0)
    g = ExplicitDevelopingMap(c * num, b.coeffs, 0.0, (c, int(nu), int(m)))
    return g, c


def _h1_map(roots, nu, m):
    """Solve ``mu a b + z(a' b - a b') = c (z-1)^m`` for monic a; ``mu = nu + 1``."""
    mu = nu + 1.0
    roots = np.asarray(roots, dtype=complex)
    m = int(round(m))
    N = roots.size
    D = m - N
    if D < 0:
        raise IntegrationObstruction(f"deg a = m - N = {D} < 0")
    b = np.poly1d(np.poly(roots)) if N else np.poly1d([1.0])
    z = np.poly1d([1.0, 0.0])

    def L(i):
        zi = np.poly1d([1.0] + [0.0] * i)
        return np.poly1d((mu + i) * zi * b - z * zi * b.deriv())

    size = m + 1

    def vec(p):
        c = np.asarray(np.poly1d(p).coeffs, dtype=complex)[::-1]
        out = np.zeros(size, dtype=complex)
        out[:len(c)] = c[:size]
        return out

    cols = [vec(L(i)) for i in range(D)] + [-vec(np.poly1d(np.poly([1.0] * m)) if m else np.poly1d([1.0]))]
    rhs = -vec(L(D))
    Amat = np.array(cols).T
    sol, *_ = np.linalg.lstsq(Amat, rhs, rcond=None)
    resid = np.max(np.abs(Amat @ sol - rhs))
    if resid > 1e-8 * max(1.0, np.max(np.abs(rhs))):
        raise IntegrationObstruction(f"linear ansatz residual {resid:.3g}")
    a_low = list(sol[:D]) + [1.0]
    c = complex(sol[D])
    g = ExplicitDevelopingMap(np.array(a_low[::-1], dtype=complex), b.coeffs, mu, (c, nu, m))
    return g, c


def build_developing_map(s):
    """Attach the explicit developing map to a certified solution (in place)."""
    if s.kind == "H3":
        s.g, s.c = _h3_map(s.roots, s.nu, s.m)
    else:
        s.g, s.c = _h1_map(s.roots, s.nu, s.m)
    return s.g


# -- H3 and H1 drivers -----------------------------------------------------------

def _require_integer(x, what):
    if Fraction(x).denominator != 1:
        raise InvalidDivisor(f"{what} must be an integer, got {x}")
    return int(x)


def count_degree_h3(d):
    """Degree ``(b1 + b2 + b3)/2 + 1`` of the rational developing map."""
    vals = [_require_integer(d.exact_value(j), "cone order") for j in range(3)]
    if any(v <= 0 for v in vals):
        raise InvalidDivisor("all orders must be positive integers")
    if sum(vals) % 2:
        raise ParityError(f"order sum {sum(vals)} is odd")
    return sum(vals) // 2 + 1


def _certify(s):
    s.residue = residue_check(s)
    if s.residue >= RESIDUE_TOL * max(abs(s.c), 1e-300):
        raise NoSolution(f"root set failed the residue check ({s.residue:.3g})", proven=False)
    return s


def solve_h3(d, starts=200, seed=0):
    """Rational developing map for integral orders (sorted ascending internally)."""
    vals = [_require_integer(d.exact_value(j), "cone order") for j in range(3)]
    if any(v <= 0 for v in vals):
        raise InvalidDivisor("H3 mode needs positive integral orders")
    perm = tuple(int(i) for i in np.argsort(vals, kind="stable"))
    b1, b2, b3 = (vals[p] for p in perm)
    twoN = b1 + b2 - b3
    if twoN < 0 or twoN % 2:
        raise NoSolution(f"b1 + b2 - b3 = {twoN} is not a non-negative even integer", proven=True)
    N = twoN // 2
    roots = solve_residue_system(b1, b2, N, starts, seed)
    s = ReducibleSolution("H3", N, roots, float(b1), float(b2), beta=(b1, b2, b3), divisor=d, perm=perm)
    build_developing_map(s)
    return [_certify(s)]


H1_CASES = {
    # case: (N as a function of (b1, b2, b3), nu1 as a function of b1)
    "a": (lambda b1, b2, b3: (b1 + b2 + b3 + 2) / 2, lambda b1: b1),
    "b": (lambda b1, b2, b3: (b2 - b1 - b3 - 2) / 2, lambda b1: -b1 - 2),
    "c": (lambda b1, b2, b3: (b1 + b2 - b3) / 2, lambda b1: b1),
    "d": (lambda b1, b2, b3: (b2 + b3 - b1) / 2, lambda b1: -b1 - 2),
}


def solve_h1_system(nu, m, N, starts=200, seed=0):
    """Solve the residue system for given ``(nu, m, N)`` and build ``g``."""
    roots = solve_residue_system(Fraction(nu), Fraction(m), N, starts, seed)
    s = ReducibleSolution("H1", int(N), roots, float(nu), float(m), mu=float(nu) + 1.0,
                          nu3=float(-nu - m + 2 * N - 2))
    build_developing_map(s)
    return _certify(s)


def solve_h1(d, starts=200, seed=0):
    """Every certified H1 solution over the cases (a)-(d).

    The integral order is moved to the point 1 by a permutation of
    {0, 1, inf}; ``solution.perm`` records it.
    """
    ints = d.integer_indices()
    if len(ints) != 1:
        raise InvalidDivisor("H1 mode needs exactly one integral order")
    k = ints[0]
    rest = [j for j in range(3) if j != k]
    perm = (rest[0], k, rest[1])
    b1, b2, b3 = (d.exact_value(p) for p in perm)
    b2 = Fraction(round(b2)) if d.exact[k] is None else b2
    exact = all(d.exact[p] is not None for p in rest)
    if b2 <= 0:
        raise NoSolution("the integral order must be positive", proven=False)
    solutions = []
    proven = True
    for case, (Nfun, nufun) in H1_CASES.items():
        N = Nfun(b1, b2, b3)
        if not exact:
            # float orders carry binary rounding; snap N when it is an integer to 1e-9
            N = Fraction(round(N)) if abs(N - round(N)) < INTEGER_TOL else N
        if N < 0 or Fraction(N).denominator != 1:
            continue
        nu1 = nufun(b1)
        try:
            s = solve_h1_system(nu1, b2, int(N), starts, seed)
        except NoSolution as exc:
            proven = proven and exc.proven
            continue
        s.case, s.beta, s.divisor, s.perm = case, tuple(float(x) for x in (b1, b2, b3)), d, perm
        solutions.append(s)
    if not solutions:
        raise NoSolution(f"no H1 metric with orders {d.beta}", proven=proven)
    return solutions


def one_parameter_family(g, t):
    """Developing map ``t g``; for ``t > 0`` the divisor is unchanged."""
    if t <= 0:
        raise ValueError("t must be positive")
    return g.scaled(t)
