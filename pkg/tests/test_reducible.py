import itertools
from fractions import Fraction

import numpy as np
import pytest

from conemetric.divisor import Divisor
from conemetric.errors import InvalidDivisor, NoSolution, ParityError
from conemetric.hopf import evaluate_Q, hopf_from_divisor
from conemetric.reducible import (count_degree_h3, multistart_newton, one_parameter_family,
                                  residue_system, solve_h1, solve_h1_system, solve_h3,
                                  solve_residue_system, stieltjes_polynomial, unordered_distance)


def test_closed_forms():
    (s,) = solve_h3(Divisor.parse("2,2,2"))
    assert abs(s.roots[0] - 0.5) < 1e-10
    s = solve_h1_system(Fraction(1, 2), 2, 1)
    assert abs(s.roots[0] - 0.2) < 1e-10
    with pytest.raises(NoSolution) as exc:
        solve_h1_system(Fraction(1, 2), 1, 2)
    assert exc.value.proven


@pytest.mark.parametrize("nu", [0.5, -0.3, 1.7, -2.5])
@pytest.mark.parametrize("m", [2, 3, 5])
def test_n_equals_one_formula(nu, m):
    roots = solve_residue_system(Fraction(nu), m, 1)
    assert abs(roots[0] - nu / (nu + m)) < 1e-12


@pytest.mark.parametrize("nu,m,N", [(0.5, 2, 2), (-0.3, 3, 2), (1.25, 4, 3), (0.7, 5, 4)])
def test_exact_route_against_multistart(nu, m, N):
    exact = solve_residue_system(Fraction(nu), m, N)
    assert np.max(np.abs(residue_system(np.array(exact), nu, m))) < 1e-9
    found = multistart_newton(nu, m, N, starts=200, seed=1)
    assert len(found) == 1
    assert unordered_distance(found[0], exact) < 1e-8


def test_proven_nonexistence_agrees_with_search():
    # the root polynomial vanishes at 1 here
    with pytest.raises(NoSolution) as exc:
        solve_residue_system(Fraction(7, 10), 2, 4)
    assert exc.value.proven
    assert multistart_newton(0.7, 2, 4, starts=100, seed=2) == []


def test_stieltjes_polynomial_n2():
    b = stieltjes_polynomial(Fraction(1, 2), 2, 2)
    assert b[-1] == 1
    roots = np.roots([float(x) for x in reversed(b)])
    assert np.max(np.abs(residue_system(roots, 0.5, 2))) < 1e-10


def test_h3_maps():
    for text, degree in [("1,1,2", 3), ("2,2,2", 4), ("4,4,4", 7), ("3,3,2", 5)]:
        d = Divisor.parse(text)
        (s,) = solve_h3(d)
        assert count_degree_h3(d) == degree == s.g.degree
    (s,) = solve_h3(Divisor.parse("1,1,2"))
    # g = c (2 z^3 - 3 z^2) up to the overall constant
    g = s.g
    z = np.array([0.3 + 0.1j, -1.2, 2.0 + 1j])
    ratio = g(z) / (2 * z ** 3 - 3 * z ** 2)
    assert np.allclose(ratio, ratio[0], rtol=1e-12)
    with pytest.raises(ParityError):
        count_degree_h3(Divisor.parse("1,1,1"))
    with pytest.raises(InvalidDivisor):
        solve_h3(Divisor.parse("0,1,1"))


def test_h3_zero_orders_of_dg():
    d = Divisor.parse("1,2,3")
    (s,) = solve_h3(d)
    for p, b in [(0.0, 1), (1.0, 2)]:
        r = np.array([1e-3, 1e-4])
        zz = p + r * np.exp(0.4j)
        slope = np.diff(np.log(np.abs(s.g.derivative(zz)))) / np.diff(np.log(r))
        assert abs(slope[0] - b) < 1e-2


def test_parity_and_ordering_gate():
    with pytest.raises(NoSolution) as exc:
        solve_h3(Divisor.parse("1,2,4"))
    assert exc.value.proven


def test_nonexistence_families():
    for b1 in [0.5, 0.2, -0.3, 1.7]:
        with pytest.raises(NoSolution) as exc:
            solve_h1(Divisor((b1, 1.0, 1.0 - b1)))
        assert exc.value.proven


def existence_family():
    """Divisors of the four existence families with n, N in {0, 1, 2}."""
    out = []
    for case, n, N in itertools.product((1, 2, 3, 4), range(3), range(3)):
        b1 = 0.35 + n
        if case == 1:
            b3, b2 = 2 * n - 1 - b1, 2 * n + 2 * N + 1
        elif case == 2:
            b3, b2 = 2 * n - b1, 2 * n + 2 * N + 2
        elif case == 3:
            b3, b2 = b1 - 2 * n - 1, 2 * n + 2 * N + 1
        else:
            b3, b2 = b1 - 2 * n, 2 * n + 2 * N
        if b2 < 1 or b3 <= -1:
            continue
        out.append((case, n, N, (b1, b2, b3)))
    return out


@pytest.mark.parametrize("case,n,N,beta", existence_family())
def test_existence_families(case, n, N, beta):
    d = Divisor(beta)
    sols = solve_h1(d)
    assert sols
    z = np.array([0.37 + 0.61j, -0.8 - 0.3j, 1.4 + 0.2j])
    for s in sols:
        assert s.residue < 1e-9 * max(abs(s.c), 1)
        assert residual_of(s, d, z) < 1e-6


def residual_of(s, d, z):
    from conemetric.metriceval import ExplicitMetric
    metric = ExplicitMetric.from_solution(s)
    q = evaluate_Q(hopf_from_divisor(d), z)
    return float(np.max(np.abs(metric.schwarzian(z) - 2 * q) / (1 + np.abs(q))))


def test_h1_monodromy_is_diagonal():
    (s,) = [x for x in solve_h1(Divisor.parse("0.5,2,0.5")) if x.case == "c"]
    g = s.g
    # continue g once around 0 along |z| = 0.1 by chaining local branches
    ts = np.linspace(0, 2 * np.pi, 401)
    z = 0.1 * np.exp(1j * ts)
    val = g(z[0])
    for a, b in zip(z[:-1], z[1:]):
        val = val * g.branch(a)(b) / g.branch(a)(a)
    assert abs(val / g(z[0]) - np.exp(2j * np.pi * s.mu)) < 1e-10


def test_one_parameter_family():
    (s,) = [x for x in solve_h1(Divisor.parse("0.5,2,0.5")) if x.case == "c"]
    g2 = one_parameter_family(s.g, 2.0)
    assert abs(g2(0.3 + 0.2j) - 2 * s.g(0.3 + 0.2j)) < 1e-12
    with pytest.raises(ValueError):
        one_parameter_family(s.g, -1.0)


@pytest.mark.parametrize("beta", [(2.35, 10, 1.65), (0.5, 2, 0.5), (3, 5, 4)])
def test_factored_derivative_matches_expanded_map(beta):
    d = Divisor(beta)
    sols = solve_h3(d) if len(d.integer_indices()) == 3 else solve_h1(d)
    for s in sols:
        z0 = 0.41 + 0.57j
        h = 1e-3
        ring = z0 + h * np.exp(2j * np.pi * np.arange(32) / 32)
        g = s.g.branch(z0)(ring)
        numeric = np.fft.fft(g)[1] / 32 / h
        assert abs(numeric / s.g.derivative(z0) - 1) < 1e-8
