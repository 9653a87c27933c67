"""Acceptance suite: one test per numbered criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import brentq

from conemetric import Divisor, trace_condition_value
from conemetric.cli import main
from conemetric.errors import NoSolution, NotUnitarizable
from conemetric.metriceval import (IrreducibleMetric, conical_order_estimate, expected_area,
                                   metric_source, sample_grid, schwarzian_residual)
from conemetric.monodromy import (DeformationTag, boundary_triple, classify_deformation,
                                  compute_monodromy, lemma_a_value, standard_triple, unitarize,
                                  verify_traces)
from conemetric.reducible import solve_h1, solve_h1_system, solve_h3
from conemetric.surface import (SurfaceMetric, SurfaceSpec, dsharp_grid, loop_invariance,
                                numerical_total_area, schwarzian_relation_residual,
                                total_abs_curvature)

from oracles import reflection_unitarizer

RES = 200
METRICS = {
    "(-1/2)^3": (-0.5, -0.5, -0.5),
    "(1,1,2)": (1, 1, 2),
    "(2,2,2)": (2, 2, 2),
    "H1 (0.5,2,0.5)": (0.5, 2, 0.5),
}


def sample_points(rng, n, radius=2.0, avoid=(0.0, 1.0), gap=0.15):
    out = []
    while len(out) < n:
        z = complex(*rng.uniform(-radius, radius, 2))
        if abs(z) <= radius and min(abs(z - a) for a in avoid) > gap:
            out.append(z)
    return np.array(out)


@pytest.fixture(scope="module")
def criterion_metrics():
    """Source, res 200 grid, cone order estimates and wall time for each metric."""
    out = {}
    for name, beta in METRICS.items():
        t0 = time.perf_counter()
        d = Divisor(beta)
        src = metric_source(d)
        grid = sample_grid(src, RES)
        orders = [conical_order_estimate(j, src) for j in range(3)]
        out[name] = (d, src, grid, orders, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="module")
def gate_divisors(divisor_sampler):
    rng = np.random.default_rng(11)
    below = divisor_sampler(rng, 10, lambda L: L <= 0.95)
    above = divisor_sampler(rng, 10, lambda L: L >= 1.05)
    return below, above


@pytest.fixture(scope="module")
def half_surface():
    return SurfaceMetric(SurfaceSpec.from_divisor(Divisor((-0.5, -0.5, -0.5))))


@pytest.mark.criterion(1, "monodromy traces match -2 cos B_j")
def test_traces(record_property, divisor_sampler):
    rng = np.random.default_rng(1)
    divisors = divisor_sampler(rng, 10, lambda L: L < 0.9)
    t0 = time.perf_counter()
    worst = max(max(verify_traces(compute_monodromy(d), d)) for d in divisors)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max residual {worst:.2e}, {elapsed:.1f} s")
    assert worst < 1e-7
    assert elapsed < 30.0


@pytest.mark.criterion(2, "existence gate at L = 1")
def test_existence_gate(record_property, gate_divisors):
    below, above = gate_divisors
    for d in below:
        u = unitarize(compute_monodromy(d))
        # sanity bound at the accuracy of the monodromy itself
        assert max(np.max(np.abs(x @ x.conj().T - np.eye(2))) for x in u.U) < 1e-7
    for d in above:
        with pytest.raises(NotUnitarizable):
            standard_triple(d)
        with pytest.raises(NotUnitarizable):
            unitarize(compute_monodromy(d))
    # (t, t, t) crosses L = 1 at t = -2/3
    L = lambda t: trace_condition_value(Divisor((t, t, t)))
    t_in = brentq(lambda t: L(t) - (1 - 4e-4), -0.7, -0.6, xtol=1e-14)
    t_out = brentq(lambda t: L(t) - (1 + 4e-4), -0.7, -0.6, xtol=1e-14)
    unitarize(compute_monodromy(Divisor((t_in,) * 3)))
    with pytest.raises(NotUnitarizable):
        unitarize(compute_monodromy(Divisor((t_out,) * 3)))
    width = L(t_out) - L(t_in)
    record_property("detail", f"bracket [{L(t_in):.5f}, {L(t_out):.5f}]")
    assert L(t_in) < 1 < L(t_out) and width < 1e-3


@pytest.mark.criterion(3, "unitarizer agrees with the reflection oracle")
def test_uniqueness(record_property, half_metric):
    P, _ = reflection_unitarizer(half_metric.divisor)
    oracle = IrreducibleMetric(half_metric.divisor, P=P)
    z = sample_points(np.random.default_rng(3), 50, radius=3.0, gap=0.05)
    rel = np.max(np.abs(half_metric.lambda_z(z) / oracle.lambda_z(z) - 1))
    record_property("detail", f"max relative lambda difference {rel:.2e}")
    assert rel < 1e-6


@pytest.mark.criterion(4, "curvature is 1 at res 200 within 60 s")
def test_curvature(record_property, criterion_metrics):
    notes = []
    for name, (d, src, grid, orders, elapsed) in criterion_metrics.items():
        dev = grid.max_curvature_deviation
        notes.append(f"{name} {dev:.1e}/{elapsed:.0f}s")
        assert dev < 1e-4, name
        assert elapsed < 60.0, name
    record_property("detail", ", ".join(notes))


@pytest.mark.criterion(5, "area 2 pi (2 + sum beta) within 1%")
def test_area(record_property, criterion_metrics):
    notes = []
    for name, (d, src, grid, orders, _) in criterion_metrics.items():
        rel = grid.area / expected_area(d) - 1
        notes.append(f"{name} {rel:+.1e}")
        assert abs(rel) < 1e-2, name
    record_property("detail", ", ".join(notes))


@pytest.mark.criterion(6, "cone orders recovered within 1e-2")
def test_cone_orders(record_property, criterion_metrics):
    worst = 0.0
    for name, (d, src, grid, orders, _) in criterion_metrics.items():
        err = max(abs(a - b) for a, b in zip(orders, d.beta))
        worst = max(worst, err)
        assert err < 1e-2, name
    record_property("detail", f"max error {worst:.1e}")


@pytest.mark.criterion(7, "closed forms of the reducible solvers")
def test_closed_forms(record_property):
    (s,) = solve_h3(Divisor((2, 2, 2)))
    assert abs(s.roots[0] - 0.5) < 1e-10
    s = solve_h1_system(Fraction(1, 2), 2, 1)
    assert abs(s.roots[0] - 0.2) < 1e-10
    with pytest.raises(NoSolution):
        solve_h1_system(Fraction(1, 2), 1, 2)
    record_property("detail", "a = 1/2, a = 1/5, N=2 m=1 has no solution")


@pytest.mark.criterion(8, "CLI exit code 2 for (0.5, 1, 0.5)")
def test_cli_nonexistence(record_property, capsys):
    code = main(["exists", "--beta", "0.5,1,0.5", "--deterministic"])
    capsys.readouterr()
    record_property("detail", f"exit {code}")
    assert code == 2


@pytest.mark.criterion(9, "unitary triples: boundary value and commuting case")
def test_unitary_triples(record_property):
    C = (math.pi / 3,) * 3
    assert abs(lemma_a_value(C).value - 1) < 1e-12
    diag = boundary_triple(C)
    assert np.max(np.abs(diag.product() - np.eye(2))) < 1e-12
    rng = np.random.default_rng(9)
    # commuting triples with product id are exactly the boundary cases
    for _ in range(20):
        t1, t2 = rng.uniform(0, 2 * math.pi, 2)
        a = [np.diag([np.exp(1j * t), np.exp(-1j * t)]) for t in (t1, t2)]
        a.append(np.linalg.inv(a[0] @ a[1]))
        C = [math.acos(max(-1.0, min(1.0, -np.trace(x).real / 2))) for x in a]
        assert abs(lemma_a_value(C).value - 1) < 1e-12
    # away from the boundary the triple does not commute
    count = 0
    while count < 20:
        C = tuple(rng.uniform(0.1, math.pi - 0.1, 3))
        if lemma_a_value(C).value > 1 - 1e-3:
            continue
        a = standard_triple(C).a
        assert np.max(np.abs(a[0] @ a[1] - a[1] @ a[0])) > 1e-6
        count += 1
    record_property("detail", "20 commuting and 20 interior triples")


def _multiplier(g, center, radius, steps=801):
    """Factor picked up by g after one counterclockwise turn around ``center``."""
    z = center + radius * np.exp(1j * np.linspace(0, 2 * np.pi, steps))
    val = g(z[0])
    for a, b in zip(z[:-1], z[1:]):
        val = val * g.branch(a)(b) / g.branch(a)(a)
    return val / g(z[0])


@pytest.mark.criterion(10, "deformation classes")
def test_deformation_classes(record_property, half_metric, gate_divisors):
    point = classify_deformation(half_metric.unitarization.U).tag
    for d in gate_divisors[0]:
        assert classify_deformation(unitarize(compute_monodromy(d)).U).tag is DeformationTag.POINT
    # H1: the developing map is multiplied by a unit scalar around each loop
    s = [x for x in solve_h1(Divisor((0.5, 2, 0.5))) if x.case == "c"][0]
    U = []
    for center, radius in ((0.0, 0.1), (1.0, 0.1)):
        f = _multiplier(s.g, center, radius)
        U.append(np.diag([np.sqrt(f), 1 / np.sqrt(f)]))
    U.append(np.linalg.inv(U[0] @ U[1]))
    line = classify_deformation(U).tag
    whole = classify_deformation(compute_monodromy(Divisor((2, 2, 2))).M).tag
    record_property("detail", f"{point.value}, {line.value}, {whole.value}")
    assert point is DeformationTag.POINT
    assert line is DeformationTag.GEODESIC_LINE
    assert whole is DeformationTag.WHOLE_H3


@pytest.mark.criterion(11, "Schwarzian equals 2Q for every constructed metric")
def test_schwarzian(record_property, criterion_metrics, gate_divisors, half_surface):
    z = sample_points(np.random.default_rng(11), 20, avoid=(0.0, 1.0, 0.5))
    worst = 0.0
    for name, (d, src, *_) in criterion_metrics.items():
        worst = max(worst, float(np.max(schwarzian_residual(src, z))))
    for d in gate_divisors[0]:
        worst = max(worst, float(np.max(schwarzian_residual(IrreducibleMetric(d), z))))
    worst = max(worst, float(np.max(schwarzian_relation_residual(half_surface, z))))
    record_property("detail", f"max |S - 2Q| {worst:.1e}")
    assert worst < 1e-6


@pytest.mark.criterion(12, "CMC-1 surface for (-1/2)^3")
def test_surface(record_property, half_surface):
    ta = total_abs_curvature(half_surface.spec)
    assert abs(ta - 5 * math.pi) < 1e-12
    rel = numerical_total_area(half_surface, res=120) / ta - 1
    _, ds = dsharp_grid(half_surface.spec)
    loop = loop_invariance(half_surface)
    record_property("detail", f"area {rel:+.1e}, min ds# {np.min(ds):.3f}, loops {loop:.1e}")
    assert abs(rel) < 2e-2
    assert np.min(ds) > 0
    assert loop < 1e-7
