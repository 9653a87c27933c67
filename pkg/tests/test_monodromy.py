import math

import numpy as np
import pytest

from conemetric.divisor import Divisor, cone_cosines
from conemetric.errors import (ConditionViolated, Indeterminate, NoInvariantForm, NotUnitarizable,
                               ReducibleInput)
from conemetric.monodromy import (DeformationTag, MonodromyTriple, boundary_triple,
                                  classify_deformation, compute_monodromy, develop_g,
                                  lemma_a_value, standard_triple, unitarize, verify_traces)


@pytest.fixture(scope="module")
def mono():
    d = Divisor((0.2, 0.3, -0.4))
    return d, compute_monodromy(d)


def test_traces_and_closure(mono):
    d, m = mono
    assert max(verify_traces(m, d)) < 1e-8
    assert m.closure_residual < 1e-8
    for M in m.M:
        assert abs(np.linalg.det(M) - 1) < 1e-9


def test_json_round_trip(mono):
    _, m = mono
    back = MonodromyTriple.from_json(m.to_json())
    assert all(np.allclose(a, b) for a, b in zip(back.M, m.M))


def test_unitarize(mono):
    _, m = mono
    u = unitarize(m)
    for U in u.U:
        assert np.max(np.abs(U @ U.conj().T - np.eye(2))) < 1e-8
    assert u.uniqueness_residual < 1e-7
    # P P* is the inverse of the invariant form
    assert np.allclose(u.P @ u.P.conj().T @ u.X, np.eye(2), atol=1e-9)
    # traces agree with the standard triple of the same angles
    st = standard_triple(Divisor((0.2, 0.3, -0.4)))
    for U, a in zip(u.U, st.a):
        assert abs(np.trace(U) - np.trace(a)) < 1e-8


def test_unitarize_rejects_reducible_and_large_traces():
    D = [np.diag([np.exp(0.3j), np.exp(-0.3j)]), np.diag([np.exp(0.5j), np.exp(-0.5j)])]
    D.append(np.linalg.inv(D[0] @ D[1]))
    with pytest.raises(ReducibleInput):
        unitarize(D)
    big = [np.array([[3.0, 1.0], [2.0, 1.0]])] * 3
    with pytest.raises(NoInvariantForm):
        unitarize(big)


def test_no_invariant_form_beyond_the_gate():
    d = Divisor((0.3, 0.6, -0.2))
    m = compute_monodromy(d)
    with pytest.raises(NoInvariantForm):
        unitarize(m)


def test_standard_triple():
    d = Divisor((-0.5, -0.5, -0.5))
    st = standard_triple(d)
    assert np.max(np.abs(st.product() - np.eye(2))) < 1e-12
    for a, c in zip(st.a, cone_cosines(d)):
        assert abs(np.trace(a) + 2 * c) < 1e-12
        assert np.max(np.abs(a @ a.conj().T - np.eye(2))) < 1e-12
    with pytest.raises(NotUnitarizable):
        standard_triple(Divisor((0.3, 0.6, -0.2)))


def test_boundary_triple():
    C = (math.pi / 3,) * 3
    assert abs(lemma_a_value(C).value - 1) < 1e-12
    t = boundary_triple(C)
    assert np.max(np.abs(t.product() - np.eye(2))) < 1e-12
    with pytest.raises(ConditionViolated):
        boundary_triple((0.3, 0.4, 0.5))


def test_deformation_classes(mono):
    _, m = mono
    assert classify_deformation(unitarize(m).U).tag is DeformationTag.POINT
    diag = [np.diag([np.exp(1j * t), np.exp(-1j * t)]) for t in (0.3, 0.9)]
    diag.append(np.linalg.inv(diag[0] @ diag[1]))
    cls = classify_deformation(diag)
    assert cls.tag is DeformationTag.GEODESIC_LINE
    # the direction generates the diagonal group
    assert abs(cls.T[0, 1]) < 1e-12 and abs(np.trace(cls.T)) < 1e-12
    assert classify_deformation([np.eye(2), -np.eye(2), -np.eye(2)]).tag is DeformationTag.WHOLE_H3


def test_develop_g_indeterminate():
    with pytest.raises(Indeterminate):
        develop_g(0.5, np.zeros((2, 2)))
    assert develop_g(0.0, np.eye(2)) == 0
