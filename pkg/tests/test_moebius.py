import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbizeta.moebius import (
    HyperbolicPoint,
    Kind,
    MoebiusMap,
    act,
    cayley_to_disk,
    classify,
    compose,
    conjugate,
    cosh_distance,
    displacement_cosh,
    elliptic_order,
    fixpoint_elliptic,
    hyperbolic_distance,
    identity,
    mobius,
    norm_and_length,
    norm_from_trace,
)

A = mobius(1, 1, 1, 2)
B = mobius(1, -1, -1, 2)
ROT = mobius(0, -1, 1, 0)
TRANS = mobius(1, 1, 0, 1)

coord = st.floats(-3, 3, allow_nan=False)
height = st.floats(0.05, 5, allow_nan=False)
points = st.builds(complex, coord, height)


@st.composite
def sl2r(draw):
    # product of a translation, a dilation and a rotation covers SL(2, R)
    x = draw(st.floats(-2, 2))
    lam = draw(st.floats(0.3, 3))
    t = draw(st.floats(0, 2 * math.pi))
    r = math.sqrt(lam)
    m = compose(MoebiusMap.of(1.0, x, 0.0, 1.0), MoebiusMap.of(r, 0.0, 0.0, 1 / r))
    return compose(m, MoebiusMap.of(math.cos(t), math.sin(t), -math.sin(t), math.cos(t)))


def test_compose_examples():
    assert compose(identity(), A) == A
    assert compose(A, mobius(2, -1, -1, 1)) == identity()
    assert compose(A, B) == mobius(0, 1, -1, 3)


def test_sign_canonical_and_equality():
    m = MoebiusMap.of(-1, -1, -1, -2)
    assert m == A
    assert m.entries() == (1, 1, 1, 2)
    assert MoebiusMap.of(0, -1, 1, 0).entries() == (0, 1, -1, 0)


def test_determinant_rejected():
    with pytest.raises(ValueError):
        MoebiusMap.of(1, 1, 1, 1)
    with pytest.raises(ValueError):
        MoebiusMap.of(1.0, 0.5, 0.0, 1.1)


def test_act_examples():
    assert act(identity(), 0.3 + 2j) == 0.3 + 2j
    assert abs(act(ROT, 1j) - 1j) < 1e-15
    assert act(TRANS, 1j) == 1 + 1j
    with pytest.raises(ValueError):
        act(ROT, 0.0 + 0j)


def test_classify_examples():
    assert classify(TRANS) is Kind.PARABOLIC
    assert classify(ROT) is Kind.ELLIPTIC
    assert elliptic_order(ROT) == 2
    assert classify(A) is Kind.HYPERBOLIC
    assert classify(identity()) is Kind.IDENTITY


def test_norm_examples():
    n, length = norm_and_length(MoebiusMap.of(2.0, 0.0, 0.0, 0.5))
    assert abs(n - 2) < 1e-15 and abs(length - math.log(2)) < 1e-15
    # N + 1/N = |tr| for tr A = 3
    n, _ = norm_and_length(A)
    assert abs(n - (3 + math.sqrt(5)) / 2) < 1e-12
    # N^(1/2) + N^(-1/2) = |tr| gives ((3 + sqrt 5)/2)^2 = 6.8541...
    n, _ = norm_and_length(A, "geodesic")
    assert abs(n - ((3 + math.sqrt(5)) / 2) ** 2) < 1e-12
    assert abs(n - 6.8541) < 1e-4
    assert norm_from_trace(2 + 1e-9) < 1 + 1e-4
    with pytest.raises(ValueError):
        norm_and_length(ROT)


def test_fixpoint_examples():
    assert abs(fixpoint_elliptic(ROT).z - 1j) < 1e-15
    t4 = MoebiusMap.of(0.0, 2 / math.pi, -math.pi / 2, 0.0)
    assert abs(fixpoint_elliptic(t4).z - 2j / math.pi) < 1e-15
    with pytest.raises(ValueError):
        fixpoint_elliptic(A)


def test_cayley_examples():
    c = cayley_to_disk(1j)
    assert abs(c(1j)) < 1e-15
    assert abs(c(2j) - 1 / 3) < 1e-15
    assert abs(c.rotation_multiplier(ROT) + 1) < 1e-15
    assert abs(c.inverse(c(0.4 + 0.7j)) - (0.4 + 0.7j)) < 1e-14


@pytest.mark.parametrize("m", [3, 4, 7])
def test_cayley_conjugates_elliptic_to_rotation(m):
    z0 = 0.3 + 1.7j
    t = 2 * math.pi / m
    rot = MoebiusMap.of(math.cos(t / 2), math.sin(t / 2), -math.sin(t / 2), math.cos(t / 2))
    h = MoebiusMap.of(math.sqrt(z0.imag), z0.real / math.sqrt(z0.imag), 0.0, 1 / math.sqrt(z0.imag))
    ell = conjugate(h, rot)
    lam = cayley_to_disk(z0).rotation_multiplier(ell)
    assert abs(abs(lam) - 1) < 1e-12
    assert min(abs(lam - cmath.exp(2j * math.pi / m)), abs(lam - cmath.exp(-2j * math.pi / m))) < 1e-12


def test_distance_examples():
    assert hyperbolic_distance(0.2 + 1j, 0.2 + 1j) == 0
    assert abs(hyperbolic_distance(1j, 4j) - math.log(4)) < 1e-15


def test_point_models_round_trip():
    p = HyperbolicPoint(0.3 + 0.8j)
    assert abs(p.to_disk().to_half_plane().value - p.value) < 1e-12
    with pytest.raises(ValueError):
        HyperbolicPoint(0.5 - 1j)
    with pytest.raises(ValueError):
        HyperbolicPoint(1.2, "D")
    q = act(A, p.to_disk())
    assert q.model == "D" and abs(q.z - act(A, p.z)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(sl2r(), points, points)
def test_distance_invariance(m, p, q):
    assert abs(hyperbolic_distance(act(m, p), act(m, q)) - hyperbolic_distance(p, q)) < 1e-10 * max(
        1, hyperbolic_distance(p, q))


@settings(max_examples=100, deadline=None)
@given(sl2r(), points)
def test_sign_quotient_consistency(m, p):
    neg = MoebiusMap(-m.a, -m.b, -m.c, -m.d)
    assert neg.isclose(m)
    assert act(neg, p) == act(m, p)
    assert classify(neg) is classify(m)
    assert MoebiusMap.of(*neg.entries()) == MoebiusMap.of(*m.entries())


@settings(max_examples=100, deadline=None)
@given(sl2r(), st.sampled_from([A, B, ROT, TRANS, compose(A, B)]))
def test_classification_and_norm_conjugation_invariant(sigma, g):
    h = conjugate(sigma, g.to_float())
    assert classify(h, tol=1e-9) is classify(g)
    if classify(g) is Kind.HYPERBOLIC:
        assert abs(norm_and_length(h)[0] - norm_and_length(g)[0]) < 1e-9
        assert norm_and_length(g.inverse())[0] == norm_and_length(g)[0]


@settings(max_examples=100, deadline=None)
@given(sl2r(), points)
def test_displacement_matches_coordinates(m, p):
    c = displacement_cosh(m, p)
    assert abs(c - cosh_distance(p, act(m, p))) < 1e-10 * max(1, c)
