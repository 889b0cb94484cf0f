import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbizeta.groups import Signature
from orbizeta.index import (
    CUSP_COEFFICIENT,
    SIG_0_1_222,
    SIG_1_1,
    area,
    area_over_2pi,
    bernoulli2,
    chern_coefficients,
    dim_omega_k,
    elliptic_coefficient,
    elliptic_coefficient_exact,
    example_0_1_222_relations,
    frac_part,
    moduli_dimension,
    rootsum_identity,
    rootsum_table,
)


@st.composite
def signatures(draw):
    g = draw(st.integers(0, 4))
    n = draw(st.integers(0, 4))
    m = tuple(sorted(draw(st.lists(st.integers(2, 12), max_size=5))))
    chi = 2 * g - 2 + n + sum(1 - Fraction(1, x) for x in m)
    if chi <= 0:
        n += 3
    return Signature(g, n, m)


def test_bernoulli_examples():
    assert bernoulli2(0) == Fraction(1, 6)
    assert bernoulli2(Fraction(1, 2)) == Fraction(-1, 12)
    assert abs(bernoulli2(0.25) - (0.0625 - 0.25 + 1 / 6)) < 1e-16


@settings(max_examples=50)
@given(st.fractions(min_value=-20, max_value=20))
def test_bernoulli_symmetry(x):
    assert bernoulli2(frac_part(x)) == bernoulli2(frac_part(1 - x))


def test_rootsum_examples():
    r = rootsum_identity(2, 0)
    assert r.closed == Fraction(-1, 4)
    assert abs(r.direct - (-1) / (1 - (-1)) ** 2) < 1e-15
    r = rootsum_identity(3, 1)
    w = cmath.exp(2j * math.pi / 3)
    direct = sum(w ** (2 * i) / (1 - w ** i) ** 2 for i in (1, 2))
    assert r.closed == Fraction(1, 3)
    assert abs(direct - 1 / 3) < 1e-14
    assert r.passes
    with pytest.raises(ValueError):
        rootsum_identity(1, 0)


def test_rootsum_periodicity():
    for m in range(2, 21):
        for k in range(m):
            a, b = rootsum_identity(m, k), rootsum_identity(m, k + m)
            assert a.closed == b.closed and abs(a.direct - b.direct) < 1e-10


def test_rootsum_table():
    table = rootsum_table(50)
    assert len(table) == sum(2 * m for m in range(2, 51))
    assert all(r.passes for r in table)
    assert max(r.difference for r in table) < 1e-10


def test_elliptic_coefficient_examples():
    for k in range(0, 8):
        expected = (1 if k % 2 else -1) / (16 * math.pi)
        assert abs(elliptic_coefficient(2, k) - expected) < 1e-16
    for m in (100, 1000, 10000):
        assert abs(elliptic_coefficient(m, 0) / (-m / (24 * math.pi)) - 1) < 2 / m ** 2
    for m in range(2, 15):
        for k in range(0, 2 * m):
            c = float(rootsum_identity(m, k).closed)
            assert abs(elliptic_coefficient(m, k) - c / (2 * math.pi * m)) < 1e-14
            assert elliptic_coefficient_exact(m, k) == elliptic_coefficient_exact(m, m - k)


def test_chern_example_0_1_222():
    c = chern_coefficients(SIG_0_1_222, 1)
    assert c.wp_over_pi2 == Fraction(1, 12)
    assert abs(c.wp - 1 / (12 * math.pi ** 2)) < 1e-17
    assert c.cusp == Fraction(-1, 9)
    assert c.ell_over_pi == (Fraction(-1, 16),) * 3


@pytest.mark.parametrize("k", range(1, 11))
def test_chern_coefficients_0_1_222(k):
    c = chern_coefficients(SIG_0_1_222, k)
    assert all(abs(e - (-1) ** k / (16 * math.pi)) < 1e-14 for e in c.ell)
    assert c.cusp == CUSP_COEFFICIENT == Fraction(-1, 9)
    assert c.wp_over_pi2 == Fraction(6 * k * k - 6 * k + 1, 12)


@settings(max_examples=20, deadline=None)
@given(signatures())
def test_duality(sig):
    for k in range(-5, 7):
        assert chern_coefficients(sig, k).exact_key() == chern_coefficients(sig, 1 - k).exact_key()


def test_surviving_terms():
    closed = chern_coefficients(Signature(2, 0, ()), 3)
    assert set(closed.surviving_terms()) == {"wp"}
    assert set(chern_coefficients(SIG_0_1_222, 3).surviving_terms()) == {"wp", "cusp", "ell"}


@pytest.mark.parametrize("k", range(1, 11))
def test_index_two_relation(k):
    rep = example_0_1_222_relations(k)
    assert rep.wp_residual_over_pi2 == 0 and rep.cusp_residual == 0
    assert rep.ell_per_cone_over_pi == (Fraction((-1) ** k, 8),) * 3
    assert rep.passes
    # total against the summed elliptic form: 2 * 3 * (+-1/16) = 3 * (+-1/8)
    assert sum(rep.ell_per_cone_over_pi) == 3 * Fraction((-1) ** k, 8)


def test_dimension_examples():
    assert dim_omega_k(SIG_0_1_222, 2) == 1 == moduli_dimension(SIG_0_1_222)
    assert dim_omega_k(SIG_1_1, 2) == 1 == moduli_dimension(SIG_1_1)
    assert dim_omega_k(SIG_0_1_222, 0) == 1
    assert dim_omega_k(SIG_0_1_222, -3) == 0
    assert dim_omega_k(Signature(3, 2, (2, 5)), 1) == 3


@settings(max_examples=50, deadline=None)
@given(signatures())
def test_dimension_matches_moduli_count(sig):
    assert dim_omega_k(sig, 2) == 3 * sig.g - 3 + sig.n + len(sig.m)
    assert dim_omega_k(sig, 1) == sig.g
    assert area(sig) > 0


def test_area_examples():
    assert abs(area(SIG_0_1_222) - math.pi) < 1e-15
    assert abs(area(SIG_1_1) - 2 * math.pi) < 1e-15
    assert area_over_2pi(SIG_1_1) == 2 * area_over_2pi(SIG_0_1_222)
    # Gauss-Bonnet for a closed genus-2 surface: 4 pi (g - 1)
    assert abs(area(Signature(2, 0, ())) - 4 * math.pi) < 1e-14
