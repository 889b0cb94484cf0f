import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbizeta.groups import (
    FREE_RANK2,
    INVOLUTIONS3,
    Signature,
    builtin,
    character_chi,
    commutator_trace,
    conjugate_group,
    cusp_coset_reps,
    has_no_short_relator,
    make_group,
    random_word,
    reduce_word,
    verify_relations,
    word_ball,
)
from orbizeta.moebius import Kind, MoebiusMap, classify, compose, mobius


def int_product(*ms):
    out = np.eye(2, dtype=object)
    for m in ms:
        out = out.dot(np.array([[m.a, m.b], [m.c, m.d]], dtype=object))
    return out


def test_torus_commutator(torus):
    a, b = torus.generators
    # independent integer product, no sign normalisation
    prod = int_product(a, b, a.inverse(), b.inverse())
    assert prod.tolist() == [[-1, 0], [-6, -1]]
    assert commutator_trace(a, b) == -2
    assert torus.cusp.parabolic == compose(compose(a, b), compose(a.inverse(), b.inverse())).inverse()
    assert torus.presentation == FREE_RANK2
    assert torus.cusp.width == 6


def test_torus_no_short_relator(torus):
    assert has_no_short_relator(torus, 12)
    assert all(verify_relations(torus).values())


def test_orbifold_construction(orbifold, torus):
    e = orbifold.subgroup_coset_rep
    a, b = torus.generators
    assert e.trace == 0
    assert compose(compose(e, a), e.inverse()) == a.inverse()
    assert compose(compose(e, b), e.inverse()) == b.inverse()
    assert e == mobius(0, -1, 1, 0)
    t1, t2, t3 = orbifold.generators
    assert (t1, t2, t3) == (e, compose(a, e), compose(b, e))
    for t in orbifold.generators:
        assert t.trace == 0
        assert compose(t, t).is_identity()
    prod = compose(compose(t1, t2), t3)
    assert abs(prod.trace) == 2 and classify(prod) is Kind.PARABOLIC
    assert orbifold.cusp.parabolic == prod.inverse()
    assert orbifold.presentation == INVOLUTIONS3
    assert orbifold.subgroup is torus
    assert all(verify_relations(orbifold).values())


def test_signatures(torus, orbifold):
    assert torus.signature == Signature(1, 1, ())
    assert orbifold.signature == Signature(0, 1, (2, 2, 2))
    assert 2 * orbifold.signature.euler_char_neg == torus.signature.euler_char_neg
    with pytest.raises(ValueError):
        Signature(0, 0, (2, 3))
    with pytest.raises(ValueError):
        Signature(0, 3, (1,))


def test_word_ball_counts(torus, orbifold):
    # free group of rank 2: 1 + 4 (3^L - 1) / 2; free product of three Z/2: 1 + 3 (2^L - 1)
    for L in range(0, 6):
        assert word_ball(torus, L).count == 1 + 2 * (3 ** L - 1)
        assert word_ball(orbifold, L).count == 1 + 3 * (2 ** L - 1)
    assert word_ball(torus, 0).elements == {MoebiusMap(1, 0, 0, 1): ()}
    assert word_ball(torus, 2).count == 17
    assert word_ball(torus, 6).collisions == 0


def test_word_ball_big_integers(torus):
    ball = word_ball(torus, 8)
    biggest = max(max(abs(x) for x in m.entries()) for m in ball.elements)
    # (A^8 has entries of size ~ 2.6^16); python ints never wrap
    assert biggest == max(abs(x) for x in (torus.generators[0] ** 8).entries())
    with pytest.raises(ValueError):
        word_ball(torus, -1)


def test_index_two_partition(orbifold, torus):
    L = 6
    ball = word_ball(orbifold, L)
    sub_ball = set(word_ball(torus, L + 1).elements)
    e = orbifold.subgroup_coset_rep
    even = [m for m, w in ball.elements.items() if character_chi(orbifold, w) == 1]
    odd = [m for m, w in ball.elements.items() if character_chi(orbifold, w) == -1]
    assert len(even) + len(odd) == ball.count
    assert all(m in sub_ball for m in even)
    assert all(compose(m, e.inverse()) in sub_ball for m in odd)
    assert not any(m in sub_ball for m in odd)


def test_character_examples(orbifold, torus):
    assert character_chi(orbifold, (1,)) == -1
    assert character_chi(orbifold, (1, 2)) == 1
    t1t2 = orbifold.evaluate((1, 2))
    assert t1t2 in word_ball(torus, 1).elements
    assert character_chi(torus, (1, 2, -1)) == 1
    plain = make_group("plain", FREE_RANK2, {"A": mobius(1, 1, 1, 2), "B": mobius(1, -1, -1, 2)})
    with pytest.raises(ValueError):
        character_chi(plain, (1,))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 9), st.integers(0, 9))
def test_character_multiplicative(seed, n1, n2):
    g = builtin("builtin:orbifold-0-1-222")
    rng = np.random.default_rng(seed)
    w, v = random_word(g, n1, rng), random_word(g, n2, rng)
    wv = reduce_word(g, w + v)
    assert character_chi(g, wv) == character_chi(g, w) * character_chi(g, v)
    assert g.evaluate(wv) == compose(g.evaluate(w), g.evaluate(v))


def test_cusp_scaling(torus, orbifold):
    for g in (torus, orbifold):
        s = g.cusp.scaling
        t = compose(compose(s.inverse(), g.cusp.parabolic.to_float()), s)
        assert abs(abs(t.b) - 1) < 1e-10 and abs(t.c) < 1e-10 and abs(t.a - 1) < 1e-10


def test_cusp_coset_reps(orbifold):
    reps = {L: cusp_coset_reps(orbifold, L) for L in range(0, 7)}
    counts = [len(reps[L]) for L in range(0, 7)]
    assert counts == sorted(counts)
    # the identity coset, seen in the cusp frame
    assert len(reps[0]) == 1 and reps[0][0].isclose(orbifold.cusp.scaling.inverse().to_float())
    step = MoebiusMap.of(1.0, 1.0, 0.0, 1.0)
    r6 = reps[6]
    rows = {(round(float(r.c), 8), round(float(r.d), 8)) for r in r6}
    rows |= {(-c, -d) for c, d in rows}
    assert len(rows) == 2 * len(r6)
    for x in r6:
        sx = compose(step, x)
        assert not any(sx.isclose(y) for y in r6)


def test_cusp_coset_reps_cover_ball(torus):
    reps = cusp_coset_reps(torus, 4)
    s_inv = torus.cusp.scaling.inverse()
    for m in word_ball(torus, 4).elements:
        x = compose(s_inv, m.to_float())
        assert any(abs(abs(x.c) - abs(r.c)) < 1e-9 and abs(x.c * r.d - x.d * r.c) < 1e-8 and
                   (abs(x.d - r.d) < 1e-9 or abs(x.d + r.d) < 1e-9) for r in reps)


def test_make_group_checks():
    a, b = mobius(1, 1, 1, 2), mobius(1, -1, -1, 2)
    g = make_group("copy", FREE_RANK2, {"A": a, "B": b})
    assert g.signature == Signature(1, 1, ()) and g.relations_checked
    with pytest.raises(RuntimeError):
        make_group("bad", INVOLUTIONS3, {"T1": mobius(0, -1, 1, 0), "T2": a, "T3": b})
    with pytest.raises(ValueError):
        make_group("short", FREE_RANK2, {"A": a})


def test_conjugated_group_transports_cusp(orbifold):
    m = MoebiusMap.of(2.0, 0.3, 0.0, 0.5)
    h = conjugate_group(orbifold, m)
    s = h.cusp.scaling
    t = compose(compose(s.inverse(), h.cusp.parabolic), s)
    assert abs(abs(t.b) - 1) < 1e-10 and abs(t.c) < 1e-10
    assert all(verify_relations(h).values())
