import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbizeta.classes import (
    WordCapExceeded,
    classes_by_words,
    classify_word,
    enumerate_by_words,
    enumerate_modular,
    normal_form,
    primitive_hyperbolic_classes,
    trace_bound,
)
from orbizeta.groups import builtin, inverse_word, random_word, word_power
from orbizeta.modular import canonical_rotation, is_proper_power, primitive_root_length

TORUS = builtin("builtin:punctured-torus")
ORBIFOLD = builtin("builtin:orbifold-0-1-222")
GOLDEN_SQ = ((3 + math.sqrt(5)) / 2) ** 2


def test_smallest_torus_classes_geodesic():
    recs = primitive_hyperbolic_classes(TORUS, 7, "geodesic")
    assert recs and all(abs(r.norm - GOLDEN_SQ) < 1e-12 for r in recs)
    assert abs(recs[0].norm - 6.8541) < 1e-4
    words = {r.word_text for r in recs}
    assert len(recs) == 6
    assert all(r.trace == 3 for r in recs)
    for w in ("A", "A^-1", "B", "B^-1"):
        assert normal_form(TORUS, TORUS.parse_word(w)) in {r.word for r in recs}
    assert len(words) == 6


def test_smallest_torus_classes_trace():
    recs = primitive_hyperbolic_classes(TORUS, 3, "trace")
    assert len(recs) == 6
    assert all(abs(r.norm - (3 + math.sqrt(5)) / 2) < 1e-12 for r in recs)


@pytest.mark.parametrize("group", [TORUS, ORBIFOLD], ids=["torus", "orbifold"])
@pytest.mark.parametrize("convention,n_max", [("geodesic", 50.0), ("trace", 8.0), ("geodesic", 120.0)])
def test_modular_matches_words(group, convention, n_max):
    by_words = enumerate_by_words(group, n_max, convention, word_cap=20)
    by_mod = enumerate_modular(group, n_max, convention)
    assert [r.word for r in by_words] == [r.word for r in by_mod]
    assert [r.chi for r in by_words] == [r.chi for r in by_mod]
    assert all(r.norm <= n_max and r.primitive for r in by_mod)
    assert len({r.word for r in by_mod}) == len(by_mod)


@pytest.mark.parametrize("group", [TORUS, ORBIFOLD], ids=["torus", "orbifold"])
def test_word_cap_stability(group):
    recs = enumerate_by_words(group, 50, "geodesic")
    L = max(r.word_length for r in recs) + 4
    a, _ = classes_by_words(group, 50, L, "geodesic")
    b, per_length = classes_by_words(group, 50, L + 2, "geodesic")
    assert [r.word for r in a] == [r.word for r in b] == [r.word for r in recs]
    assert per_length[-2:] == [0, 0]


def test_word_cap_error():
    with pytest.raises(WordCapExceeded, match="cap 3"):
        enumerate_by_words(TORUS, 50, "trace", word_cap=3)
    with pytest.raises(ValueError):
        primitive_hyperbolic_classes(TORUS, 1.0)
    with pytest.raises(ValueError):
        trace_bound(10, "bogus")


def test_inverse_classes_listed_separately():
    recs = primitive_hyperbolic_classes(TORUS, 200)
    words = {r.word for r in recs}
    for r in recs:
        assert r.inverse_word in words
    assert any(not r.self_inverse for r in recs)
    # in the free product of involutions some classes are their own inverse
    o = primitive_hyperbolic_classes(ORBIFOLD, 200)
    assert any(r.self_inverse for r in o)


def test_character_partition():
    recs = primitive_hyperbolic_classes(ORBIFOLD, 100)
    assert {r.chi for r in recs} == {1, -1}
    for r in recs:
        assert r.chi == (-1) ** r.word_length


RECORDS = {g.name: primitive_hyperbolic_classes(g, 60) for g in (TORUS, ORBIFOLD)}


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([TORUS, ORBIFOLD]), st.data(), st.integers(0, 2 ** 32 - 1), st.integers(1, 8))
def test_conjugation_closure(group, data, seed, length):
    rec = data.draw(st.sampled_from(RECORDS[group.name]))
    sigma = random_word(group, length, np.random.default_rng(seed))
    conj = sigma + rec.word + inverse_word(group, sigma)
    assert normal_form(group, conj) == rec.word
    m = group.evaluate(conj)
    assert abs(m.trace) == rec.trace


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([TORUS, ORBIFOLD]), st.data())
def test_trace_is_class_function(group, data):
    rec = data.draw(st.sampled_from(RECORDS[group.name]))
    w = rec.word
    for k in range(len(w)):
        assert abs(group.evaluate(w[k:] + w[:k]).trace) == rec.trace


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([TORUS, ORBIFOLD]), st.data(), st.sampled_from([2, 3]))
def test_powers_not_primitive(group, data, p):
    rec = data.draw(st.sampled_from(RECORDS[group.name]))
    power = classify_word(group, word_power(group, rec.word, p))
    assert power is not None and not power.primitive
    assert abs(power.norm - rec.norm ** p) < 1e-9 * rec.norm ** p


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=12))
def test_canonical_rotation_is_least(word):
    w = tuple(word)
    rotations = [w[k:] + w[:k] for k in range(len(w))]
    assert canonical_rotation(w) == min(rotations)
    root = primitive_root_length(w)
    assert len(w) % root == 0 and w == w[:root] * (len(w) // root)
    assert is_proper_power(w) == (root < len(w))
