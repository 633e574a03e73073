import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fodm import (
    ValidationError,
    brute_force_concepts,
    closure,
    enumerate_concepts,
    fuzzy_extent,
    similarity,
    to_fcl,
)
from fodm.scaling import FuzzyFormalContext, ScaleAttribute

from conftest import random_context, random_contexts
from oracles import brute_closures, sigma_similarity

fs = frozenset


def incidence(ctx):
    return {o: {j for j in range(len(ctx.cluster_ids)) if ctx.present[i, j]}
            for i, o in enumerate(ctx.object_ids)}


def as_ids(ctx, intents):
    return {fs(ctx.cluster_ids[j] for j in s) for s in intents}


def test_age_tah(table5):
    lat = enumerate_concepts(table5.subcontext("Age"))
    assert lat.intents() == {fs(), fs({"C4"}), fs({"C5"}), fs({"C4", "C5"})}
    assert lat.intents() == brute_force_concepts(table5.subcontext("Age"))


def test_salary_tah(table5):
    sub = table5.subcontext("Salary")
    lat = enumerate_concepts(sub)
    assert lat.intents() == {fs(), fs({"C1"}), fs({"C2"}), fs({"C1", "C2"}),
                             fs({"C2", "C3"}), fs({"C1", "C2", "C3"})}
    assert lat.intents() == brute_force_concepts(sub)


def test_mtah(table5):
    lat = enumerate_concepts(table5)
    assert len(lat) == 15
    assert lat.intents() == brute_force_concepts(table5)
    assert lat.intents() == as_ids(table5, brute_closures(incidence(table5), 5))
    assert lat.find({"C2", "C5"}).extent == {"t1": 0.5, "t2": 0.6, "t4": 0.4, "t6": 0.5}
    assert lat.find({"C1", "C4"}).extent == {"t3": 0.7, "t6": 0.5}


def test_extents(table5):
    assert fuzzy_extent(table5, {"C5"}) == {"t1": 0.5, "t2": 0.6, "t4": 0.8, "t6": 0.5}
    assert fuzzy_extent(table5, set()) == {f"t{i}": 1.0 for i in range(1, 7)}
    assert fuzzy_extent(table5, {"C2", "C5"}) == {"t1": 0.5, "t2": 0.6, "t4": 0.4, "t6": 0.5}
    with pytest.raises(ValidationError):
        fuzzy_extent(table5, {"C9"})


def test_similarity_examples(table5):
    e1 = fuzzy_extent(table5, {"C5"})
    e2 = fuzzy_extent(table5, {"C2", "C5"})
    assert similarity(e1, e2) == pytest.approx(2.0 / 2.4, abs=1e-12)
    assert similarity(e1, e1) == 1.0
    assert similarity({"a": 0.4}, {"b": 0.9}) == 0.0
    assert similarity({}, {}) == 1.0


fuzzy_sets = st.dictionaries(st.sampled_from("abcdef"), st.floats(0.01, 1.0), max_size=6)


@given(fuzzy_sets, fuzzy_sets)
def test_similarity_bounds_symmetry(e1, e2):
    s = similarity(e1, e2)
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(similarity(e2, e1))
    assert s == pytest.approx(sigma_similarity(e1, e2))
    if e1:
        assert similarity(e1, e1) == pytest.approx(1.0)


def test_covers_are_transitive_reduction(table5):
    lat = enumerate_concepts(table5)
    intents = [c.intent for c in lat.concepts]
    expected = set()
    for i, a in enumerate(intents):
        for j, b in enumerate(intents):
            if a < b and not any(a < c < b for c in intents):
                expected.add((i, j))
    assert set(lat.covers) == expected
    assert lat.concepts[lat.top].intent == fs()
    assert lat.concepts[lat.bottom].intent == fs(table5.cluster_ids)


def test_cover_c2_to_c2c5(table5):
    lat = enumerate_concepts(table5)
    assert (fs({"C2"}), fs({"C2", "C5"})) in lat.intent_covers()


def test_fcl(table5):
    lat = enumerate_concepts(table5)
    fcl = to_fcl(lat)
    assert len(fcl) == 15 and fcl.covers == lat.covers
    assert list(fcl.nodes) == [c.intent for c in lat.concepts]
    age = to_fcl(enumerate_concepts(table5.subcontext("Age")))
    assert set(age.nodes) == {fs(), fs({"C4"}), fs({"C5"}), fs({"C4", "C5"})}


def test_empty_attribute_context():
    ctx = FuzzyFormalContext(("a", "b"), (), np.empty((2, 0)))
    lat = enumerate_concepts(ctx)
    assert len(lat) == 1 and lat.concepts[0].intent == fs()
    assert lat.concepts[0].extent == {"a": 1.0, "b": 1.0}
    assert brute_force_concepts(ctx) == {fs()}
    assert len(to_fcl(lat)) == 1


def test_single_attribute_context():
    s = (ScaleAttribute("A", "x", "C1"),)
    full = FuzzyFormalContext(("a", "b"), s, [[0.5], [0.7]])
    assert brute_force_concepts(full) == {fs({"C1"})}
    partial = FuzzyFormalContext(("a", "b"), s, [[0.5], [np.nan]])
    assert brute_force_concepts(partial) == {fs(), fs({"C1"})}


def test_brute_force_limit():
    ctx = FuzzyFormalContext(("a",), tuple(ScaleAttribute("A", str(i), f"C{i}") for i in range(21)),
                             np.full((1, 21), 0.5))
    with pytest.raises(ValidationError):
        brute_force_concepts(ctx)


def test_oracle_equivalence_random():
    for ctx in random_contexts(100, seed=7):
        lat = enumerate_concepts(ctx)
        truth = as_ids(ctx, brute_closures(incidence(ctx), len(ctx.cluster_ids)))
        assert lat.intents() == truth == brute_force_concepts(ctx)
        assert len(lat.intents()) == len(lat)
        assert len(lat) <= 2 ** min(len(ctx.object_ids), len(ctx.cluster_ids))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 8), st.floats(0.2, 0.9))
def test_closure_and_extent_properties(seed, n_obj, n_attr, density):
    rng = np.random.default_rng(seed)
    ctx = random_context(rng, n_obj, n_attr, density)
    ids = ctx.cluster_ids
    b1 = fs(c for c in ids if rng.random() < 0.4)
    b2 = b1 | fs(c for c in ids if rng.random() < 0.4)
    c1 = closure(ctx, b1)
    assert b1 <= c1 and closure(ctx, c1) == c1
    e1, e2 = fuzzy_extent(ctx, b1), fuzzy_extent(ctx, b2)
    assert set(e2) <= set(e1)
    assert all(e2[o] <= e1[o] for o in e2)
    lat = enumerate_concepts(ctx)
    for p, c in lat.covers:
        parent, child = lat.concepts[p], lat.concepts[c]
        assert parent.intent < child.intent
        assert all(child.extent[o] <= parent.extent[o] for o in child.extent)
