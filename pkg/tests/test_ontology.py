from itertools import combinations

import numpy as np
import pytest

from fodm import (
    ValidationError,
    assemble_ontology,
    association_rules,
    build_hierarchy,
    enumerate_concepts,
    name_concept,
    rule_confidence,
    taxonomy_relations,
)
from fodm.ontology import NONTAXONOMY, NOTHING, THING, Relation
from fodm.scaling import FuzzyFormalContext, ScaleAttribute

from conftest import BINDINGS, random_contexts

fs = frozenset


def test_names(table5):
    assert name_concept({"C1"}, BINDINGS) == "Salary(Low)"
    assert name_concept({"C5"}, BINDINGS) == "Age(Adult)"
    assert name_concept(set(), BINDINGS) == "Thing"
    assert name_concept({"C2", "C5"}, BINDINGS) == "Age(Adult)_AND_Salary(Medium)"
    assert name_concept(table5.cluster_ids, BINDINGS, empty_extent=True) == "Nothing"
    with pytest.raises(ValidationError):
        name_concept({"C7"}, BINDINGS)


def test_hierarchy_thing_nothing(table5):
    lat = enumerate_concepts(table5)
    h = build_hierarchy(lat, BINDINGS)
    assert h.concepts[h.thing].name == THING
    assert h.concepts[h.nothing].name == NOTHING
    assert h.concepts[h.nothing].id == fs(table5.cluster_ids)
    assert len(set(h.names())) == 15


def test_hierarchy_age_diamond(table5):
    h = build_hierarchy(enumerate_concepts(table5.subcontext("Age")))
    edges = {(h.concepts[p].name, h.concepts[c].name) for p, c in h.covers}
    bottom = "Age(Adult)_AND_Age(Young)"
    assert edges == {("Thing", "Age(Young)"), ("Thing", "Age(Adult)"),
                     ("Age(Young)", bottom), ("Age(Adult)", bottom)}


def test_single_concept_hierarchy():
    ctx = FuzzyFormalContext(("a", "b"), (), np.empty((2, 0)))
    h = build_hierarchy(enumerate_concepts(ctx))
    assert h.thing == h.nothing == 0
    assert h.concepts[0].name == THING


def test_reachability_is_intent_inclusion(table5):
    h = build_hierarchy(enumerate_concepts(table5))
    for i, a in enumerate(h.concepts):
        below = h.descendants(i)
        for j, b in enumerate(h.concepts):
            assert (j in below) == (a.id < b.id)


def test_taxonomy_degree_c2_to_c2c5(table5):
    lat = enumerate_concepts(table5)
    h = build_hierarchy(lat)
    tax = taxonomy_relations(lat, h)
    edge = next(r for r in tax if r.source == "Age(Adult)_AND_Salary(Medium)" and r.target == "Salary(Medium)")
    assert edge.confidence == pytest.approx(0.8, abs=1e-9)
    assert len(tax) == len(lat.covers)
    assert all(r.source != r.target for r in tax)
    into_nothing = [r for r in tax if r.source == NOTHING]
    assert into_nothing and all(r.confidence is None for r in into_nothing)


def test_rule_examples(table5):
    assert rule_confidence(table5, ["C5"], "C2") == pytest.approx(2.0 / 2.4, abs=1e-12)
    assert rule_confidence(table5, ["C4"], "C1") == pytest.approx(1.2 / 2.3, abs=1e-12)
    assert rule_confidence(table5, ["C4", "C5"], "C2") == pytest.approx(1.0, abs=1e-12)
    assert rule_confidence(table5, ["C1", "C3"], "C4") is None


def test_association_c5_c2(table5):
    rules = association_rules(table5, BINDINGS, 0.5)
    r = next(r for r in rules if r.source == "Age(Adult)" and r.target == "Salary(Medium)")
    assert r.confidence == pytest.approx(0.833333, abs=1e-6)
    assert r.render() == "r(Age(Adult), Salary(Medium), 0.83)"
    low = association_rules(table5, BINDINGS, 0.5, max_body=1)
    assert any(r.source == "Age(Young)" and r.target == "Salary(Low)" for r in low)
    assert all("_AND_" not in r.source for r in low)


def test_rules_respect_threshold_and_attributes(table5):
    rules = association_rules(table5, BINDINGS, 0.6)
    names = {b.display_name: b.attribute for b in BINDINGS}
    for r in rules:
        assert 0.6 <= r.confidence <= 1.0
        body_attrs = {names[p] for p in r.source.split("_AND_")}
        assert names[r.target] not in body_attrs
    only_exact = association_rules(table5, BINDINGS, 1.0)
    assert all(r.confidence == 1.0 for r in only_exact)


def test_assemble_example(example_result):
    onto = example_result.ontology
    assert len(onto.concepts) == 15
    assert onto.concept("Salary(Medium)").instances == {"t1": 0.5, "t2": 0.6, "t4": 0.4, "t5": 0.5, "t6": 0.5}
    assert onto.concept("Salary(Medium)").attributes == ("Salary(Medium)",)
    assert [a.attribute for a in onto.axioms] == ["Salary", "Age"]
    assert onto.axioms[0].labels == ("Low", "Medium", "High")


def test_assemble_with_no_rules(table5):
    lat = enumerate_concepts(table5)
    h = build_hierarchy(lat)
    onto = assemble_ontology(h, taxonomy_relations(lat, h), (), table5)
    assert onto.nontaxonomy == ()
    assert len(onto.axioms) == 2


def test_assemble_rejects_foreign_relations(table5):
    lat = enumerate_concepts(table5)
    h = build_hierarchy(lat)
    bogus = (Relation(NONTAXONOMY, "Age(Old)", "Salary(Low)", 0.9),)
    with pytest.raises(ValidationError):
        assemble_ontology(h, taxonomy_relations(lat, h), bogus, table5)


def test_relation_confidence_range():
    with pytest.raises(ValidationError):
        Relation(NONTAXONOMY, "a", "b", 0.0)
    with pytest.raises(ValidationError):
        Relation(NONTAXONOMY, "a", "b", 1.2)


def _support(ctx, cid):
    return set(ctx.column(cid))


def test_properties_2_and_3_random():
    for ctx in random_contexts(100, seed=99):
        table = ctx.bindings()
        ids = ctx.cluster_ids
        for body_size in (1, 2):
            for body in combinations(ids, body_size):
                for head in ids:
                    if head in body or table[head].attribute in {table[b].attribute for b in body}:
                        continue
                    conf = rule_confidence(ctx, body, head)
                    if conf != 1.0:
                        continue
                    support = set.intersection(*(_support(ctx, b) for b in body))
                    assert support <= _support(ctx, head)
                    if body_size == 1:
                        col_b, col_h = ctx.column(body[0]), ctx.column(head)
                        assert all(col_h[o] >= col_b[o] for o in col_b)


def test_confidence_one_when_head_dominates():
    scale = (ScaleAttribute("A", "x", "C1"), ScaleAttribute("B", "y", "C2"))
    ctx = FuzzyFormalContext(("a", "b", "c"), scale, [[0.3, 0.5], [0.6, 0.6], [np.nan, 0.2]])
    assert rule_confidence(ctx, ["C1"], "C2") == 1.0
