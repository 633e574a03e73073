"""From a concept lattice to a fuzzy ontology.

The ontology is the tuple (concepts, attribute sets, relations, axioms):

* concepts are the lattice nodes, named after their intents;
* taxonomy relations are the cover edges, weighted by the similarity of the
  parent's and child's fuzzy extents;
* non-taxonomy relations are graded cluster rules ``body -> head`` between
  clusters of different attributes, with confidence
  ``sum_o min(body(o), head(o)) / sum_o body(o)``;
* axioms record, per attribute, that its labels form a fuzzy partition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .lattice import ConceptLattice, similarity
from .scaling import FuzzyFormalContext, ScaleAttribute, bindings_map

TAXONOMY = "taxonomy"
NONTAXONOMY = "nontaxonomy"
THING = "Thing"
NOTHING = "Nothing"
CONJUNCTION = "_AND_"


@dataclass(frozen=True)
class OntologyConcept:
    id: frozenset[str]
    name: str
    attributes: tuple[str, ...]
    instances: dict[str, float] = field(hash=False, compare=True)


@dataclass(frozen=True)
class ConceptHierarchy:
    """Named concepts ordered by cover edges ``(parent, child)`` (indices)."""

    concepts: tuple[OntologyConcept, ...]
    covers: frozenset[tuple[int, int]]
    thing: int
    nothing: int

    def names(self) -> list[str]:
        return [c.name for c in self.concepts]

    def by_name(self, name: str) -> OntologyConcept:
        for c in self.concepts:
            if c.name == name:
                return c
        raise KeyError(name)

    def descendants(self, i: int) -> set[int]:
        children: dict[int, list[int]] = {}
        for p, c in self.covers:
            children.setdefault(p, []).append(c)
        seen, stack = set(), [i]
        while stack:
            for c in children.get(stack.pop(), ()):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen


@dataclass(frozen=True, order=True)
class Relation:
    """A graded binary relation between named concepts or clusters.

    Taxonomy relations read ``source is-a target`` (source is the subconcept).
    ``confidence`` is None for taxonomy edges whose similarity is 0.
    """

    kind: str
    source: str
    target: str
    confidence: float | None = None

    def __post_init__(self):
        if self.kind not in (TAXONOMY, NONTAXONOMY):
            raise ValidationError(f"unknown relation kind {self.kind!r}")
        if self.confidence is not None and not 0.0 < self.confidence <= 1.0:
            raise ValidationError(f"relation confidence {self.confidence} outside (0, 1]")

    def render(self, digits: int = 2) -> str:
        degree = "-" if self.confidence is None else f"{self.confidence:.{digits}f}"
        return f"r({self.source}, {self.target}, {degree})"


@dataclass(frozen=True, order=True)
class PartitionAxiom:
    """The labels of one attribute form a fuzzy partition (pre-cut degrees sum to 1)."""

    attribute: str
    labels: tuple[str, ...]
    cluster_ids: tuple[str, ...]


@dataclass(frozen=True)
class FuzzyOntology:
    concepts: tuple[OntologyConcept, ...]
    taxonomy: tuple[Relation, ...]
    nontaxonomy: tuple[Relation, ...]
    axioms: tuple[PartitionAxiom, ...]
    objects: tuple[str, ...] = ()
    clusters: tuple[ScaleAttribute, ...] = ()

    def concept(self, name: str) -> OntologyConcept:
        for c in self.concepts:
            if c.name == name:
                return c
        raise KeyError(name)

    def relation(self, source: str, target: str, kind: str = NONTAXONOMY) -> Relation:
        pool = self.taxonomy if kind == TAXONOMY else self.nontaxonomy
        for r in pool:
            if r.source == source and r.target == target:
                return r
        raise KeyError((source, target))


def name_concept(intent: Iterable[str], bindings, empty_extent: bool = False) -> str:
    """Concept name from its intent.

    ``{C1}`` gives ``Salary(Low)``; several members are sorted by
    (attribute, label) and joined with ``_AND_``. The empty intent is
    ``Thing`` and an intent with no instances is ``Nothing``.
    """
    table = bindings_map(bindings)
    intent = frozenset(intent)
    members = []
    for cid in intent:
        if cid not in table:
            raise ValidationError(f"cluster {cid!r} has no label binding")
        members.append(table[cid])
    if empty_extent:
        return NOTHING
    if not members:
        return THING
    members.sort(key=lambda s: (s.attribute, s.label))
    return CONJUNCTION.join(s.display_name for s in members)


def concept_attributes(intent: Iterable[str], bindings) -> tuple[str, ...]:
    table = bindings_map(bindings)
    return tuple(sorted(table[c].display_name for c in intent))


def build_hierarchy(lattice: ConceptLattice, bindings=None) -> ConceptHierarchy:
    bindings = bindings if bindings is not None else lattice.context.bindings()
    concepts = tuple(
        OntologyConcept(
            id=c.intent,
            name=name_concept(c.intent, bindings, empty_extent=not c.extent),
            attributes=concept_attributes(c.intent, bindings),
            instances=dict(c.extent),
        )
        for c in lattice.concepts
    )
    names = [c.name for c in concepts]
    if len(set(names)) != len(names):
        raise ValidationError("concept names collide; display names must be distinct")
    return ConceptHierarchy(concepts, lattice.covers, lattice.top, lattice.bottom)


def taxonomy_relations(lattice: ConceptLattice, hierarchy: ConceptHierarchy) -> tuple[Relation, ...]:
    if len(hierarchy.concepts) != len(lattice.concepts) or hierarchy.covers != lattice.covers:
        raise ValidationError("hierarchy was not built from this lattice")
    out = []
    for p, c in lattice.covers:
        s = similarity(lattice.concepts[p].extent, lattice.concepts[c].extent)
        out.append(
            Relation(
                TAXONOMY,
                source=hierarchy.concepts[c].name,
                target=hierarchy.concepts[p].name,
                confidence=s if s > 0.0 else None,
            )
        )
    return tuple(sorted(out, key=lambda r: (r.source, r.target)))


def rule_confidence(context: FuzzyFormalContext, body: Iterable[str], head: str) -> float | None:
    """Graded confidence of ``body -> head``; None when the body has no support."""
    cells = np.nan_to_num(context.cells)
    cols = [context.index_of(b) for b in body]
    if not cols:
        raise ValidationError("rule body must not be empty")
    body_deg = cells[:, cols].min(axis=1)
    total = float(body_deg.sum())
    if total == 0.0:
        return None
    both = np.minimum(body_deg, cells[:, context.index_of(head)])
    return float(both.sum()) / total


def association_rules(
    context: FuzzyFormalContext,
    bindings=None,
    min_confidence: float = 0.5,
    max_body: int = 2,
) -> tuple[Relation, ...]:
    """Cross-attribute cluster rules with confidence >= ``min_confidence``.

    Bodies hold 1..max_body clusters; the head belongs to an attribute not
    present in the body. Output is ordered by body (column order) then head.
    """
    if not 1 <= max_body <= 2:
        raise ValidationError(f"max_body must be 1 or 2, got {max_body}")
    if not 0.0 < min_confidence <= 1.0:
        raise ValidationError(f"min_confidence must lie in (0, 1], got {min_confidence}")
    table = bindings_map(bindings) if bindings is not None else context.bindings()
    ids = context.cluster_ids
    out = []
    for size in range(1, max_body + 1):
        for body in combinations(ids, size):
            body_attrs = {table[b].attribute for b in body}
            for head in ids:
                if head in body or table[head].attribute in body_attrs:
                    continue
                conf = rule_confidence(context, body, head)
                if conf is None or conf < min_confidence:
                    continue
                out.append(
                    Relation(
                        NONTAXONOMY,
                        source=name_concept(body, table),
                        target=name_concept([head], table),
                        confidence=min(conf, 1.0),
                    )
                )
    return tuple(out)


def partition_axioms(bindings: Sequence[ScaleAttribute]) -> tuple[PartitionAxiom, ...]:
    groups: dict[str, list[ScaleAttribute]] = {}
    for b in bindings:
        groups.setdefault(b.attribute, []).append(b)
    return tuple(
        PartitionAxiom(attr, tuple(b.label for b in bs), tuple(b.cluster_id for b in bs))
        for attr, bs in groups.items()
    )


def assemble_ontology(
    hierarchy: ConceptHierarchy,
    taxonomy: Sequence[Relation],
    nontaxonomy: Sequence[Relation],
    context: FuzzyFormalContext,
    bindings=None,
) -> FuzzyOntology:
    table = bindings_map(bindings) if bindings is not None else context.bindings()
    names = set(hierarchy.names())
    for r in taxonomy:
        if r.kind != TAXONOMY or r.source not in names or r.target not in names:
            raise ValidationError(f"taxonomy relation {r.render()} does not fit the hierarchy")
    cluster_names = {name_concept([c], table) for c in table}
    for r in nontaxonomy:
        ends = r.source.split(CONJUNCTION) + [r.target]
        if r.kind != NONTAXONOMY or not set(ends) <= cluster_names:
            raise ValidationError(f"association {r.render()} names unknown clusters")
    for c in hierarchy.concepts:
        if not set(c.instances) <= set(context.object_ids):
            raise ValidationError(f"concept {c.name} has instances outside the context")
    scale = tuple(table[c] for c in context.cluster_ids if c in table)
    return FuzzyOntology(
        concepts=hierarchy.concepts,
        taxonomy=tuple(taxonomy),
        nontaxonomy=tuple(nontaxonomy),
        axioms=partition_axioms(scale),
        objects=context.object_ids,
        clusters=scale,
    )
