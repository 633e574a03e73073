"""Fuzzy OWL 2 (OWL/XML syntax) export and re-import, plus DOT export.

Degrees travel in the Fuzzy OWL 2 annotation idiom: an annotation property
``fuzzyLabel`` whose literal is ``<fuzzyOwl2 fuzzyType="axiom"><Degree
value="D"/></fuzzyOwl2>``. Class-level associations use punning: every class
also exists as a same-IRI individual, and ``associatedWith`` links those.

The parser only understands documents written by :func:`export_fuzzy_owl2`.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from .errors import InvariantError, ParseError, ValidationError
from .lattice import ConceptLattice, FuzzyClusterLattice
from .ontology import (
    NONTAXONOMY,
    TAXONOMY,
    ConceptHierarchy,
    FuzzyOntology,
    OntologyConcept,
    PartitionAxiom,
    Relation,
    name_concept,
)
from .scaling import ScaleAttribute, bindings_map

OWL_NS = "http://www.w3.org/2002/07/owl#"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
DEFAULT_IRI = "http://example.org/fodm/ontology"

FUZZY_LABEL = "#fuzzyLabel"
SCALE_ATTRIBUTE = "#scaleAttribute"
ROLE = "#role"
PARTITION = "#partitionAxiom"
ASSOCIATED_WITH = "#associatedWith"

ROLE_CONCEPT, ROLE_CLUSTER, ROLE_OBJECT = "concept", "cluster", "object"

_KIND_ORDER = {
    "Declaration/AnnotationProperty": 1,
    "Declaration/ObjectProperty": 2,
    "Declaration/Class": 3,
    "Declaration/NamedIndividual": 4,
    "SubClassOf": 5,
    "ClassAssertion": 6,
    "ObjectPropertyAssertion": 7,
}


def sanitize_iri(name: str) -> str:
    s = re.sub(r"[() ]", "_", name)
    s = re.sub(r"_+", "_", s).strip("_")
    if not s:
        raise ValidationError(f"name {name!r} sanitizes to an empty IRI")
    return s


def format_degree(value: float, precision: int = 6) -> str:
    """Fixed-point degree text; tiny positive values never print as zero."""
    s = f"{value:.{precision}f}"
    if float(s) <= 0.0:
        s = f"{10.0 ** -precision:.{precision}f}"
    return s


def quantize(value: float | None, precision: int = 6) -> float | None:
    return None if value is None else float(format_degree(value, precision))


def _degree_literal(value: float, precision: int, fuzzy_type: str = "axiom") -> str:
    return f'<fuzzyOwl2 fuzzyType="{fuzzy_type}"><Degree value="{format_degree(value, precision)}"/></fuzzyOwl2>'


def _annotation(parent: ET.Element, prop: str, literal: str) -> None:
    ann = ET.SubElement(parent, "Annotation")
    if prop == RDFS_LABEL:
        ET.SubElement(ann, "AnnotationProperty", abbreviatedIRI="rdfs:label")
    else:
        ET.SubElement(ann, "AnnotationProperty", IRI=prop)
    ET.SubElement(ann, "Literal").text = literal


class _IriTable:
    def __init__(self):
        self.by_name: dict[str, str] = {}
        self.owner: dict[str, str] = {}

    def add(self, name: str) -> str:
        if name in self.by_name:
            return self.by_name[name]
        iri = "#" + sanitize_iri(name)
        if iri in self.owner:
            raise ValidationError(f"IRI collision: {name!r} and {self.owner[iri]!r} both map to {iri}")
        self.by_name[name] = iri
        self.owner[iri] = name
        return iri


def export_fuzzy_owl2(
    ontology: FuzzyOntology, degree_precision: int = 6, ontology_iri: str = DEFAULT_IRI
) -> bytes:
    """Serialize ``ontology`` as OWL/XML with Fuzzy OWL 2 degree annotations.

    The output is a pure function of its inputs: elements are sorted by
    (axiom kind, subject IRI, object IRI).
    """
    if not 1 <= degree_precision <= 12:
        raise ValidationError(f"degree_precision must lie in 1..12, got {degree_precision}")
    p = degree_precision
    iris = _IriTable()
    for c in sorted(ontology.concepts, key=lambda c: c.name):
        iris.add(c.name)
    concept_names = {c.name for c in ontology.concepts}
    endpoint_names = sorted(
        {n for r in ontology.nontaxonomy for n in (r.source, r.target)} - concept_names
    )
    for n in endpoint_names:
        iris.add(n)
    object_iris = {o: iris.add(o) for o in ontology.objects}

    items: list[tuple[tuple, ET.Element]] = []

    def emit(kind: str, subject: str, obj: str, el: ET.Element) -> None:
        items.append(((_KIND_ORDER[kind], subject, obj), el))

    for prop in (FUZZY_LABEL, PARTITION, ROLE, SCALE_ATTRIBUTE):
        el = ET.Element("Declaration")
        ET.SubElement(el, "AnnotationProperty", IRI=prop)
        emit("Declaration/AnnotationProperty", prop, "", el)
    if ontology.nontaxonomy:
        el = ET.Element("Declaration")
        ET.SubElement(el, "ObjectProperty", IRI=ASSOCIATED_WITH)
        emit("Declaration/ObjectProperty", ASSOCIATED_WITH, "", el)

    for c in ontology.concepts:
        iri = iris.by_name[c.name]
        el = ET.Element("Declaration")
        _annotation(el, RDFS_LABEL, c.name)
        for cid, display in sorted(_intent_members(c, ontology)):
            _annotation(el, SCALE_ATTRIBUTE, f"{cid}={display}")
        ET.SubElement(el, "Class", IRI=iri)
        emit("Declaration/Class", iri, "", el)

        el = ET.Element("Declaration")
        _annotation(el, RDFS_LABEL, c.name)
        _annotation(el, ROLE, ROLE_CONCEPT)
        ET.SubElement(el, "NamedIndividual", IRI=iri)
        emit("Declaration/NamedIndividual", iri, "", el)

        for obj, degree in c.instances.items():
            el = ET.Element("ClassAssertion")
            _annotation(el, FUZZY_LABEL, _degree_literal(degree, p))
            ET.SubElement(el, "Class", IRI=iri)
            ET.SubElement(el, "NamedIndividual", IRI=object_iris[obj])
            emit("ClassAssertion", iri, object_iris[obj], el)

    for n in endpoint_names:
        el = ET.Element("Declaration")
        _annotation(el, RDFS_LABEL, n)
        _annotation(el, ROLE, ROLE_CLUSTER)
        ET.SubElement(el, "NamedIndividual", IRI=iris.by_name[n])
        emit("Declaration/NamedIndividual", iris.by_name[n], "", el)

    for obj, iri in object_iris.items():
        el = ET.Element("Declaration")
        _annotation(el, RDFS_LABEL, obj)
        _annotation(el, ROLE, ROLE_OBJECT)
        ET.SubElement(el, "NamedIndividual", IRI=iri)
        emit("Declaration/NamedIndividual", iri, "", el)

    for r in ontology.taxonomy:
        sub, sup = iris.by_name[r.source], iris.by_name[r.target]
        el = ET.Element("SubClassOf")
        if r.confidence is not None:
            _annotation(el, FUZZY_LABEL, _degree_literal(r.confidence, p))
        ET.SubElement(el, "Class", IRI=sub)
        ET.SubElement(el, "Class", IRI=sup)
        emit("SubClassOf", sub, sup, el)

    for r in ontology.nontaxonomy:
        src, dst = iris.by_name[r.source], iris.by_name[r.target]
        el = ET.Element("ObjectPropertyAssertion")
        _annotation(el, FUZZY_LABEL, _degree_literal(r.confidence, p))
        ET.SubElement(el, "ObjectProperty", IRI=ASSOCIATED_WITH)
        ET.SubElement(el, "NamedIndividual", IRI=src)
        ET.SubElement(el, "NamedIndividual", IRI=dst)
        emit("ObjectPropertyAssertion", src, dst, el)

    keys = [k for k, _ in items]
    if len(set(keys)) != len(keys):
        raise InvariantError("duplicate axiom in export")

    root = ET.Element("Ontology", {"xmlns": OWL_NS, "ontologyIRI": ontology_iri})
    ET.SubElement(root, "Prefix", name="rdfs", IRI=RDFS_LABEL.rsplit("label", 1)[0])
    for ax in sorted(ontology.axioms):
        members = "".join(
            f'<Label name="{_xml_attr(lab)}" cluster="{_xml_attr(cid)}"/>'
            for lab, cid in zip(ax.labels, ax.cluster_ids)
        )
        _annotation(
            root,
            PARTITION,
            f'<fuzzyOwl2 fuzzyType="partition" attribute="{_xml_attr(ax.attribute)}">{members}</fuzzyOwl2>',
        )
    for _, el in sorted(items, key=lambda kv: kv[0]):
        root.append(el)
    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode")
    return ('<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n").encode("utf-8")


def _xml_attr(text: str) -> str:
    return text.replace("&", "&amp;").replace('"', "&quot;").replace("<", "&lt;")


def _intent_members(c: OntologyConcept, ontology: FuzzyOntology) -> list[tuple[str, str]]:
    table = {s.cluster_id: s for s in ontology.clusters}
    out = []
    for cid in c.id:
        display = table[cid].display_name if cid in table else cid
        out.append((cid, display))
    return out


# -- parsing -----------------------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _annotation_pair(ann: ET.Element) -> tuple[str, str]:
    prop = lit = None
    for child in ann:
        name = _local(child.tag)
        if name == "AnnotationProperty":
            prop = child.get("IRI")
            if prop is None and child.get("abbreviatedIRI") == "rdfs:label":
                prop = RDFS_LABEL
        elif name == "Literal":
            lit = child.text or ""
    if prop is None or lit is None:
        raise ParseError("annotation without property or literal")
    return prop, lit


def _annotations(el: ET.Element) -> list[tuple[str, str]]:
    return [_annotation_pair(a) for a in el if _local(a.tag) == "Annotation"]


def _entities(el: ET.Element) -> list[tuple[str, str]]:
    return [(_local(c.tag), c.get("IRI", "")) for c in el if _local(c.tag) != "Annotation"]


def _degree(annotations: list[tuple[str, str]]) -> float | None:
    for prop, lit in annotations:
        if prop != FUZZY_LABEL:
            continue
        try:
            payload = ET.fromstring(lit)
        except ET.ParseError as exc:
            raise ParseError(f"bad fuzzyOwl2 payload: {exc}") from None
        deg = payload.find("Degree")
        if deg is None or deg.get("value") is None:
            raise ParseError("fuzzyOwl2 payload without Degree")
        try:
            value = float(deg.get("value"))
        except ValueError:
            raise ParseError(f"degree {deg.get('value')!r} is not a number") from None
        if not 0.0 < value <= 1.0:
            raise ValidationError(f"degree {value} outside (0, 1]")
        return value
    return None


def parse_fuzzy_owl2(document: bytes | str) -> FuzzyOntology:
    """Rebuild a :class:`FuzzyOntology` from :func:`export_fuzzy_owl2` output."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}") from None
    if _local(root.tag) != "Ontology":
        raise ParseError(f"root element is {_local(root.tag)!r}, expected Ontology")

    axioms = []
    clusters: dict[str, ScaleAttribute] = {}
    classes: dict[str, tuple[str, list[tuple[str, str]]]] = {}
    individuals: dict[str, tuple[str, str]] = {}
    instances: dict[str, dict[str, float]] = {}
    subclass: list[tuple[str, str, float | None]] = []
    assoc: list[tuple[str, str, float | None]] = []

    for el in root:
        tag = _local(el.tag)
        if tag == "Prefix":
            continue
        if tag == "Annotation":
            prop, lit = _annotation_pair(el)
            if prop != PARTITION:
                raise ParseError(f"unknown ontology annotation {prop}")
            ax = _parse_partition(lit)
            axioms.append(ax)
            for lab, cid in zip(ax.labels, ax.cluster_ids):
                clusters[cid] = ScaleAttribute(ax.attribute, lab, cid)
        elif tag == "Declaration":
            ents = _entities(el)
            if len(ents) != 1:
                raise ParseError("declaration must declare exactly one entity")
            kind, iri = ents[0]
            anns = _annotations(el)
            label = next((lit for prop, lit in anns if prop == RDFS_LABEL), iri.lstrip("#"))
            if kind == "Class":
                if iri in classes:
                    raise ValidationError(f"duplicate class IRI {iri}")
                members = []
                for prop, lit in anns:
                    if prop == SCALE_ATTRIBUTE:
                        cid, _, display = lit.partition("=")
                        members.append((cid, display))
                classes[iri] = (label, members)
            elif kind == "NamedIndividual":
                if iri in individuals:
                    raise ValidationError(f"duplicate individual IRI {iri}")
                role = next((lit for prop, lit in anns if prop == ROLE), ROLE_OBJECT)
                individuals[iri] = (label, role)
            elif kind in ("AnnotationProperty", "ObjectProperty"):
                continue
            else:
                raise ParseError(f"unknown declaration kind {kind}")
        elif tag == "SubClassOf":
            ents = _entities(el)
            if [k for k, _ in ents] != ["Class", "Class"]:
                raise ParseError("SubClassOf must relate two classes")
            subclass.append((ents[0][1], ents[1][1], _degree(_annotations(el))))
        elif tag == "ClassAssertion":
            ents = _entities(el)
            if [k for k, _ in ents] != ["Class", "NamedIndividual"]:
                raise ParseError("ClassAssertion must relate a class and an individual")
            degree = _degree(_annotations(el))
            if degree is None:
                raise ParseError("ClassAssertion without degree")
            instances.setdefault(ents[0][1], {})[ents[1][1]] = degree
        elif tag == "ObjectPropertyAssertion":
            ents = _entities(el)
            if [k for k, _ in ents] != ["ObjectProperty", "NamedIndividual", "NamedIndividual"]:
                raise ParseError("malformed ObjectPropertyAssertion")
            if ents[0][1] != ASSOCIATED_WITH:
                raise ParseError(f"unknown object property {ents[0][1]}")
            degree = _degree(_annotations(el))
            if degree is None:
                raise ParseError("association without degree")
            assoc.append((ents[1][1], ents[2][1], degree))
        else:
            raise ParseError(f"unknown element {tag!r}")

    def class_name(iri: str) -> str:
        if iri not in classes:
            raise ParseError(f"reference to undeclared class {iri}")
        return classes[iri][0]

    def individual_name(iri: str) -> str:
        if iri not in individuals:
            raise ParseError(f"reference to undeclared individual {iri}")
        return individuals[iri][0]

    concepts = []
    for iri, (name, members) in classes.items():
        inst = {individual_name(o): d for o, d in instances.get(iri, {}).items()}
        concepts.append(
            OntologyConcept(
                id=frozenset(cid for cid, _ in members),
                name=name,
                attributes=tuple(sorted(display for _, display in members)),
                instances=inst,
            )
        )
    for iri in instances:
        class_name(iri)
    objects = tuple(name for name, role in individuals.values() if role == ROLE_OBJECT)
    taxonomy = tuple(Relation(TAXONOMY, class_name(s), class_name(t), d) for s, t, d in subclass)
    nontaxonomy = tuple(
        Relation(NONTAXONOMY, individual_name(s), individual_name(t), d) for s, t, d in assoc
    )
    return FuzzyOntology(
        concepts=tuple(concepts),
        taxonomy=taxonomy,
        nontaxonomy=nontaxonomy,
        axioms=tuple(axioms),
        objects=objects,
        clusters=tuple(clusters.values()),
    )


def _parse_partition(literal: str) -> PartitionAxiom:
    try:
        payload = ET.fromstring(literal)
    except ET.ParseError as exc:
        raise ParseError(f"bad partition payload: {exc}") from None
    labels = payload.findall("Label")
    return PartitionAxiom(
        payload.get("attribute", ""),
        tuple(l.get("name", "") for l in labels),
        tuple(l.get("cluster", "") for l in labels),
    )


def canonical_form(ontology: FuzzyOntology, precision: int = 6):
    """Order-free, degree-quantized view of an ontology, for equivalence checks."""
    concepts = frozenset(
        (
            c.id,
            c.name,
            c.attributes,
            frozenset((o, quantize(d, precision)) for o, d in c.instances.items()),
        )
        for c in ontology.concepts
    )
    rels = frozenset(
        (r.kind, r.source, r.target, quantize(r.confidence, precision))
        for r in (*ontology.taxonomy, *ontology.nontaxonomy)
    )
    return (
        concepts,
        rels,
        frozenset(ontology.axioms),
        frozenset(ontology.objects),
        frozenset(ontology.clusters),
    )


def isomorphic(a: FuzzyOntology, b: FuzzyOntology, precision: int = 6) -> bool:
    return canonical_form(a, precision) == canonical_form(b, precision)


# -- DOT ---------------------------------------------------------------------


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _attribute_of(display: str) -> str:
    return display.rsplit("(", 1)[0]


def export_dot(graph, bindings=None, title: str = "lattice") -> str:
    """Render a lattice, cluster lattice or hierarchy as a DOT digraph.

    Edges point from the more general node to the more specific one. Nodes
    whose intent draws on a single attribute are grouped in a subgraph per
    attribute.
    """
    if isinstance(graph, ConceptLattice):
        table = bindings_map(bindings) if bindings is not None else graph.context.bindings()
        nodes = []
        for c in graph.concepts:
            name = name_concept(c.intent, table, empty_extent=not c.extent)
            summary = " ".join(f"{o}:{d:g}" for o, d in sorted(c.extent.items()))
            attrs = {table[i].attribute for i in c.intent}
            nodes.append((name, f"{name}\n{{{summary}}}", attrs))
        covers = graph.covers
    elif isinstance(graph, FuzzyClusterLattice):
        if bindings is None:
            raise ValidationError("cluster lattice export needs label bindings")
        table = bindings_map(bindings)
        nodes = []
        for i, intent in enumerate(graph.nodes):
            name = name_concept(intent, table, empty_extent=i == graph.nothing)
            nodes.append((name, name, {table[c].attribute for c in intent}))
        covers = graph.covers
    elif isinstance(graph, ConceptHierarchy):
        nodes = [(c.name, c.name, {_attribute_of(a) for a in c.attributes}) for c in graph.concepts]
        covers = graph.covers
    else:
        raise ValidationError(f"cannot export {type(graph).__name__} as DOT")

    ids = [sanitize_iri(name) for name, _, _ in nodes]
    if len(set(ids)) != len(ids):
        raise ValidationError("DOT node ids collide")
    lines = [f"digraph {_dot_quote(title)} {{", "  rankdir=BT;", "  node [shape=box];"]
    groups: dict[str, list[int]] = {}
    loose = []
    for i, (_, _, attrs) in enumerate(nodes):
        if len(attrs) == 1:
            groups.setdefault(next(iter(attrs)), []).append(i)
        else:
            loose.append(i)
    for i in sorted(loose, key=lambda i: ids[i]):
        lines.append(f"  {_dot_quote(ids[i])} [label={_dot_quote(nodes[i][1])}];")
    for attr in sorted(groups):
        lines.append(f"  subgraph {_dot_quote('cluster_' + sanitize_iri(attr))} {{")
        lines.append(f"    label={_dot_quote(attr)};")
        for i in sorted(groups[attr], key=lambda i: ids[i]):
            lines.append(f"    {_dot_quote(ids[i])} [label={_dot_quote(nodes[i][1])}];")
        lines.append("  }")
    for p, c in sorted(covers, key=lambda e: (ids[e[0]], ids[e[1]])):
        lines.append(f"  {_dot_quote(ids[p])} -> {_dot_quote(ids[c])} [dir=back];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_counts(dot: str) -> tuple[int, int]:
    """(node count, edge count) of a DOT text written by :func:`export_dot`."""
    nodes = sum(1 for line in dot.splitlines() if "[label=" in line and "->" not in line)
    edges = sum(1 for line in dot.splitlines() if "->" in line)
    return nodes, edges
