"""Fuzzy ontology generation from numeric tables.

Pipeline: fuzzy c-means per attribute, alpha-cut conceptual scaling, fuzzy
concept lattices, then a fuzzy ontology exported as Fuzzy OWL 2.
"""

from .errors import DegenerateDataError, FodmError, InvariantError, ParseError, ValidationError
from .fcm import ClusterModel, MembershipMatrix, cluster_attribute, fcm_objective, membership_of
from .ingest import AttributeSpec, Dataset, PipelineConfig, load_config, load_dataset, validate_config
from .lattice import (
    ConceptLattice,
    FuzzyClusterLattice,
    FuzzyConcept,
    brute_force_concepts,
    closure,
    enumerate_concepts,
    fuzzy_extent,
    similarity,
    to_fcl,
)
from .ontology import (
    ConceptHierarchy,
    FuzzyOntology,
    Relation,
    assemble_ontology,
    association_rules,
    build_hierarchy,
    name_concept,
    rule_confidence,
    taxonomy_relations,
)
from .query import Query, QueryResult, evaluate_query, parse_query
from .scaling import (
    FuzzyFormalContext,
    ScaleAttribute,
    apply_alpha_cut,
    bind_labels,
    build_context,
    context_to_csv,
    read_context_csv,
)
from .serialize import export_dot, export_fuzzy_owl2, isomorphic, parse_fuzzy_owl2
from .pipeline import build, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AttributeSpec",
    "ClusterModel",
    "ConceptHierarchy",
    "ConceptLattice",
    "Dataset",
    "DegenerateDataError",
    "FodmError",
    "FuzzyClusterLattice",
    "FuzzyConcept",
    "FuzzyFormalContext",
    "FuzzyOntology",
    "InvariantError",
    "MembershipMatrix",
    "ParseError",
    "PipelineConfig",
    "Query",
    "QueryResult",
    "Relation",
    "ScaleAttribute",
    "ValidationError",
    "apply_alpha_cut",
    "assemble_ontology",
    "association_rules",
    "bind_labels",
    "brute_force_concepts",
    "build",
    "build_context",
    "build_hierarchy",
    "closure",
    "cluster_attribute",
    "context_to_csv",
    "enumerate_concepts",
    "evaluate_query",
    "export_dot",
    "export_fuzzy_owl2",
    "fcm_objective",
    "fuzzy_extent",
    "isomorphic",
    "load_config",
    "load_dataset",
    "membership_of",
    "name_concept",
    "parse_fuzzy_owl2",
    "parse_query",
    "read_context_csv",
    "rule_confidence",
    "run_pipeline",
    "similarity",
    "taxonomy_relations",
    "to_fcl",
    "validate_config",
]
