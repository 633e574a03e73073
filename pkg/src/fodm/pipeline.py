"""End-to-end orchestration: dataset -> clusters -> context -> lattices -> ontology -> files."""

from __future__ import annotations

import json
import logging
import os
import tempfile
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FodmError, InvariantError, ValidationError
from .fcm import (
    ClusterModel,
    MembershipMatrix,
    cluster_attribute,
    memberships_to_csv,
    model_from_memberships,
    read_memberships_csv,
)
from .ingest import Dataset, ValidatedConfig, load_config, load_dataset, validate_config
from .lattice import ConceptLattice, FuzzyClusterLattice, enumerate_concepts, to_fcl
from .ontology import (
    ConceptHierarchy,
    FuzzyOntology,
    assemble_ontology,
    association_rules,
    build_hierarchy,
    taxonomy_relations,
)
from .scaling import (
    FuzzyFormalContext,
    ScaleAttribute,
    apply_alpha_cut,
    bind_labels,
    build_context,
    context_to_csv,
)
from .serialize import export_dot, export_fuzzy_owl2, format_degree, sanitize_iri

log = logging.getLogger(__name__)

ONTOLOGY_FILE = "ontology.owl"
CONTEXT_FILE = "context.csv"
REPORT_FILE = "report.json"


@contextmanager
def stage(name: str):
    """Time a stage and tag any error raised inside it with the stage name."""
    start = time.perf_counter()
    try:
        yield
    except FodmError as exc:
        exc.args = (f"[{name}] {exc}",)
        raise
    except OSError as exc:
        raise OSError(exc.errno, f"[{name}] {exc.strerror}", exc.filename) from exc
    except Exception as exc:
        raise InvariantError(f"[{name}] {type(exc).__name__}: {exc}") from exc
    log.info("stage %-9s %.2f ms", name, (time.perf_counter() - start) * 1e3)


@dataclass
class PipelineResult:
    dataset: Dataset
    config: ValidatedConfig
    models: dict[str, ClusterModel]
    bindings: dict[str, tuple[ScaleAttribute, ...]]
    context: FuzzyFormalContext
    tahs: dict[str, ConceptLattice]
    mtah: ConceptLattice
    fcl: FuzzyClusterLattice
    hierarchy: ConceptHierarchy
    ontology: FuzzyOntology


@dataclass
class PipelineArtifacts:
    out_dir: Path
    files: list[Path] = field(default_factory=list)

    @property
    def ontology(self) -> Path:
        return self.out_dir / ONTOLOGY_FILE

    def __iter__(self):
        return iter(self.files)


def split_fixture(matrix: MembershipMatrix, dataset: Dataset, config: ValidatedConfig) -> dict[str, MembershipMatrix]:
    """Cut a combined objects x clusters table into per-attribute blocks (config order)."""
    if set(matrix.object_ids) != set(dataset.object_ids) or len(matrix.object_ids) != dataset.n_objects:
        raise ValidationError("fixture objects do not match the dataset objects")
    order = [matrix.object_ids.index(o) for o in dataset.object_ids]
    mu = matrix.mu[order]
    need = sum(s.k for s in config.specs)
    if len(matrix.cluster_ids) != need:
        raise ValidationError(
            f"fixture has {len(matrix.cluster_ids)} cluster columns, config needs {need}"
        )
    out, col = {}, 0
    for spec in config.specs:
        block = slice(col, col + spec.k)
        out[spec.attribute] = MembershipMatrix(dataset.object_ids, matrix.cluster_ids[block], mu[:, block])
        col += spec.k
    return out


def build(dataset: Dataset, config: ValidatedConfig, fixture: MembershipMatrix | None = None) -> PipelineResult:
    """Run every in-memory stage; nothing is written."""
    models: dict[str, ClusterModel] = {}
    with stage("cluster"):
        if fixture is not None:
            blocks = split_fixture(fixture, dataset, config)
            for spec in config.specs:
                models[spec.attribute] = model_from_memberships(dataset.column(spec.attribute), blocks[spec.attribute], spec)
                sums = blocks[spec.attribute].row_sums()
                if np.any(np.abs(sums - 1.0) > 1e-6):
                    log.warning("%s: fixture rows do not sum to 1 (max deviation %.3g)",
                                spec.attribute, float(np.max(np.abs(sums - 1.0))))
        else:
            start = 1
            for spec in config.specs:
                ids = [f"C{start + i}" for i in range(spec.k)]
                start += spec.k
                models[spec.attribute] = cluster_attribute(
                    dataset.column(spec.attribute), spec, dataset.object_ids, ids
                )
                log.info("%s: %d iterations, objective %.6g", spec.attribute,
                         models[spec.attribute].iterations, models[spec.attribute].objective)

    with stage("scale"):
        bindings = {s.attribute: bind_labels(models[s.attribute], s) for s in config.specs}
        cuts = [apply_alpha_cut(models[s.attribute].memberships, s.alpha) for s in config.specs]
        context = build_context(cuts, [bindings[s.attribute] for s in config.specs])

    with stage("lattice"):
        tahs = {a: enumerate_concepts(context.subcontext(a)) for a in context.attributes}
        mtah = enumerate_concepts(context)
        fcl = to_fcl(mtah)

    with stage("ontology"):
        hierarchy = build_hierarchy(mtah)
        taxonomy = taxonomy_relations(mtah, hierarchy)
        rules = association_rules(context, None, config.config.min_confidence, config.config.max_body)
        ontology = assemble_ontology(hierarchy, taxonomy, rules, context)

    return PipelineResult(dataset, config, models, bindings, context, tahs, mtah, fcl, hierarchy, ontology)


def report(result: PipelineResult, files: list[str]) -> dict:
    p = result.config.config.degree_precision
    clusters = []
    for spec in result.config.specs:
        model = result.models[spec.attribute]
        for b, c in zip(result.bindings[spec.attribute], model.centers):
            clusters.append({"id": b.cluster_id, "attribute": b.attribute, "label": b.label,
                             "name": b.display_name, "center": float(c)})

    def rel(r):
        return {
            "source": r.source,
            "target": r.target,
            "confidence": r.confidence,
            f"confidence_{p}dp": None if r.confidence is None else format_degree(r.confidence, p),
            "confidence_2dp": None if r.confidence is None else round(r.confidence, 2),
            "rendered": r.render(),
        }

    return {
        "objects": len(result.dataset.object_ids),
        "attributes": [s.attribute for s in result.config.specs],
        "clusters": clusters,
        "lattices": {
            "tah": {a: {"concepts": len(l), "covers": len(l.covers)} for a, l in result.tahs.items()},
            "mtah": {"concepts": len(result.mtah), "covers": len(result.mtah.covers)},
            "fcl": {"nodes": len(result.fcl), "covers": len(result.fcl.covers)},
        },
        "concepts": len(result.ontology.concepts),
        "taxonomy": [rel(r) for r in result.ontology.taxonomy],
        "nontaxonomy": [rel(r) for r in result.ontology.nontaxonomy],
        "axioms": [
            {"kind": "partition", "attribute": a.attribute, "labels": list(a.labels)}
            for a in result.ontology.axioms
        ],
        "artifacts": files,
    }


def render_artifacts(result: PipelineResult) -> dict[str, bytes]:
    """File name -> content for every artifact, ontology included."""
    files: dict[str, str | bytes] = {}
    for spec in result.config.specs:
        files[f"memberships_{sanitize_iri(spec.attribute)}.csv"] = memberships_to_csv(
            result.models[spec.attribute].memberships
        )
    for attr, tah in result.tahs.items():
        key = sanitize_iri(attr)
        files[f"scale_{key}.csv"] = context_to_csv(result.context.subcontext(attr))
        files[f"tah_{key}.dot"] = export_dot(tah, title=f"TAH {attr}")
    files[CONTEXT_FILE] = context_to_csv(result.context)
    files["mtah.dot"] = export_dot(result.mtah, title="MTAH")
    files["fcl.dot"] = export_dot(result.fcl, result.context.bindings(), title="FCL")
    files["hierarchy.dot"] = export_dot(result.hierarchy, title="hierarchy")
    files[ONTOLOGY_FILE] = export_fuzzy_owl2(result.ontology, result.config.config.degree_precision)
    names = sorted(files) + [REPORT_FILE]
    files[REPORT_FILE] = json.dumps(report(result, names), indent=2, sort_keys=False) + "\n"
    return {k: v.encode("utf-8") if isinstance(v, str) else v for k, v in files.items()}


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_inputs(config_path, data_path, memberships_path=None):
    with stage("ingest"):
        dataset = load_dataset(Path(data_path))
        config = validate_config(dataset, load_config(Path(config_path)))
        fixture = None
        if memberships_path is not None:
            fixture = read_memberships_csv(Path(memberships_path).read_text(encoding="utf-8"))
    return dataset, config, fixture


def run_pipeline(config_path, data_path, out_dir, memberships_path=None) -> PipelineArtifacts:
    """Run the whole pipeline and write every artifact into ``out_dir``.

    All stages run in memory first, so a failing run writes nothing. The
    ontology file is written last and atomically.
    """
    dataset, config, fixture = load_inputs(config_path, data_path, memberships_path)
    result = build(dataset, config, fixture)
    with stage("export"):
        blobs = render_artifacts(result)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = PipelineArtifacts(out)
    with stage("write"):
        for name in sorted(blobs):
            if name in (ONTOLOGY_FILE, REPORT_FILE):
                continue
            _atomic_write(out / name, blobs[name])
            artifacts.files.append(out / name)
        for name in (REPORT_FILE, ONTOLOGY_FILE):
            _atomic_write(out / name, blobs[name])
            artifacts.files.append(out / name)
    return artifacts
