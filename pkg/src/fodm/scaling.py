"""Alpha-cuts, linguistic labels and the fuzzy formal context."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .fcm import ClusterModel, MembershipMatrix, format_degree_csv
from .ingest import AttributeSpec


@dataclass(frozen=True)
class ScaleAttribute:
    """A labeled cluster: one column of the fuzzy formal context."""

    attribute: str
    label: str
    cluster_id: str

    @property
    def display_name(self) -> str:
        return f"{self.attribute}({self.label})"


@dataclass(frozen=True)
class FuzzyFormalContext:
    """Objects x scale attributes; ``cells`` holds NaN where a cell is absent.

    Present cells are strictly positive. The crisp incidence relation used for
    concept enumeration is "cell present".
    """

    object_ids: tuple[str, ...]
    scale_attributes: tuple[ScaleAttribute, ...]
    cells: np.ndarray = field(repr=False)

    def __post_init__(self):
        cells = np.array(self.cells, dtype=float).reshape(
            len(self.object_ids), len(self.scale_attributes)
        )
        present = cells[~np.isnan(cells)]
        if np.any(present <= 0.0) or np.any(present > 1.0):
            raise ValidationError("present context cells must lie in (0, 1]")
        ids = [s.cluster_id for s in self.scale_attributes]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate cluster ids in context: {ids}")
        pairs = [(s.attribute, s.label) for s in self.scale_attributes]
        if len(set(pairs)) != len(pairs):
            raise ValidationError("duplicate (attribute, label) pairs in context")
        if len(set(self.object_ids)) != len(self.object_ids):
            raise ValidationError("duplicate object ids in context")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def cluster_ids(self) -> tuple[str, ...]:
        return tuple(s.cluster_id for s in self.scale_attributes)

    @property
    def attributes(self) -> tuple[str, ...]:
        """Distinct attribute names, in column order."""
        return tuple(dict.fromkeys(s.attribute for s in self.scale_attributes))

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.cells)

    def index_of(self, cluster_id: str) -> int:
        try:
            return self.cluster_ids.index(cluster_id)
        except ValueError:
            raise ValidationError(f"unknown scale attribute {cluster_id!r}") from None

    def binding(self, cluster_id: str) -> ScaleAttribute:
        return self.scale_attributes[self.index_of(cluster_id)]

    def bindings(self) -> dict[str, ScaleAttribute]:
        return {s.cluster_id: s for s in self.scale_attributes}

    def cell(self, object_id: str, cluster_id: str) -> float | None:
        x = self.cells[self.object_ids.index(object_id), self.index_of(cluster_id)]
        return None if np.isnan(x) else float(x)

    def column(self, cluster_id: str) -> dict[str, float]:
        col = self.cells[:, self.index_of(cluster_id)]
        return {o: float(v) for o, v in zip(self.object_ids, col) if not np.isnan(v)}

    def subcontext(self, attribute: str) -> "FuzzyFormalContext":
        """The single-attribute scale (the context of that attribute's TAH)."""
        cols = [j for j, s in enumerate(self.scale_attributes) if s.attribute == attribute]
        if not cols:
            raise ValidationError(f"no scale attributes for {attribute!r}")
        return FuzzyFormalContext(
            self.object_ids,
            tuple(self.scale_attributes[j] for j in cols),
            self.cells[:, cols],
        )

    def resolve(self, attribute: str, label: str) -> ScaleAttribute:
        """Find a scale attribute by (attribute, label), case-insensitively."""
        attr_hits = [s for s in self.scale_attributes if s.attribute.lower() == attribute.lower()]
        if not attr_hits:
            raise ValidationError(f"unknown attribute {attribute!r}")
        for s in attr_hits:
            if s.label.lower() == label.lower():
                return s
        known = ", ".join(s.label for s in attr_hits)
        raise ValidationError(f"unknown label {label!r} for {attribute} (known: {known})")


def apply_alpha_cut(matrix: MembershipMatrix, alpha: float) -> MembershipMatrix:
    """Keep a cell iff its degree is >= alpha (inclusive) and > 0."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    mu = np.array(matrix.mu)
    with np.errstate(invalid="ignore"):
        drop = ~((mu >= alpha) & (mu > 0.0))
    mu[drop] = np.nan
    return MembershipMatrix(matrix.object_ids, matrix.cluster_ids, mu)


def bind_labels(model: ClusterModel, spec: AttributeSpec) -> tuple[ScaleAttribute, ...]:
    """Pair the i-th cluster (by ascending center) with the i-th label."""
    ids = model.memberships.cluster_ids
    if len(spec.labels) != len(ids):
        raise ValidationError(
            f"{spec.attribute}: {len(ids)} clusters but {len(spec.labels)} labels"
        )
    if np.any(np.diff(model.centers) < 0):
        raise ValidationError(f"{spec.attribute}: model centers are not ascending")
    return tuple(
        ScaleAttribute(spec.display_attribute, label, cid) for cid, label in zip(ids, spec.labels)
    )


def build_context(
    cuts: Sequence[MembershipMatrix],
    bindings: Sequence[Sequence[ScaleAttribute]],
) -> FuzzyFormalContext:
    """Juxtapose per-attribute cut matrices into one context."""
    if len(cuts) != len(bindings):
        raise ValidationError("one binding sequence per cut matrix is required")
    if not cuts:
        raise ValidationError("at least one attribute is required")
    objects = cuts[0].object_ids
    for cut, bound in zip(cuts, bindings):
        if cut.object_ids != objects:
            raise ValidationError("cut matrices do not share the same object set")
        if tuple(b.cluster_id for b in bound) != cut.cluster_ids:
            raise ValidationError("bindings do not match the matrix's cluster ids")
    scale = tuple(b for bound in bindings for b in bound)
    cells = np.hstack([c.mu for c in cuts])
    return FuzzyFormalContext(objects, scale, cells)


def context_to_csv(context: FuzzyFormalContext) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["object", *(s.display_name for s in context.scale_attributes)])
    for oid, row in zip(context.object_ids, context.cells):
        w.writerow([oid, *(format_degree_csv(v) for v in row)])
    return buf.getvalue()


_DISPLAY = re.compile(r"^(?P<attr>.+)\((?P<label>[^()]+)\)$")


def read_context_csv(text: str, cluster_ids: Iterable[str] | None = None) -> FuzzyFormalContext:
    """Parse a scale CSV back into a context.

    Column headers must be ``Attribute(Label)``. Cluster ids are not part of
    the file; pass them explicitly or they are numbered ``C1..`` left to right.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise ValidationError("empty scale CSV")
    header = rows[0][1:]
    ids = list(cluster_ids) if cluster_ids is not None else [f"C{i + 1}" for i in range(len(header))]
    if len(ids) != len(header):
        raise ValidationError("cluster id count does not match the scale columns")
    scale = []
    for h, cid in zip(header, ids):
        match = _DISPLAY.match(h.strip())
        if not match:
            raise ValidationError(f"scale column {h!r} is not of the form Attribute(Label)")
        scale.append(ScaleAttribute(match["attr"], match["label"], cid))
    objects, cells = [], []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(header) + 1:
            raise ValidationError(f"scale CSV row {i}: wrong field count")
        objects.append(row[0])
        try:
            cells.append([np.nan if c.strip() in ("", "-") else float(c) for c in row[1:]])
        except ValueError as exc:
            raise ValidationError(f"scale CSV row {i}: {exc}") from None
    arr = np.array(cells, dtype=float).reshape(len(objects), len(scale))
    return FuzzyFormalContext(tuple(objects), tuple(scale), arr)


def bindings_map(bindings: Mapping[str, ScaleAttribute] | Iterable[ScaleAttribute]) -> dict[str, ScaleAttribute]:
    if isinstance(bindings, Mapping):
        return dict(bindings)
    return {b.cluster_id: b for b in bindings}
