"""Dataset and pipeline-configuration loading.

The dataset is a plain numeric CSV (one row per object). The configuration is
TOML or JSON and lists, for every attribute to cluster, the cluster count, the
alpha-cut threshold and the ordered linguistic labels.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Mapping, Union

import numpy as np

from .errors import ParseError, ValidationError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

Source = Union[bytes, str, os.PathLike, BinaryIO]


@dataclass(frozen=True)
class Dataset:
    """A complete numeric relation: objects x attributes."""

    object_ids: tuple[str, ...]
    attributes: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.object_ids), len(self.attributes)):
            raise ValidationError(
                f"values shape {values.shape} does not match "
                f"{len(self.object_ids)} objects x {len(self.attributes)} attributes"
            )
        if len(self.object_ids) < 2:
            raise ValidationError("dataset needs at least 2 objects")
        if not self.attributes:
            raise ValidationError("dataset needs at least 1 attribute")
        if any(not oid for oid in self.object_ids):
            raise ValidationError("object ids must be non-empty")
        if len(set(self.object_ids)) != len(self.object_ids):
            dup = sorted({o for o in self.object_ids if self.object_ids.count(o) > 1})
            raise ValidationError(f"duplicate object ids: {', '.join(dup)}")
        if len(set(self.attributes)) != len(self.attributes):
            raise ValidationError("duplicate attribute names in header")
        if not np.all(np.isfinite(values)):
            raise ValidationError("every cell must hold a finite number")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_objects(self) -> int:
        return len(self.object_ids)

    def column(self, attribute: str) -> np.ndarray:
        try:
            j = self.attributes.index(attribute)
        except ValueError:
            raise ValidationError(f"unknown attribute {attribute!r}") from None
        return self.values[:, j]

    def value(self, object_id: str, attribute: str) -> float:
        return float(self.column(attribute)[self.object_ids.index(object_id)])


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        return Path(source).read_bytes()
    return source.read()


def load_dataset(csv_source: Source) -> Dataset:
    """Parse a UTF-8 CSV with a header row into a :class:`Dataset`.

    A leading column named ``id`` supplies the object identifiers; without it
    objects are named ``t1..tn`` in row order. Every remaining cell must be a
    finite real number (empty cells are rejected, not imputed).
    """
    raw = _read_bytes(csv_source)
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"dataset is not valid UTF-8: {exc}") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise ValidationError("dataset is empty (no header row)")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    has_id = header[0].lower() == "id"
    attributes = header[1:] if has_id else header
    if len(body) < 2:
        raise ValidationError(f"dataset needs at least 2 data rows, got {len(body)}")

    object_ids = []
    values = np.empty((len(body), len(attributes)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise ParseError(f"row {i}: expected {len(header)} fields, got {len(row)}")
        cells = row[1:] if has_id else row
        object_ids.append(row[0].strip() if has_id else f"t{i}")
        for j, (name, cell) in enumerate(zip(attributes, cells)):
            try:
                x = float(cell)
            except ValueError:
                raise ParseError(
                    f"row {i}, column {name!r}: non-numeric value {cell!r}"
                ) from None
            if not math.isfinite(x):
                raise ParseError(f"row {i}, column {name!r}: non-finite value {cell!r}")
            values[i - 1, j] = x
    return Dataset(tuple(object_ids), tuple(attributes), values)


@dataclass(frozen=True)
class AttributeSpec:
    """Clustering and scaling parameters for one dataset column.

    ``display`` is the attribute name used in concept names and queries
    (``Salary`` for a ``SALARY`` column); it defaults to the column name.
    """

    attribute: str
    k: int
    alpha: float
    labels: tuple[str, ...]
    fuzzifier_m: float = 2.0
    seed: int = 0
    tol: float = 1e-6
    max_iter: int = 300
    display: str | None = None

    @property
    def display_attribute(self) -> str:
        return self.display or self.attribute

    def check(self) -> None:
        """Raise :class:`ValidationError` on any dataset-independent violation."""
        name = self.attribute
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 2:
            raise ValidationError(f"{name}: k must be an integer >= 2, got {self.k!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"{name}: alpha must lie in [0, 1], got {self.alpha}")
        if len(self.labels) != self.k:
            raise ValidationError(
                f"{name}: expected {self.k} labels, got {len(self.labels)}"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"{name}: duplicate labels {list(self.labels)}")
        if any(not str(lab).strip() for lab in self.labels):
            raise ValidationError(f"{name}: labels must be non-empty")
        if not self.fuzzifier_m > 1.0:
            raise ValidationError(f"{name}: fuzzifier m must be > 1, got {self.fuzzifier_m}")
        if not self.tol > 0:
            raise ValidationError(f"{name}: tol must be > 0, got {self.tol}")
        if self.max_iter <= 0:
            raise ValidationError(f"{name}: max_iter must be > 0, got {self.max_iter}")


@dataclass(frozen=True)
class PipelineConfig:
    specs: tuple[AttributeSpec, ...]
    min_confidence: float = 0.5
    degree_precision: int = 6
    max_body: int = 2


@dataclass(frozen=True)
class ValidatedConfig:
    """A config that has been checked against a concrete dataset."""

    config: PipelineConfig
    n_objects: int
    counts: Mapping[str, int]

    @property
    def specs(self) -> tuple[AttributeSpec, ...]:
        return self.config.specs


_SPEC_KEYS = {
    "name": "attribute",
    "attribute": "attribute",
    "k": "k",
    "alpha": "alpha",
    "labels": "labels",
    "m": "fuzzifier_m",
    "seed": "seed",
    "tol": "tol",
    "max_iter": "max_iter",
    "display": "display",
}


def _spec_from_mapping(table: Mapping) -> AttributeSpec:
    unknown = set(table) - set(_SPEC_KEYS)
    if unknown:
        raise ValidationError(f"unknown attribute keys: {sorted(unknown)}")
    kwargs = {_SPEC_KEYS[k]: v for k, v in table.items()}
    if "attribute" not in kwargs:
        raise ValidationError("attribute table without 'name'")
    for required in ("k", "alpha", "labels"):
        if required not in kwargs:
            raise ValidationError(f"{kwargs['attribute']}: missing {required!r}")
    kwargs["labels"] = tuple(str(lab) for lab in kwargs["labels"])
    kwargs["alpha"] = float(kwargs["alpha"])
    if "fuzzifier_m" in kwargs:
        kwargs["fuzzifier_m"] = float(kwargs["fuzzifier_m"])
    if "tol" in kwargs:
        kwargs["tol"] = float(kwargs["tol"])
    return AttributeSpec(**kwargs)


def config_from_mapping(data: Mapping) -> PipelineConfig:
    tables = data.get("attributes")
    if not tables:
        raise ValidationError("config lists no attributes")
    if isinstance(tables, Mapping):  # [attributes.SALARY] table form
        tables = [{"name": name, **t} for name, t in tables.items()]
    unknown = set(data) - {"attributes", "min_confidence", "degree_precision", "max_body"}
    if unknown:
        raise ValidationError(f"unknown top-level config keys: {sorted(unknown)}")
    return PipelineConfig(
        specs=tuple(_spec_from_mapping(t) for t in tables),
        min_confidence=float(data.get("min_confidence", 0.5)),
        degree_precision=int(data.get("degree_precision", 6)),
        max_body=int(data.get("max_body", 2)),
    )


def load_config(source: Source, fmt: str | None = None) -> PipelineConfig:
    """Read a TOML (default) or JSON pipeline configuration."""
    if fmt is None and isinstance(source, (str, os.PathLike)):
        fmt = "json" if str(source).lower().endswith(".json") else "toml"
    raw = _read_bytes(source)
    try:
        if fmt == "json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot parse config: {exc}") from None
    return config_from_mapping(data)


def validate_config(dataset: Dataset, config: PipelineConfig) -> ValidatedConfig:
    n = dataset.n_objects
    if not 0.0 < config.min_confidence <= 1.0:
        raise ValidationError(f"min_confidence must lie in (0, 1], got {config.min_confidence}")
    if not 1 <= config.degree_precision <= 12:
        raise ValidationError(f"degree_precision must lie in 1..12, got {config.degree_precision}")
    if config.max_body not in (1, 2):
        raise ValidationError(f"max_body must be 1 or 2, got {config.max_body}")
    if not config.specs:
        raise ValidationError("config lists no attributes")
    seen: set[str] = set()
    displays: set[str] = set()
    for spec in sorted(config.specs, key=lambda s: s.attribute):
        if spec.attribute not in dataset.attributes:
            raise ValidationError(f"unknown attribute {spec.attribute!r}")
        if spec.attribute in seen:
            raise ValidationError(f"attribute {spec.attribute!r} configured twice")
        if spec.display_attribute in displays:
            raise ValidationError(f"display name {spec.display_attribute!r} used twice")
        seen.add(spec.attribute)
        displays.add(spec.display_attribute)
        spec.check()
        # cluster count must stay strictly below the object count
        if spec.k >= n:
            raise ValidationError(
                f"{spec.attribute}: k={spec.k} must be lower than the {n} objects"
            )
    return ValidatedConfig(config, n, {s.attribute: n for s in config.specs})
