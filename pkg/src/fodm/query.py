"""Graded conjunctive queries over linguistic labels.

``Age=Young,Salary=Low`` scores every object by the minimum of its Age(Young)
and Salary(Low) degrees; objects missing either cell are not returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .lattice import fuzzy_extent
from .scaling import FuzzyFormalContext


@dataclass(frozen=True)
class Query:
    predicates: tuple[tuple[str, str], ...] = ()
    threshold: float | None = None
    top_k: int | None = None

    def __post_init__(self):
        attrs = [a.lower() for a, _ in self.predicates]
        if len(set(attrs)) != len(attrs):
            raise ValidationError("at most one label per attribute may appear in a query")
        if self.threshold is not None and not 0.0 <= self.threshold <= 1.0:
            raise ValidationError(f"threshold must lie in [0, 1], got {self.threshold}")
        if self.top_k is not None and self.top_k < 1:
            raise ValidationError(f"top_k must be positive, got {self.top_k}")


@dataclass(frozen=True)
class QueryResult:
    rows: tuple[tuple[str, float], ...]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def as_dict(self) -> dict[str, float]:
        return dict(self.rows)

    def format(self, digits: int = 4) -> str:
        return "".join(f"{o}\t{d:.{digits}f}\n" for o, d in self.rows)


def parse_query(text: str, threshold: float | None = None, top_k: int | None = None) -> Query:
    """Parse comma-separated ``Attribute=Label`` terms; blank text is the empty query."""
    preds = []
    for term in text.split(","):
        term = term.strip()
        if not term:
            continue
        attr, sep, label = term.partition("=")
        if not sep or not attr.strip() or not label.strip():
            raise ValidationError(f"query term {term!r} is not of the form Attribute=Label")
        preds.append((attr.strip(), label.strip()))
    return Query(tuple(preds), threshold, top_k)


def evaluate_query(context: FuzzyFormalContext, q: Query) -> QueryResult:
    """Rank objects by the min-conjunction of the requested label degrees.

    Labels resolve against the context's own scale attributes (case-insensitive).
    Rows are sorted by degree descending, then object id.
    """
    intent = [context.resolve(attr, label).cluster_id for attr, label in q.predicates]
    extent = fuzzy_extent(context, intent)
    rows = [(o, d) for o, d in extent.items() if q.threshold is None or d >= q.threshold]
    rows.sort(key=lambda r: (-r[1], r[0]))
    if q.top_k is not None:
        rows = rows[: q.top_k]
    return QueryResult(tuple(rows))
