"""Fuzzy concept lattices over a fuzzy formal context.

Intents are crisp sets of scale attributes (cluster ids), closed under the
"cell present" incidence. Extents are fuzzy: an object's degree in the extent
of intent B is the minimum of its cells over B.

Enumeration uses NextClosure on integer bitsets, in lectic order with respect
to the context's column order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping

import numpy as np

from .errors import ValidationError
from .scaling import FuzzyFormalContext

Extent = Mapping[str, float]

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class FuzzyConcept:
    intent: frozenset[str]
    extent: dict[str, float] = field(hash=False)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.extent)


@dataclass(frozen=True)
class ConceptLattice:
    """Concepts plus their cover relation.

    ``covers`` holds index pairs ``(parent, child)`` into ``concepts`` where the
    parent's intent is a maximal proper subset of the child's.
    """

    context: FuzzyFormalContext = field(repr=False)
    concepts: tuple[FuzzyConcept, ...]
    covers: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.concepts)

    @property
    def top(self) -> int:
        return min(range(len(self.concepts)), key=lambda i: len(self.concepts[i].intent))

    @property
    def bottom(self) -> int:
        return max(range(len(self.concepts)), key=lambda i: len(self.concepts[i].intent))

    def intents(self) -> set[frozenset[str]]:
        return {c.intent for c in self.concepts}

    def find(self, intent) -> FuzzyConcept:
        intent = frozenset(intent)
        for c in self.concepts:
            if c.intent == intent:
                return c
        raise KeyError(sorted(intent))

    def index(self, intent) -> int:
        return self.concepts.index(self.find(intent))

    def intent_covers(self) -> set[tuple[frozenset[str], frozenset[str]]]:
        return {(self.concepts[p].intent, self.concepts[c].intent) for p, c in self.covers}


@dataclass(frozen=True)
class FuzzyClusterLattice:
    """The lattice with extents dropped: intent-only nodes, same covers.

    ``nothing`` is the index of the bottom node when its extent was empty.
    """

    nodes: tuple[frozenset[str], ...]
    covers: frozenset[tuple[int, int]]
    nothing: int | None = None

    def __len__(self) -> int:
        return len(self.nodes)


class _Bits:
    """Bitset view of the support relation."""

    def __init__(self, context: FuzzyFormalContext):
        present = context.present
        self.n_obj, self.n_attr = present.shape
        self.all_objects = (1 << self.n_obj) - 1
        self.all_attrs = (1 << self.n_attr) - 1
        self.attr_objects = [
            sum(1 << g for g in np.flatnonzero(present[:, a])) for a in range(self.n_attr)
        ]
        self.object_attrs = [
            sum(1 << a for a in np.flatnonzero(present[g, :])) for g in range(self.n_obj)
        ]

    def extent(self, intent: int) -> int:
        objs = self.all_objects
        a = 0
        while intent >> a:
            if intent >> a & 1:
                objs &= self.attr_objects[a]
            a += 1
        return objs

    def intent(self, objects: int) -> int:
        attrs = self.all_attrs
        g = 0
        while objects >> g:
            if objects >> g & 1:
                attrs &= self.object_attrs[g]
            g += 1
        return attrs

    def closure(self, intent: int) -> int:
        return self.intent(self.extent(intent))


def _to_mask(context: FuzzyFormalContext, intent) -> int:
    mask = 0
    for cid in intent:
        mask |= 1 << context.index_of(cid)
    return mask


def _to_ids(context: FuzzyFormalContext, mask: int) -> frozenset[str]:
    ids = context.cluster_ids
    return frozenset(ids[a] for a in range(len(ids)) if mask >> a & 1)


def closure(context: FuzzyFormalContext, intent) -> frozenset[str]:
    """Attributes shared by every object that has all of ``intent``."""
    bits = _Bits(context)
    return _to_ids(context, bits.closure(_to_mask(context, intent)))


def _next_closure(bits: _Bits) -> Iterator[int]:
    m = bits.n_attr
    current = bits.closure(0)
    yield current
    while current != bits.all_attrs:
        for i in range(m - 1, -1, -1):
            bit = 1 << i
            if current & bit:
                continue
            lower = bit - 1
            candidate = bits.closure((current & lower) | bit)
            if candidate & lower == current & lower:
                current = candidate
                yield current
                break
        else:  # pragma: no cover - NextClosure always advances
            return


def fuzzy_extent(context: FuzzyFormalContext, intent) -> dict[str, float]:
    """Objects having every attribute of ``intent``, at the minimum of their cells."""
    cols = [context.index_of(cid) for cid in intent]
    if not cols:
        return {o: 1.0 for o in context.object_ids}
    sub = context.cells[:, cols]
    keep = ~np.isnan(sub).any(axis=1)
    degrees = sub.min(axis=1)
    return {o: float(d) for o, d, k in zip(context.object_ids, degrees, keep) if k}


def similarity(e1: Extent, e2: Extent) -> float:
    """Sigma-count Jaccard similarity of two fuzzy sets: sum(min) / sum(max).

    Missing objects count as degree 0; two empty sets are identical (1.0).
    """
    keys = set(e1) | set(e2)
    num = sum(min(e1.get(o, 0.0), e2.get(o, 0.0)) for o in keys)
    den = sum(max(e1.get(o, 0.0), e2.get(o, 0.0)) for o in keys)
    if den == 0.0:
        return 1.0
    return num / den


def _covers(bits: _Bits, masks: list[int]) -> frozenset[tuple[int, int]]:
    position = {mask: i for i, mask in enumerate(masks)}
    edges = set()
    for i, mask in enumerate(masks):
        # upper neighbours are among the closures of mask + one attribute
        candidates = {
            bits.closure(mask | (1 << a)) for a in range(bits.n_attr) if not mask >> a & 1
        }
        for cand in candidates:
            if not any(other != cand and other & cand == other for other in candidates):
                edges.add((i, position[cand]))
    return frozenset(edges)


def enumerate_concepts(context: FuzzyFormalContext) -> ConceptLattice:
    bits = _Bits(context)
    masks = list(_next_closure(bits))
    concepts = tuple(
        FuzzyConcept(_to_ids(context, mask), fuzzy_extent(context, _to_ids(context, mask)))
        for mask in masks
    )
    return ConceptLattice(context, concepts, _covers(bits, masks))


def to_fcl(lattice: ConceptLattice) -> FuzzyClusterLattice:
    bottom = lattice.bottom
    nothing = bottom if not lattice.concepts[bottom].extent else None
    return FuzzyClusterLattice(tuple(c.intent for c in lattice.concepts), lattice.covers, nothing)


def brute_force_concepts(context: FuzzyFormalContext) -> set[frozenset[str]]:
    """Close every attribute subset; exponential, for testing only."""
    m = len(context.scale_attributes)
    if m > BRUTE_FORCE_LIMIT:
        raise ValidationError(f"context too large for brute force ({m} > {BRUTE_FORCE_LIMIT} attributes)")
    present = context.present
    ids = context.cluster_ids
    found = set()
    for r in range(m + 1):
        for subset in combinations(range(m), r):
            rows = present[:, list(subset)].all(axis=1) if subset else np.ones(len(present), bool)
            shared = present[rows].all(axis=0) if rows.any() else np.ones(m, bool)
            found.add(frozenset(ids[a] for a in np.flatnonzero(shared)))
    return found
