"""One-dimensional fuzzy c-means clustering.

Each attribute is clustered on its own. The alternating updates are the
classical ones::

    c_i  = sum_k u_ik^m x_k / sum_k u_ik^m
    u_ik = 1 / sum_j (|x_k - c_i| / |x_k - c_j|)^(2 / (m - 1))

and the objective is ``J = sum_i sum_k u_ik^m (x_k - c_i)^2``.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateDataError, ValidationError
from .ingest import AttributeSpec

log = logging.getLogger(__name__)

COINCIDENT_EPS = 1e-12
MAX_REPAIRS = 3


@dataclass(frozen=True)
class MembershipMatrix:
    """Objects x clusters membership degrees; NaN marks an absent cell."""

    object_ids: tuple[str, ...]
    cluster_ids: tuple[str, ...]
    mu: np.ndarray = field(repr=False)

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if mu.shape != (len(self.object_ids), len(self.cluster_ids)):
            raise ValidationError(
                f"membership shape {mu.shape} does not match "
                f"{len(self.object_ids)} objects x {len(self.cluster_ids)} clusters"
            )
        present = mu[~np.isnan(mu)]
        if np.any(present < 0.0) or np.any(present > 1.0):
            raise ValidationError("membership degrees must lie in [0, 1]")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    def row_sums(self) -> np.ndarray:
        return np.nansum(self.mu, axis=1)

    def get(self, object_id: str, cluster_id: str) -> float | None:
        x = self.mu[self.object_ids.index(object_id), self.cluster_ids.index(cluster_id)]
        return None if np.isnan(x) else float(x)


@dataclass(frozen=True)
class ClusterModel:
    """Result of clustering one attribute.

    ``history`` is the objective after every alternating step since the last
    coincident-center repair (the first entry is the objective at the
    initial centers).
    """

    attribute: str
    centers: np.ndarray
    memberships: MembershipMatrix
    objective: float
    iterations: int
    history: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return len(self.centers)


def membership_of(x: float, centers: Sequence[float], m: float = 2.0) -> np.ndarray:
    """Membership degrees of a single value with respect to fixed centers."""
    return _memberships(np.array([float(x)]), np.asarray(centers, dtype=float), m)[0]


def _memberships(x: np.ndarray, centers: np.ndarray, m: float) -> np.ndarray:
    d = np.abs(x[:, None] - centers[None, :])
    u = np.empty_like(d)
    on_center = d == 0.0
    crisp = on_center.any(axis=1)
    if crisp.any():
        hit = on_center[crisp].astype(float)
        u[crisp] = hit / hit.sum(axis=1, keepdims=True)
    soft = ~crisp
    if soft.any():
        ds = d[soft]
        # scale by the row minimum so the powers cannot overflow
        ratio = ds.min(axis=1, keepdims=True) / ds
        w = ratio ** (2.0 / (m - 1.0))
        u[soft] = w / w.sum(axis=1, keepdims=True)
    return u


def _centers(x: np.ndarray, u: np.ndarray, m: float) -> np.ndarray:
    w = u**m
    total = w.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, (w * x[:, None]).sum(axis=0) / total, np.nan)


def fcm_objective(values, centers, memberships, m: float = 2.0) -> float:
    x = np.asarray(values, dtype=float)
    c = np.asarray(centers, dtype=float)
    u = np.nan_to_num(np.asarray(memberships, dtype=float))
    if u.shape != (x.size, c.size):
        raise ValidationError(f"membership shape {u.shape} != ({x.size}, {c.size})")
    return float(np.sum(u**m * (x[:, None] - c[None, :]) ** 2))


def initial_centers(x: np.ndarray, k: int, seed: int = 0) -> np.ndarray:
    """Centers at the (i + 0.5) / k quantiles, jittered only when they collide."""
    centers = np.quantile(np.sort(x), (np.arange(k) + 0.5) / k)
    if np.unique(centers).size == k:
        return centers
    rng = np.random.default_rng(seed)
    scale = max(float(np.ptp(x)), 1.0) * 1e-3
    while np.unique(centers).size < k:
        _, first = np.unique(centers, return_index=True)
        dup = np.setdiff1d(np.arange(k), first)
        centers[dup] += rng.normal(scale=scale, size=dup.size)
    return np.sort(centers)


def _coincident(centers: np.ndarray) -> int | None:
    """Index of the later center of the first coincident pair, if any.

    A non-finite center (its cluster's weights all underflowed) counts too.
    """
    bad = np.flatnonzero(~np.isfinite(centers))
    if bad.size:
        return int(bad[0])
    for i in range(centers.size):
        for j in range(i + 1, centers.size):
            if abs(centers[i] - centers[j]) < COINCIDENT_EPS:
                return j
    return None


def cluster_attribute(
    values,
    spec: AttributeSpec,
    object_ids: Sequence[str] | None = None,
    cluster_ids: Sequence[str] | None = None,
) -> ClusterModel:
    """Run fuzzy c-means on one attribute's values.

    Iterates until the objective improves by less than ``spec.tol`` or
    ``spec.max_iter`` steps have run. Clusters are re-indexed so that
    centers ascend, which is the order labels are bound in.
    """
    x = np.asarray(values, dtype=float)
    n, k, m = x.size, spec.k, spec.fuzzifier_m
    if k < 2 or k >= n:
        raise ValidationError(f"{spec.attribute}: need 2 <= k < n, got k={k}, n={n}")
    # centers are weighted means, so they never spread wider than the data
    if np.ptp(x) < COINCIDENT_EPS:
        raise DegenerateDataError(
            f"{spec.attribute}: all values are (numerically) identical, distinct centers impossible"
        )
    object_ids = tuple(object_ids) if object_ids is not None else tuple(f"t{i + 1}" for i in range(n))
    cluster_ids = tuple(cluster_ids) if cluster_ids is not None else tuple(f"C{i + 1}" for i in range(k))
    if len(object_ids) != n or len(cluster_ids) != k:
        raise ValidationError("object_ids / cluster_ids do not match the data")

    centers = initial_centers(x, k, spec.seed)
    u = _memberships(x, centers, m)
    j = fcm_objective(x, centers, u, m)
    history = [j]
    repairs = 0
    it = 0
    while it < spec.max_iter:
        it += 1
        centers = _centers(x, u, m)
        clash = _coincident(centers)
        if clash is not None:
            repairs += 1
            if repairs > MAX_REPAIRS:
                raise DegenerateDataError(
                    f"{spec.attribute}: centers keep coinciding after {MAX_REPAIRS} repairs"
                )
            others = np.delete(centers, clash)
            others = others[np.isfinite(others)]
            if others.size:
                far = np.abs(x[:, None] - others[None, :]).min(axis=1)
                centers[clash] = x[int(np.argmax(far))]
            else:
                centers[clash] = x.min()
            log.debug("%s: re-seeded center %d at %g", spec.attribute, clash, centers[clash])
            u = _memberships(x, centers, m)
            j = fcm_objective(x, centers, u, m)
            history = [j]
            continue
        u = _memberships(x, centers, m)
        j_new = fcm_objective(x, centers, u, m)
        history.append(j_new)
        improvement = j - j_new
        j = j_new
        if improvement < spec.tol:
            break

    order = np.argsort(centers, kind="stable")
    centers = centers[order]
    u = u[:, order]
    centers.setflags(write=False)
    return ClusterModel(
        attribute=spec.attribute,
        centers=centers,
        memberships=MembershipMatrix(object_ids, cluster_ids, u),
        objective=j,
        iterations=it,
        history=tuple(history),
    )


def model_from_memberships(values, matrix: MembershipMatrix, spec: AttributeSpec) -> ClusterModel:
    """Wrap externally supplied memberships (fixture mode) in a model.

    Centers come from one center update over the given degrees, absent cells
    counting as 0. Columns are re-ordered so centers ascend; cluster ids keep
    their positions.
    """
    x = np.asarray(values, dtype=float)
    u = np.nan_to_num(matrix.mu)
    if np.any(u.sum(axis=0) == 0.0):
        raise DegenerateDataError(f"{spec.attribute}: a fixture cluster has no members")
    centers = _centers(x, u, spec.fuzzifier_m)
    order = np.argsort(centers, kind="stable")
    mu = matrix.mu[:, order]
    centers = centers[order]
    centers.setflags(write=False)
    return ClusterModel(
        attribute=spec.attribute,
        centers=centers,
        memberships=MembershipMatrix(matrix.object_ids, matrix.cluster_ids, mu),
        objective=fcm_objective(x, centers, mu, spec.fuzzifier_m),
        iterations=0,
    )


def format_degree_csv(x: float) -> str:
    return "" if np.isnan(x) else repr(float(x))


def memberships_to_csv(matrix: MembershipMatrix) -> str:
    """Objects x clusters table, full precision, empty field for absent cells."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["object", *matrix.cluster_ids])
    for oid, row in zip(matrix.object_ids, matrix.mu):
        w.writerow([oid, *(format_degree_csv(v) for v in row)])
    return buf.getvalue()


def read_memberships_csv(text: str) -> MembershipMatrix:
    """Inverse of :func:`memberships_to_csv`; ``-`` is accepted for absent cells."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if len(rows) < 2:
        raise ValidationError("membership table needs a header and at least one row")
    header = [h.strip() for h in rows[0]]
    cluster_ids = tuple(header[1:])
    object_ids, mu = [], []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise ValidationError(f"membership row {i}: expected {len(header)} fields")
        object_ids.append(row[0].strip())
        vals = []
        for cid, cell in zip(cluster_ids, row[1:]):
            cell = cell.strip()
            if cell in ("", "-"):
                vals.append(np.nan)
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise ValidationError(f"membership row {i}, cluster {cid}: bad value {cell!r}") from None
        mu.append(vals)
    return MembershipMatrix(tuple(object_ids), cluster_ids, np.array(mu, dtype=float))
