"""Agglomerative clustering of frame features and dendrogram cutting.

The day's frames are clustered bottom-up on Euclidean feature distance;
cutting the resulting dendrogram at a distance threshold yields visual
cluster labels (not yet temporally coherent events, see ``temporal``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .backends import LINKAGE_CODES, get_backend
from .datamodel import DistanceMatrix, Photostream, ValidationError

# Dendrogram cut threshold that performed best for average linkage on
# day-long photostreams; pair it with LinkageMethod.AVERAGE.
DEFAULT_CUTOFF = 1.154


class LinkageMethod(str, Enum):
    """Inter-cluster distance definitions for the merge step."""

    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"
    WARD = "ward"

    @classmethod
    def coerce(cls, value: "LinkageMethod | str") -> "LinkageMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(
                f"unknown linkage {value!r}; expected one of "
                f"{[m.value for m in cls]}"
            ) from None


DEFAULT_LINKAGE = LinkageMethod.AVERAGE


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Merge sequence of the agglomeration.

    ``merges`` is (leaf_count - 1, 4): id_a, id_b, merge_distance,
    new cluster size. Leaves carry ids 0..leaf_count-1 and merge k
    creates id leaf_count + k.
    """

    merges: np.ndarray
    leaf_count: int

    def __post_init__(self) -> None:
        if self.leaf_count < 1:
            raise ValidationError("dendrogram needs at least one leaf")
        expected = (max(self.leaf_count - 1, 0), 4)
        if self.merges.shape != expected:
            raise ValidationError(
                f"merge table shape {self.merges.shape} != {expected}"
            )
        if self.leaf_count > 1:
            ids = self.merges[:, :2]
            limit = self.leaf_count + len(self.merges)
            if ids.min(initial=0) < 0 or ids.max(initial=0) >= limit:
                raise ValidationError("merge table references an invalid cluster id")


def pairwise_distances(stream: Photostream) -> DistanceMatrix:
    """Euclidean distances between all frame pairs, computed in float64."""
    values = get_backend().pairwise_euclidean(stream.feature_matrix)
    values.flags.writeable = False
    return DistanceMatrix(values)


def agglomerate(
    dist: DistanceMatrix, linkage: LinkageMethod | str = DEFAULT_LINKAGE
) -> Dendrogram:
    """Merge the closest cluster pair until one cluster remains.

    Average linkage scores a pair of clusters by the mean distance over
    all cross pairs of their members, maintained incrementally via the
    Lance-Williams recurrence; ties go to the pair with the smallest
    (min id, max id).
    """
    linkage = LinkageMethod.coerce(linkage)
    merges = get_backend().linkage_merge(dist.values, LINKAGE_CODES[linkage.value])
    merges.flags.writeable = False
    return Dendrogram(merges, dist.order)


def cut(dendrogram: Dendrogram, cutoff: float) -> np.ndarray:
    """Per-frame cluster labels after applying merges below ``cutoff``.

    Labels are 0..K-1, numbered by each cluster's first frame. Clusters
    are purely visual: a label may recur in disjoint stretches of the
    day.
    """
    if cutoff <= 0:
        raise ValidationError(f"cutoff must be positive, got {cutoff}")
    n = dendrogram.leaf_count
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    # Representative leaf for every node id, so a merge can be applied as
    # a union of leaf sets even when a child merge was not applied.
    leaf_rep = list(range(n))
    for row in dendrogram.merges:
        a, b, height = int(row[0]), int(row[1]), row[2]
        if height < cutoff:
            ra, rb = find(leaf_rep[a]), find(leaf_rep[b])
            parent[rb] = ra
        leaf_rep.append(leaf_rep[a])

    labels = np.empty(n, dtype=np.int64)
    first_seen: dict[int, int] = {}
    for i in range(n):
        root = find(i)
        if root not in first_seen:
            first_seen[root] = len(first_seen)
        labels[i] = first_seen[root]
    return labels


def segment(
    stream: Photostream,
    linkage: LinkageMethod | str = DEFAULT_LINKAGE,
    cutoff: float = DEFAULT_CUTOFF,
) -> np.ndarray:
    """Distance matrix, agglomeration, and cut in one call."""
    return cut(agglomerate(pairwise_distances(stream), linkage), cutoff)
