"""Shortest-path analytics on the undirected projection: diameter and closeness."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..model import KGError, UndirectedGraph
from .degree import EmptyGraph

log = logging.getLogger(__name__)

DEFAULT_SEED = 42


class IsolatedNode(KGError):
    pass


def bfs_distances(g: UndirectedGraph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes get -1."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    indptr, indices = g.indptr, g.indices
    while frontier.size:
        level += 1
        starts = indptr[frontier]
        lengths = indptr[frontier + 1] - starts
        total = int(lengths.sum())
        if total == 0:
            break
        offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths) + np.arange(total)
        nbrs = indices[offsets]
        nbrs = np.unique(nbrs[dist[nbrs] < 0])
        dist[nbrs] = level
        frontier = nbrs
    return dist


def connected_components(g: UndirectedGraph) -> np.ndarray:
    """Component label per node; labels ordered by smallest member."""
    labels = np.full(g.n, -1, dtype=np.int64)
    current = 0
    for v in range(g.n):
        if labels[v] < 0:
            labels[bfs_distances(g, v) >= 0] = current
            current += 1
    return labels


def largest_component(g: UndirectedGraph) -> Tuple[UndirectedGraph, Optional[str]]:
    """The largest connected component (ties: the one holding the smallest node).

    The second element is a note when the input was not connected.
    """
    if g.n == 0:
        raise EmptyGraph("graph has no nodes")
    labels = connected_components(g)
    counts = np.bincount(labels)
    if counts.size == 1:
        return g, None
    keep = int(np.argmax(counts))
    note = (f"graph has {counts.size} connected components; "
            f"restricted to the largest ({counts[keep]} of {g.n} nodes)")
    log.info(note)
    return g.subgraph(np.flatnonzero(labels == keep)), note


def _farthest(dist: np.ndarray) -> int:
    return int(np.flatnonzero(dist == dist.max())[0])


def double_sweep(g: UndirectedGraph, start: Optional[int] = None) -> Tuple[int, int, int]:
    """Two BFS sweeps from the max-degree node; returns ``(lower bound, a, b)``."""
    if start is None:
        start = int(np.argmax(g.degrees()))
    a = _farthest(bfs_distances(g, start))
    dist_a = bfs_distances(g, a)
    b = _farthest(dist_a)
    return int(dist_a[b]), a, b


def diameter(g: UndirectedGraph, mode: str = "exact") -> int:
    """Largest eccentricity of the (largest component of the) graph.

    ``exact`` runs iFUB: a BFS from a central node partitions the graph into
    fringe levels, which are swept from the outside in until the lower bound
    exceeds what any deeper level could still contribute.  ``heuristic``
    returns the double-sweep lower bound alone.
    """
    if mode not in ("exact", "heuristic"):
        raise ValueError(f"unknown diameter mode {mode!r}")
    g, _ = largest_component(g)
    if g.n == 1:
        return 0
    lower, a, b = double_sweep(g)
    if mode == "heuristic":
        return lower
    dist_a, dist_b = bfs_distances(g, a), bfs_distances(g, b)
    # Midpoint of the a-b sweep path makes a good central root.
    middle = np.flatnonzero((dist_a + dist_b == lower) & (dist_a == lower // 2))
    root = int(middle[0])
    dist_root = bfs_distances(g, root)
    lower = max(lower, int(dist_root.max()))
    for level in range(int(dist_root.max()), 0, -1):
        fringe = np.flatnonzero(dist_root == level)
        best = max(int(bfs_distances(g, int(v)).max()) for v in fringe)
        lower = max(lower, best)
        if lower > 2 * (level - 1):
            return lower
    return lower


def eccentricities(g: UndirectedGraph) -> np.ndarray:
    return np.array([bfs_distances(g, v).max() for v in range(g.n)], dtype=np.int64)


def distance_sums(g: UndirectedGraph, sources) -> np.ndarray:
    total = np.zeros(g.n, dtype=np.int64)
    for s in sources:
        d = bfs_distances(g, int(s))
        if (d < 0).any():
            raise KGError("distance sums need a connected graph")
        total += d
    return total


def closeness_exact(g: UndirectedGraph, normalized: bool = False) -> np.ndarray:
    """``1 / sum_u d(v, u)`` for every node of a connected graph."""
    if g.n < 2:
        raise IsolatedNode("closeness is undefined on a single node")
    sums = distance_sums(g, range(g.n))
    values = 1.0 / sums.astype(float)
    return values * (g.n - 1) if normalized else values


@dataclass
class ClosenessEstimate:
    values: np.ndarray
    nodes: np.ndarray
    pivots: np.ndarray
    k: int
    seed: int
    normalized: bool
    note: Optional[str] = None
    histogram: List[Tuple[float, int]] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(self.values.mean())


def closeness_histogram(values: np.ndarray, bins: int = 50) -> List[Tuple[float, int]]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return []
    counts, edges = np.histogram(finite, bins=bins)
    centers = (edges[:-1] + edges[1:]) / 2
    return [(float(c), int(n)) for c, n in zip(centers, counts)]


def closeness_approx(g: UndirectedGraph, k: int, seed: int = DEFAULT_SEED, normalized: bool = False,
                     bins: int = 50) -> ClosenessEstimate:
    """Pivot-sampled closeness.

    ``k`` pivots are drawn uniformly without replacement and the distance sum
    of each node is estimated as ``n / k * sum_p d(v, p)``; the estimate is
    unbiased and equals the exact sum when ``k >= n``.  Disconnected inputs
    are restricted to their largest component.  A node whose only pivot is
    itself gets an infinite estimate.
    """
    if k < 1:
        raise ValueError("need at least one pivot")
    sub, note = largest_component(g)
    if sub.n < 2:
        raise IsolatedNode("closeness is undefined on a single node")
    k = min(k, sub.n)
    rng = np.random.default_rng(seed)
    pivots = np.arange(sub.n) if k == sub.n else np.sort(rng.choice(sub.n, size=k, replace=False))
    sums = distance_sums(sub, pivots) * (sub.n / k)
    with np.errstate(divide="ignore"):
        values = 1.0 / sums
    if normalized:
        values = values * (sub.n - 1)
    return ClosenessEstimate(values, sub.labels, pivots, k, seed, normalized, note,
                             closeness_histogram(values, bins))
