"""Treewidth upper bound by greedy minimum-degree elimination."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import List, Sequence, Set

from ..model import UndirectedGraph


@dataclass
class TreewidthBound:
    width: int
    order: List[int]


def _adjacency(g: UndirectedGraph) -> List[Set[int]]:
    return [set(int(u) for u in g.neighbors(v)) for v in range(g.n)]


def _eliminate(adj: List[Set[int]], v: int) -> int:
    nbrs = adj[v]
    for a in nbrs:
        adj[a].discard(v)
    for a in nbrs:
        adj[a].update(b for b in nbrs if b != a)
    size = len(nbrs)
    adj[v] = set()
    return size


def treewidth_upper_bound(g: UndirectedGraph) -> TreewidthBound:
    """Repeatedly eliminate a minimum-degree vertex (smallest id on ties).

    The neighbourhood of the eliminated vertex becomes a clique; the width is
    the largest neighbourhood met, and the order certifies it.
    """
    adj = _adjacency(g)
    heap = [(len(adj[v]), v) for v in range(g.n)]
    heapq.heapify(heap)
    done = [False] * g.n
    width, order = 0, []
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d != len(adj[v]):
            continue
        nbrs = list(adj[v])
        width = max(width, _eliminate(adj, v))
        done[v] = True
        order.append(v)
        for a in nbrs:
            heapq.heappush(heap, (len(adj[a]), a))
    return TreewidthBound(width, order)


def elimination_width(g: UndirectedGraph, order: Sequence[int]) -> int:
    """Replay an elimination order and return the largest neighbourhood seen."""
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the graph's nodes")
    adj = _adjacency(g)
    return max((_eliminate(adj, v) for v in order), default=0)
