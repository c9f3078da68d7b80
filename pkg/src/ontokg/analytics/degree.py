"""Degree statistics and the empirical CCDF."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..model import KGError, KnowledgeGraph, to_undirected


class EmptyGraph(KGError):
    pass


class EmptySample(KGError):
    pass


@dataclass
class DegreeSummary:
    n: int
    m_directed: int
    m_undirected: int
    max_out: int
    max_in: int
    max_undirected: int
    min_undirected: int
    mean_undirected: float
    mean_m_over_n: float
    histogram: Dict[int, int] = field(default_factory=dict)
    ccdf: List[Tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "nodes": self.n,
            "directed_edges": self.m_directed,
            "undirected_edges": self.m_undirected,
            "max_out_degree": self.max_out,
            "max_in_degree": self.max_in,
            "max_degree": self.max_undirected,
            "min_degree": self.min_undirected,
            # 2m/n is the usual mean degree; m/n is the edges-per-node ratio.
            "mean_degree_2m_over_n": self.mean_undirected,
            "mean_degree_m_over_n": self.mean_m_over_n,
        }


def ccdf(degrees) -> List[Tuple[int, float]]:
    """Points ``(x, P(D >= x))`` for each distinct observed value, ascending."""
    x = np.asarray(degrees)
    if x.size == 0:
        raise EmptySample("CCDF of an empty sample")
    values, counts = np.unique(x, return_counts=True)
    at_or_above = np.cumsum(counts[::-1])[::-1]
    return [(int(v), float(c) / x.size) for v, c in zip(values, at_or_above)]


def degree_summary(kg: KnowledgeGraph) -> DegreeSummary:
    if kg.n_nodes == 0:
        raise EmptyGraph("degree summary of an empty graph")
    und = to_undirected(kg)
    deg = und.degrees()
    values, counts = np.unique(deg, return_counts=True)
    out_deg = [kg.out_degree(t) for t in kg.nodes]
    in_deg = [kg.in_degree(t) for t in kg.nodes]
    n = kg.n_nodes
    return DegreeSummary(
        n=n,
        m_directed=len(kg),
        m_undirected=und.m,
        max_out=max(out_deg),
        max_in=max(in_deg),
        max_undirected=int(deg.max()),
        min_undirected=int(deg.min()),
        mean_undirected=2.0 * und.m / n,
        mean_m_over_n=und.m / n,
        histogram={int(v): int(c) for v, c in zip(values, counts)},
        ccdf=ccdf(deg),
    )
