"""Node/edge type census and per-source overlap of asserted relationships."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Set, Tuple

from ..model import KnowledgeGraph, Origin


@dataclass
class Census:
    node_types: Dict[str, int] = field(default_factory=dict)
    relations: Dict[str, int] = field(default_factory=dict)

    def tsv_lines(self) -> List[str]:
        lines = [f"node_type\t{k}\t{v}" for k, v in sorted(self.node_types.items())]
        lines += [f"relation\t{k}\t{v}" for k, v in sorted(self.relations.items())]
        return lines

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("kind\tkey\tcount\n")
            for line in self.tsv_lines():
                fh.write(line + "\n")


def type_census(kg: KnowledgeGraph) -> Census:
    nodes = Counter(info.node_type.value for info in kg.nodes.values())
    rels = Counter(kg.iri(r) for _, r, _ in kg.edges)
    return Census(dict(sorted(nodes.items())), dict(sorted(rels.items())))


@dataclass
class SourceOverlap:
    sources: List[str]
    sizes: Dict[str, int]
    containment: Dict[Tuple[str, str], float]
    jaccard: Dict[Tuple[str, str], float]

    def tsv_lines(self) -> List[str]:
        return [f"{a}\t{b}\t{self.containment[a, b]:.6f}\t{self.jaccard[a, b]:.6f}"
                for a in self.sources for b in self.sources]

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("source_a\tsource_b\tcontainment\tjaccard\n")
            for line in self.tsv_lines():
                fh.write(line + "\n")


def source_edge_sets(kg: KnowledgeGraph) -> Dict[str, Set[Tuple[int, int, int]]]:
    sets: Dict[str, Set[Tuple[int, int, int]]] = {}
    for key, rec in kg.edges.items():
        if rec.origin is not Origin.ASSERTED:
            continue
        for src in rec.provenance:
            sets.setdefault(src, set()).add(key)
    return sets


def overlap_from_sets(sets: Dict[str, Set]) -> SourceOverlap:
    """Containment ``|A & B| / |A|`` and Jaccard for every ordered pair."""
    names = sorted(sets)
    containment, jaccard = {}, {}
    for a in names:
        for b in names:
            A, B = sets[a], sets[b]
            if a == b:
                containment[a, b] = jaccard[a, b] = 1.0
                continue
            inter = len(A & B)
            union = len(A | B)
            containment[a, b] = inter / len(A) if A else 0.0
            jaccard[a, b] = inter / union if union else 0.0
    return SourceOverlap(names, {n: len(sets[n]) for n in names}, containment, jaccard)


def source_overlap(kg: KnowledgeGraph) -> SourceOverlap:
    return overlap_from_sets(source_edge_sets(kg))
