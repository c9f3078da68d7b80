"""Groups of interchangeable nodes: same type, same typed neighbourhood."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from ..model import KnowledgeGraph, NodeType, TermId

OUT, IN = 0, 1

Signature = Tuple[Tuple[int, TermId, TermId], ...]


@dataclass
class IsomorphicGroup:
    members: List[TermId]
    node_type: NodeType
    signature: Signature

    @property
    def degree(self) -> int:
        return len(self.signature)


@dataclass
class IsomorphicSummary:
    groups: int
    members: int
    edges: int
    largest_members: int
    largest_edges: int
    largest_degree: int

    def to_dict(self) -> dict:
        return dict(vars(self))


def signature(kg: KnowledgeGraph, tid: TermId) -> Signature:
    """Sorted ``(direction, relation, neighbour)`` entries of a node."""
    entries = [(OUT, r, o) for r, o in kg.out_index.get(tid, ())]
    entries += [(IN, r, s) for s, r in kg.in_index.get(tid, ())]
    return tuple(sorted(entries))


def isomorphic_groups(kg: KnowledgeGraph) -> List[IsomorphicGroup]:
    """Maximal groups (size >= 2) of nodes with identical type and signature.

    Bucketing uses the full signature tuple as a dict key, so bucket equality
    is exact comparison rather than a hash digest.  Groups are ordered by
    their smallest member.
    """
    buckets: Dict[Tuple[NodeType, Signature], List[TermId]] = {}
    for tid in sorted(kg.nodes):
        key = (kg.node_type(tid), signature(kg, tid))
        buckets.setdefault(key, []).append(tid)
    groups = [IsomorphicGroup(members, key[0], key[1])
              for key, members in buckets.items() if len(members) > 1]
    groups.sort(key=lambda grp: grp.members[0])
    return groups


def group_edges(kg: KnowledgeGraph, group: IsomorphicGroup) -> int:
    members = set(group.members)
    edges = set()
    for m in members:
        edges.update((m, r, o) for r, o in kg.out_index.get(m, ()))
        edges.update((s, r, m) for s, r in kg.in_index.get(m, ()))
    return len(edges)


def summarize_groups(kg: KnowledgeGraph, groups: List[IsomorphicGroup]) -> IsomorphicSummary:
    all_edges = set()
    for grp in groups:
        for m in grp.members:
            all_edges.update((m, r, o) for r, o in kg.out_index.get(m, ()))
            all_edges.update((s, r, m) for s, r in kg.in_index.get(m, ()))
    largest = max(groups, key=lambda grp: (len(grp.members), -grp.members[0]), default=None)
    return IsomorphicSummary(
        groups=len(groups),
        members=sum(len(grp.members) for grp in groups),
        edges=len(all_edges),
        largest_members=len(largest.members) if largest else 0,
        largest_edges=group_edges(kg, largest) if largest else 0,
        largest_degree=largest.degree if largest else 0,
    )
