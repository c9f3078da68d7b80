from __future__ import annotations

import numpy as np

from ontokg.analytics import isomorphic_groups, summarize_groups
from ontokg.analytics.isomorphic import signature
from ontokg.model import OBO, KnowledgeGraph, NodeType

from oracles import signature_groups, swap_ids

RELS = [OBO + "RO_0002434", OBO + "RO_0002436", OBO + "RO_0003302"]
TYPES = [NodeType.MIRNA, NodeType.GENE, NodeType.DISEASE]


def _random_kg(seed: int, n: int, m: int) -> KnowledgeGraph:
    rng = np.random.default_rng(seed)
    kg = KnowledgeGraph()
    for i in range(n):
        kg.add_node(f"http://n/{i}", TYPES[int(rng.integers(0, 2))])
    for _ in range(m):
        a, b = rng.integers(0, n, 2)
        kg.add_triple(f"http://n/{a}", RELS[int(rng.integers(0, 2))], f"http://n/{b}", "s")
    return kg


def test_two_leaves() -> None:
    kg = KnowledgeGraph()
    for leaf in ("u", "v"):
        kg.add_node(f"http://{leaf}", NodeType.GENE)
        kg.add_triple("http://hub", RELS[0], f"http://{leaf}", "s")
    groups = isomorphic_groups(kg)
    assert len(groups) == 1
    assert sorted(kg.iri(m) for m in groups[0].members) == ["http://u", "http://v"]


def test_star_with_eight_leaves() -> None:
    kg = KnowledgeGraph()
    for i in range(8):
        kg.add_node(f"http://leaf/{i}", NodeType.GENE)
        kg.add_triple("http://hub", RELS[0], f"http://leaf/{i}", "s")
    (grp,) = isomorphic_groups(kg)
    assert len(grp.members) == 8 and grp.degree == 1
    summary = summarize_groups(kg, [grp])
    assert (summary.groups, summary.members, summary.edges, summary.largest_members) == (1, 8, 8, 8)


def test_type_separates_groups() -> None:
    kg = KnowledgeGraph()
    kg.add_node("http://u", NodeType.GENE)
    kg.add_node("http://v", NodeType.MIRNA)
    kg.add_triple("http://hub", RELS[0], "http://u", "s")
    kg.add_triple("http://hub", RELS[0], "http://v", "s")
    assert isomorphic_groups(kg) == []


def test_matches_pairwise_oracle() -> None:
    for seed in range(5):
        kg = _random_kg(seed, 60, 90)
        ours = [g.members for g in isomorphic_groups(kg)]
        ref = signature_groups({t: i.node_type for t, i in kg.nodes.items()}, set(kg.edges))
        assert ours == ref


def test_swapping_members_preserves_graph() -> None:
    kg = _random_kg(7, 40, 50)
    edges = set(kg.edges)
    for grp in isomorphic_groups(kg):
        a, b = grp.members[:2]
        assert swap_ids(edges, a, b) == edges
        assert signature(kg, a) == signature(kg, b)


def test_groups_disjoint_and_maximal() -> None:
    kg = _random_kg(3, 80, 100)
    groups = isomorphic_groups(kg)
    members = [m for g in groups for m in g.members]
    assert len(members) == len(set(members))
    sigs = [(kg.node_type(g.members[0]), signature(kg, g.members[0])) for g in groups]
    assert len(sigs) == len(set(sigs))
