"""Acceptance gate: one test per criterion, each at its stated tolerance and time budget.

A summary line per criterion is printed at the end of the pytest run.
"""
from __future__ import annotations

import itertools
import random
import shutil
import time

import networkx as nx
import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ontokg.analytics import (ccdf, closeness_approx, closeness_exact, compare_distributions,
                              degree_summary, diameter, elimination_width, fit_power_law,
                              isomorphic_groups, treewidth_upper_bound)
from ontokg.build import inverse_closure
from ontokg.cli import main
from ontokg.io import export_ntriples, load_graph_dir
from ontokg.model import (KnowledgeGraph, MetaGraph, NodeType, Origin, RelationDescriptor,
                          RelationRegistry, UndirectedGraph, validate_against_metagraph)
from ontokg.query import evaluate, parse_query

from conftest import CORPUS, FIXTURES, GOLDEN, QUERIES, build_args, build_mini_corpus
from oracles import enumerate_query, inverse_cdf_power_law, signature_groups
from query_gen import RELS, ast_to_oracle, random_kg, random_query


def _report(number: int, detail: str) -> None:
    print(f"criterion {number}: {detail}")


def _exact_distances(g: UndirectedGraph) -> np.ndarray:
    adj = csr_matrix((np.ones(g.indices.size), g.indices, g.indptr), shape=(g.n, g.n))
    return shortest_path(adj, method="D", unweighted=True, directed=False)


def _connected_random(n: int, avg_degree: float, seed: int) -> UndirectedGraph:
    g = nx.gnp_random_graph(n, avg_degree / n, seed=seed)
    comps = [sorted(c) for c in nx.connected_components(g)]
    for a, b in zip(comps, comps[1:]):
        g.add_edge(a[0], b[-1])
    return UndirectedGraph(n, list(g.edges()))


@pytest.mark.criterion(1, "power-law recovery (alpha within 0.05, R>0 vs exponential, p<=1e-3)")
def test_power_law_recovery() -> None:
    start = time.perf_counter()
    sample = inverse_cdf_power_law(1.832, 5, 100_000, seed=2024)
    known = fit_power_law(sample, x_min=5)
    searched = fit_power_law(sample)
    cmp = compare_distributions(sample, known)["exponential"]
    elapsed = time.perf_counter() - start
    _report(1, f"alpha(x_min=5)={known.alpha:.4f} alpha(search)={searched.alpha:.4f} "
               f"x_min={searched.x_min} R={cmp.R:.1f} p={cmp.p_value:.2e} t={elapsed:.1f}s")
    assert abs(known.alpha - 1.832) <= 0.05
    assert abs(searched.alpha - 1.832) <= 0.05
    assert cmp.R > 0 and cmp.p_value <= 1e-3
    assert elapsed < 30


@pytest.mark.criterion(2, "treewidth family equalities and order replay")
def test_treewidth_families() -> None:
    start = time.perf_counter()
    rng = np.random.default_rng(0)
    cases = []
    for n in (2, 5, 10, 50, 200):
        tree = UndirectedGraph(n, [(i, int(rng.integers(0, i))) for i in range(1, n)])
        cases.append((tree, 1))
    for n in range(3, 21):
        cases.append((UndirectedGraph(n, [(i, (i + 1) % n) for i in range(n)]), 2))
    for n in range(3, 11):
        cases.append((UndirectedGraph(n, list(itertools.combinations(range(n), 2))), n - 1))
    for g, expected in cases:
        bound = treewidth_upper_bound(g)
        assert bound.width == expected
        assert elimination_width(g, bound.order) == bound.width
    elapsed = time.perf_counter() - start
    _report(2, f"{len(cases)} family graphs, t={elapsed:.2f}s")
    assert elapsed < 1.0


def _typed_multigraph(seed: int) -> KnowledgeGraph:
    rng = random.Random(seed)
    n = rng.randint(40, 200)
    kg = KnowledgeGraph()
    types = [NodeType.MIRNA, NodeType.GENE, NodeType.DISEASE]
    rels = RELS
    for i in range(n):
        kg.add_node(f"http://n.org/{i}", types[rng.randrange(3)])
    budget = rng.randint(n, 1000)
    hubs = list(range(min(10, n)))
    while len(kg) < budget * 0.7:
        a, b = rng.randrange(n), rng.randrange(n)
        kg.add_triple(f"http://n.org/{a}", rels[rng.randrange(3)], f"http://n.org/{b}", "s")
    # twins: copy a node's neighbourhood onto fresh nodes so that groups exist
    twins = 0
    while len(kg) < budget and twins < n:
        src = rng.choice(hubs)
        twin = kg.add_node(f"http://twin.org/{seed}/{twins}", kg.node_type(kg.intern(f"http://n.org/{src}")))
        proto = kg.intern(f"http://n.org/{src}")
        for r, o in list(kg.out_index.get(proto, ()))[:3]:
            kg.add_edge(twin, r, o, "s")
        twins += 1
    return kg


@pytest.mark.criterion(3, "isomorphic groups equal brute-force pairwise comparison")
def test_isomorphic_oracle() -> None:
    start = time.perf_counter()
    total_groups = 0
    for seed in range(20):
        kg = _typed_multigraph(seed)
        assert kg.n_nodes <= 400 and len(kg) <= 1000
        ours = [g.members for g in isomorphic_groups(kg)]
        ref = signature_groups({t: i.node_type for t, i in kg.nodes.items()}, set(kg.edges))
        assert ours == ref
        total_groups += len(ours)
    elapsed = time.perf_counter() - start
    _report(3, f"20 graphs, {total_groups} groups, t={elapsed:.1f}s")
    assert total_groups > 0
    assert elapsed < 30


@pytest.mark.criterion(4, "closeness: k=256 mean relative error <= 5%, k=n exact")
def test_closeness_estimator() -> None:
    start = time.perf_counter()
    errors = []
    for seed in range(10):
        n = 300 + 70 * seed
        g = _connected_random(n, 4.0, seed)
        exact = 1.0 / _exact_distances(g).sum(axis=1)
        est = closeness_approx(g, 256, seed=42)
        mare = float(np.mean(np.abs(est.values - exact) / exact))
        errors.append(mare)
        assert mare <= 0.05
        full = closeness_approx(g, n)
        assert np.array_equal(full.values, closeness_exact(g))
        assert np.allclose(full.values, exact, rtol=1e-15, atol=0)
    elapsed = time.perf_counter() - start
    _report(4, f"max MARE={max(errors):.4f}, t={elapsed:.1f}s")
    assert elapsed < 60


@pytest.mark.criterion(5, "diameter equals all-pairs BFS; path/cycle closed forms")
def test_diameter_oracle() -> None:
    start = time.perf_counter()
    for seed in range(10):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(200, 2001))
        g = _connected_random(n, float(rng.uniform(1.2, 4.0)), seed)
        assert diameter(g) == int(_exact_distances(g).max())
    for n in range(2, 40):
        path = UndirectedGraph(n, [(i, i + 1) for i in range(n - 1)])
        assert diameter(path) == n - 1
        if n >= 3:
            assert diameter(UndirectedGraph(n, [(i, (i + 1) % n) for i in range(n)])) == n // 2
    elapsed = time.perf_counter() - start
    _report(5, f"t={elapsed:.1f}s")
    assert elapsed < 60


def _random_registry(rng: random.Random) -> RelationRegistry:
    names = [f"http://rel.org/r{i}" for i in range(rng.randint(2, 10))]
    rng.shuffle(names)
    descs = []
    i = 0
    while i < len(names):
        kind = rng.random()
        if kind < 0.4 and i + 1 < len(names):
            a, b = names[i], names[i + 1]
            descs += [RelationDescriptor(a, "a", b), RelationDescriptor(b, "b", a)]
            i += 2
            continue
        descs.append(RelationDescriptor(names[i], "x", None, symmetric=kind < 0.7))
        i += 1
    descs += [RelationDescriptor("http://www.w3.org/2000/01/rdf-schema#subClassOf", "sc"),
              RelationDescriptor("http://www.w3.org/1999/02/22-rdf-syntax-ns#type", "t")]
    return RelationRegistry(descs)


def _check_closure(kg: KnowledgeGraph) -> None:
    before = dict(kg.edges)
    assert inverse_closure(kg) == 0
    assert dict(kg.edges).keys() == before.keys()
    iri = kg.iri
    for (s, r, o), rec in kg.edges.items():
        if rec.origin not in (Origin.ASSERTED, Origin.INVERSE):
            continue
        desc = kg.registry[iri(r)]
        if desc.inverse is not None:
            assert (o, kg.intern(desc.inverse), s) in kg.edges
        elif desc.symmetric:
            assert (o, r, s) in kg.edges
        elif rec.origin is Origin.INVERSE:
            raise AssertionError("derived edge over a relation without inverse or symmetry")


@pytest.mark.criterion(6, "inverse closure idempotent and sound")
def test_inverse_closure() -> None:
    _check_closure(build_mini_corpus().kg)
    for seed in range(10):
        rng = random.Random(seed)
        reg = _random_registry(rng)
        rels = [d.relation for d in reg if d.relation.startswith("http://rel.org/")]
        kg = KnowledgeGraph(reg)
        for _ in range(rng.randint(10, 200)):
            kg.add_triple(f"http://n.org/{rng.randrange(30)}", rng.choice(rels),
                          f"http://n.org/{rng.randrange(30)}", "s")
        inverse_closure(kg)
        _check_closure(kg)
    _report(6, "mini-corpus + 10 random registries")


@pytest.mark.criterion(7, "golden build byte-identical across runs")
def test_golden_build(tmp_path) -> None:
    files = ["graph.nt", "nodes.tsv", "edges.tsv", "build_report.json", "rejections.tsv",
             "rejected_rows.tsv", "violations.tsv"]
    for run in range(2):
        out = tmp_path / f"run{run}"
        assert main(build_args(out)) == 0
        for name in files:
            assert (out / name).read_bytes() == (GOLDEN / "mini_corpus" / name).read_bytes(), name
    res = build_mini_corpus()
    nt = tmp_path / "lib.nt"
    export_ntriples(res.kg, nt)
    assert nt.read_bytes() == (GOLDEN / "mini_corpus" / "graph.nt").read_bytes()
    _report(7, f"nodes={res.report.nodes} edges={res.report.edges}")


@pytest.mark.criterion(8, "query engine equals exhaustive enumeration; listings answer as designed")
def test_query_oracle() -> None:
    rng = np.random.default_rng(8)
    nonempty = 0
    for _ in range(25):
        kg, nodes = random_kg(rng, n_nodes=int(rng.integers(10, 51)), n_edges=int(rng.integers(20, 120)))
        ast = random_query(rng, nodes, int(rng.integers(1, 5)))
        got = sorted(evaluate(kg, ast).as_text(kg))
        want = sorted(tuple(str(c) for c in row)
                      for row in enumerate_query(kg.edge_set(), nodes, RELS, *ast_to_oracle(ast)))
        assert got == want
        nonempty += bool(got)
    kg = load_graph_dir(FIXTURES / "listings")
    mir21 = "https://www.mirbase.org/cgi-bin/mature.pl?mature_acc=MIMAT0000076"
    pre = "https://www.mirbase.org/cgi-bin/mirna_entry.pl?acc=MI0000077"
    obo = "http://purl.obolibrary.org/obo/"
    lnc = "http://www.ncbi.nlm.nih.gov/gene/378938?lncRNA"
    drugs = {(lnc, obo + "MONDO_0007256", f"https://go.drugbank.com/drugs/{d}", "1")
             for d in ("DB00001", "DB00002")}
    for transitive in (False, True):
        answers = [set(evaluate(kg, parse_query((QUERIES / f"listing{i}.rq").read_text()),
                                transitive_subclass=transitive).as_text(kg)) for i in (1, 2, 3)]
        listing2 = {(pre, obo + "MONDO_0005059")} | ({(pre, obo + "MONDO_0004989")} if transitive else set())
        assert answers == [{(mir21,)}, listing2, drugs]
    _report(8, f"25 random queries ({nonempty} non-empty), listings in both subclass modes")
    assert nonempty >= 5


@pytest.mark.criterion(9, "one injected meta-graph violation, --strict exit 1")
def test_metagraph_violation(tmp_path) -> None:
    res = build_mini_corpus()
    assert res.report.violations == 0
    kg = res.kg
    kg.add_triple("http://www.ncbi.nlm.nih.gov/gene/7157?mRNA", "http://purl.obolibrary.org/obo/RO_0003302",
                  "http://purl.obolibrary.org/obo/MONDO_0005059", "injected")
    meta = MetaGraph.from_tsv(CORPUS / "metagraph.tsv", kg.registry)
    assert len(validate_against_metagraph(kg, meta)) == 1

    out = tmp_path / "graph"
    assert main(build_args(out) + ["--strict"]) == 0
    bad = tmp_path / "bad"
    shutil.copytree(out, bad)
    with open(bad / "edges.tsv", "a", encoding="utf-8") as fh:
        fh.write("http://www.ncbi.nlm.nih.gov/gene/7157?mRNA\thttp://purl.obolibrary.org/obo/RO_0003302\t"
                 "http://purl.obolibrary.org/obo/MONDO_0005059\tasserted\tinjected\n")
    code = main(["validate", "--graph", str(bad), "--metagraph", str(CORPUS / "metagraph.tsv"), "--strict"])
    rows = (bad / "violations.tsv").read_text().splitlines()[1:]
    _report(9, f"violations={len(rows)} exit={code}")
    assert len(rows) == 1 and code == 1


@pytest.mark.criterion(10, "degree histogram, CCDF and in/out conservation on 100 graphs")
def test_degree_invariants() -> None:
    rng = random.Random(10)
    for seed in range(100):
        kg = KnowledgeGraph()
        n = rng.randint(1, 80)
        for i in range(n):
            kg.add_node(f"http://n.org/{i}")
        for _ in range(rng.randint(0, 300)):
            kg.add_triple(f"http://n.org/{rng.randrange(n)}", rng.choice(RELS),
                          f"http://n.org/{rng.randrange(n)}", "s")
        s = degree_summary(kg)
        assert sum(s.histogram.values()) == s.n == n
        ys = [y for _, y in s.ccdf]
        assert s.ccdf[0][0] == min(s.histogram) and ys[0] == 1.0
        assert all(a >= b for a, b in zip(ys, ys[1:]))
        outs = sum(kg.out_degree(t) for t in kg.nodes)
        ins = sum(kg.in_degree(t) for t in kg.nodes)
        assert outs == ins == len(kg) == s.m_directed
    _report(10, "100 random graphs")
