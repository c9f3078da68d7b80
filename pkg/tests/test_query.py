from __future__ import annotations

import itertools
from collections import Counter

import numpy as np
import pytest

from ontokg.io import load_graph_dir
from ontokg.model import OBO, RDFS_SUBCLASS_OF, KnowledgeGraph, Origin
from ontokg.query import (CountDistinct, PrefixFilter, QuerySyntax, UnknownPrefix,
                          UnsupportedFeature, evaluate, parse_query, solutions)

from conftest import FIXTURES, QUERIES
from oracles import enumerate_query
from query_gen import RELS, ast_to_oracle, random_kg, random_query

SO_MIRNA = OBO + "SO_0000276"
MIR21 = "https://www.mirbase.org/cgi-bin/mature.pl?mature_acc=MIMAT0000076"
PRE77 = "https://www.mirbase.org/cgi-bin/mirna_entry.pl?acc=MI0000077"
MALAT1 = "http://www.ncbi.nlm.nih.gov/gene/378938?lncRNA"
HCC = OBO + "MONDO_0007256"


def _listing(n: int) -> str:
    return (QUERIES / f"listing{n}.rq").read_text()


def test_listing1_ast() -> None:
    ast = parse_query(_listing(1))
    assert ast.projection == ["miRNA"] and len(ast.patterns) == 2
    first, second = ast.patterns
    assert first.predicate.value == RDFS_SUBCLASS_OF and first.object.value == SO_MIRNA
    assert second.predicate.value == OBO + "RO_0003302" and second.object.value == OBO + "MONDO_0005059"


def test_listing3_ast() -> None:
    ast = parse_query(_listing(3))
    assert ast.projection[-1] == CountDistinct("RNAdrug", "numRNAdrugs")
    assert ast.group_by == ["lncRNA", "disease", "RNAdrug"]
    assert ast.having.var == "RNAdrug" and ast.having.value == 1
    assert PrefixFilter("RNAdrug", "https://go.drugbank.com/drugs/") in ast.filters
    assert len(ast.patterns) == 4


@pytest.mark.parametrize("text,exc,token", [
    ("SELECT ?x WHERE { ?x <http://p> ?y OPTIONAL { ?x <http://p> ?z } }", UnsupportedFeature, "OPTIONAL"),
    ("SELECT ?x WHERE { ?x <http://p> ?y } LIMIT 3", UnsupportedFeature, "LIMIT"),
    ("SELECT * WHERE { ?x <http://p> ?y }", UnsupportedFeature, "*"),
    ("SELECT ?x WHERE { ?x <http://p> \"lit\" }", UnsupportedFeature, '"lit"'),
    ("SELECT ?x WHERE { ?x a <http://C> }", UnsupportedFeature, "a"),
    ("SELECT ?x WHERE { ?x <http://p>/<http://q> ?y }", UnsupportedFeature, "/"),
    ("SELECT (COUNT(?x) as ?n) WHERE { ?x <http://p> ?y }", UnsupportedFeature, "COUNT without DISTINCT"),
    ("SELECT DISTINCT ?x WHERE { ?x <http://p> ?y }", UnsupportedFeature, "DISTINCT"),
])
def test_unsupported_features(text: str, exc, token: str) -> None:
    with pytest.raises(exc) as err:
        parse_query(text)
    assert err.value.token == token


def test_unknown_prefix() -> None:
    with pytest.raises(UnknownPrefix) as err:
        parse_query("SELECT ?x WHERE { ?x foo:bar ?y }")
    assert err.value.name == "foo"


def test_syntax_errors_carry_position() -> None:
    with pytest.raises(QuerySyntax) as err:
        parse_query("SELECT ?x\nWHERE { ?x <http://p> }")
    assert (err.value.line, err.value.column) == (2, 23)
    with pytest.raises(QuerySyntax):
        parse_query("SELECT ?z WHERE { ?x <http://p> ?y }")
    with pytest.raises(QuerySyntax):
        parse_query("SELECT ?x (COUNT(DISTINCT ?y) as ?n) WHERE { ?x <http://p> ?y }")


def _listing_kg() -> KnowledgeGraph:
    return load_graph_dir(FIXTURES / "listings")


def _answers(kg, n: int, transitive: bool):
    return set(evaluate(kg, parse_query(_listing(n)), transitive_subclass=transitive).as_text(kg))


@pytest.mark.parametrize("transitive", [False, True])
def test_listing_answers(transitive: bool) -> None:
    kg = _listing_kg()
    assert _answers(kg, 1, transitive) == {(MIR21,)}
    expected2 = {(PRE77, OBO + "MONDO_0005059")}
    if transitive:
        expected2.add((PRE77, OBO + "MONDO_0004989"))
    assert _answers(kg, 2, transitive) == expected2
    assert _answers(kg, 3, transitive) == {
        (MALAT1, HCC, "https://go.drugbank.com/drugs/DB00001", "1"),
        (MALAT1, HCC, "https://go.drugbank.com/drugs/DB00002", "1"),
    }


def test_listing1_fixture_without_disease_edge_is_empty() -> None:
    kg = KnowledgeGraph()
    kg.add_triple(MIR21, RDFS_SUBCLASS_OF, SO_MIRNA, "s")
    assert len(evaluate(kg, parse_query(_listing(1)))) == 0
    kg.add_triple(MIR21, OBO + "RO_0003302", OBO + "MONDO_0005059", "s")
    assert evaluate(kg, parse_query(_listing(1))).as_text(kg) == [(MIR21,)]


def test_unknown_iri_binds_nothing() -> None:
    kg, _ = random_kg(np.random.default_rng(0))
    ast = parse_query("SELECT ?x WHERE { ?x <http://nowhere/p> ?y }")
    assert len(evaluate(kg, ast)) == 0


@pytest.mark.parametrize("seed", range(12))
def test_matches_exhaustive_enumeration(seed: int) -> None:
    rng = np.random.default_rng(seed)
    kg, nodes = random_kg(rng, n_nodes=12, n_edges=30)
    ast = random_query(rng, nodes, int(rng.integers(1, 5)))
    got = sorted(tuple(row) for row in evaluate(kg, ast).as_text(kg))
    want = enumerate_query(kg.edge_set(), nodes, RELS, *ast_to_oracle(ast))
    assert got == sorted(tuple(str(c) for c in row) for row in want)


@pytest.mark.parametrize("seed", range(6))
def test_join_order_independence(seed: int) -> None:
    rng = np.random.default_rng(100 + seed)
    kg, nodes = random_kg(rng)
    ast = random_query(rng, nodes, 3)
    results = {tuple(sorted(evaluate(kg, ast, order=list(order)).rows))
               for order in itertools.permutations(range(len(ast.patterns)))}
    assert len(results) == 1


@pytest.mark.parametrize("seed", range(6))
def test_filters_never_enlarge(seed: int) -> None:
    rng = np.random.default_rng(200 + seed)
    kg, nodes = random_kg(rng)
    ast = random_query(rng, nodes, 2)
    ast.filters = []
    ast.group_by, ast.having = [], None
    ast.projection = ast.pattern_variables()
    before = Counter(evaluate(kg, ast).rows)
    ast.filters = [PrefixFilter(ast.projection[0], "http://a.org/")]
    after = Counter(evaluate(kg, ast).rows)
    assert not (after - before)


def test_having_counts_are_verifiable() -> None:
    rng = np.random.default_rng(7)
    kg, _ = random_kg(rng, n_edges=80)
    ast = parse_query(f"SELECT ?x (COUNT(DISTINCT ?y) as ?n) WHERE {{ ?x <{RELS[0]}> ?y }} "
                      "GROUP BY ?x HAVING (COUNT(DISTINCT ?y) >= 3)")
    table = evaluate(kg, ast)
    raw = solutions(kg, ast)
    assert table.rows
    for x, n in table.rows:
        assert n >= 3 and n == len({b["y"] for b in raw if b["x"] == x})


def test_aggregate_without_group_by_counts_everything() -> None:
    kg, _ = random_kg(np.random.default_rng(1))
    ast = parse_query(f"SELECT (COUNT(DISTINCT ?x) as ?n) WHERE {{ ?x <{RELS[1]}> ?y }}")
    (row,) = evaluate(kg, ast).rows
    assert row[0] == len({s for s, _ in kg.rel_index[kg.intern(RELS[1])]})
    empty = parse_query("SELECT (COUNT(DISTINCT ?x) as ?n) WHERE { ?x <http://none> ?y }")
    assert evaluate(kg, empty).rows == [(0,)]


def test_transitive_mode_equals_materialised_closure() -> None:
    kg = _listing_kg()
    ast = parse_query("PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n"
                      "SELECT ?a ?b WHERE { ?a rdfs:subClassOf ?b }")
    closure = set(evaluate(kg, ast, transitive_subclass=True).as_text(kg))
    # reference: reflexive-transitive closure by repeated squaring over the stored edges
    pairs = {(s, o) for s, p, o in kg.triples() if p == RDFS_SUBCLASS_OF}
    nodes = {x for pair in pairs for x in pair}
    ref = pairs | {(x, x) for x in nodes}
    while True:
        extra = {(a, d) for a, b in ref for c, d in ref if b == c} - ref
        if not extra:
            break
        ref |= extra
    assert closure == ref


def test_output_formats() -> None:
    kg = _listing_kg()
    table = evaluate(kg, parse_query(_listing(3)))
    tsv = table.to_tsv(kg).splitlines()
    assert tsv[0] == "lncRNA\tdisease\tRNAdrug\tnumRNAdrugs" and len(tsv) == 3
    nt = table.to_ntriples(kg).splitlines()
    assert len(nt) == 8 and nt[3].endswith('"1"^^<http://www.w3.org/2001/XMLSchema#integer> .')
