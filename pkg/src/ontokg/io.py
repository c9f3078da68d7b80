"""N-Triples export/import and the on-disk graph directory."""
from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import Iterable, List, Optional

from .model import (RDF_TYPE, RDFS_SUBCLASS_OF, KGError, KnowledgeGraph, NodeType, Origin,
                    RelationRegistry, is_ontological)

GRAPH_FILE = "graph.nt"
NODES_FILE = "nodes.tsv"
EDGES_FILE = "edges.tsv"
REPORT_FILE = "build_report.json"
REJECTIONS_FILE = "rejections.tsv"
REJECTED_ROWS_FILE = "rejected_rows.tsv"
VIOLATIONS_FILE = "violations.tsv"
IMPORT_SOURCE = "ntriples"

_LINE_RE = re.compile(r"<([^<>\s]+)> <([^<>\s]+)> <([^<>\s]+)> \.")


class Malformed(KGError):
    def __init__(self, line: int, text: str = "") -> None:
        super().__init__(f"line {line}: not an N-Triples statement: {text!r}")
        self.line = line


class GraphIo(KGError, OSError):
    pass


def ntriples_lines(kg: KnowledgeGraph) -> List[str]:
    return sorted(f"<{s}> <{p}> <{o}> ." for s, p, o in kg.triples())


def _write_lines(path, lines: Iterable[str]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in lines:
                fh.write(line + "\n")
    except OSError as exc:
        raise GraphIo(f"cannot write {path}: {exc}") from exc


def export_ntriples(kg: KnowledgeGraph, path) -> int:
    """Write one sorted ``<s> <p> <o> .`` line per edge; returns the line count."""
    lines = ntriples_lines(kg)
    _write_lines(path, lines)
    return len(lines)


def _guess_origin(kg: KnowledgeGraph, s: int, p: str, o: int) -> Origin:
    if p == RDF_TYPE:
        return Origin.TYPING
    if p == RDFS_SUBCLASS_OF and kg.is_ontological(o):
        # Class-based typing links an instance IRI to an ontology class.
        return Origin.ONTOLOGY if kg.is_ontological(s) else Origin.TYPING
    return Origin.ASSERTED


def parse_ntriples(path) -> List[tuple]:
    """Triples of a file in the exported grammar; blank and ``#`` lines are skipped."""
    out = []
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise GraphIo(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            m = _LINE_RE.fullmatch(stripped)
            if m is None:
                raise Malformed(lineno, line)
            out.append(m.groups())
    return out


def import_ntriples(path, registry: Optional[RelationRegistry] = None,
                    kg: Optional[KnowledgeGraph] = None) -> KnowledgeGraph:
    """Rebuild a graph from an exported file.

    Node types are re-inferred from the IRIs and relations must be known to
    the registry.  Provenance is not stored in N-Triples, so imported
    asserted edges carry the single source ``ntriples``.
    """
    kg = kg if kg is not None else KnowledgeGraph(registry)
    for s, p, o in parse_ntriples(path):
        st, pt, ot = kg.intern(s), kg.intern(p), kg.intern(o)
        for tid, iri in ((st, s), (ot, o)):
            if tid not in kg.nodes:
                kg.add_node(iri, ontological=is_ontological(iri))
        origin = _guess_origin(kg, st, p, ot)
        kg.add_edge(st, pt, ot, IMPORT_SOURCE if origin is Origin.ASSERTED else None, origin)
    return kg


# -- graph directory --------------------------------------------------------

def node_rows(kg: KnowledgeGraph) -> List[str]:
    return sorted(f"{kg.iri(t)}\t{info.node_type.value}\t{info.label}" for t, info in kg.nodes.items())


def edge_rows(kg: KnowledgeGraph) -> List[str]:
    iri = kg.iri
    return sorted(f"{iri(s)}\t{iri(r)}\t{iri(o)}\t{rec.origin.value}\t{','.join(sorted(rec.provenance))}"
                  for (s, r, o), rec in kg.edges.items())


def write_graph_dir(kg: KnowledgeGraph, out) -> None:
    """Write ``graph.nt``, ``nodes.tsv`` and ``edges.tsv`` under ``out``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    export_ntriples(kg, out / GRAPH_FILE)
    _write_lines(out / NODES_FILE, ["iri\tnode_type\tlabel"] + node_rows(kg))
    _write_lines(out / EDGES_FILE, ["subject\tpredicate\tobject\torigin\tprovenance"] + edge_rows(kg))


def _read_tsv(path) -> List[List[str]]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)]
    except OSError as exc:
        raise GraphIo(f"cannot read {path}: {exc}") from exc
    return rows[1:]


def load_graph_dir(path, registry: Optional[RelationRegistry] = None) -> KnowledgeGraph:
    """Load a graph directory written by :func:`write_graph_dir`.

    Node metadata comes from ``nodes.tsv``; edges with origin and provenance
    from ``edges.tsv`` when present, otherwise from ``graph.nt``.
    """
    path = Path(path)
    if not path.is_dir():
        raise GraphIo(f"not a graph directory: {path}")
    kg = KnowledgeGraph(registry)
    if (path / NODES_FILE).exists():
        for row in _read_tsv(path / NODES_FILE):
            if len(row) < 2:
                continue
            iri = row[0]
            kg.add_node(iri, NodeType.parse(row[1]), row[2] if len(row) > 2 else "",
                        ontological=is_ontological(iri))
    if (path / EDGES_FILE).exists():
        for lineno, row in enumerate(_read_tsv(path / EDGES_FILE), 2):
            if len(row) < 4:
                raise Malformed(lineno, "\t".join(row))
            s, p, o, origin = row[:4]
            prov = [x for x in (row[4] if len(row) > 4 else "").split(",") if x]
            kg.add_edge(kg.add_node(s), kg.intern(p), kg.add_node(o), prov, Origin(origin))
        return kg
    return import_ntriples(path / GRAPH_FILE, kg=kg)
