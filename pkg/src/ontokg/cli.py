"""Command-line entry point: build, validate, analyze, export, query.

Exit status: 0 on success, 1 when ``--strict`` and the graph has meta-graph
violations, 2 on configuration or usage errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .analytics.paths import DEFAULT_SEED
from .analytics.report import DEFAULT_PIVOTS, METRICS, analyze
from .build import (KnowledgeModel, ModelKind, assemble, load_anchor_map, load_ontology)
from .ingest import load_manifests
from .io import (EDGES_FILE, REJECTED_ROWS_FILE, REJECTIONS_FILE, REPORT_FILE, VIOLATIONS_FILE,
                 edge_rows, export_ntriples, load_graph_dir, write_graph_dir)
from .model import KGError, MetaGraph, RelationRegistry, default_registry, validate_against_metagraph
from .query import evaluate, parse_query

EXIT_OK, EXIT_VIOLATIONS, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("ontokg")


def _registry(args) -> RelationRegistry:
    return RelationRegistry.from_tsv(args.registry) if args.registry else default_registry()


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_build(args) -> int:
    registry = _registry(args)
    manifests = load_manifests(args.manifest, registry)
    ontologies = [load_ontology(p) for p in args.ontology]
    meta = MetaGraph.from_tsv(args.metagraph, registry) if args.metagraph else None
    anchors = load_anchor_map(args.anchors) if args.anchors else None
    model = KnowledgeModel(ModelKind(args.model), args.inverse == "on")
    result = assemble(manifests, ontologies=ontologies, metagraph=meta, model=model,
                      registry=registry, anchors=anchors)
    out = _out_dir(args.out)
    write_graph_dir(result.kg, out)
    (out / REPORT_FILE).write_text(result.report.to_json(), encoding="utf-8", newline="\n")
    result.rejections.to_tsv(out / REJECTIONS_FILE)
    result.rejections.write_log(out / REJECTED_ROWS_FILE)
    if result.violations is not None:
        result.violations.to_tsv(out / VIOLATIONS_FILE)
    log.info("built %d nodes, %d edges into %s", result.report.nodes, result.report.edges, out)
    if args.strict and result.violations:
        print(f"{len(result.violations)} meta-graph violation(s)", file=sys.stderr)
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_validate(args) -> int:
    registry = _registry(args)
    kg = load_graph_dir(args.graph, registry)
    report = validate_against_metagraph(kg, MetaGraph.from_tsv(args.metagraph, registry))
    out = _out_dir(args.out if args.out else args.graph)
    report.to_tsv(out / VIOLATIONS_FILE)
    print(f"{len(report)} violation(s)")
    for (st, rel, ot), n in report.counts().items():
        print(f"{st}\t{rel}\t{ot}\t{n}")
    return EXIT_VIOLATIONS if args.strict and report else EXIT_OK


def cmd_analyze(args) -> int:
    kg = load_graph_dir(args.graph, _registry(args))
    metrics = list(METRICS) if args.all else [m for m in METRICS if getattr(args, m)]
    if not metrics:
        raise KGError("select at least one metric (or --all)")
    report = analyze(kg, metrics, _out_dir(args.out), seed=args.seed, pivots=args.pivots,
                     diameter_mode=args.diameter_mode, normalized=args.normalized)
    if "treewidth" in report:
        print(f"treewidth upper bound: {report['treewidth']['upper_bound']}")
    if "diameter" in report:
        print(f"diameter ({report['diameter']['mode']}): {report['diameter']['value']}")
    return EXIT_OK


def cmd_export(args) -> int:
    kg = load_graph_dir(args.graph, _registry(args))
    out = _out_dir(args.out)
    if args.format in ("ntriples", "both"):
        n = export_ntriples(kg, out / "export.nt")
        print(f"{n} triples")
    if args.format in ("tsv", "both"):
        with open(out / "export_edges.tsv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("subject\tpredicate\tobject\torigin\tprovenance\n")
            for row in edge_rows(kg):
                fh.write(row + "\n")
    return EXIT_OK


def cmd_query(args) -> int:
    ast = parse_query(Path(args.query).read_text(encoding="utf-8"))
    kg = load_graph_dir(args.graph, _registry(args))
    table = evaluate(kg, ast, transitive_subclass=args.transitive_subclass)
    text = table.to_tsv(kg) if args.format == "tsv" else table.to_ntriples(kg)
    if args.out:
        name = "query_results.tsv" if args.format == "tsv" else "query_results.nt"
        (_out_dir(args.out) / name).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontokg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("--graph", required=True, help="graph directory written by 'build'")
        p.add_argument("--registry", help="relation registry TSV (default: bundled)")

    b = sub.add_parser("build", help="assemble a graph from source manifests")
    common(b, graph=False)
    b.add_argument("--manifest", required=True)
    b.add_argument("--ontology", action="append", default=[], help="<name>.terms.tsv; repeatable")
    b.add_argument("--metagraph")
    b.add_argument("--anchors", help="node type to anchor class TSV (default: bundled)")
    b.add_argument("--model", choices=[k.value for k in ModelKind], default=ModelKind.INSTANCE_BASED.value)
    b.add_argument("--inverse", choices=("on", "off"), default="on")
    b.add_argument("--out", required=True)
    b.add_argument("--strict", action="store_true", help="exit 1 on meta-graph violations")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("validate", help="check a graph against a meta-graph")
    common(v)
    v.add_argument("--metagraph", required=True)
    v.add_argument("--out", help="directory for violations.tsv (default: the graph directory)")
    v.add_argument("--strict", action="store_true", help="exit 1 on violations")
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("analyze", help="compute validation metrics")
    common(a)
    a.add_argument("--out", required=True)
    for m in METRICS:
        a.add_argument(f"--{m}", action="store_true")
    a.add_argument("--all", action="store_true")
    a.add_argument("--seed", type=int, default=DEFAULT_SEED)
    a.add_argument("--pivots", type=int, default=DEFAULT_PIVOTS)
    a.add_argument("--diameter-mode", choices=("exact", "heuristic"), default="exact")
    a.add_argument("--normalized", action="store_true", help="(n-1)-scaled closeness")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("export", help="write N-Triples and/or an edge TSV")
    common(e)
    e.add_argument("--out", required=True)
    e.add_argument("--format", choices=("ntriples", "tsv", "both"), default="ntriples")
    e.set_defaults(func=cmd_export)

    q = sub.add_parser("query", help="evaluate a query file against a graph directory")
    common(q)
    q.add_argument("query")
    q.add_argument("--out")
    q.add_argument("--format", choices=("tsv", "ntriples-bindings"), default="tsv")
    q.add_argument("--transitive-subclass", action="store_true")
    q.set_defaults(func=cmd_query)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (KGError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
