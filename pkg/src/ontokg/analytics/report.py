"""Run a selection of metrics and write the report plus plot-ready TSVs."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Optional

from ..model import KnowledgeGraph, to_undirected
from .census import source_overlap, type_census
from .degree import degree_summary
from .isomorphic import isomorphic_groups, summarize_groups
from .paths import DEFAULT_SEED, closeness_approx, diameter, largest_component
from .powerlaw import DegenerateTail, compare_distributions, fit_power_law
from .treewidth import treewidth_upper_bound

METRICS = ("degree", "powerlaw", "diameter", "closeness", "treewidth", "isomorphic", "census", "overlap")
DEFAULT_PIVOTS = 256
REPORT_FILE = "metrics.json"


def _write_points(path: Path, points: Iterable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for x, y in points:
            fh.write(f"{x}\t{y!r}\n" if isinstance(y, float) else f"{x}\t{y}\n")


def analyze(kg: KnowledgeGraph, metrics: Iterable[str], out: Optional[Path] = None,
            seed: int = DEFAULT_SEED, pivots: int = DEFAULT_PIVOTS, diameter_mode: str = "exact",
            normalized: bool = False) -> dict:
    """Compute the requested metrics; with ``out`` also write ``metrics.json`` and plot files.

    Args:
        metrics: names from ``METRICS``.
        seed: seed for pivot sampling; recorded in the report.
        pivots: closeness pivot count.
    """
    wanted = set(metrics)
    unknown = wanted - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metric(s): {', '.join(sorted(unknown))}")
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
    report: dict = {"seed": seed}
    und = to_undirected(kg) if wanted & {"diameter", "closeness", "treewidth", "powerlaw"} else None

    if "degree" in wanted:
        summary = degree_summary(kg)
        report["degree"] = summary.to_dict()
        if out is not None:
            _write_points(out / "degree_histogram.tsv", sorted(summary.histogram.items()))
            _write_points(out / "ccdf.tsv", summary.ccdf)
    if "powerlaw" in wanted:
        degrees = und.degrees()
        try:
            fit = fit_power_law(degrees)
            compare_distributions(degrees, fit)
            report["powerlaw"] = fit.to_dict()
        except DegenerateTail as exc:
            report["powerlaw"] = {"error": str(exc)}
    if "diameter" in wanted:
        _, note = largest_component(und)
        report["diameter"] = {"mode": diameter_mode, "value": diameter(und, diameter_mode),
                              "note": note or ""}
    if "closeness" in wanted:
        est = closeness_approx(und, pivots, seed=seed, normalized=normalized)
        report["closeness"] = {"mean": est.mean, "pivots": est.k, "seed": est.seed,
                               "normalized": est.normalized, "nodes": int(est.values.size),
                               "note": est.note or ""}
        if out is not None:
            _write_points(out / "closeness_hist.tsv", est.histogram)
    if "treewidth" in wanted:
        bound = treewidth_upper_bound(und)
        report["treewidth"] = {"upper_bound": bound.width, "heuristic": "min-degree"}
        if out is not None:
            with open(out / "elimination_order.tsv", "w", encoding="utf-8", newline="\n") as fh:
                for v in bound.order:
                    fh.write(kg.iri(int(und.labels[v])) + "\n")
    if "isomorphic" in wanted:
        groups = isomorphic_groups(kg)
        report["isomorphic"] = summarize_groups(kg, groups).to_dict()
        if out is not None:
            with open(out / "isomorphic_groups.tsv", "w", encoding="utf-8", newline="\n") as fh:
                fh.write("group\tnode_type\tmember\n")
                for i, grp in enumerate(groups):
                    for m in grp.members:
                        fh.write(f"{i}\t{grp.node_type.value}\t{kg.iri(m)}\n")
    if "census" in wanted:
        census = type_census(kg)
        report["census"] = {"node_types": census.node_types, "relations": census.relations}
        if out is not None:
            census.to_tsv(out / "census.tsv")
    if "overlap" in wanted:
        overlap = source_overlap(kg)
        report["overlap"] = {"sizes": overlap.sizes,
                             "containment": {f"{a}|{b}": v for (a, b), v in overlap.containment.items()},
                             "jaccard": {f"{a}|{b}": v for (a, b), v in overlap.jaccard.items()}}
        if out is not None:
            overlap.to_tsv(out / "overlap.tsv")
    if out is not None:
        with open(out / REPORT_FILE, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report
