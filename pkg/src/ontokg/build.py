"""Knowledge graph assembly.

The pipeline is ingest -> filter -> harmonize -> emit -> ontology subclass
edges -> inverse closure -> meta-graph validation.  Edges are written
directly in the abstracted network form: no OWL restriction scaffolding is
ever materialised.
"""
from __future__ import annotations

import csv
import enum
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .harmonize import (HarmonizedSource, LookupTable, RejectionReport, TransformSpec,
                        harmonize_source, load_lookup)
from .ingest import ManifestSet, SourceIo, SourceManifest
from .model import (RDF_TYPE, RDFS_SUBCLASS_OF, KGError, KnowledgeGraph, MetaGraph, NodeType,
                    Origin, RelationRegistry, TermId, default_registry, expand_iri,
                    validate_against_metagraph)

log = logging.getLogger(__name__)


class UnknownAnchorClass(KGError):
    def __init__(self, node_type: NodeType) -> None:
        super().__init__(f"no anchor ontology class configured for node type {node_type.value!r}")
        self.node_type = node_type


class ConfigurationErrors(KGError):
    """Several configuration problems found before any data was processed."""

    def __init__(self, errors: Sequence[Exception]) -> None:
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = list(errors)


# -- ontologies -----------------------------------------------------------

@dataclass(frozen=True)
class Term:
    iri: str
    label: str = ""
    deprecated: bool = False


@dataclass
class OntologyTermSet:
    name: str
    terms: List[Term] = field(default_factory=list)
    subclass_edges: List[Tuple[str, str]] = field(default_factory=list)

    def iris(self) -> List[str]:
        return [t.iri for t in self.terms]


@dataclass
class CleanReport:
    deprecated_terms: int = 0
    duplicate_terms: int = 0
    removed_edges: int = 0
    duplicate_edges: int = 0

    def total(self) -> int:
        return self.deprecated_terms + self.duplicate_terms + self.removed_edges + self.duplicate_edges


def load_ontology(terms_path, subclass_path=None, name: Optional[str] = None) -> OntologyTermSet:
    """Read an OBO-lite ontology: ``iri label deprecated`` and ``child parent`` TSVs.

    When ``subclass_path`` is omitted a sibling ``<stem>.subclass.tsv`` next
    to ``<stem>.terms.tsv`` is used if it exists.
    """
    terms_path = Path(terms_path)
    stem = terms_path.name.split(".")[0]
    if subclass_path is None:
        candidate = terms_path.with_name(f"{stem}.subclass.tsv")
        subclass_path = candidate if candidate.exists() else None
    onto = OntologyTermSet(name or stem)
    for lineno, cells in _tsv(terms_path):
        cells = cells + [""] * (3 - len(cells))
        if cells[2] not in ("", "0", "1"):
            raise KGError(f"{terms_path}:{lineno}: deprecated flag must be 0 or 1")
        onto.terms.append(Term(expand_iri(cells[0]), cells[1], cells[2] == "1"))
    if subclass_path is not None:
        for lineno, cells in _tsv(subclass_path):
            if len(cells) < 2:
                raise KGError(f"{subclass_path}:{lineno}: subclass rows need two columns")
            onto.subclass_edges.append((expand_iri(cells[0]), expand_iri(cells[1])))
    known = set(onto.iris())
    for child, parent in onto.subclass_edges:
        if child not in known or parent not in known:
            raise KGError(f"ontology {onto.name}: subclass edge {child} -> {parent} references an unknown term")
    return onto


def _tsv(path):
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise SourceIo(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, cells in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not cells or not cells[0].strip() or cells[0].startswith("#"):
                continue
            yield lineno, [c.strip() for c in cells]


def clean_ontology(onto: OntologyTermSet) -> Tuple[OntologyTermSet, CleanReport]:
    """Drop deprecated terms, their incident subclass edges, and duplicate rows.

    A repeated IRI keeps its first row.
    """
    report = CleanReport()
    seen: Dict[str, Term] = {}
    removed = set()
    for term in onto.terms:
        if term.iri in seen or term.iri in removed:
            report.duplicate_terms += 1
            continue
        if term.deprecated:
            report.deprecated_terms += 1
            removed.add(term.iri)
            continue
        seen[term.iri] = term
    edges: List[Tuple[str, str]] = []
    seen_edges = set()
    for edge in onto.subclass_edges:
        if edge[0] in removed or edge[1] in removed:
            report.removed_edges += 1
        elif edge in seen_edges:
            report.duplicate_edges += 1
        else:
            seen_edges.add(edge)
            edges.append(edge)
    return OntologyTermSet(onto.name, list(seen.values()), edges), report


@dataclass
class LabelConflict:
    iri: str
    kept: str
    dropped: str
    source: str


def merge_ontologies(sets: Iterable[OntologyTermSet], name: str = "merged"
                     ) -> Tuple[OntologyTermSet, List[LabelConflict]]:
    """Union of cleaned term sets; the first label seen for an IRI wins."""
    merged = OntologyTermSet(name)
    by_iri: Dict[str, Term] = {}
    conflicts: List[LabelConflict] = []
    edges = set()
    for onto in sets:
        for term in onto.terms:
            first = by_iri.get(term.iri)
            if first is None:
                by_iri[term.iri] = term
                merged.terms.append(term)
            elif first.label != term.label:
                conflicts.append(LabelConflict(term.iri, first.label, term.label, onto.name))
                log.warning("label conflict for %s: keeping %r, dropping %r from %s",
                            term.iri, first.label, term.label, onto.name)
        for edge in onto.subclass_edges:
            if edge not in edges:
                edges.add(edge)
                merged.subclass_edges.append(edge)
    return merged, conflicts


# -- knowledge model ------------------------------------------------------

class ModelKind(str, enum.Enum):
    CLASS_BASED = "class"
    INSTANCE_BASED = "instance"


@dataclass(frozen=True)
class KnowledgeModel:
    kind: ModelKind = ModelKind.INSTANCE_BASED
    inverse_relations: bool = True

    @property
    def typing_predicate(self) -> str:
        return RDFS_SUBCLASS_OF if self.kind is ModelKind.CLASS_BASED else RDF_TYPE


def load_anchor_map(path=None) -> Dict[NodeType, str]:
    """``node_type  class_iri`` rows; the packaged defaults when ``path`` is None."""
    if path is None:
        with resources.as_file(resources.files("ontokg") / "data" / "anchors.tsv") as p:
            return load_anchor_map(p)
    return {NodeType.parse(cells[0]): expand_iri(cells[1]) for _, cells in _tsv(path)}


# -- emission -------------------------------------------------------------

@dataclass
class EmitResult:
    asserted: int = 0
    typing: int = 0


def emit_triples(pairs: Iterable[Tuple[str, str]], manifest: SourceManifest, model: KnowledgeModel,
                 kg: KnowledgeGraph, anchors: Mapping[NodeType, str]) -> EmitResult:
    """Add one asserted edge per pair plus typing edges for new non-ontological nodes."""
    result = EmitResult()
    rel = kg.intern(manifest.relation)
    typing_rel = kg.intern(model.typing_predicate)
    for s_iri, o_iri in pairs:
        ends = []
        for iri, node_type in ((s_iri, manifest.subject_label), (o_iri, manifest.object_label)):
            tid = kg.add_node(iri, node_type)
            if not kg.is_ontological(tid):
                result.typing += _ensure_typing(kg, tid, typing_rel, anchors, manifest.name)
            ends.append(tid)
        if kg.add_edge(ends[0], rel, ends[1], manifest.name, Origin.ASSERTED):
            result.asserted += 1
    return result


def _ensure_typing(kg: KnowledgeGraph, tid: TermId, typing_rel: TermId,
                   anchors: Mapping[NodeType, str], source: str) -> int:
    node_type = kg.node_type(tid)
    try:
        anchor_iri = anchors[node_type]
    except KeyError:
        raise UnknownAnchorClass(node_type) from None
    anchor = kg.add_node(anchor_iri, ontological=True)
    return int(kg.add_edge(tid, typing_rel, anchor, source, Origin.TYPING))


def add_ontology(kg: KnowledgeGraph, onto: OntologyTermSet, edges: bool = True) -> int:
    """Register ontology terms as nodes; optionally add their subclass edges."""
    for term in onto.terms:
        kg.add_node(term.iri, label=term.label, ontological=True)
    if not edges:
        return 0
    rel = kg.intern(RDFS_SUBCLASS_OF)
    added = 0
    for child, parent in onto.subclass_edges:
        added += kg.add_edge(kg.intern(child), rel, kg.intern(parent), onto.name, Origin.ONTOLOGY)
    return added


def inverse_closure(kg: KnowledgeGraph) -> int:
    """Add the inverse (or symmetric mirror) of every asserted edge.

    Derived edges inherit the provenance of the edge they mirror.  A second
    application derives nothing.
    """
    iri = kg.terms.iri
    derived = 0
    for (s, r, o), rec in sorted(kg.edges.items()):
        if rec.origin is not Origin.ASSERTED:
            continue
        desc = kg.registry[iri(r)]
        if desc.inverse is not None:
            mirror = (o, kg.intern(desc.inverse), s)
        elif desc.symmetric:
            mirror = (o, r, s)
        else:
            continue
        derived += kg.add_edge(*mirror, provenance=rec.provenance, origin=Origin.INVERSE)
    return derived


# -- assembly -------------------------------------------------------------

@dataclass
class BuildReport:
    asserted: Dict[str, int] = field(default_factory=dict)
    pairs: Dict[str, int] = field(default_factory=dict)
    inverse_derived: int = 0
    typing: int = 0
    ontology: int = 0
    rejections: Dict[str, Dict[str, int]] = field(default_factory=dict)
    rows: Dict[str, int] = field(default_factory=dict)
    violations: int = 0
    nodes: int = 0
    edges: int = 0
    model: str = ModelKind.INSTANCE_BASED.value
    inverse_relations: bool = True
    ontology_cleaning: Dict[str, int] = field(default_factory=dict)
    label_conflicts: int = 0

    def category_total(self) -> int:
        return sum(self.asserted.values()) + self.inverse_derived + self.typing + self.ontology

    def to_dict(self) -> dict:
        return {
            "asserted": dict(sorted(self.asserted.items())),
            "pairs": dict(sorted(self.pairs.items())),
            "inverse_derived": self.inverse_derived,
            "typing": self.typing,
            "ontology": self.ontology,
            "rejections": {k: dict(sorted(v.items())) for k, v in sorted(self.rejections.items())},
            "rows": dict(sorted(self.rows.items())),
            "violations": self.violations,
            "nodes": self.nodes,
            "edges": self.edges,
            "model": self.model,
            "inverse_relations": self.inverse_relations,
            "ontology_cleaning": dict(sorted(self.ontology_cleaning.items())),
            "label_conflicts": self.label_conflicts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass
class BuildResult:
    kg: KnowledgeGraph
    report: BuildReport
    rejections: RejectionReport
    violations: object = None
    merged_ontology: Optional[OntologyTermSet] = None


def load_tables(manifests: ManifestSet) -> Dict[str, LookupTable]:
    return {name: load_lookup(spec["path"], name, bool(spec.get("casefold", False)))
            for name, spec in manifests.tables.items()}


def assemble(manifests: ManifestSet, tables: Optional[Mapping[str, LookupTable]] = None,
             ontologies: Sequence[OntologyTermSet] = (), metagraph: Optional[MetaGraph] = None,
             model: KnowledgeModel = KnowledgeModel(), registry: Optional[RelationRegistry] = None,
             anchors: Optional[Mapping[NodeType, str]] = None) -> BuildResult:
    """Build a knowledge graph from manifests, look-up tables and ontologies.

    Configuration problems (unknown relations, unresolvable transforms,
    missing anchors) are collected and raised together before any edge is
    written; data problems end up in the reports.
    """
    registry = registry if registry is not None else default_registry()
    anchors = anchors if anchors is not None else load_anchor_map()
    if tables is None:
        tables = load_tables(manifests)

    errors: List[Exception] = []
    transforms: Dict[str, TransformSpec] = {}
    for name, steps in manifests.transforms.items():
        try:
            transforms[name] = TransformSpec.from_json(steps, name, tables)
        except KGError as exc:
            errors.append(exc)
    for m in manifests:
        if m.relation not in registry:
            errors.append(KGError(f"source {m.name!r}: unknown relation {m.relation}"))
    for predicate in (RDF_TYPE, RDFS_SUBCLASS_OF):
        if predicate not in registry:
            errors.append(KGError(f"registry lacks {predicate}"))
    if errors:
        raise ConfigurationErrors(errors)

    report = BuildReport(model=model.kind.value, inverse_relations=model.inverse_relations)
    cleaned = []
    totals: Dict[str, int] = {}
    for onto in ontologies:
        c, cr = clean_ontology(onto)
        cleaned.append(c)
        for key, val in vars(cr).items():
            totals[key] = totals.get(key, 0) + val
    report.ontology_cleaning = totals
    merged, conflicts = merge_ontologies(cleaned)
    report.label_conflicts = len(conflicts)

    kg = KnowledgeGraph(registry)
    add_ontology(kg, merged, edges=False)

    rejections = RejectionReport()
    for m in manifests:
        harmonized: HarmonizedSource = harmonize_source(m, transforms, tables)
        rejections.merge(harmonized.report)
        emitted = emit_triples(harmonized.pairs, m, model, kg, anchors)
        report.asserted[m.name] = emitted.asserted
        report.pairs[m.name] = len(harmonized.pairs)
        report.typing += emitted.typing

    report.ontology = add_ontology(kg, merged, edges=True)
    if model.inverse_relations:
        report.inverse_derived = inverse_closure(kg)

    violations = None
    if metagraph is not None:
        violations = validate_against_metagraph(kg, metagraph)
        report.violations = len(violations)

    for (src, reason), n in sorted(rejections.counts.items()):
        report.rejections.setdefault(src, {})[reason] = n
    report.rows = dict(sorted(rejections.totals.items()))
    report.nodes = kg.n_nodes
    report.edges = len(kg)
    assert report.category_total() == report.edges
    return BuildResult(kg, report, rejections, violations, merged)
