"""Core graph data model.

IRIs are interned into dense integer handles; every analytic works on the
handles and only the I/O layer touches strings.  The knowledge graph is a
typed, directed multigraph in which identical ``(subject, relation, object)``
triples collapse into one record whose provenance sets merge.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

import numpy as np

OBO = "http://purl.obolibrary.org/obo/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASS_OF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"

CURIE_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "obo": OBO,
}

TermId = int


class KGError(Exception):
    """Base class for every error raised by this package."""


class EmptyIri(KGError, ValueError):
    pass


class InvalidIri(KGError, ValueError):
    pass


class UnknownRelation(KGError, KeyError):
    def __str__(self) -> str:
        return f"unknown relation: {self.args[0]}"


class RegistryError(KGError, ValueError):
    pass


def expand_iri(text: str) -> str:
    """Expand ``RO:0002434``/``rdfs:subClassOf`` style names to full IRIs.

    Full IRIs (anything containing ``://`` or starting with ``urn:``) pass
    through.  OBO-style CURIEs (``GO:0005634``) map onto the OBO PURL space.
    """
    text = text.strip()
    if "://" in text or text.startswith("urn:"):
        return text
    if ":" in text:
        prefix, local = text.split(":", 1)
        if prefix in CURIE_PREFIXES:
            return CURIE_PREFIXES[prefix] + local
        return f"{OBO}{prefix}_{local}"
    if "_" in text:
        return OBO + text
    raise InvalidIri(f"cannot expand {text!r} to an IRI")


def check_iri(iri: str) -> str:
    if not iri:
        raise EmptyIri("IRI must be non-empty")
    if any(ch.isspace() for ch in iri) or "<" in iri or ">" in iri:
        raise InvalidIri(f"IRI contains whitespace or angle brackets: {iri!r}")
    return iri


class Interner:
    """Bidirectional IRI <-> dense integer table."""

    def __init__(self) -> None:
        self._ids: Dict[str, TermId] = {}
        self._iris: List[str] = []

    def intern(self, iri: str) -> TermId:
        tid = self._ids.get(iri)
        if tid is None:
            check_iri(iri)
            tid = len(self._iris)
            self._ids[iri] = tid
            self._iris.append(iri)
        return tid

    def get(self, iri: str) -> Optional[TermId]:
        return self._ids.get(iri)

    def iri(self, tid: TermId) -> str:
        return self._iris[tid]

    def __len__(self) -> int:
        return len(self._iris)

    def __contains__(self, iri: object) -> bool:
        return iri in self._ids


class NodeType(str, enum.Enum):
    GENE = "gene"
    MRNA = "mRNA"
    MIRNA = "miRNA"
    PREMIRNA = "premiRNA"
    LNCRNA = "lncRNA"
    SNORNA = "snoRNA"
    TRNA = "tRNA"
    TRF = "tRF"
    TSRNA = "tsRNA"
    CIRCRNA = "circRNA"
    PSEUDOGENE = "pseudogene"
    RIBOSWITCH = "riboswitch"
    RIBOZYME = "ribozyme"
    APTAMER = "aptamer"
    ASO = "ASO"
    GRNA = "gRNA"
    VIRAL_RNA = "viral_RNA"
    PROTEIN = "protein"
    TF = "TF"
    RBP = "RBP"
    CHEMICAL = "chemical"
    DISEASE = "disease"
    PHENOTYPE = "phenotype"
    CELL = "cell"
    ANATOMY = "anatomy"
    PATHWAY = "pathway"
    GO_TERM = "GO_term"
    VARIANT = "variant"
    VACCINE = "vaccine"
    SPECIES = "species"
    SMALL_PROTEIN = "small_protein"
    EPIGENETIC_MODIFICATION = "epigenetic_modification"
    HISTONE_MODIFICATION = "histone_modification"
    UNCLASSIFIED_RNA = "unclassified_RNA"
    OTHER_TERM = "other_term"

    @classmethod
    def parse(cls, text: str) -> "NodeType":
        try:
            return cls(text.strip())
        except ValueError:
            raise KGError(f"unknown node type {text!r}") from None


# Rule order is part of the contract: suffix tags first, then prefixes top to
# bottom.  Suffix tags are the text after the last '?' and must match exactly.
SUFFIX_RULES: Tuple[Tuple[str, NodeType], ...] = (
    ("snoRNA", NodeType.SNORNA),
    ("circRNA", NodeType.CIRCRNA),
    ("lncRNA", NodeType.LNCRNA),
    ("lincRNA", NodeType.LNCRNA),
    ("pseudo", NodeType.PSEUDOGENE),
    ("mRNA", NodeType.MRNA),
    ("tRNA", NodeType.TRNA),
    ("viral_mRNA", NodeType.VIRAL_RNA),
    ("misc_RNA", NodeType.UNCLASSIFIED_RNA),
    ("ncRNA", NodeType.UNCLASSIFIED_RNA),
    ("other", NodeType.UNCLASSIFIED_RNA),
    ("unknown", NodeType.UNCLASSIFIED_RNA),
    ("TEC", NodeType.UNCLASSIFIED_RNA),
    ("snRNA", NodeType.UNCLASSIFIED_RNA),
    ("scaRNA", NodeType.UNCLASSIFIED_RNA),
    ("scRNA", NodeType.UNCLASSIFIED_RNA),
    ("mtRNA", NodeType.UNCLASSIFIED_RNA),
    ("vRNA", NodeType.UNCLASSIFIED_RNA),
    ("Y_RNA", NodeType.UNCLASSIFIED_RNA),
    ("retained_intron", NodeType.UNCLASSIFIED_RNA),
)

# Matched against the IRI with its scheme and a leading "www." removed.
PREFIX_RULES: Tuple[Tuple[str, NodeType], ...] = (
    ("purl.obolibrary.org/obo/GO_", NodeType.GO_TERM),
    ("purl.obolibrary.org/obo/MONDO_", NodeType.DISEASE),
    ("purl.obolibrary.org/obo/HP_", NodeType.PHENOTYPE),
    ("purl.obolibrary.org/obo/CHEBI_", NodeType.CHEMICAL),
    ("purl.obolibrary.org/obo/PR_", NodeType.PROTEIN),
    ("purl.obolibrary.org/obo/UBERON_", NodeType.ANATOMY),
    ("purl.obolibrary.org/obo/CLO_", NodeType.CELL),
    ("purl.obolibrary.org/obo/PW_", NodeType.PATHWAY),
    ("purl.obolibrary.org/obo/VO_", NodeType.VACCINE),
    ("purl.obolibrary.org/obo/NCBITaxon", NodeType.SPECIES),
    ("ncbi.nlm.nih.gov/gene/", NodeType.GENE),
    ("mirbase.org/cgi-bin/mature.pl", NodeType.MIRNA),
    ("mirbase.org/cgi-bin/mirna_entry.pl", NodeType.PREMIRNA),
    ("ncbi.nlm.nih.gov/snp/", NodeType.VARIANT),
    ("ncbi.nlm.nih.gov/nuccore/", NodeType.VIRAL_RNA),
    ("go.drugbank.com/drugs/", NodeType.CHEMICAL),
    ("eskip-finder.org", NodeType.ASO),
    ("aptagen.com/aptamer-details/", NodeType.APTAMER),
    ("addgene.org/", NodeType.GRNA),
    ("tbdb.io/tboxes/", NodeType.RIBOSWITCH),
    ("rfamlive.xfam.org/family/", NodeType.RIBOZYME),
    ("genome.bioch.virginia.edu/trfdb?tRF", NodeType.TRF),
    ("cm.jefferson.edu/MINTbase/", NodeType.TRF),
    ("rna.sysu.edu.cn/tsRFun/", NodeType.TSRNA),
    ("gtrnadb.ucsc.edu/", NodeType.TRNA),
    ("bigdata.ibp.ac.cn/SmProt/", NodeType.SMALL_PROTEIN),
    ("crdd.osdd.net/raghava/dbem", NodeType.HISTONE_MODIFICATION),
    ("encodeproject.org/targets/", NodeType.EPIGENETIC_MODIFICATION),
)


def _strip_scheme(iri: str) -> str:
    for scheme in ("https://", "http://"):
        if iri.startswith(scheme):
            iri = iri[len(scheme):]
            break
    if iri.startswith("www."):
        iri = iri[4:]
    return iri


def infer_node_type(iri: str) -> NodeType:
    """Classify an IRI by its identifier pattern.

    Suffix tags win over prefixes so that ``.../gene/6575?circRNA`` is a
    circRNA rather than a gene.  Anything unmatched is ``OTHER_TERM``.
    """
    if "?" in iri:
        tag = iri.rsplit("?", 1)[1]
        for suffix, node_type in SUFFIX_RULES:
            if tag == suffix:
                return node_type
    bare = _strip_scheme(iri)
    for prefix, node_type in PREFIX_RULES:
        if bare.startswith(prefix):
            return node_type
    return NodeType.OTHER_TERM


def is_ontological(iri: str) -> bool:
    return iri.startswith(OBO)


@dataclass(frozen=True)
class RelationDescriptor:
    relation: str
    label: str
    inverse: Optional[str] = None
    symmetric: bool = False


class RelationRegistry:
    """Set of relation descriptors with a verified involutive inverse map."""

    def __init__(self, descriptors: Iterable[RelationDescriptor] = ()) -> None:
        self._by_iri: Dict[str, RelationDescriptor] = {}
        for d in descriptors:
            if d.relation in self._by_iri:
                raise RegistryError(f"duplicate relation {d.relation}")
            self._by_iri[d.relation] = d
        self._check()

    def _check(self) -> None:
        for d in self._by_iri.values():
            if d.symmetric and d.inverse is not None:
                raise RegistryError(f"{d.relation}: symmetric relation cannot declare an inverse")
            if d.inverse is None:
                continue
            other = self._by_iri.get(d.inverse)
            if other is None:
                raise RegistryError(f"{d.relation}: inverse {d.inverse} is not registered")
            if other.inverse != d.relation:
                raise RegistryError(f"inverse pairing of {d.relation} and {d.inverse} is not involutive")

    def __contains__(self, iri: object) -> bool:
        return iri in self._by_iri

    def __getitem__(self, iri: str) -> RelationDescriptor:
        try:
            return self._by_iri[iri]
        except KeyError:
            raise UnknownRelation(iri) from None

    def __iter__(self) -> Iterator[RelationDescriptor]:
        return iter(self._by_iri.values())

    def __len__(self) -> int:
        return len(self._by_iri)

    def inverse(self, iri: str) -> Optional[str]:
        return self[iri].inverse

    def is_symmetric(self, iri: str) -> bool:
        return self[iri].symmetric

    def label(self, iri: str) -> str:
        return self[iri].label

    @classmethod
    def from_tsv(cls, path) -> "RelationRegistry":
        """Read ``relation_iri  label  inverse_iri  symmetric`` rows.

        Inverses declared on only one side are completed on the other side.
        """
        rows: Dict[str, List[str]] = {}
        order: List[str] = []
        with open(path, encoding="utf-8", newline="") as fh:
            for lineno, cells in enumerate(csv.reader(fh, delimiter="\t"), 1):
                if not cells or not cells[0].strip() or cells[0].startswith("#"):
                    continue
                cells = [c.strip() for c in cells] + [""] * (4 - len(cells))
                iri = expand_iri(cells[0])
                if iri in rows:
                    raise RegistryError(f"{path}:{lineno}: duplicate relation {iri}")
                if cells[3] not in ("", "0", "1"):
                    raise RegistryError(f"{path}:{lineno}: symmetric flag must be 0 or 1")
                inverse = expand_iri(cells[2]) if cells[2] else ""
                rows[iri] = [cells[1], inverse, cells[3]]
                order.append(iri)
        for iri in list(order):
            inverse = rows[iri][1]
            if inverse and inverse in rows and not rows[inverse][1]:
                rows[inverse][1] = iri
        return cls(
            RelationDescriptor(iri, rows[iri][0], rows[iri][1] or None, rows[iri][2] == "1")
            for iri in order
        )

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for d in self:
                fh.write(f"{d.relation}\t{d.label}\t{d.inverse or ''}\t{int(d.symmetric)}\n")


def default_registry() -> RelationRegistry:
    """The relation registry shipped with the package (RO terms plus typing predicates)."""
    with resources.as_file(resources.files("ontokg") / "data" / "relations.tsv") as path:
        return RelationRegistry.from_tsv(path)


class Origin(str, enum.Enum):
    ASSERTED = "asserted"
    INVERSE = "inverse-derived"
    ONTOLOGY = "ontology"
    TYPING = "typing"


@dataclass
class EdgeRecord:
    subject: TermId
    relation: TermId
    object: TermId
    provenance: Set[str] = field(default_factory=set)
    origin: Origin = Origin.ASSERTED

    @property
    def key(self) -> Tuple[TermId, TermId, TermId]:
        return (self.subject, self.relation, self.object)


@dataclass
class NodeInfo:
    node_type: NodeType
    label: str = ""


class KnowledgeGraph:
    """Interned, typed, directed multigraph with per-edge provenance.

    Construction is single-writer; once built the graph is only read.
    """

    def __init__(self, registry: Optional[RelationRegistry] = None,
                 interner: Optional[Interner] = None) -> None:
        self.registry = registry if registry is not None else default_registry()
        self.terms = interner if interner is not None else Interner()
        self.nodes: Dict[TermId, NodeInfo] = {}
        self.edges: Dict[Tuple[TermId, TermId, TermId], EdgeRecord] = {}
        self.out_index: Dict[TermId, List[Tuple[TermId, TermId]]] = {}
        self.in_index: Dict[TermId, List[Tuple[TermId, TermId]]] = {}
        self.rel_index: Dict[TermId, List[Tuple[TermId, TermId]]] = {}
        self.ontology_terms: Set[TermId] = set()

    # -- nodes ---------------------------------------------------------
    def intern(self, iri: str) -> TermId:
        return self.terms.intern(iri)

    def iri(self, tid: TermId) -> str:
        return self.terms.iri(tid)

    def add_node(self, iri: str, node_type: Optional[NodeType] = None, label: str = "",
                 ontological: bool = False) -> TermId:
        """Register a node; an already-known node keeps its first type and label."""
        tid = self.terms.intern(iri)
        if tid not in self.nodes:
            self.nodes[tid] = NodeInfo(node_type or infer_node_type(iri), label)
        elif label and not self.nodes[tid].label:
            self.nodes[tid].label = label
        if ontological:
            self.ontology_terms.add(tid)
        return tid

    def node_type(self, tid: TermId) -> NodeType:
        return self.nodes[tid].node_type

    def is_ontological(self, tid: TermId) -> bool:
        return tid in self.ontology_terms or is_ontological(self.terms.iri(tid))

    # -- edges ---------------------------------------------------------
    def add_edge(self, subject: TermId, relation: TermId, object: TermId,
                 provenance: Optional[str | Iterable[str]] = None,
                 origin: Origin = Origin.ASSERTED) -> bool:
        """Insert ``(subject, relation, object)``.

        Returns False when the triple already exists; its provenance set is
        then merged and the original origin kept.
        """
        rel_iri = self.terms.iri(relation)
        if rel_iri not in self.registry:
            raise UnknownRelation(rel_iri)
        if isinstance(provenance, str):
            provenance = {provenance}
        sources = set(provenance or ())
        if origin is Origin.ASSERTED and not sources:
            raise KGError("asserted edges need at least one provenance source")
        key = (subject, relation, object)
        record = self.edges.get(key)
        if record is not None:
            record.provenance |= sources
            return False
        for tid in (subject, object):
            if tid not in self.nodes:
                self.nodes[tid] = NodeInfo(infer_node_type(self.terms.iri(tid)))
        self.edges[key] = EdgeRecord(subject, relation, object, sources, origin)
        self.out_index.setdefault(subject, []).append((relation, object))
        self.in_index.setdefault(object, []).append((subject, relation))
        self.rel_index.setdefault(relation, []).append((subject, object))
        return True

    def add_triple(self, subject: str, relation: str, object: str,
                   provenance: Optional[str | Iterable[str]] = None,
                   origin: Origin = Origin.ASSERTED) -> bool:
        return self.add_edge(self.intern(subject), self.intern(relation), self.intern(object),
                             provenance, origin)

    def has_edge(self, subject: TermId, relation: TermId, object: TermId) -> bool:
        return (subject, relation, object) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def out_degree(self, tid: TermId) -> int:
        return len(self.out_index.get(tid, ()))

    def in_degree(self, tid: TermId) -> int:
        return len(self.in_index.get(tid, ()))

    def triples(self) -> Iterator[Tuple[str, str, str]]:
        iri = self.terms.iri
        for s, r, o in self.edges:
            yield iri(s), iri(r), iri(o)

    def edge_set(self) -> Set[Tuple[str, str, str]]:
        return set(self.triples())

    def origin_counts(self) -> Dict[str, int]:
        counts = {o.value: 0 for o in Origin}
        for rec in self.edges.values():
            counts[rec.origin.value] += 1
        return counts


@dataclass(frozen=True)
class Violation:
    subject: str
    relation: str
    object: str
    subject_type: NodeType
    object_type: NodeType


@dataclass
class ViolationReport:
    violations: List[Violation] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.violations)

    def __bool__(self) -> bool:
        return bool(self.violations)

    def counts(self) -> Dict[Tuple[str, str, str], int]:
        out: Dict[Tuple[str, str, str], int] = {}
        for v in self.violations:
            key = (v.subject_type.value, v.relation, v.object_type.value)
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))

    def to_tsv(self, path) -> None:
        rows = sorted(f"{v.subject}\t{v.relation}\t{v.object}\t{v.subject_type.value}\t{v.object_type.value}"
                      for v in self.violations)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("subject\trelation\tobject\tsubject_type\tobject_type\n")
            for row in rows:
                fh.write(row + "\n")


class MetaGraph:
    """Allowed ``(subject type, relation, object type)`` triples.

    The allowed set is closed under declared inverses and symmetry at
    construction time.
    """

    def __init__(self, triples: Iterable[Tuple[NodeType, str, NodeType]],
                 registry: RelationRegistry) -> None:
        allowed: Set[Tuple[NodeType, str, NodeType]] = set()
        for a, rel, b in triples:
            desc = registry[rel]
            allowed.add((a, rel, b))
            if desc.inverse is not None:
                allowed.add((b, desc.inverse, a))
            if desc.symmetric:
                allowed.add((b, rel, a))
        self.allowed = frozenset(allowed)

    def __contains__(self, key: object) -> bool:
        return key in self.allowed

    def __len__(self) -> int:
        return len(self.allowed)

    @classmethod
    def from_tsv(cls, path, registry: RelationRegistry) -> "MetaGraph":
        triples = []
        with open(path, encoding="utf-8", newline="") as fh:
            for cells in csv.reader(fh, delimiter="\t"):
                if not cells or not cells[0].strip() or cells[0].startswith("#"):
                    continue
                if len(cells) < 3:
                    raise KGError(f"{path}: meta-graph rows need three columns, got {cells!r}")
                triples.append((NodeType.parse(cells[0]), expand_iri(cells[1]), NodeType.parse(cells[2])))
        return cls(triples, registry)


def validate_against_metagraph(kg: KnowledgeGraph, meta: MetaGraph) -> ViolationReport:
    """List asserted and inverse-derived edges whose typed shape is not allowed."""
    report = ViolationReport()
    iri = kg.terms.iri
    for (s, r, o), rec in sorted(kg.edges.items()):
        if rec.origin in (Origin.TYPING, Origin.ONTOLOGY):
            continue
        rel = iri(r)
        if rel not in kg.registry:
            raise UnknownRelation(rel)
        st, ot = kg.node_type(s), kg.node_type(o)
        if (st, rel, ot) not in meta:
            report.violations.append(Violation(iri(s), rel, iri(o), st, ot))
    return report


class UndirectedGraph:
    """Simple undirected graph in CSR form.

    ``indptr``/``indices`` follow the scipy.sparse convention; neighbour lists
    are sorted and free of duplicates and self-loops.  ``labels[i]`` maps a
    position back to whatever the caller used as node identity (TermIds for
    projections of a knowledge graph).
    """

    def __init__(self, n: int, edges, labels: Optional[np.ndarray] = None) -> None:
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        edges = edges[edges[:, 0] != edges[:, 1]]
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0) if len(lo) else np.empty((0, 2), np.int64)
        self.n = int(n)
        self.m = len(pairs)
        src = np.concatenate([pairs[:, 0], pairs[:, 1]])
        dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(self.indptr, src + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices = dst.astype(np.int64)
        self.labels = np.arange(self.n) if labels is None else np.asarray(labels)

    @classmethod
    def from_edges(cls, edges, n: Optional[int] = None) -> "UndirectedGraph":
        edges = list(edges)
        if n is None:
            n = 1 + max((max(u, v) for u, v in edges), default=-1)
        return cls(n, edges)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_list(self) -> List[Tuple[int, int]]:
        out = []
        for v in range(self.n):
            for u in self.neighbors(v):
                if v < u:
                    out.append((v, int(u)))
        return out

    def subgraph(self, nodes: np.ndarray) -> "UndirectedGraph":
        nodes = np.asarray(nodes, dtype=np.int64)
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[nodes] = np.arange(len(nodes))
        src = np.repeat(np.arange(self.n), self.degrees())
        keep = (pos[src] >= 0) & (pos[self.indices] >= 0) & (src < self.indices)
        edges = np.stack([pos[src[keep]], pos[self.indices[keep]]], axis=1)
        return UndirectedGraph(len(nodes), edges, labels=self.labels[nodes])


def to_undirected(kg: KnowledgeGraph) -> UndirectedGraph:
    """Project onto a simple undirected graph over all KG nodes.

    Relations and direction are forgotten, parallel edges merge and
    self-loops are dropped.  Positions follow ascending TermId.
    """
    tids = np.array(sorted(kg.nodes), dtype=np.int64)
    pos = {int(t): i for i, t in enumerate(tids)}
    edges = [(pos[s], pos[o]) for s, _, o in kg.edges]
    return UndirectedGraph(len(tids), edges, labels=tids)
