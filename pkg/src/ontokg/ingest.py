"""Source manifests and tabular source reading.

A manifest document is JSON::

    {
      "tables":     {"mirna_names": {"path": "lut/mirna.tsv", "casefold": false}},
      "transforms": {"entrez_mrna": [{"template": "http://www.ncbi.nlm.nih.gov/gene/{id}"},
                                     {"suffix": "?mRNA"}]},
      "templates":  {"sister": {"delimiter": "\\t", "has_header": true, ...}},
      "sources":    [{"name": "mirdb", "path": "sources/mirdb.tsv", ...}, ...]
    }

Only ``sources`` is required and a bare array of source objects is also
accepted.  Relative paths resolve against the manifest's directory.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .model import KGError, NodeType, RelationRegistry, UnknownRelation, expand_iri

COMPARATORS = ("lt", "le", "gt", "ge", "eq", "ne", "in_set", "nonempty")
NUMERIC = frozenset({"lt", "le", "gt", "ge"})

# Printed form of the *failed* condition for each comparator.
_NEGATED = {"lt": "≥", "le": ">", "gt": "≤", "ge": "<", "eq": "≠", "ne": "="}

SOURCE_FIELDS = frozenset({
    "name", "path", "delimiter", "has_header", "subject_column", "object_column",
    "subject_label", "object_label", "relation", "filters", "subject_transform",
    "object_transform", "subject_scheme", "object_scheme", "template",
})


class ManifestSyntax(KGError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class BadColumnSpec(KGError):
    pass


class RaggedRow(KGError):
    def __init__(self, path, line: int, needed: int, got: int) -> None:
        super().__init__(f"{path}:{line}: expected more than {needed - 1} columns, got {got}")
        self.path = str(path)
        self.line = line


class SourceIo(KGError, OSError):
    pass


@dataclass(frozen=True)
class RowFilter:
    column: int
    comparator: str
    value: Any = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.comparator not in COMPARATORS:
            raise BadColumnSpec(f"unknown comparator {self.comparator!r}")
        if self.column < 0:
            raise BadColumnSpec("filter column must be non-negative")
        if self.comparator in NUMERIC and not isinstance(self.value, (int, float)):
            raise BadColumnSpec(f"comparator {self.comparator} needs a numeric value")
        if self.comparator == "in_set":
            object.__setattr__(self, "value", frozenset(str(v) for v in self.value))

    @property
    def subject(self) -> str:
        return self.name or f"column {self.column}"

    def check(self, row: Sequence[str]) -> Optional[str]:
        """None when the row passes, else the reason it was dropped."""
        cell = row[self.column] if self.column < len(row) else ""
        op = self.comparator
        if op == "nonempty":
            return None if cell else f"{self.subject} empty"
        if op == "in_set":
            return None if cell in self.value else f"{self.subject} not in set"
        if op in NUMERIC:
            try:
                x = float(cell)
            except ValueError:
                return "unparsable numeric"
            if not math.isfinite(x):
                return "unparsable numeric"
            v = self.value
            ok = {"lt": x < v, "le": x <= v, "gt": x > v, "ge": x >= v}[op]
        else:
            ok = (cell == str(self.value)) == (op == "eq")
        return None if ok else f"{self.subject} {_NEGATED[op]} {self.value}"


def apply_filters(row: Sequence[str], filters: Sequence[RowFilter]) -> Optional[str]:
    """Conjunctive filtering: None keeps the row, otherwise the first failure's reason."""
    for f in filters:
        reason = f.check(row)
        if reason is not None:
            return reason
    return None


@dataclass
class SourceManifest:
    name: str
    path: Path
    subject_column: int
    object_column: int
    subject_label: NodeType
    object_label: NodeType
    relation: str
    delimiter: str = "\t"
    has_header: bool = False
    filters: List[RowFilter] = field(default_factory=list)
    subject_transform: Optional[str] = None
    object_transform: Optional[str] = None
    subject_scheme: Optional[str] = None
    object_scheme: Optional[str] = None

    @property
    def max_column(self) -> int:
        return max([self.subject_column, self.object_column] + [f.column for f in self.filters])


@dataclass
class ManifestSet:
    """Parsed manifest document: sources plus the transforms and tables they name."""
    sources: List[SourceManifest]
    transforms: Dict[str, list] = field(default_factory=dict)
    tables: Dict[str, dict] = field(default_factory=dict)

    def __iter__(self):
        return iter(self.sources)

    def __len__(self) -> int:
        return len(self.sources)

    def __getitem__(self, i: int) -> SourceManifest:
        return self.sources[i]


def _as_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadColumnSpec(f"{what} must be an integer, got {value!r}")
    if value < 0:
        raise BadColumnSpec(f"{what} must be non-negative")
    return value


def _parse_source(obj: dict, base: Path, templates: dict, transforms: dict,
                  registry: Optional[RelationRegistry]) -> SourceManifest:
    if not isinstance(obj, dict):
        raise ManifestSyntax("each source must be a JSON object")
    if "template" in obj:
        try:
            merged = dict(templates[obj["template"]])
        except KeyError:
            raise ManifestSyntax(f"unknown template {obj['template']!r}") from None
        merged.update(obj)
        obj = merged
    unknown = set(obj) - SOURCE_FIELDS
    if unknown:
        raise ManifestSyntax(f"unknown source field(s): {', '.join(sorted(unknown))}")
    for key in ("name", "path", "subject_column", "object_column", "subject_label",
                "object_label", "relation"):
        if key not in obj:
            raise ManifestSyntax(f"source {obj.get('name', '?')!r} is missing {key!r}")
    sc = _as_int(obj["subject_column"], "subject_column")
    oc = _as_int(obj["object_column"], "object_column")
    if sc == oc:
        raise BadColumnSpec(f"source {obj['name']!r}: subject_column equals object_column ({sc})")
    relation = expand_iri(obj["relation"])
    if registry is not None and relation not in registry:
        raise UnknownRelation(relation)
    filters = []
    for f in obj.get("filters", []):
        if not isinstance(f, dict) or "column" not in f or "op" not in f:
            raise ManifestSyntax("filters need 'column' and 'op'")
        filters.append(RowFilter(_as_int(f["column"], "filter column"), f["op"], f.get("value"),
                                 f.get("name", "")))
    for key in ("subject_transform", "object_transform"):
        ref = obj.get(key)
        if ref is not None and ref not in transforms:
            raise ManifestSyntax(f"source {obj['name']!r}: unknown transform {ref!r}")
    delimiter = obj.get("delimiter", "\t")
    if not isinstance(delimiter, str) or len(delimiter) != 1:
        raise ManifestSyntax("delimiter must be a single character")
    try:
        labels = NodeType.parse(obj["subject_label"]), NodeType.parse(obj["object_label"])
    except KGError as exc:
        raise ManifestSyntax(str(exc)) from None
    return SourceManifest(
        name=obj["name"], path=(base / obj["path"]), subject_column=sc, object_column=oc,
        subject_label=labels[0], object_label=labels[1], relation=relation,
        delimiter=delimiter, has_header=bool(obj.get("has_header", False)), filters=filters,
        subject_transform=obj.get("subject_transform"), object_transform=obj.get("object_transform"),
        subject_scheme=obj.get("subject_scheme"), object_scheme=obj.get("object_scheme"),
    )


def parse_manifests(text: str, base: Path = Path("."),
                    registry: Optional[RelationRegistry] = None) -> ManifestSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestSyntax(exc.msg, exc.lineno, exc.colno) from None
    if isinstance(doc, list):
        doc = {"sources": doc}
    if not isinstance(doc, dict) or not isinstance(doc.get("sources"), list):
        raise ManifestSyntax("manifest must be an array of sources or an object with a 'sources' array")
    transforms = doc.get("transforms", {})
    tables = {name: dict(spec, path=base / spec["path"]) for name, spec in doc.get("tables", {}).items()}
    templates = doc.get("templates", {})
    sources = [_parse_source(s, base, templates, transforms, registry) for s in doc["sources"]]
    names = [s.name for s in sources]
    if len(set(names)) != len(names):
        raise ManifestSyntax("source names must be unique")
    # Transform steps are checked here so configuration errors surface before any row is read.
    from .harmonize import TransformSpec
    for name, steps in transforms.items():
        TransformSpec.from_json(steps, name=name, tables=tables)
    return ManifestSet(sources, transforms, tables)


def load_manifests(path, registry: Optional[RelationRegistry] = None) -> ManifestSet:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SourceIo(f"cannot read manifest {path}: {exc}") from exc
    return parse_manifests(text, path.parent, registry)


class Row(NamedTuple):
    line: int
    cells: List[str]


def read_rows(manifest: SourceManifest,
              on_ragged: Optional[Callable[[RaggedRow], None]] = None) -> Iterator[Row]:
    """Stream the data rows of a source file.

    CRLF and LF are equivalent, blank lines are skipped and every cell is
    stripped.  A row too short for the referenced columns raises
    :class:`RaggedRow` unless ``on_ragged`` is given, in which case the
    callback receives the error and the row is skipped.
    """
    needed = manifest.max_column + 1
    try:
        fh = open(manifest.path, encoding="utf-8", newline="")
    except OSError as exc:
        raise SourceIo(f"cannot read {manifest.path}: {exc}") from exc
    with fh:
        header_pending = manifest.has_header
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if header_pending:
                header_pending = False
                continue
            cells = [c.strip() for c in line.split(manifest.delimiter)]
            if len(cells) < needed:
                err = RaggedRow(manifest.path, lineno, needed, len(cells))
                if on_ragged is None:
                    raise err
                on_ragged(err)
                continue
            yield Row(lineno, cells)
