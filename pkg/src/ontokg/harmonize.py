"""Identifier harmonisation: raw source ids to canonical ontology-aligned IRIs."""
from __future__ import annotations

import csv
import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .ingest import RaggedRow, Row, SourceIo, SourceManifest, apply_filters, read_rows
from .model import KGError, check_iri


class IdScheme(str, enum.Enum):
    WELL_REPUTED = "WR"
    ONTOLOGY_BASED = "O"
    MAPPING_BASED = "M"
    PROPRIETARY = "P"


class DuplicateKey(KGError):
    pass


class UnknownTable(KGError):
    pass


class TransformError(KGError):
    pass


class Reason(str, enum.Enum):
    UNMAPPED = "UnmappedIdentifier"
    FILTERED = "FilteredRow"
    RAGGED = "RaggedRow"


@dataclass
class LookupTable:
    name: str
    entries: Dict[str, str] = field(default_factory=dict)
    casefold: bool = False

    def key(self, raw: str) -> str:
        raw = raw.strip()
        return raw.casefold() if self.casefold else raw

    def get(self, raw: str) -> Optional[str]:
        return self.entries.get(self.key(raw))

    def __len__(self) -> int:
        return len(self.entries)


def load_lookup(path, name: Optional[str] = None, casefold: bool = False) -> LookupTable:
    """Read a two-column ``raw_id<TAB>canonical_iri`` file.

    Repeating a key with the same value is tolerated; conflicting values
    raise :class:`DuplicateKey`.
    """
    path = Path(path)
    table = LookupTable(name or path.stem, casefold=casefold)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise SourceIo(f"cannot read look-up table {path}: {exc}") from exc
    with fh:
        for lineno, cells in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not cells or not "".join(cells).strip():
                continue
            if len(cells) < 2:
                raise KGError(f"{path}:{lineno}: look-up rows need two columns")
            key, value = table.key(cells[0]), cells[1].strip()
            previous = table.entries.get(key)
            if previous is not None and previous != value:
                raise DuplicateKey(f"{path}:{lineno}: key {key!r} maps to {previous!r} and {value!r}")
            table.entries[key] = value
    return table


@dataclass(frozen=True)
class TransformSpec:
    """Ordered identifier rewriting steps.

    Each step is a ``(kind, arg)`` pair with kind one of ``normalize``
    (arg: casefold flag), ``lookup`` (table name), ``template`` (pattern
    containing ``{id}`` once) or ``suffix`` (text).
    """
    steps: Tuple[Tuple[str, object], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        lookups = 0
        for kind, arg in self.steps:
            if kind == "lookup":
                lookups += 1
            elif kind == "template":
                if not isinstance(arg, str) or arg.count("{id}") != 1:
                    raise TransformError(f"template {arg!r} must contain '{{id}}' exactly once")
            elif kind not in ("normalize", "suffix"):
                raise TransformError(f"unknown transform step {kind!r}")
        if lookups > 1:
            raise TransformError(f"transform {self.name!r} has more than one lookup step")

    @classmethod
    def from_json(cls, steps: list, name: str = "", tables: Optional[Mapping] = None) -> "TransformSpec":
        parsed = []
        for step in steps:
            if not isinstance(step, dict) or len(step) != 1:
                raise TransformError(f"transform {name!r}: each step is a one-key object, got {step!r}")
            (kind, arg), = step.items()
            if kind == "normalize":
                arg = bool(arg.get("casefold", False)) if isinstance(arg, dict) else bool(arg)
            if kind == "lookup" and tables is not None and arg not in tables:
                raise UnknownTable(f"transform {name!r} references unknown table {arg!r}")
            parsed.append((kind, arg))
        return cls(tuple(parsed), name)


def map_identifier(raw: str, spec: Optional[TransformSpec],
                   tables: Mapping[str, LookupTable]) -> Optional[str]:
    """Apply ``spec`` to a raw id; None means unmapped.

    A look-up miss never falls back to the raw value.  The result must be a
    usable IRI (non-empty, no whitespace), otherwise it is unmapped too.
    """
    value = raw.strip()
    for kind, arg in (spec.steps if spec else ()):
        if kind == "normalize":
            value = value.strip()
            if arg:
                value = value.casefold()
        elif kind == "lookup":
            try:
                table = tables[arg]
            except KeyError:
                raise UnknownTable(str(arg)) from None
            value = table.get(value)
            if value is None:
                return None
        elif kind == "template":
            value = arg.replace("{id}", value)
        elif kind == "suffix":
            value = value + arg
    if not value:
        return None
    try:
        check_iri(value)
    except KGError:
        return None
    return value


@dataclass
class RejectionReport:
    """Per-source row accounting: ``total == kept + sum of rejections``."""
    counts: Counter = field(default_factory=Counter)
    totals: Counter = field(default_factory=Counter)
    kept: Counter = field(default_factory=Counter)
    log: List[Tuple[str, int, str]] = field(default_factory=list)

    def reject(self, source: str, line: int, reason: Reason, detail: str = "") -> None:
        self.counts[(source, reason.value)] += 1
        self.totals[source] += 1
        self.log.append((source, line, f"{reason.value}: {detail}" if detail else reason.value))

    def keep(self, source: str) -> None:
        self.kept[source] += 1
        self.totals[source] += 1

    def count(self, reason: Reason, source: Optional[str] = None) -> int:
        return sum(n for (src, r), n in self.counts.items()
                   if r == reason.value and (source is None or src == source))

    def by_reason(self) -> Dict[str, int]:
        out = {r.value: 0 for r in Reason}
        for (_, r), n in self.counts.items():
            out[r] += n
        return out

    def merge(self, other: "RejectionReport") -> "RejectionReport":
        self.counts.update(other.counts)
        self.totals.update(other.totals)
        self.kept.update(other.kept)
        self.log.extend(other.log)
        return self

    def balanced(self) -> bool:
        return all(self.kept[src] + sum(n for (s, _), n in self.counts.items() if s == src) == total
                   for src, total in self.totals.items())

    def tsv_rows(self) -> List[str]:
        return sorted(f"{src}\t{reason}\t{n}" for (src, reason), n in self.counts.items())

    def to_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("source\treason\tcount\n")
            for row in self.tsv_rows():
                fh.write(row + "\n")

    def write_log(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("source\tline\treason\n")
            for src, line, reason in sorted(self.log):
                fh.write(f"{src}\t{line}\t{reason}\n")


@dataclass
class HarmonizedSource:
    manifest: SourceManifest
    pairs: List[Tuple[str, str]]
    report: RejectionReport


def harmonize_rows(manifest: SourceManifest, rows: Iterable[Row],
                   transforms: Mapping[str, TransformSpec],
                   tables: Mapping[str, LookupTable],
                   report: Optional[RejectionReport] = None) -> HarmonizedSource:
    """Filter and map each row to one ``(subject IRI, object IRI)`` pair."""
    report = report if report is not None else RejectionReport()
    s_spec = transforms[manifest.subject_transform] if manifest.subject_transform else None
    o_spec = transforms[manifest.object_transform] if manifest.object_transform else None
    pairs: List[Tuple[str, str]] = []
    for line, cells in rows:
        reason = apply_filters(cells, manifest.filters)
        if reason is not None:
            report.reject(manifest.name, line, Reason.FILTERED, reason)
            continue
        subject = map_identifier(cells[manifest.subject_column], s_spec, tables)
        obj = map_identifier(cells[manifest.object_column], o_spec, tables)
        if subject is None or obj is None:
            side = "subject" if subject is None else "object"
            raw = cells[manifest.subject_column if subject is None else manifest.object_column]
            report.reject(manifest.name, line, Reason.UNMAPPED, f"{side} {raw}")
            continue
        report.keep(manifest.name)
        pairs.append((subject, obj))
    return HarmonizedSource(manifest, pairs, report)


def harmonize_source(manifest: SourceManifest, transforms: Mapping[str, TransformSpec],
                     tables: Mapping[str, LookupTable]) -> HarmonizedSource:
    """Read, filter and map one source; ragged rows are counted, not raised."""
    report = RejectionReport()

    def ragged(err: RaggedRow) -> None:
        report.reject(manifest.name, err.line, Reason.RAGGED)

    return harmonize_rows(manifest, read_rows(manifest, on_ragged=ragged), transforms, tables, report)
