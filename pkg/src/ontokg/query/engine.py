"""Evaluation of parsed queries against an in-memory knowledge graph."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

from ..model import RDFS_SUBCLASS_OF, KnowledgeGraph, TermId
from .parser import Iri, QueryAst, TriplePattern, Var

Binding = Dict[str, TermId]
Cell = Union[TermId, int]

XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"
BINDING_VAR = "urn:ontokg:binding:"
NO_MATCH = -1


@dataclass
class SolutionTable:
    """Query answer.  Term cells hold TermIds; aggregate cells hold counts."""
    columns: List[str]
    rows: List[Tuple[Cell, ...]]
    count_columns: frozenset = frozenset()

    def __len__(self) -> int:
        return len(self.rows)

    def cell_text(self, kg: KnowledgeGraph, column: int, value: Cell) -> str:
        return str(value) if self.columns[column] in self.count_columns else kg.iri(value)

    def as_text(self, kg: KnowledgeGraph) -> List[Tuple[str, ...]]:
        return [tuple(self.cell_text(kg, i, v) for i, v in enumerate(row)) for row in self.rows]

    def to_tsv(self, kg: KnowledgeGraph) -> str:
        lines = ["\t".join(self.columns)]
        lines += ["\t".join(row) for row in self.as_text(kg)]
        return "\n".join(lines) + "\n"

    def to_ntriples(self, kg: KnowledgeGraph) -> str:
        """One blank node per solution row, one triple per bound column."""
        lines = []
        for i, row in enumerate(self.rows):
            for c, (name, value) in enumerate(zip(self.columns, row)):
                if name in self.count_columns:
                    obj = f'"{value}"^^<{XSD_INTEGER}>'
                else:
                    obj = f"<{kg.iri(value)}>"
                lines.append(f"_:r{i} <{BINDING_VAR}{name}> {obj} .")
        return "".join(line + "\n" for line in lines)


class _Matcher:
    """Pattern matching over the graph indexes, optionally with subclass closure."""

    def __init__(self, kg: KnowledgeGraph, transitive_subclass: bool) -> None:
        self.kg = kg
        self.subclass = kg.terms.get(RDFS_SUBCLASS_OF)
        self.transitive = transitive_subclass and self.subclass is not None
        self._up: Optional[Dict[TermId, Set[TermId]]] = None
        self._down: Optional[Dict[TermId, Set[TermId]]] = None

    def resolve(self, term) -> Optional[TermId]:
        if isinstance(term, Iri):
            tid = self.kg.terms.get(term.value)
            return NO_MATCH if tid is None else tid
        return None

    # reflexive-transitive closure over nodes touching a subClassOf edge
    def _closure(self) -> None:
        parents: Dict[TermId, List[TermId]] = defaultdict(list)
        nodes: Set[TermId] = set()
        for s, o in self.kg.rel_index.get(self.subclass, ()):
            parents[s].append(o)
            nodes.update((s, o))
        up: Dict[TermId, Set[TermId]] = {}
        for start in sorted(nodes):
            seen = {start}
            stack = [start]
            while stack:
                for p in parents.get(stack.pop(), ()):
                    if p not in seen:
                        seen.add(p)
                        stack.append(p)
            up[start] = seen
        down: Dict[TermId, Set[TermId]] = defaultdict(set)
        for s, ups in up.items():
            for o in ups:
                down[o].add(s)
        self._up, self._down = up, dict(down)

    def _closure_pairs(self, s: Optional[TermId], o: Optional[TermId]) -> Iterator[Tuple[TermId, TermId]]:
        if self._up is None:
            self._closure()
        if s is not None:
            for x in sorted(self._up.get(s, ())):
                if o is None or x == o:
                    yield s, x
        elif o is not None:
            for x in sorted(self._down.get(o, ())):
                yield x, o
        else:
            for x in sorted(self._up):
                for y in sorted(self._up[x]):
                    yield x, y

    def candidates(self, s: Optional[TermId], p: Optional[TermId],
                   o: Optional[TermId]) -> Iterator[Tuple[TermId, TermId, TermId]]:
        if NO_MATCH in (s, p, o):
            return
        if self.transitive and p == self.subclass:
            for a, b in self._closure_pairs(s, o):
                yield a, p, b
            return
        kg = self.kg
        if s is not None:
            for r, x in kg.out_index.get(s, ()):
                if (p is None or r == p) and (o is None or x == o):
                    yield s, r, x
        elif o is not None:
            for x, r in kg.in_index.get(o, ()):
                if p is None or r == p:
                    yield x, r, o
        elif p is not None:
            for a, b in kg.rel_index.get(p, ()):
                yield a, p, b
        else:
            yield from kg.edges

    def estimate(self, pattern: TriplePattern, bound: Set[str]) -> Tuple[int, int]:
        """Sort key for greedy ordering: fewer free positions, then smaller index slice."""
        free = 0
        size = len(self.kg.edges)
        for pos, term in zip("spo", (pattern.subject, pattern.predicate, pattern.object)):
            if isinstance(term, Var):
                if term.name not in bound:
                    free += 1
                continue
            tid = self.resolve(term)
            if tid == NO_MATCH:
                return (-1, 0)
            index = {"s": self.kg.out_index, "p": self.kg.rel_index, "o": self.kg.in_index}[pos]
            size = min(size, len(index.get(tid, ())))
        return (free, size)


def _greedy_order(ast: QueryAst, matcher: _Matcher) -> List[int]:
    remaining = list(range(len(ast.patterns)))
    bound: Set[str] = set()
    order = []
    while remaining:
        best = min(remaining, key=lambda i: (matcher.estimate(ast.patterns[i], bound), i))
        remaining.remove(best)
        order.append(best)
        bound.update(ast.patterns[best].variables())
    return order


def _extend(binding: Binding, pattern: TriplePattern, matcher: _Matcher) -> Iterator[Binding]:
    terms = (pattern.subject, pattern.predicate, pattern.object)
    fixed = []
    for t in terms:
        if isinstance(t, Var):
            fixed.append(binding.get(t.name))
        else:
            fixed.append(matcher.resolve(t))
    for triple in matcher.candidates(*fixed):
        new = dict(binding)
        ok = True
        for t, value in zip(terms, triple):
            if isinstance(t, Var):
                prev = new.get(t.name)
                if prev is None:
                    new[t.name] = value
                elif prev != value:
                    ok = False
                    break
        if ok:
            yield new


def solutions(kg: KnowledgeGraph, ast: QueryAst, transitive_subclass: bool = False,
              order: Optional[Sequence[int]] = None) -> List[Binding]:
    """The bag of pattern-satisfying bindings that pass every filter."""
    matcher = _Matcher(kg, transitive_subclass)
    if order is None:
        order = _greedy_order(ast, matcher)
    elif sorted(order) != list(range(len(ast.patterns))):
        raise ValueError("order must be a permutation of the pattern indexes")
    filters = defaultdict(list)
    for f in ast.filters:
        filters[f.var].append(f.prefix)
    rows: List[Binding] = [{}]
    for idx in order:
        pattern = ast.patterns[idx]
        fresh = [v for v in pattern.variables()]
        nxt = []
        for row in rows:
            for new in _extend(row, pattern, matcher):
                if all(kg.iri(new[v]).startswith(prefix)
                       for v in fresh if v not in row for prefix in filters.get(v, ())):
                    nxt.append(new)
        rows = nxt
    return rows


def evaluate(kg: KnowledgeGraph, ast: QueryAst, transitive_subclass: bool = False,
             order: Optional[Sequence[int]] = None) -> SolutionTable:
    """Evaluate ``ast`` with bag semantics; rows sorted by term id, column by column.

    Args:
        transitive_subclass: match ``rdfs:subClassOf`` patterns against the
            reflexive-transitive closure of the stored subclass edges.
        order: explicit pattern evaluation order; by default a greedy
            most-selective-first order is used.
    """
    rows = solutions(kg, ast, transitive_subclass, order)
    counts = frozenset(a.alias for a in ast.aggregates)
    if not ast.grouped:
        out = [tuple(r[v] for v in ast.projection) for r in rows]
        return SolutionTable(ast.columns, sorted(out), counts)
    groups: Dict[Tuple[TermId, ...], List[Binding]] = defaultdict(list)
    for r in rows:
        groups[tuple(r[v] for v in ast.group_by)].append(r)
    if not ast.group_by and not groups:
        groups[()] = []
    out = []
    for key, members in groups.items():
        if ast.having is not None:
            n = len({m[ast.having.var] for m in members})
            if not ast.having.holds(n):
                continue
        by_var = dict(zip(ast.group_by, key))
        row = []
        for p in ast.projection:
            if isinstance(p, str):
                row.append(by_var[p])
            else:
                row.append(len({m[p.var] for m in members}))
        out.append(tuple(row))
    return SolutionTable(ast.columns, sorted(out), counts)
