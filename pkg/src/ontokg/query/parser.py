"""Parser for the small SPARQL subset used to slice the graph.

Grammar (keywords case-insensitive)::

    query    := prefix* select where group? having? EOF
    prefix   := PREFIX pname_ns <iri>
    select   := SELECT ( ?var | "(" COUNT "(" DISTINCT ?var ")" AS ?var ")" )+
    where    := WHERE? "{" ( triples | filter )* "}"
    triples  := term verb term ( ";" verb term )* ";"? "."?
    filter   := FILTER "(" STRSTARTS "(" STR "(" ?var ")" "," STR "(" iri ")" ")" ")"
    group    := GROUP BY ?var+
    having   := HAVING "(" COUNT "(" DISTINCT ?var ")" cmp INTEGER ")"

Terms are variables, prefixed names or ``<iri>``.  Literals, property
paths, ``a``, object lists and every other SPARQL construct are rejected
with :class:`UnsupportedFeature`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from ..model import KGError

UNSUPPORTED_WORDS = frozenset({
    "OPTIONAL", "UNION", "MINUS", "BIND", "VALUES", "SERVICE", "GRAPH", "ORDER", "LIMIT",
    "OFFSET", "DISTINCT", "REDUCED", "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE",
    "FROM", "BASE", "NAMED", "EXISTS", "NOT", "SUM", "AVG", "MIN", "MAX", "SAMPLE",
    "GROUP_CONCAT", "REGEX", "CONTAINS", "STRENDS", "LANG", "LANGMATCHES", "DATATYPE",
    "BOUND", "ISIRI", "ISURI", "ISLITERAL", "LCASE", "UCASE", "STRLEN", "SUBSTR", "IF",
    "COALESCE", "A", "TRUE", "FALSE", "LOAD", "CLEAR", "DROP", "CREATE", "WITH", "USING",
})
COMPARATORS = (">=", "<=", "!=", ">", "<", "=")


class QueryError(KGError):
    pass


class QuerySyntax(QueryError):
    def __init__(self, line: int, column: int, expected: str, found: str = "") -> None:
        got = f", found {found!r}" if found else ""
        super().__init__(f"line {line}, column {column}: expected {expected}{got}")
        self.line = line
        self.column = column
        self.expected = expected


class UnknownPrefix(QueryError):
    def __init__(self, name: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"undeclared prefix {name!r} (line {line}, column {column})")
        self.name = name


class UnsupportedFeature(QueryError):
    def __init__(self, token: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"unsupported feature {token!r} (line {line}, column {column})")
        self.token = token


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<var>[?$][A-Za-z_][A-Za-z0-9_]*)
  | (?P<pname>(?:[A-Za-z][A-Za-z0-9_\-]*(?:\.[A-Za-z0-9_\-]+)*)?:(?:[A-Za-z0-9_\-]+(?:\.[A-Za-z0-9_\-]+)*)?)
  | (?P<int>[0-9]+)
  | (?P<cmp>>=|<=|!=|>|<|=)
  | (?P<punct>[{}().;,*])
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*"|'[^'\n]*')
  | (?P<path>[/|^+!&])
""", re.VERBOSE)


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            raise QuerySyntax(line, column, "a token", text[pos])
        kind, value = m.lastgroup, m.group()
        if kind in ("string", "path"):
            raise UnsupportedFeature(value, line, column)
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, column))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


@dataclass(frozen=True)
class Iri:
    value: str

    def __str__(self) -> str:
        return f"<{self.value}>"


Term = Union[Var, Iri]


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term

    def variables(self) -> List[str]:
        return [t.name for t in (self.subject, self.predicate, self.object) if isinstance(t, Var)]


@dataclass(frozen=True)
class CountDistinct:
    var: str
    alias: str


@dataclass(frozen=True)
class PrefixFilter:
    var: str
    prefix: str


@dataclass(frozen=True)
class Having:
    var: str
    comparator: str
    value: int

    def holds(self, count: int) -> bool:
        return {">=": count >= self.value, "<=": count <= self.value, ">": count > self.value,
                "<": count < self.value, "=": count == self.value, "!=": count != self.value}[self.comparator]


@dataclass
class QueryAst:
    prefixes: Dict[str, str] = field(default_factory=dict)
    projection: List[Union[str, CountDistinct]] = field(default_factory=list)
    patterns: List[TriplePattern] = field(default_factory=list)
    filters: List[PrefixFilter] = field(default_factory=list)
    group_by: List[str] = field(default_factory=list)
    having: Optional[Having] = None

    @property
    def aggregates(self) -> List[CountDistinct]:
        return [p for p in self.projection if isinstance(p, CountDistinct)]

    @property
    def columns(self) -> List[str]:
        return [p.alias if isinstance(p, CountDistinct) else p for p in self.projection]

    @property
    def grouped(self) -> bool:
        return bool(self.group_by or self.aggregates or self.having)

    def pattern_variables(self) -> List[str]:
        seen: Dict[str, None] = {}
        for p in self.patterns:
            for v in p.variables():
                seen.setdefault(v)
        return list(seen)


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.i = 0
        self.ast = QueryAst()
        self.var_sites: List[Tuple[str, Token]] = []

    # -- token helpers ---------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def is_word(self, word: str) -> bool:
        return self.tok.kind == "word" and self.tok.text.upper() == word

    def fail(self, expected: str) -> None:
        tok = self.tok
        if tok.kind == "word" and tok.text.upper() in UNSUPPORTED_WORDS:
            raise UnsupportedFeature(tok.text.upper() if tok.text.upper() != "A" else tok.text,
                                     tok.line, tok.column)
        raise QuerySyntax(tok.line, tok.column, expected, tok.text or "end of input")

    def word(self, word: str) -> Token:
        if not self.is_word(word):
            self.fail(word)
        return self.advance()

    def punct(self, ch: str) -> Token:
        if not (self.tok.kind == "punct" and self.tok.text == ch):
            if self.tok.kind == "punct" and self.tok.text in ",*" and ch not in ",*":
                raise UnsupportedFeature(self.tok.text, self.tok.line, self.tok.column)
            self.fail(repr(ch))
        return self.advance()

    def at_punct(self, ch: str) -> bool:
        return self.tok.kind == "punct" and self.tok.text == ch

    def var(self, track: bool = True) -> str:
        if self.tok.kind != "var":
            self.fail("a variable")
        tok = self.advance()
        name = tok.text[1:]
        if track:
            self.var_sites.append((name, tok))
        return name

    def iri(self) -> str:
        tok = self.tok
        if tok.kind == "iri":
            self.advance()
            return tok.text[1:-1]
        if tok.kind == "pname":
            self.advance()
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.ast.prefixes:
                raise UnknownPrefix(prefix, tok.line, tok.column)
            return self.ast.prefixes[prefix] + local
        self.fail("an IRI or prefixed name")

    def term(self) -> Term:
        if self.tok.kind == "var":
            return Var(self.var(track=False))
        if self.tok.kind == "int":
            raise UnsupportedFeature(self.tok.text, self.tok.line, self.tok.column)
        return Iri(self.iri())

    # -- grammar ---------------------------------------------------------
    def parse(self) -> QueryAst:
        while self.is_word("PREFIX"):
            self.advance()
            tok = self.tok
            if tok.kind != "pname" or not tok.text.endswith(":"):
                self.fail("a prefix name ending in ':'")
            self.advance()
            if self.tok.kind != "iri":
                self.fail("an <iri>")
            self.ast.prefixes[tok.text[:-1]] = self.advance().text[1:-1]
        self.select()
        if self.is_word("WHERE"):
            self.advance()
        self.where()
        if self.is_word("GROUP"):
            self.advance()
            self.word("BY")
            self.ast.group_by.append(self.var())
            while self.tok.kind == "var":
                self.ast.group_by.append(self.var())
        if self.is_word("HAVING"):
            self.advance()
            self.punct("(")
            var = self.count_distinct()
            if self.tok.kind != "cmp":
                self.fail("a comparison operator")
            cmp = self.advance().text
            if self.tok.kind != "int":
                self.fail("an integer")
            value = int(self.advance().text)
            self.punct(")")
            self.ast.having = Having(var, cmp, value)
        if self.tok.kind != "eof":
            self.fail("end of query")
        self.check()
        return self.ast

    def count_distinct(self) -> str:
        self.word("COUNT")
        self.punct("(")
        if not self.is_word("DISTINCT"):
            raise UnsupportedFeature("COUNT without DISTINCT", self.tok.line, self.tok.column)
        self.advance()
        var = self.var()
        self.punct(")")
        return var

    def select(self) -> None:
        self.word("SELECT")
        while True:
            if self.tok.kind == "var":
                self.ast.projection.append(self.var())
            elif self.at_punct("("):
                self.advance()
                var = self.count_distinct()
                self.word("AS")
                alias = self.var(track=False)
                self.punct(")")
                self.ast.projection.append(CountDistinct(var, alias))
            elif self.at_punct("*"):
                raise UnsupportedFeature("*", self.tok.line, self.tok.column)
            else:
                break
        if not self.ast.projection:
            self.fail("a projected variable")

    def where(self) -> None:
        self.punct("{")
        while not self.at_punct("}"):
            if self.is_word("FILTER"):
                self.filter()
            elif self.tok.kind in ("var", "pname", "iri", "int"):
                self.triples()
            else:
                self.fail("a triple pattern, FILTER or '}'")
        self.advance()

    def triples(self) -> None:
        subject = self.term()
        while True:
            if self.tok.kind == "word" and self.tok.text == "a":
                raise UnsupportedFeature("a", self.tok.line, self.tok.column)
            predicate = self.term()
            obj = self.term()
            self.ast.patterns.append(TriplePattern(subject, predicate, obj))
            if not self.at_punct(";"):
                break
            self.advance()
            if self.at_punct(".") or self.at_punct("}"):
                break
        if self.at_punct("."):
            self.advance()
        elif not (self.at_punct("}") or self.is_word("FILTER")):
            self.fail("'.', ';' or '}'")

    def filter(self) -> None:
        self.advance()
        self.punct("(")
        self.word("STRSTARTS")
        self.punct("(")
        self.word("STR")
        self.punct("(")
        var = self.var()
        self.punct(")")
        self.punct(",")
        self.word("STR")
        self.punct("(")
        prefix = self.iri()
        self.punct(")")
        self.punct(")")
        self.punct(")")
        if self.at_punct("."):
            self.advance()
        self.ast.filters.append(PrefixFilter(var, prefix))

    def check(self) -> None:
        bound = set(self.ast.pattern_variables())
        for name, tok in self.var_sites:
            if name not in bound:
                raise QuerySyntax(tok.line, tok.column, "a variable used in a triple pattern", "?" + name)
        if self.ast.grouped:
            groups = set(self.ast.group_by)
            for p in self.ast.projection:
                if isinstance(p, str) and p not in groups:
                    raise QuerySyntax(self.tok.line, self.tok.column,
                                      f"?{p} in GROUP BY when aggregating")
        aliases = [p.alias for p in self.ast.aggregates]
        clash = set(aliases) & (bound | set(self.ast.projection))
        if clash or len(set(aliases)) != len(aliases):
            raise QuerySyntax(self.tok.line, self.tok.column, "a fresh alias variable")


def parse_query(text: str) -> QueryAst:
    """Parse query text into a :class:`QueryAst`."""
    return _Parser(text).parse()
