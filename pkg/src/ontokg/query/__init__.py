"""SPARQL-subset parsing and evaluation."""
from .engine import SolutionTable, evaluate, solutions
from .parser import (CountDistinct, Having, Iri, PrefixFilter, QueryAst, QueryError, QuerySyntax,
                     TriplePattern, UnknownPrefix, UnsupportedFeature, Var, parse_query, tokenize)

__all__ = [
    "CountDistinct", "Having", "Iri", "PrefixFilter", "QueryAst", "QueryError", "QuerySyntax",
    "SolutionTable", "TriplePattern", "UnknownPrefix", "UnsupportedFeature", "Var", "evaluate",
    "parse_query", "solutions", "tokenize",
]
