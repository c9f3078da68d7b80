"""Ontology-aligned knowledge-graph assembly and validation."""
__version__ = "0.1.0"
