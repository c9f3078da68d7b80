"""Topological validation metrics for a built knowledge graph."""
from .census import Census, SourceOverlap, source_overlap, type_census
from .degree import DegreeSummary, EmptyGraph, EmptySample, ccdf, degree_summary
from .isomorphic import IsomorphicGroup, IsomorphicSummary, isomorphic_groups, summarize_groups
from .paths import (ClosenessEstimate, IsolatedNode, bfs_distances, closeness_approx, closeness_exact,
                    connected_components, diameter, double_sweep, largest_component)
from .powerlaw import (DegenerateTail, LikelihoodComparison, PowerLawFit, compare_distributions,
                       fit_power_law, sample_discrete_power_law, vuong_test)
from .treewidth import TreewidthBound, elimination_width, treewidth_upper_bound

__all__ = [
    "Census", "ClosenessEstimate", "DegenerateTail", "DegreeSummary", "EmptyGraph", "EmptySample",
    "IsolatedNode", "IsomorphicGroup", "IsomorphicSummary", "LikelihoodComparison", "PowerLawFit",
    "SourceOverlap", "TreewidthBound", "bfs_distances", "ccdf", "closeness_approx", "closeness_exact",
    "compare_distributions", "connected_components", "degree_summary", "diameter", "double_sweep",
    "elimination_width", "fit_power_law", "isomorphic_groups", "largest_component",
    "sample_discrete_power_law", "source_overlap", "summarize_groups", "treewidth_upper_bound",
    "type_census", "vuong_test",
]
