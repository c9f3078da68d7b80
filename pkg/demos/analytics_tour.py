"""Structural statistics on synthetic graphs where the answer is known.

Run with ``python demos/analytics_tour.py``.
"""
# %%
import networkx as nx
import numpy as np

from ontokg.analytics import (closeness_approx, closeness_exact, compare_distributions, diameter,
                              double_sweep, fit_power_law, sample_discrete_power_law,
                              treewidth_upper_bound)
from ontokg.model import UndirectedGraph

# %% [markdown]
# Power-law tail: draw from a known exponent and recover it.

# %%
rng = np.random.default_rng(7)
sample = sample_discrete_power_law(2.3, 3, 20_000, rng)
fit = fit_power_law(sample)
print(f"alpha={fit.alpha:.3f} x_min={fit.x_min} ks={fit.ks:.4f}")
for name, c in compare_distributions(sample, fit).items():
    print(f"  vs {name}: R={c.R:.1f} p={c.p_value:.3g}")

# %% [markdown]
# Diameter: the double sweep gives a lower bound, the exact mode closes the gap.

# %%
ba = nx.barabasi_albert_graph(5000, 2, seed=1)
g = UndirectedGraph(ba.number_of_nodes(), list(ba.edges()))
lb, a, b = double_sweep(g)
print("double sweep", lb, "exact", diameter(g), "networkx", nx.diameter(ba))

# %% [markdown]
# Closeness from sampled pivots against the exact values.

# %%
est = closeness_approx(g, 256, seed=42)
exact = closeness_exact(g)
print("mean relative error", float(np.mean(np.abs(est.values - exact) / exact)))

# %%
# Treewidth upper bound on a 6x6 grid (true treewidth 6).
grid = nx.convert_node_labels_to_integers(nx.grid_2d_graph(6, 6))
tw = treewidth_upper_bound(UndirectedGraph(36, list(grid.edges())))
print("grid treewidth bound", tw.width)
