"""Run the bundled example queries against the listings fixture graph.

Run with ``python demos/query_listings.py``.
"""
# %%
from pathlib import Path

import ontokg
from ontokg.io import load_graph_dir
from ontokg.query import evaluate, parse_query

DATA = Path(ontokg.__file__).parent / "data"
kg = load_graph_dir(DATA / "fixtures" / "listings")
print(kg.n_nodes, "nodes", len(kg), "edges")

# %% [markdown]
# With direct matching a pattern on a disease class only hits diseases
# annotated with that exact class.  The transitive mode also reaches
# subclasses.

# %%
for path in sorted((DATA / "queries").glob("*.rq")):
    ast = parse_query(path.read_text())
    for transitive in (False, True):
        table = evaluate(kg, ast, transitive_subclass=transitive)
        print(f"{path.name} transitive={transitive}: {len(table.rows)} row(s)")
        for row in table.as_text(kg):
            print("   ", *row)
