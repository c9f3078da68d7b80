"""Build the bundled miniature corpus and look at what came out.

Run with ``python demos/build_mini_corpus.py``.
"""
# %%
from pathlib import Path

import ontokg
from ontokg.build import assemble, load_ontology
from ontokg.ingest import load_manifests
from ontokg.io import write_graph_dir
from ontokg.model import MetaGraph, default_registry

DATA = Path(ontokg.__file__).parent / "data" / "mini_corpus"

# %% [markdown]
# Five tab-separated sources are filtered, mapped to canonical IRIs and
# merged with two toy ontologies.  Inverse relations are then closed.

# %%
registry = default_registry()
result = assemble(
    load_manifests(DATA / "manifest.json", registry),
    ontologies=[load_ontology(DATA / "ontologies" / f"{name}.terms.tsv") for name in ("toy_go", "toy_mondo")],
    metagraph=MetaGraph.from_tsv(DATA / "metagraph.tsv", registry),
    registry=registry,
)
report = result.report
print("nodes", report.nodes, "edges", report.edges)
print("asserted per source", dict(sorted(report.asserted.items())))
print("inverse-derived", report.inverse_derived, "typing", report.typing, "ontology", report.ontology)

# %%
# Every input row is accounted for: kept or rejected with a reason.
for row in result.rejections.tsv_rows():
    print(row)
assert result.rejections.balanced()

# %%
out = Path("demo_out") / "graph"
write_graph_dir(result.kg, out)
print("wrote", sorted(p.name for p in out.iterdir()))
