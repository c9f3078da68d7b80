from __future__ import annotations

from pathlib import Path

import pytest

from ontokg.build import assemble, load_ontology
from ontokg.ingest import load_manifests
from ontokg.model import MetaGraph, default_registry

DATA = Path(__file__).resolve().parents[1] / "src" / "ontokg" / "data"
CORPUS = DATA / "mini_corpus"
FIXTURES = DATA / "fixtures"
QUERIES = DATA / "queries"
GOLDEN = Path(__file__).resolve().parent / "golden"


def build_mini_corpus(**kwargs):
    registry = default_registry()
    manifests = load_manifests(CORPUS / "manifest.json", registry)
    ontologies = [load_ontology(CORPUS / "ontologies" / f"{name}.terms.tsv")
                  for name in ("toy_go", "toy_mondo")]
    meta = MetaGraph.from_tsv(CORPUS / "metagraph.tsv", registry)
    return assemble(manifests, ontologies=ontologies, metagraph=meta, registry=registry, **kwargs)


def build_args(out) -> list:
    return ["build", "--manifest", str(CORPUS / "manifest.json"),
            "--ontology", str(CORPUS / "ontologies" / "toy_go.terms.tsv"),
            "--ontology", str(CORPUS / "ontologies" / "toy_mondo.terms.tsv"),
            "--metagraph", str(CORPUS / "metagraph.tsv"), "--out", str(out)]


@pytest.fixture(scope="session")
def mini_build():
    return build_mini_corpus()


# -- acceptance reporting -------------------------------------------------
_CRITERIA: dict = {}


def pytest_configure(config) -> None:
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    passed = report.passed if report.when == "call" else False
    prev = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, prev[1] and passed)


def pytest_terminal_summary(terminalreporter) -> None:
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}")
