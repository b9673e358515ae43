"""Shared fixtures: the shipped mini corpus, catalog, and assembled graph."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracles/generators helpers

from seclan.cwe import load_catalog
from seclan.pipeline import assemble_graph, scan_and_load
from seclan.relations import all_relationships

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
CORPUS_DIR = FIXTURES / "corpus"
MINI_CATALOG = FIXTURES / "cwe-mini.json"
SAMPLE_CATALOG = FIXTURES / "cwe-sample.json"
SECDFD_FULL = FIXTURES / "samples" / "secdfd-full.seclan.json"

ASPECT_SDP = "securityaspect/secdfd/secure-data-processing"
CHECK_IFA = "securitycheck/flowdroid/information-flow-analysis"
CHECK_CRYPTO = "securitycheck/cognicrypt/crypto-usage-analysis"


@pytest.fixture(scope="session")
def mini_catalog():
    return load_catalog(MINI_CATALOG)


@pytest.fixture(scope="session")
def mini_corpus(mini_catalog):
    corpus = scan_and_load(CORPUS_DIR, mini_catalog)
    assert corpus.ok, [str(d) for d in corpus.diagnostics]
    return corpus


@pytest.fixture(scope="session")
def mini_graph(mini_corpus, mini_catalog):
    return assemble_graph(mini_corpus.documents, mini_catalog)


@pytest.fixture(scope="session")
def mini_relationships(mini_graph):
    return all_relationships(mini_graph)
