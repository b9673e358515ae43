"""Bundle schema, site generation, link integrity, and determinism."""

from __future__ import annotations

import json
import re

import pytest

from seclan.export import (
    bundle_dict,
    chain_text,
    export_bundle,
    export_html,
    path_to_json,
)
from seclan.metrics import corpus_stats
from seclan.pipeline import assemble_graph
from seclan.relations import all_relationships

from conftest import ASPECT_SDP, CHECK_IFA

DEMO_SECURITY_CHAIN = (
    "Secure Data Processing -[counteracts]-> Information Disclosure "
    "<-[enables]- CWE-200 <-[detects]- Information Flow Analysis"
)
DEMO_SYSTEM_CHAIN = (
    "Secure Data Processing -[specifiedBy]-> Responsibility "
    "-[appliesTo]-> InformationFlow <-[analyzes]- Information Flow Analysis"
)


@pytest.fixture(scope="module")
def mini_stats(mini_graph, mini_relationships, mini_corpus):
    return corpus_stats(mini_graph, mini_relationships, mini_corpus.documents)


@pytest.fixture(scope="module")
def mini_bundle(mini_graph, mini_relationships, mini_stats, mini_corpus,
                mini_catalog):
    return bundle_dict(mini_graph, mini_relationships, mini_stats,
                       mini_corpus.documents, mini_catalog)


class TestChainText:
    def test_demo_pair_chains(self, mini_graph, mini_relationships):
        pair = [
            p for p in mini_relationships
            if p.aspect_id == ASPECT_SDP and p.check_id == CHECK_IFA
        ][0]
        assert chain_text(mini_graph, pair.security_paths[0]) == \
            DEMO_SECURITY_CHAIN
        assert chain_text(mini_graph, pair.system_paths[0]) == \
            DEMO_SYSTEM_CHAIN


class TestBundle:
    def test_schema_version(self, mini_bundle):
        assert mini_bundle["schemaVersion"] == "1"

    def test_demo_pair_relationship_entry(self, mini_bundle):
        entries = [
            entry for entry in mini_bundle["relationships"]
            if entry["aspectRef"]["name"] == "Secure Data Processing"
        ]
        assert len(entries) == 1
        entry = entries[0]
        assert entry["aspectRef"] == {
            "document": "SecDFD",
            "specification": "Data Processing Contracts",
            "name": "Secure Data Processing",
        }
        assert entry["checkRef"] == {
            "document": "FlowDroid",
            "name": "Information Flow Analysis",
        }
        assert entry["shortestTotal"] == 6
        assert len(entry["securityPaths"]) == 5
        assert len(entry["systemPaths"]) == 2

    def test_path_entries_carry_direction(self, mini_bundle):
        path = mini_bundle["relationships"][0]["securityPaths"][0]
        assert path[0]["edgeKind"] == "counteracts"
        assert path[0]["direction"] == "forward"
        assert path[1]["direction"] == "reverse"
        assert path[-1]["edgeKind"] is None
        assert path[-1]["direction"] is None

    def test_every_path_node_resolves(self, mini_bundle):
        known = {entry["nodeId"] for entry in mini_bundle["objectives"]}
        known.update(entry["nodeId"] for entry in mini_bundle["threats"])
        known.update(entry["nodeId"] for entry in mini_bundle["elementTypes"])
        known.update(entry["nodeId"] for entry in mini_bundle["weaknesses"])
        for document in mini_bundle["documents"]:
            if document["dsl"]:
                known.add(document["dsl"]["nodeId"])
                for spec in document["dsl"]["specifications"]:
                    known.update(e["nodeId"] for e in spec["elements"])
                    known.update(a["nodeId"] for a in spec["aspects"])
            if document["analyzer"]:
                known.add(document["analyzer"]["nodeId"])
                known.update(
                    c["nodeId"] for c in document["analyzer"]["checks"]
                )
        for entry in mini_bundle["relationships"]:
            for path in entry["securityPaths"] + entry["systemPaths"]:
                for step in path:
                    assert step["nodeId"] in known, step

    def test_weaknesses_embed_prose_and_stubs(self, mini_bundle):
        weaknesses = {entry["id"]: entry for entry in mini_bundle["weaknesses"]}
        assert "sensitive information" in weaknesses["CWE-200"]["description"].lower()
        # stubbed ids referenced by the crypto check are present but empty
        assert weaknesses["CWE-327"]["description"] == ""
        assert weaknesses["CWE-327"]["scopes"] == []

    def test_bundle_reconstructs_paths(self, mini_bundle, mini_graph,
                                       mini_relationships):
        entry = mini_bundle["relationships"][0]
        pair = mini_relationships[0]
        rebuilt = [
            [step["nodeId"] for step in path]
            for path in entry["securityPaths"]
        ]
        assert rebuilt == [list(path.nodes) for path in pair.security_paths]

    def test_empty_corpus_bundle_valid(self):
        from seclan.model import build_seed_graph
        stats = corpus_stats(build_seed_graph(), [], [])
        bundle = bundle_dict(build_seed_graph(), [], stats, [], [])
        assert bundle["documents"] == []
        assert bundle["relationships"] == []
        assert bundle["schemaVersion"] == "1"

    def test_written_file_deterministic(self, tmp_path, mini_graph,
                                        mini_relationships, mini_stats,
                                        mini_corpus, mini_catalog):
        first = export_bundle(mini_graph, mini_relationships, mini_stats,
                              mini_corpus.documents, tmp_path / "a.json",
                              mini_catalog)
        second = export_bundle(mini_graph, mini_relationships, mini_stats,
                               mini_corpus.documents, tmp_path / "b.json",
                               mini_catalog)
        assert first.read_bytes() == second.read_bytes()
        json.loads(first.read_text())  # well-formed


@pytest.fixture(scope="module")
def site(tmp_path_factory, mini_graph, mini_relationships, mini_stats,
         mini_corpus):
    out = tmp_path_factory.mktemp("site")
    export_html(mini_graph, mini_relationships, mini_stats,
                mini_corpus.documents, out)
    return out


class TestSite:
    def test_entry_point_exists(self, site):
        assert (site / "index.html").is_file()
        assert (site / "style.css").is_file()

    def test_dsl_page_lists_aspect_and_threats(self, site):
        text = (site / "dsl-secdfd.html").read_text()
        assert "Secure Data Processing" in text
        for threat in ("Information Disclosure", "Tampering with Data",
                       "Denial of Service", "Repudiation"):
            assert threat in text

    def test_analyzer_page_lists_weakness_names(self, site):
        text = (site / "analyzer-flowdroid.html").read_text()
        assert "CWE-200: Exposure of Sensitive Information" in text
        assert "CWE-454: External Initialization" in text

    def test_relationship_page_renders_demo_chain(self, site):
        import html

        page = site / (
            "rel-secdfd--secure-data-processing--"
            "flowdroid--information-flow-analysis.html"
        )
        text = page.read_text()
        assert html.escape(DEMO_SECURITY_CHAIN) in text
        assert html.escape(DEMO_SYSTEM_CHAIN) in text

    def test_no_dangling_internal_links(self, site):
        pattern = re.compile(r'(?:href|src)="([^"#]+)(?:#[^"]*)?"')
        for page in site.glob("*.html"):
            for target in pattern.findall(page.read_text()):
                if target.startswith(("http:", "https:", "mailto:")):
                    continue
                assert (site / target).is_file(), (page.name, target)

    def test_no_network_fetches(self, site):
        # self-contained site: no external stylesheets, scripts, or links
        for page in site.glob("*.html"):
            text = page.read_text()
            assert 'href="http' not in text
            assert 'src="http' not in text
            assert "<script" not in text

    def test_analyzer_only_corpus_has_no_dsl_section(
        self, tmp_path, mini_catalog, mini_corpus
    ):
        docs = [doc for doc in mini_corpus.documents if not doc.is_dsl]
        graph = assemble_graph(docs, mini_catalog)
        pairs = all_relationships(graph)
        stats = corpus_stats(graph, pairs, docs)
        out = export_html(graph, pairs, stats, docs, tmp_path / "site")
        index = (out / "index.html").read_text()
        assert "Security analyzers" in index
        assert "Security DSLs" not in index

    def test_site_deterministic(self, tmp_path, mini_graph,
                                mini_relationships, mini_stats, mini_corpus):
        first = export_html(mini_graph, mini_relationships, mini_stats,
                            mini_corpus.documents, tmp_path / "one")
        second = export_html(mini_graph, mini_relationships, mini_stats,
                             mini_corpus.documents, tmp_path / "two")
        first_files = sorted(p.name for p in first.iterdir())
        second_files = sorted(p.name for p in second.iterdir())
        assert first_files == second_files
        for name in first_files:
            assert (first / name).read_bytes() == (second / name).read_bytes()
