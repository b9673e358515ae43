"""Coverage fractions, path distributions, frequencies, and tallies."""

from __future__ import annotations

import random

import pytest

from seclan.cwe import DEFAULT_SCOPE_THREATS, WeaknessRecord
from seclan.descriptions import parse
from seclan.metrics import (
    SECURITY,
    SYSTEM,
    CorpusStats,
    EmptyCorpus,
    category_counts,
    corpus_stats,
    coverage,
    path_stats,
    shortest_path_frequencies,
    weakness_frequency,
)
from seclan.model import ELEMENT_TYPES, THREATS, build_seed_graph
from seclan.pipeline import assemble_graph
from seclan.relations import all_relationships

from conftest import ASPECT_SDP, CHECK_IFA, CORPUS_DIR
from generators import random_corpus
from oracles import coverage_recount


@pytest.fixture(scope="module")
def demo_pair(mini_relationships):
    pair = [
        p for p in mini_relationships
        if p.aspect_id == ASPECT_SDP and p.check_id == CHECK_IFA
    ]
    assert len(pair) == 1
    return pair[0]


def load_doc(name: str):
    doc, _ = parse(CORPUS_DIR / f"{name}.seclan.json")
    assert doc is not None
    return doc


class TestCoverage:
    def test_single_dsl_threat_coverage(self, mini_catalog):
        graph = assemble_graph([load_doc("secdfd")], mini_catalog)
        cov = coverage(graph)
        assert cov.dsl_threat["Information Disclosure"] == 1.0
        assert cov.dsl_threat["Spoofing"] == 0.0

    def test_two_analyzers_element_coverage(self, mini_catalog):
        docs = [load_doc("flowdroid"), load_doc("cognicrypt")]
        graph = assemble_graph(docs, mini_catalog)
        cov = coverage(graph)
        assert cov.check_element["InformationFlow"] == 0.5
        assert cov.check_element["Activity"] == 0.5
        assert cov.check_element["Data"] == 0.0
        assert cov.analyzer_element["InformationFlow"] == 0.5

    def test_empty_corpus_raises(self):
        with pytest.raises(EmptyCorpus):
            coverage(build_seed_graph())

    def test_all_nine_element_rows_present(self, mini_graph):
        cov = coverage(mini_graph)
        assert set(cov.dsl_element) == set(ELEMENT_TYPES)
        assert set(cov.check_element) == set(ELEMENT_TYPES)
        assert set(cov.dsl_threat) == set(THREATS)

    def test_matches_recount_oracle(self, mini_corpus, mini_catalog, mini_graph):
        cov = coverage(mini_graph)
        recount = coverage_recount(
            mini_corpus.documents, mini_catalog, DEFAULT_SCOPE_THREATS,
            ELEMENT_TYPES, THREATS,
        )
        assert cov.dsl_element == recount["dsl_element"]
        assert cov.check_element == recount["check_element"]
        assert cov.analyzer_element == recount["analyzer_element"]
        assert cov.dsl_threat == recount["dsl_threat"]
        assert cov.check_threat == recount["check_threat"]
        assert cov.analyzer_threat == recount["analyzer_threat"]

    def test_matches_recount_on_random_corpora(self):
        rng = random.Random(3131)
        for _ in range(25):
            documents, catalog = random_corpus(rng)
            graph = assemble_graph(documents, catalog)
            for transitive in (False, True):
                cov = coverage(graph, transitive=transitive)
                recount = coverage_recount(
                    documents, catalog, DEFAULT_SCOPE_THREATS,
                    ELEMENT_TYPES, THREATS, transitive=transitive,
                )
                assert cov.dsl_element == recount["dsl_element"]
                assert cov.check_element == recount["check_element"]
                assert cov.analyzer_element == recount["analyzer_element"]
                assert cov.dsl_threat == recount["dsl_threat"]
                assert cov.check_threat == recount["check_threat"]
                assert cov.analyzer_threat == recount["analyzer_threat"]


class TestTransitiveCoverage:
    CATALOG = [
        WeaknessRecord(id="CWE-10", name="Parent",
                       scopes=("Availability",)),
        WeaknessRecord(id="CWE-11", name="Child", parents=("CWE-10",),
                       scopes=("Integrity",)),
    ]
    DOC = (
        '{"name": "A", "description": "d", "checks": [{"name": "c", '
        '"description": "d", "analyzes": ["Data"], "detects": ["CWE-11"]}]}'
    )

    def test_ancestor_threats_counted_only_transitively(self):
        doc, _ = parse(self.DOC)
        graph = assemble_graph([doc], self.CATALOG)
        direct = coverage(graph)
        assert direct.check_threat["Tampering with Data"] == 1.0
        assert direct.check_threat["Denial of Service"] == 0.0
        transitive = coverage(graph, transitive=True)
        assert transitive.check_threat["Denial of Service"] == 1.0
        assert transitive.analyzer_threat["Denial of Service"] == 1.0

    def test_transitive_changes_only_threat_rows(self):
        doc, _ = parse(self.DOC)
        graph = assemble_graph([doc], self.CATALOG)
        pairs = all_relationships(graph)
        direct = corpus_stats(graph, pairs, [doc], transitive=False)
        transitive = corpus_stats(graph, pairs, [doc], transitive=True)
        direct_json = direct.to_json()
        transitive_json = transitive.to_json()
        changed = {
            key for key in direct_json
            if direct_json[key] != transitive_json[key]
        }
        assert changed == {"checkThreatCoverage", "analyzerThreatCoverage"}

    def test_mini_fixtures_unchanged_by_transitive(
        self, mini_graph, mini_relationships, mini_corpus
    ):
        # ancestor scopes in the mini catalog are subsets of their children's
        direct = corpus_stats(mini_graph, mini_relationships,
                              mini_corpus.documents, transitive=False)
        transitive = corpus_stats(mini_graph, mini_relationships,
                                  mini_corpus.documents, transitive=True)
        assert direct == transitive


class TestPathStats:
    def test_demo_pair_histograms(self, demo_pair):
        stats = path_stats([demo_pair])
        assert stats.length_histogram[SECURITY] == {3: 2, 4: 3}
        assert stats.length_histogram[SYSTEM] == {3: 1, 4: 1}
        assert stats.count_histogram[SECURITY] == {5: 1}
        assert stats.count_histogram[SYSTEM] == {2: 1}
        assert stats.length_mean[SECURITY] == pytest.approx(3.6)
        assert stats.length_mean[SYSTEM] == pytest.approx(3.5)
        assert stats.shortest_length_mean[SECURITY] == 3.0

    def test_empty_relationships(self):
        stats = path_stats([])
        assert stats.length_histogram == {SECURITY: {}, SYSTEM: {}}
        assert stats.count_histogram == {SECURITY: {}, SYSTEM: {}}

    def test_histogram_totals(self, mini_relationships):
        stats = path_stats(mini_relationships)
        for model, selector in (
            (SECURITY, lambda pair: pair.security_paths),
            (SYSTEM, lambda pair: pair.system_paths),
        ):
            total = sum(stats.length_histogram[model].values())
            assert total == sum(
                len(selector(pair)) for pair in mini_relationships
            )
            assert sum(stats.count_histogram[model].values()) == len(
                mini_relationships
            )

    def test_system_buckets_at_least_three(self, mini_relationships):
        stats = path_stats(mini_relationships)
        assert all(bucket >= 3 for bucket in stats.length_histogram[SYSTEM])
        assert all(bucket >= 3 for bucket in stats.length_histogram[SECURITY])


class TestShortestPathFrequencies:
    def test_demo_pair(self, mini_graph, demo_pair):
        frequencies = shortest_path_frequencies(mini_graph, [demo_pair])
        assert frequencies.element["InformationFlow"] == 1.0
        # the Value->Data chain is 4 edges, one longer than minimal
        assert frequencies.element["Data"] == 0.0
        assert frequencies.threat["Information Disclosure"] == 1.0
        assert frequencies.threat["Tampering with Data"] == 1.0
        assert frequencies.threat["Spoofing"] == 0.0

    def test_insensitive_to_enumeration_order(self, mini_graph,
                                              mini_relationships):
        shuffled = list(mini_relationships)
        shuffled.reverse()
        first = shortest_path_frequencies(mini_graph, mini_relationships)
        second = shortest_path_frequencies(mini_graph, shuffled)
        assert first == second


class TestWeaknessFrequency:
    def test_mini_corpus_counts(self, mini_graph):
        frequency = weakness_frequency(mini_graph)
        assert frequency["CWE-327"] == 1
        assert frequency["CWE-200"] == 1
        assert "CWE-668" not in frequency  # never detected directly

    def test_sorted_descending(self, mini_graph):
        values = list(weakness_frequency(mini_graph).values())
        assert values == sorted(values, reverse=True)

    def test_empty_graph(self):
        assert weakness_frequency(build_seed_graph()) == {}

    def test_category_slicing(self, mini_graph, mini_corpus):
        crypto_only = weakness_frequency(
            mini_graph, documents=mini_corpus.documents, category="API"
        )
        assert "CWE-200" not in crypto_only
        assert crypto_only["CWE-327"] == 1
        with pytest.raises(ValueError):
            weakness_frequency(mini_graph, category="API")


class TestCategoryCounts:
    def test_mini_corpus(self, mini_corpus):
        counts = category_counts(mini_corpus.documents)
        assert counts["DPA"] == 2   # SecDFD and the UML sample
        assert counts["API"] == 1
        assert counts["IF"] == 1
        assert counts["IFIA"] == 1


class TestCorpusStats:
    def test_mini_corpus_stats(self, mini_graph, mini_relationships,
                               mini_corpus):
        stats = corpus_stats(mini_graph, mini_relationships,
                             mini_corpus.documents)
        assert stats.relationship_count == 2
        assert stats.related_check_fraction == 0.5
        assert stats.path_length_histogram[SECURITY] == {3: 3, 4: 5}
        assert stats.path_length_histogram[SYSTEM] == {3: 2, 4: 2, 7: 1, 8: 1}

    def test_empty_corpus_zeroed(self):
        stats = corpus_stats(build_seed_graph(), [], [])
        assert stats.relationship_count == 0
        assert stats.related_check_fraction == 0.0
        assert set(stats.dsl_element_coverage) == set(ELEMENT_TYPES)

    def test_json_round_trip(self, mini_graph, mini_relationships,
                             mini_corpus):
        import json

        stats = corpus_stats(mini_graph, mini_relationships,
                             mini_corpus.documents)
        text = json.dumps(stats.to_json())
        assert CorpusStats.from_json(json.loads(text)) == stats
