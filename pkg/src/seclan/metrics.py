"""Corpus-level statistics over descriptions, the graph, and relationships.

Covers element/threat coverage per DSL, check, and analyzer, path length
and path count distributions, element/threat frequencies on shortest
paths, detected-weakness tallies, and category counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .descriptions import DescriptionDocument
from .model import (
    ELEMENT_TYPES,
    EdgeKind,
    KnowledgeGraph,
    NodeKind,
    THREATS,
)
from .relations import Relationship

SECURITY = "security"
SYSTEM = "system"


class EmptyCorpus(Exception):
    """Coverage was requested for a graph without any described documents."""


@dataclass(frozen=True)
class CorpusStats:
    dsl_element_coverage: dict[str, float]
    check_element_coverage: dict[str, float]
    analyzer_element_coverage: dict[str, float]
    dsl_threat_coverage: dict[str, float]
    check_threat_coverage: dict[str, float]
    analyzer_threat_coverage: dict[str, float]
    relationship_count: int
    related_check_fraction: float
    path_length_histogram: dict[str, dict[int, int]]
    path_count_histogram: dict[str, dict[int, int]]
    path_length_mean: dict[str, float]
    shortest_path_length_mean: dict[str, float]
    path_count_mean: dict[str, float]
    shortest_path_element_frequency: dict[str, float]
    shortest_path_threat_frequency: dict[str, float]
    weakness_frequency: dict[str, int]
    category_counts: dict[str, int]

    def to_json(self) -> dict:
        """Machine representation; loses nothing (see from_json)."""
        return {
            "dslElementCoverage": dict(self.dsl_element_coverage),
            "checkElementCoverage": dict(self.check_element_coverage),
            "analyzerElementCoverage": dict(self.analyzer_element_coverage),
            "dslThreatCoverage": dict(self.dsl_threat_coverage),
            "checkThreatCoverage": dict(self.check_threat_coverage),
            "analyzerThreatCoverage": dict(self.analyzer_threat_coverage),
            "relationshipCount": self.relationship_count,
            "relatedCheckFraction": self.related_check_fraction,
            "pathLengthHistogram": _histogram_to_json(self.path_length_histogram),
            "pathCountHistogram": _histogram_to_json(self.path_count_histogram),
            "pathLengthMean": dict(self.path_length_mean),
            "shortestPathLengthMean": dict(self.shortest_path_length_mean),
            "pathCountMean": dict(self.path_count_mean),
            "shortestPathElementFrequency": dict(
                self.shortest_path_element_frequency
            ),
            "shortestPathThreatFrequency": dict(self.shortest_path_threat_frequency),
            "weaknessFrequency": dict(self.weakness_frequency),
            "categoryCounts": dict(self.category_counts),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CorpusStats":
        return cls(
            dsl_element_coverage=dict(data["dslElementCoverage"]),
            check_element_coverage=dict(data["checkElementCoverage"]),
            analyzer_element_coverage=dict(data["analyzerElementCoverage"]),
            dsl_threat_coverage=dict(data["dslThreatCoverage"]),
            check_threat_coverage=dict(data["checkThreatCoverage"]),
            analyzer_threat_coverage=dict(data["analyzerThreatCoverage"]),
            relationship_count=data["relationshipCount"],
            related_check_fraction=data["relatedCheckFraction"],
            path_length_histogram=_histogram_from_json(data["pathLengthHistogram"]),
            path_count_histogram=_histogram_from_json(data["pathCountHistogram"]),
            path_length_mean=dict(data["pathLengthMean"]),
            shortest_path_length_mean=dict(data["shortestPathLengthMean"]),
            path_count_mean=dict(data["pathCountMean"]),
            shortest_path_element_frequency=dict(
                data["shortestPathElementFrequency"]
            ),
            shortest_path_threat_frequency=dict(
                data["shortestPathThreatFrequency"]
            ),
            weakness_frequency=dict(data["weaknessFrequency"]),
            category_counts=dict(data["categoryCounts"]),
        )


def _histogram_to_json(histogram: dict[str, dict[int, int]]) -> dict:
    return {
        model: {str(bucket): count for bucket, count in sorted(buckets.items())}
        for model, buckets in histogram.items()
    }


def _histogram_from_json(data: Mapping) -> dict[str, dict[int, int]]:
    return {
        model: {int(bucket): count for bucket, count in buckets.items()}
        for model, buckets in data.items()
    }


def _fraction(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


@dataclass(frozen=True)
class Coverage:
    dsl_element: dict[str, float]
    check_element: dict[str, float]
    analyzer_element: dict[str, float]
    dsl_threat: dict[str, float]
    check_threat: dict[str, float]
    analyzer_threat: dict[str, float]


def _check_threats(
    graph: KnowledgeGraph, check_id: str, transitive: bool
) -> set[str]:
    """Threat names enabled by the weaknesses a check detects.

    With `transitive`, threats enabled by parent-of ancestors of the
    detected weaknesses count as well.
    """
    weaknesses: set[str] = set()
    frontier = [edge.target for edge in graph.out_edges(check_id, EdgeKind.DETECTS)]
    while frontier:
        weakness = frontier.pop()
        if weakness in weaknesses:
            continue
        weaknesses.add(weakness)
        if transitive:
            frontier.extend(
                edge.source for edge in graph.in_edges(weakness, EdgeKind.PARENT_OF)
            )
    threats: set[str] = set()
    for weakness in weaknesses:
        for edge in graph.out_edges(weakness, EdgeKind.ENABLES):
            threats.add(graph.node(edge.target).name)
    return threats


def coverage(graph: KnowledgeGraph, transitive: bool = False) -> Coverage:
    """Element and threat coverage fractions per DSL, check, and analyzer."""
    dsls = graph.nodes_of_kind(NodeKind.SECURITY_DSL)
    analyzers = graph.nodes_of_kind(NodeKind.SECURITY_ANALYZER)
    checks = graph.nodes_of_kind(NodeKind.SECURITY_CHECK)
    if not dsls and not analyzers:
        raise EmptyCorpus("the graph holds no described DSLs or analyzers")

    dsl_elements: dict[str, set[str]] = {}
    dsl_threats: dict[str, set[str]] = {}
    for dsl in dsls:
        elements: set[str] = set()
        threats: set[str] = set()
        for provided in graph.out_edges(dsl.id, EdgeKind.PROVIDES):
            node = graph.node(provided.target)
            if node.kind is NodeKind.SPECIFICATION_ELEMENT:
                for applies in graph.out_edges(node.id, EdgeKind.APPLIES_TO):
                    elements.add(graph.node(applies.target).name)
            elif node.kind is NodeKind.SECURITY_ASPECT:
                for counteracts in graph.out_edges(node.id, EdgeKind.COUNTERACTS):
                    threats.add(graph.node(counteracts.target).name)
        dsl_elements[dsl.id] = elements
        dsl_threats[dsl.id] = threats

    check_elements = {
        check.id: {
            graph.node(edge.target).name
            for edge in graph.out_edges(check.id, EdgeKind.ANALYZES)
        }
        for check in checks
    }
    check_threats = {
        check.id: _check_threats(graph, check.id, transitive) for check in checks
    }

    analyzer_elements: dict[str, set[str]] = {}
    analyzer_threats: dict[str, set[str]] = {}
    for analyzer in analyzers:
        elements = set()
        threats = set()
        for provided in graph.out_edges(analyzer.id, EdgeKind.PROVIDES):
            elements.update(check_elements.get(provided.target, set()))
            threats.update(check_threats.get(provided.target, set()))
        analyzer_elements[analyzer.id] = elements
        analyzer_threats[analyzer.id] = threats

    def element_rows(per_entity: dict[str, set[str]]) -> dict[str, float]:
        return {
            element: _fraction(
                sum(1 for covered in per_entity.values() if element in covered),
                len(per_entity),
            )
            for element in ELEMENT_TYPES
        }

    def threat_rows(per_entity: dict[str, set[str]]) -> dict[str, float]:
        return {
            threat: _fraction(
                sum(1 for covered in per_entity.values() if threat in covered),
                len(per_entity),
            )
            for threat in THREATS
        }

    return Coverage(
        dsl_element=element_rows(dsl_elements),
        check_element=element_rows(check_elements),
        analyzer_element=element_rows(analyzer_elements),
        dsl_threat=threat_rows(dsl_threats),
        check_threat=threat_rows(check_threats),
        analyzer_threat=threat_rows(analyzer_threats),
    )


@dataclass(frozen=True)
class PathStats:
    length_histogram: dict[str, dict[int, int]]
    count_histogram: dict[str, dict[int, int]]
    length_mean: dict[str, float]
    shortest_length_mean: dict[str, float]
    count_mean: dict[str, float]


def path_stats(relationships: Sequence[Relationship]) -> PathStats:
    """Per-model path-length and path-count distributions with means."""
    length_histogram: dict[str, dict[int, int]] = {SECURITY: {}, SYSTEM: {}}
    count_histogram: dict[str, dict[int, int]] = {SECURITY: {}, SYSTEM: {}}
    lengths: dict[str, list[int]] = {SECURITY: [], SYSTEM: []}
    shortest: dict[str, list[int]] = {SECURITY: [], SYSTEM: []}
    counts: dict[str, list[int]] = {SECURITY: [], SYSTEM: []}

    for pair in relationships:
        for model, paths in ((SECURITY, pair.security_paths),
                             (SYSTEM, pair.system_paths)):
            for path in paths:
                bucket = length_histogram[model]
                bucket[path.length] = bucket.get(path.length, 0) + 1
                lengths[model].append(path.length)
            bucket = count_histogram[model]
            bucket[len(paths)] = bucket.get(len(paths), 0) + 1
            counts[model].append(len(paths))
            shortest[model].append(min(path.length for path in paths))

    def mean(values: list[int]) -> float:
        return sum(values) / len(values) if values else 0.0

    return PathStats(
        length_histogram=length_histogram,
        count_histogram=count_histogram,
        length_mean={model: mean(values) for model, values in lengths.items()},
        shortest_length_mean={
            model: mean(values) for model, values in shortest.items()
        },
        count_mean={model: mean(values) for model, values in counts.items()},
    )


@dataclass(frozen=True)
class ShortestPathFrequencies:
    element: dict[str, float]
    threat: dict[str, float]


def shortest_path_frequencies(
    graph: KnowledgeGraph, relationships: Sequence[Relationship]
) -> ShortestPathFrequencies:
    """How often a node appears on minimal-length paths of a relationship.

    For each element type (threat), the fraction of relationships whose
    minimal-length system (security) paths contain it; when several paths
    tie for minimal length, membership in any of them counts.
    """
    element_hits = {name: 0 for name in ELEMENT_TYPES}
    threat_hits = {name: 0 for name in THREATS}
    for pair in relationships:
        for hits, paths, kind in (
            (threat_hits, pair.security_paths, NodeKind.THREAT),
            (element_hits, pair.system_paths, NodeKind.ELEMENT_TYPE),
        ):
            minimum = min(path.length for path in paths)
            present: set[str] = set()
            for path in paths:
                if path.length != minimum:
                    continue
                for node_id in path.nodes:
                    node = graph.node(node_id)
                    if node.kind is kind:
                        present.add(node.name)
            for name in present:
                hits[name] += 1
    total = len(relationships)
    return ShortestPathFrequencies(
        element={name: _fraction(count, total) for name, count in element_hits.items()},
        threat={name: _fraction(count, total) for name, count in threat_hits.items()},
    )


def weakness_frequency(
    graph: KnowledgeGraph,
    documents: Optional[Sequence[DescriptionDocument]] = None,
    category: Optional[str] = None,
) -> dict[str, int]:
    """Number of checks detecting each weakness, most detected first.

    With `category`, only checks carrying that category tag (directly or
    via their document) are counted; this requires `documents`.
    """
    allowed: Optional[set[str]] = None
    if category is not None:
        if documents is None:
            raise ValueError("category slicing requires the parsed documents")
        from .descriptions import check_node_id

        allowed = set()
        for doc in documents:
            for check in doc.checks:
                if category in check.categories or category in doc.categories:
                    allowed.add(check_node_id(doc.name, check.name))

    counts: dict[str, int] = {}
    for check in graph.nodes_of_kind(NodeKind.SECURITY_CHECK):
        if allowed is not None and check.id not in allowed:
            continue
        for edge in graph.out_edges(check.id, EdgeKind.DETECTS):
            cwe_id = edge.target.split("/", 1)[1]
            counts[cwe_id] = counts.get(cwe_id, 0) + 1
    return dict(sorted(counts.items(), key=lambda item: (-item[1], item[0])))


def category_counts(documents: Sequence[DescriptionDocument]) -> dict[str, int]:
    """Documents per category tag (document, aspect, or check level)."""
    counts: dict[str, int] = {}
    for doc in documents:
        tags = set(doc.categories)
        for aspect in doc.aspects:
            tags.update(aspect.categories)
        for check in doc.checks:
            tags.update(check.categories)
        for tag in tags:
            counts[tag] = counts.get(tag, 0) + 1
    return dict(sorted(counts.items()))


def _zero_stats() -> CorpusStats:
    zero_elements = {name: 0.0 for name in ELEMENT_TYPES}
    zero_threats = {name: 0.0 for name in THREATS}
    zero_models = {SECURITY: 0.0, SYSTEM: 0.0}
    return CorpusStats(
        dsl_element_coverage=dict(zero_elements),
        check_element_coverage=dict(zero_elements),
        analyzer_element_coverage=dict(zero_elements),
        dsl_threat_coverage=dict(zero_threats),
        check_threat_coverage=dict(zero_threats),
        analyzer_threat_coverage=dict(zero_threats),
        relationship_count=0,
        related_check_fraction=0.0,
        path_length_histogram={SECURITY: {}, SYSTEM: {}},
        path_count_histogram={SECURITY: {}, SYSTEM: {}},
        path_length_mean=dict(zero_models),
        shortest_path_length_mean=dict(zero_models),
        path_count_mean=dict(zero_models),
        shortest_path_element_frequency=dict(zero_elements),
        shortest_path_threat_frequency=dict(zero_threats),
        weakness_frequency={},
        category_counts={},
    )


def corpus_stats(
    graph: KnowledgeGraph,
    relationships: Sequence[Relationship],
    documents: Sequence[DescriptionDocument],
    transitive: bool = False,
) -> CorpusStats:
    """Assemble the full statistics bundle for a corpus.

    An empty corpus yields all-zero statistics so exports stay valid.
    """
    if not documents:
        return _zero_stats()

    cov = coverage(graph, transitive=transitive)
    paths = path_stats(relationships)
    frequencies = shortest_path_frequencies(graph, relationships)

    checks = graph.nodes_of_kind(NodeKind.SECURITY_CHECK)
    related_checks = {pair.check_id for pair in relationships}
    return CorpusStats(
        dsl_element_coverage=cov.dsl_element,
        check_element_coverage=cov.check_element,
        analyzer_element_coverage=cov.analyzer_element,
        dsl_threat_coverage=cov.dsl_threat,
        check_threat_coverage=cov.check_threat,
        analyzer_threat_coverage=cov.analyzer_threat,
        relationship_count=len(relationships),
        related_check_fraction=_fraction(len(related_checks), len(checks)),
        path_length_histogram=paths.length_histogram,
        path_count_histogram=paths.count_histogram,
        path_length_mean=paths.length_mean,
        shortest_path_length_mean=paths.shortest_length_mean,
        path_count_mean=paths.count_mean,
        shortest_path_element_frequency=frequencies.element,
        shortest_path_threat_frequency=frequencies.threat,
        weakness_frequency=weakness_frequency(graph),
        category_counts=category_counts(documents),
    )
