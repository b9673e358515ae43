"""Typed knowledge graph of security concepts and system elements.

Defines the node/edge taxonomy, the fixed security-model and system-model
seed data (STRIDE threats, security objectives, element types, compromise
propagation between element types), and an immutable graph assembled from
the seeds plus weakness catalogs and description documents.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from enum import Enum
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Mapping, Optional


class ModelError(Exception):
    """Base class for knowledge-graph construction and query errors."""


class TypingViolation(ModelError):
    """An edge connects node kinds its edge kind does not allow."""


class UnresolvedReference(ModelError):
    """An edge references a node id that does not exist after merging."""


class CycleIntroduced(ModelError):
    """The weakness hierarchy (parent-of edges) would contain a cycle."""


class UnknownNode(ModelError):
    """A query named a node id that is not in the graph."""


class KindMismatch(ModelError):
    """A query named an existing node of the wrong kind."""


class NodeKind(str, Enum):
    SECURITY_OBJECTIVE = "SecurityObjective"
    THREAT = "Threat"
    WEAKNESS = "Weakness"
    ELEMENT_TYPE = "ElementType"
    SECURITY_DSL = "SecurityDsl"
    SECURITY_ASPECT = "SecurityAspect"
    SPECIFICATION_ELEMENT = "SpecificationElement"
    SECURITY_ANALYZER = "SecurityAnalyzer"
    SECURITY_CHECK = "SecurityCheck"


class EdgeKind(str, Enum):
    THREATENS = "threatens"
    ENABLES = "enables"
    PARENT_OF = "parentOf"
    COUNTERACTS = "counteracts"
    DETECTS = "detects"
    SPECIFIED_BY = "specifiedBy"
    APPLIES_TO = "appliesTo"
    ANALYZES = "analyzes"
    ICC = "icc"
    SEMANTIC_RELATION = "semanticRelation"
    PROVIDES = "provides"


# Which (source kind, target kind) pairs each edge kind may connect.
EDGE_TYPING: Mapping[EdgeKind, frozenset[tuple[NodeKind, NodeKind]]] = {
    EdgeKind.THREATENS: frozenset({(NodeKind.THREAT, NodeKind.SECURITY_OBJECTIVE)}),
    EdgeKind.ENABLES: frozenset({(NodeKind.WEAKNESS, NodeKind.THREAT)}),
    EdgeKind.PARENT_OF: frozenset({(NodeKind.WEAKNESS, NodeKind.WEAKNESS)}),
    EdgeKind.COUNTERACTS: frozenset({(NodeKind.SECURITY_ASPECT, NodeKind.THREAT)}),
    EdgeKind.DETECTS: frozenset({(NodeKind.SECURITY_CHECK, NodeKind.WEAKNESS)}),
    EdgeKind.SPECIFIED_BY: frozenset(
        {(NodeKind.SECURITY_ASPECT, NodeKind.SPECIFICATION_ELEMENT)}
    ),
    EdgeKind.APPLIES_TO: frozenset(
        {(NodeKind.SPECIFICATION_ELEMENT, NodeKind.ELEMENT_TYPE)}
    ),
    EdgeKind.ANALYZES: frozenset({(NodeKind.SECURITY_CHECK, NodeKind.ELEMENT_TYPE)}),
    EdgeKind.ICC: frozenset({(NodeKind.ELEMENT_TYPE, NodeKind.ELEMENT_TYPE)}),
    EdgeKind.SEMANTIC_RELATION: frozenset(
        {(NodeKind.ELEMENT_TYPE, NodeKind.ELEMENT_TYPE)}
    ),
    EdgeKind.PROVIDES: frozenset(
        {
            (NodeKind.SECURITY_DSL, NodeKind.SECURITY_ASPECT),
            (NodeKind.SECURITY_DSL, NodeKind.SPECIFICATION_ELEMENT),
            (NodeKind.SECURITY_ANALYZER, NodeKind.SECURITY_CHECK),
        }
    ),
}


THREATS: tuple[str, ...] = (
    "Spoofing",
    "Tampering with Data",
    "Repudiation",
    "Information Disclosure",
    "Denial of Service",
    "Elevation of Privilege",
)

OBJECTIVES: tuple[str, ...] = (
    "Confidentiality",
    "Integrity",
    "Availability",
    "Authenticity",
)

ELEMENT_TYPES: tuple[str, ...] = (
    "Activity",
    "Component",
    "Connection",
    "ControlFlow",
    "Data",
    "Entity",
    "InformationFlow",
    "Node",
    "State",
)

# Conventional STRIDE-to-objective alignment restricted to the four
# objectives above. Documentation/metrics only; never traversed when
# relating aspects to checks.
THREATENS: Mapping[str, tuple[str, ...]] = {
    "Spoofing": ("Authenticity",),
    "Tampering with Data": ("Integrity",),
    "Repudiation": ("Authenticity",),
    "Information Disclosure": ("Confidentiality",),
    "Denial of Service": ("Availability",),
    "Elevation of Privilege": ("Confidentiality", "Integrity", "Availability"),
}

# "If compromised, also compromised": directed propagation between element
# types. 17 directed edges; Data-InformationFlow, InformationFlow-ControlFlow
# and Component-Entity hold in both directions.
ICC_RELATIONS: tuple[tuple[str, str], ...] = (
    ("Data", "InformationFlow"),
    ("InformationFlow", "Data"),
    ("InformationFlow", "ControlFlow"),
    ("ControlFlow", "InformationFlow"),
    ("Activity", "ControlFlow"),
    ("Activity", "InformationFlow"),
    ("Activity", "Data"),
    ("Connection", "InformationFlow"),
    ("Node", "Connection"),
    ("Node", "Component"),
    ("Component", "Entity"),
    ("Entity", "Component"),
    ("Entity", "Data"),
    ("Entity", "Activity"),
    ("Data", "State"),
    ("State", "Activity"),
    ("State", "Entity"),
)

# Semantic relations between element types (verb-labeled). Rendered in
# documentation output; never traversed by the relation engine.
SEMANTIC_RELATIONS: tuple[tuple[str, str, str], ...] = (
    ("Activity", "participates", "InformationFlow"),
    ("Activity", "processes", "Data"),
    ("Activity", "has", "State"),
    ("ControlFlow", "triggers", "Activity"),
    ("ControlFlow", "causes", "InformationFlow"),
    ("InformationFlow", "communicates", "Data"),
    ("Connection", "transmits", "InformationFlow"),
    ("Node", "has", "Connection"),
    ("Node", "runs", "Component"),
    ("Component", "aggregates", "Entity"),
    ("Entity", "holds", "Data"),
    ("Entity", "has", "State"),
    ("Entity", "performs", "Activity"),
    ("Data", "represents", "State"),
)


_SLUG_RE = re.compile(r"[^0-9a-z]+")


def slugify(text: str) -> str:
    """Lowercase `text` and collapse runs of other characters to hyphens."""
    slug = _SLUG_RE.sub("-", text.lower()).strip("-")
    return slug or "-"


def node_id(kind: NodeKind, *names: str) -> str:
    """Stable id for a node: slugified kind plus slugified name parts."""
    return "/".join([kind.value.lower(), *(slugify(name) for name in names)])


def weakness_node_id(cwe_id: str) -> str:
    """Weakness ids keep the canonical CWE spelling: ``cwe/CWE-<n>``."""
    return f"cwe/{cwe_id}"


def threat_id(name: str) -> str:
    return node_id(NodeKind.THREAT, name)


def objective_id(name: str) -> str:
    return node_id(NodeKind.SECURITY_OBJECTIVE, name)


def element_type_id(name: str) -> str:
    return node_id(NodeKind.ELEMENT_TYPE, name)


@dataclass(frozen=True)
class GraphNode:
    id: str
    kind: NodeKind
    name: str
    description: str = ""


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    kind: EdgeKind
    label: Optional[str] = None


def _edge_sort_key(edge: GraphEdge) -> tuple[str, str, str, str]:
    return (edge.kind.value, edge.source, edge.target, edge.label or "")


class KnowledgeGraph:
    """Immutable typed graph; safe to share across concurrent readers.

    Construct via :meth:`build`, :func:`build_seed_graph` or :func:`merge`.
    Construction validates node-id uniqueness, non-empty names, edge
    kind-typing, endpoint resolution, and acyclicity of the parent-of
    subgraph; duplicate edges are collapsed with a recorded warning.
    """

    __slots__ = ("_nodes", "_edges", "_out", "_in", "_warnings")

    def __init__(self) -> None:
        raise TypeError("use KnowledgeGraph.build()")

    @classmethod
    def build(
        cls,
        nodes: Iterable[GraphNode],
        edges: Iterable[GraphEdge],
        warnings: Iterable[str] = (),
    ) -> "KnowledgeGraph":
        collected = list(warnings)
        node_map: dict[str, GraphNode] = {}
        for node in nodes:
            if not node.name:
                raise ModelError(f"node {node.id!r} has an empty name")
            previous = node_map.get(node.id)
            if previous is None:
                node_map[node.id] = node
            elif previous.kind is not node.kind:
                raise TypingViolation(
                    f"node id {node.id!r} declared with kinds "
                    f"{previous.kind.value} and {node.kind.value}"
                )
            elif previous != node:
                collected.append(
                    f"node {node.id!r} declared twice with differing content; "
                    "keeping the first declaration"
                )

        edge_set: dict[tuple[str, str, EdgeKind, Optional[str]], GraphEdge] = {}
        for edge in edges:
            source = node_map.get(edge.source)
            target = node_map.get(edge.target)
            if source is None or target is None:
                missing = edge.source if source is None else edge.target
                raise UnresolvedReference(
                    f"edge {edge.kind.value} {edge.source} -> {edge.target} "
                    f"references unknown node {missing!r}"
                )
            if (source.kind, target.kind) not in EDGE_TYPING[edge.kind]:
                raise TypingViolation(
                    f"edge kind {edge.kind.value} cannot connect "
                    f"{source.kind.value} -> {target.kind.value} "
                    f"({edge.source} -> {edge.target})"
                )
            key = (edge.source, edge.target, edge.kind, edge.label)
            if key in edge_set:
                collected.append(
                    f"duplicate edge collapsed: {edge.kind.value} "
                    f"{edge.source} -> {edge.target}"
                )
            else:
                edge_set[key] = edge

        ordered_edges = tuple(sorted(edge_set.values(), key=_edge_sort_key))
        _check_parent_of_acyclic(ordered_edges)

        out_index: dict[tuple[str, EdgeKind], list[GraphEdge]] = {}
        in_index: dict[tuple[str, EdgeKind], list[GraphEdge]] = {}
        for edge in ordered_edges:
            out_index.setdefault((edge.source, edge.kind), []).append(edge)
            in_index.setdefault((edge.target, edge.kind), []).append(edge)

        graph = object.__new__(cls)
        graph._nodes = node_map
        graph._edges = ordered_edges
        graph._out = {key: tuple(value) for key, value in out_index.items()}
        graph._in = {key: tuple(value) for key, value in in_index.items()}
        graph._warnings = tuple(collected)
        return graph

    @property
    def nodes(self) -> tuple[GraphNode, ...]:
        return tuple(self._nodes[node_id] for node_id in sorted(self._nodes))

    @property
    def edges(self) -> tuple[GraphEdge, ...]:
        return self._edges

    @property
    def warnings(self) -> tuple[str, ...]:
        return self._warnings

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:  # content hash; graphs are immutable
        return hash((frozenset(self._nodes), self._edges))

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node(self, node_id: str) -> GraphNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def expect_kind(self, node_id: str, kind: NodeKind) -> GraphNode:
        node = self.node(node_id)
        if node.kind is not kind:
            raise KindMismatch(
                f"node {node_id!r} is a {node.kind.value}, expected {kind.value}"
            )
        return node

    def nodes_of_kind(self, kind: NodeKind) -> tuple[GraphNode, ...]:
        return tuple(
            self._nodes[node_id]
            for node_id in sorted(self._nodes)
            if self._nodes[node_id].kind is kind
        )

    def out_edges(self, node_id: str, kind: EdgeKind) -> tuple[GraphEdge, ...]:
        return self._out.get((node_id, kind), ())

    def in_edges(self, node_id: str, kind: EdgeKind) -> tuple[GraphEdge, ...]:
        return self._in.get((node_id, kind), ())


def _check_parent_of_acyclic(edges: Iterable[GraphEdge]) -> None:
    sorter: TopologicalSorter[str] = TopologicalSorter()
    for edge in edges:
        if edge.kind is EdgeKind.PARENT_OF:
            sorter.add(edge.target, edge.source)
    try:
        sorter.prepare()
    except CycleError as error:
        cycle = " -> ".join(error.args[1])
        raise CycleIntroduced(f"parent-of cycle: {cycle}") from None


def build_seed_graph() -> KnowledgeGraph:
    """Graph holding only the fixed security-model and system-model seeds."""
    nodes: list[GraphNode] = []
    edges: list[GraphEdge] = []

    for name in OBJECTIVES:
        nodes.append(GraphNode(objective_id(name), NodeKind.SECURITY_OBJECTIVE, name))
    for name in THREATS:
        nodes.append(GraphNode(threat_id(name), NodeKind.THREAT, name))
        for objective in THREATENS[name]:
            edges.append(
                GraphEdge(threat_id(name), objective_id(objective), EdgeKind.THREATENS)
            )
    for name in ELEMENT_TYPES:
        nodes.append(GraphNode(element_type_id(name), NodeKind.ELEMENT_TYPE, name))
    for source, target in ICC_RELATIONS:
        edges.append(
            GraphEdge(element_type_id(source), element_type_id(target), EdgeKind.ICC)
        )
    for source, verb, target in SEMANTIC_RELATIONS:
        edges.append(
            GraphEdge(
                element_type_id(source),
                element_type_id(target),
                EdgeKind.SEMANTIC_RELATION,
                label=verb,
            )
        )
    return KnowledgeGraph.build(nodes, edges)


def merge(
    graph: KnowledgeGraph,
    nodes: Iterable[GraphNode],
    edges: Iterable[GraphEdge],
) -> KnowledgeGraph:
    """Return a new graph extended with `nodes` and `edges`.

    The input graph is left untouched. Nodes re-declared with an identical
    id must keep their kind; duplicate edges collapse with a warning
    recorded on the returned graph.
    """
    return KnowledgeGraph.build(
        [*graph.nodes, *nodes],
        [*graph.edges, *edges],
        warnings=graph.warnings,
    )


def icc_reachable(graph: KnowledgeGraph, origin: str) -> frozenset[str]:
    """Element-type names reachable from `origin` via one or more ICC edges.

    `origin` may be a canonical element-type name or a node id. The origin
    itself is included only if a cycle returns to it.
    """
    origin_id = element_type_id(origin)
    if not graph.has_node(origin_id):
        origin_id = origin
    node = graph.expect_kind(origin_id, NodeKind.ELEMENT_TYPE)

    reached: set[str] = set()
    queue = deque(edge.target for edge in graph.out_edges(node.id, EdgeKind.ICC))
    while queue:
        current = queue.popleft()
        if current in reached:
            continue
        reached.add(current)
        queue.extend(edge.target for edge in graph.out_edges(current, EdgeKind.ICC))
    return frozenset(graph.node(node_id).name for node_id in reached)
