"""Regular-path enumeration relating security aspects to security checks.

An aspect and a check are related when two paths exist between them: one
over the security model (counteracted threat, enabling weakness, optional
descent through the weakness hierarchy, detecting check) and one over the
system model (specification element, element type, optional reverse walk
along compromise propagation, analyzing check). Enumeration is exhaustive
over acyclic paths and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .model import (
    EdgeKind,
    GraphEdge,
    KnowledgeGraph,
    NodeKind,
)


class Direction(str, Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


class Multiplicity(str, Enum):
    ONE = "exactly-one"
    STAR = "zero-or-more"


# Only the two hierarchical/propagation kinds may repeat on a path.
_STARRABLE = (EdgeKind.PARENT_OF, EdgeKind.ICC)


@dataclass(frozen=True)
class PathStep:
    edge_kind: EdgeKind
    direction: Direction
    multiplicity: Multiplicity = Multiplicity.ONE

    def __post_init__(self) -> None:
        if self.multiplicity is Multiplicity.STAR and self.edge_kind not in _STARRABLE:
            raise ValueError(
                f"zero-or-more is only allowed for "
                f"{' and '.join(k.value for k in _STARRABLE)}"
            )


@dataclass(frozen=True)
class PathPattern:
    steps: tuple[PathStep, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("a path pattern needs at least one step")


SECURITY_PATTERN = PathPattern(
    (
        PathStep(EdgeKind.COUNTERACTS, Direction.FORWARD),
        PathStep(EdgeKind.ENABLES, Direction.REVERSE),
        PathStep(EdgeKind.PARENT_OF, Direction.FORWARD, Multiplicity.STAR),
        PathStep(EdgeKind.DETECTS, Direction.REVERSE),
    )
)

SYSTEM_PATTERN = PathPattern(
    (
        PathStep(EdgeKind.SPECIFIED_BY, Direction.FORWARD),
        PathStep(EdgeKind.APPLIES_TO, Direction.FORWARD),
        PathStep(EdgeKind.ICC, Direction.REVERSE, Multiplicity.STAR),
        PathStep(EdgeKind.ANALYZES, Direction.REVERSE),
    )
)

DEFAULT_MAX_EDGES = 64


@dataclass(frozen=True)
class TraversedEdge:
    edge: GraphEdge
    direction: Direction

    @property
    def endpoint(self) -> str:
        return self.edge.target if self.direction is Direction.FORWARD else self.edge.source


@dataclass(frozen=True)
class MatchedPath:
    nodes: tuple[str, ...]
    edges: tuple[TraversedEdge, ...]

    @property
    def length(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Relationship:
    aspect_id: str
    check_id: str
    security_paths: tuple[MatchedPath, ...]
    system_paths: tuple[MatchedPath, ...]

    @property
    def shortest_security(self) -> int:
        return self.security_paths[0].length

    @property
    def shortest_system(self) -> int:
        return self.system_paths[0].length

    @property
    def shortest_total(self) -> int:
        return self.shortest_security + self.shortest_system


def _candidate_steps(
    graph: KnowledgeGraph, node: str, step: PathStep
) -> Iterator[TraversedEdge]:
    if step.direction is Direction.FORWARD:
        for edge in graph.out_edges(node, step.edge_kind):
            yield TraversedEdge(edge, Direction.FORWARD)
    else:
        for edge in graph.in_edges(node, step.edge_kind):
            yield TraversedEdge(edge, Direction.REVERSE)


def _walk(
    graph: KnowledgeGraph,
    node: str,
    step_index: int,
    pattern: PathPattern,
    end: Optional[str],
    nodes: list[str],
    edges: list[TraversedEdge],
    node_simple: bool,
    max_edges: int,
) -> Iterator[MatchedPath]:
    """Depth-first expansion of the pattern; yields complete matches."""
    if step_index == len(pattern.steps):
        if end is None or node == end:
            yield MatchedPath(tuple(nodes), tuple(edges))
        return

    step = pattern.steps[step_index]
    if step.multiplicity is Multiplicity.STAR:
        # zero occurrences: move on without consuming an edge
        yield from _walk(
            graph, node, step_index + 1, pattern, end,
            nodes, edges, node_simple, max_edges,
        )
    if len(edges) >= max_edges:
        return
    for traversed in _candidate_steps(graph, node, step):
        target = traversed.endpoint
        if node_simple:
            if target in nodes:
                continue
        elif traversed.edge in (t.edge for t in edges):
            continue
        nodes.append(target)
        edges.append(traversed)
        next_index = step_index if step.multiplicity is Multiplicity.STAR else step_index + 1
        yield from _walk(
            graph, target, next_index, pattern, end,
            nodes, edges, node_simple, max_edges,
        )
        nodes.pop()
        edges.pop()


def _path_sort_key(path: MatchedPath) -> tuple[int, tuple[str, ...]]:
    return (path.length, path.nodes)


def enumerate_paths(
    graph: KnowledgeGraph,
    start: str,
    pattern: PathPattern,
    end: Optional[str] = None,
    node_simple: bool = True,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> list[MatchedPath]:
    """All acyclic paths from `start` matching `pattern`.

    With `node_simple` (the default) a path never revisits a node; with
    ``node_simple=False`` it never reuses a directed edge, which admits
    back-and-forth walks over mutual propagation pairs. Results end at
    `end` when given and are sorted by (length, node-id sequence).
    `max_edges` is a safety cap against pathological synthetic inputs.
    """
    graph.node(start)
    found = _walk(graph, start, 0, pattern, end, [start], [], node_simple, max_edges)
    unique = {(path.nodes, path.edges): path for path in found}
    return sorted(unique.values(), key=_path_sort_key)


def _first_match(
    graph: KnowledgeGraph,
    start: str,
    pattern: PathPattern,
    end: str,
    node_simple: bool,
    max_edges: int,
) -> bool:
    walk = _walk(graph, start, 0, pattern, end, [start], [], node_simple, max_edges)
    return next(walk, None) is not None


def related(
    graph: KnowledgeGraph,
    aspect_id: str,
    check_id: str,
    node_simple: bool = True,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> bool:
    """True iff a security-model and a system-model path both exist.

    Short-circuits on the first witness per pattern.
    """
    graph.expect_kind(aspect_id, NodeKind.SECURITY_ASPECT)
    graph.expect_kind(check_id, NodeKind.SECURITY_CHECK)
    return _first_match(
        graph, aspect_id, SECURITY_PATTERN, check_id, node_simple, max_edges
    ) and _first_match(
        graph, aspect_id, SYSTEM_PATTERN, check_id, node_simple, max_edges
    )


def relationship(
    graph: KnowledgeGraph,
    aspect_id: str,
    check_id: str,
    node_simple: bool = True,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> Optional[Relationship]:
    """Full path enumeration for one pair, or None when unrelated."""
    graph.expect_kind(aspect_id, NodeKind.SECURITY_ASPECT)
    graph.expect_kind(check_id, NodeKind.SECURITY_CHECK)
    security = enumerate_paths(
        graph, aspect_id, SECURITY_PATTERN, check_id, node_simple, max_edges
    )
    if not security:
        return None
    system = enumerate_paths(
        graph, aspect_id, SYSTEM_PATTERN, check_id, node_simple, max_edges
    )
    if not system:
        return None
    return Relationship(aspect_id, check_id, tuple(security), tuple(system))


def provider_name(graph: KnowledgeGraph, node_id: str) -> str:
    """Name of the DSL/analyzer providing an aspect or check ('' if none)."""
    providers = graph.in_edges(node_id, EdgeKind.PROVIDES)
    if not providers:
        return ""
    return graph.node(providers[0].source).name


def all_relationships(
    graph: KnowledgeGraph,
    node_simple: bool = True,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> list[Relationship]:
    """One Relationship per related (aspect, check) pair.

    Ordered by (providing DSL name, aspect name, providing analyzer name,
    check name); pairs are independent, so the result only depends on the
    aspects, checks and shared models in the graph.
    """
    aspects = sorted(
        graph.nodes_of_kind(NodeKind.SECURITY_ASPECT),
        key=lambda node: (provider_name(graph, node.id), node.name, node.id),
    )
    checks = sorted(
        graph.nodes_of_kind(NodeKind.SECURITY_CHECK),
        key=lambda node: (provider_name(graph, node.id), node.name, node.id),
    )
    results: list[Relationship] = []
    for aspect in aspects:
        for check in checks:
            pair = relationship(graph, aspect.id, check.id, node_simple, max_edges)
            if pair is not None:
                results.append(pair)
    return results
