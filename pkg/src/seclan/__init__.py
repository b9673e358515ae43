"""SecLan: relate security design DSLs to code-level security analyzers.

A common model for design-time security DSLs and code analyzers, a
knowledge graph over STRIDE threats, security objectives, system element
types, and CWE weaknesses, and a regular-path engine deriving every
relationship between design-level security aspects and implementation
checks, with metrics, HTML export, and a machine-readable bundle.
"""

__version__ = "0.1.0"

from .cwe import (
    DEFAULT_SCOPE_THREATS,
    WeaknessRecord,
    canonical_weakness_id,
    derive_edges,
    load_catalog,
    load_scope_threat_map,
    prune_to_relevant,
)
from .descriptions import (
    AspectDecl,
    CheckDecl,
    DescriptionDocument,
    Diagnostic,
    SpecElementDecl,
    Specification,
    lower,
    parse,
    scan_corpus,
    serialize,
    validate,
)
from .export import bundle_dict, chain_text, export_bundle, export_html
from .metrics import (
    CorpusStats,
    corpus_stats,
    coverage,
    path_stats,
    shortest_path_frequencies,
    weakness_frequency,
)
from .model import (
    ELEMENT_TYPES,
    EdgeKind,
    GraphEdge,
    GraphNode,
    ICC_RELATIONS,
    KnowledgeGraph,
    NodeKind,
    OBJECTIVES,
    SEMANTIC_RELATIONS,
    THREATS,
    build_seed_graph,
    icc_reachable,
    merge,
)
from .pipeline import assemble_graph, load_corpus, scan_and_load
from .relations import (
    MatchedPath,
    PathPattern,
    PathStep,
    Relationship,
    SECURITY_PATTERN,
    SYSTEM_PATTERN,
    all_relationships,
    enumerate_paths,
    related,
    relationship,
)

__all__ = [
    "__version__",
    "AspectDecl",
    "CheckDecl",
    "CorpusStats",
    "DEFAULT_SCOPE_THREATS",
    "DescriptionDocument",
    "Diagnostic",
    "EdgeKind",
    "ELEMENT_TYPES",
    "GraphEdge",
    "GraphNode",
    "ICC_RELATIONS",
    "KnowledgeGraph",
    "MatchedPath",
    "NodeKind",
    "OBJECTIVES",
    "PathPattern",
    "PathStep",
    "Relationship",
    "SECURITY_PATTERN",
    "SEMANTIC_RELATIONS",
    "SpecElementDecl",
    "Specification",
    "SYSTEM_PATTERN",
    "THREATS",
    "WeaknessRecord",
    "all_relationships",
    "assemble_graph",
    "build_seed_graph",
    "bundle_dict",
    "canonical_weakness_id",
    "chain_text",
    "corpus_stats",
    "coverage",
    "derive_edges",
    "enumerate_paths",
    "export_bundle",
    "export_html",
    "icc_reachable",
    "load_catalog",
    "load_corpus",
    "load_scope_threat_map",
    "lower",
    "merge",
    "parse",
    "path_stats",
    "prune_to_relevant",
    "related",
    "relationship",
    "scan_and_load",
    "scan_corpus",
    "serialize",
    "shortest_path_frequencies",
    "validate",
    "weakness_frequency",
]
