"""End-to-end corpus loading: scan, parse, validate, assemble the graph.

Shared by the command-line interface and the test suites so every
consumer builds graphs the same way: seeds first, then the weakness
catalog pruned to the referenced ids (with stubs for unknown ones), then
the lowered description documents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import descriptions as desc
from .cwe import WeaknessRecord, derive_edges, prune_to_relevant
from .descriptions import DescriptionDocument, Diagnostic
from .model import KnowledgeGraph, build_seed_graph, merge


@dataclass
class Corpus:
    documents: list[DescriptionDocument]
    diagnostics: list[Diagnostic]
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not desc.has_errors(self.diagnostics)


def referenced_weaknesses(documents: Iterable[DescriptionDocument]) -> set[str]:
    return {
        cwe_id
        for doc in documents
        for check in doc.checks
        for cwe_id in check.detects
    }


def load_corpus(
    paths: Sequence[Union[str, Path]],
    catalog: Optional[Sequence[WeaknessRecord]] = None,
) -> Corpus:
    """Parse and validate description files; never raises on bad input."""
    documents: list[DescriptionDocument] = []
    diagnostics: list[Diagnostic] = []
    for path in paths:
        document, file_diagnostics = desc.parse(Path(path))
        diagnostics.extend(file_diagnostics)
        if document is not None:
            documents.append(document)
    catalog_ids = None if catalog is None else [record.id for record in catalog]
    diagnostics.extend(desc.validate(documents, catalog_ids))
    return Corpus(documents=documents, diagnostics=diagnostics)


def scan_and_load(
    corpus_dir: Union[str, Path],
    catalog: Optional[Sequence[WeaknessRecord]] = None,
    recursive: bool = False,
) -> Corpus:
    return load_corpus(desc.scan_corpus(corpus_dir, recursive=recursive), catalog)


def assemble_graph(
    documents: Sequence[DescriptionDocument],
    catalog: Sequence[WeaknessRecord],
    scope_map: Optional[Mapping[str, frozenset[str]]] = None,
    warnings: Optional[list[str]] = None,
) -> KnowledgeGraph:
    """Seed graph + relevant weaknesses + lowered documents.

    The catalog is pruned to the weaknesses the documents reference plus
    their hierarchy closure; referenced ids missing from the catalog become
    stub nodes (reported via `warnings`).
    """
    relevant = prune_to_relevant(
        catalog, referenced_weaknesses(documents), warnings=warnings
    )
    weakness_nodes, weakness_edges = derive_edges(relevant, scope_map)
    graph = merge(build_seed_graph(), weakness_nodes, weakness_edges)

    nodes = []
    edges = []
    for document in documents:
        doc_nodes, doc_edges = desc.lower(document)
        nodes.extend(doc_nodes)
        edges.extend(doc_edges)
    return merge(graph, nodes, edges)
