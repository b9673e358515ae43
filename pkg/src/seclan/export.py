"""Rendering of corpora and computed relationships.

Produces a single self-contained machine-readable relationship bundle
(schema version "1") for the interactive explorer, and a static HTML site
with one page per DSL, analyzer, and relationship. Both outputs are
byte-deterministic for identical inputs.
"""

from __future__ import annotations

import html
import json
from pathlib import Path
from typing import Sequence, Union

from .descriptions import (
    DescriptionDocument,
    analyzer_node_id,
    aspect_node_id,
    check_node_id,
    dsl_node_id,
    element_node_id,
)
from .cwe import WeaknessRecord
from .metrics import CorpusStats
from .model import (
    GraphNode,
    ICC_RELATIONS,
    KnowledgeGraph,
    NodeKind,
    SEMANTIC_RELATIONS,
    THREATENS,
    slugify,
)
from .relations import Direction, MatchedPath, Relationship

BUNDLE_SUFFIX = ".seclan-bundle.json"
SCHEMA_VERSION = "1"


# -- canonical chain rendering ------------------------------------------------


def node_label(node: GraphNode) -> str:
    """Display label: weaknesses show their CWE id, others their name."""
    if node.kind is NodeKind.WEAKNESS:
        return node.id.split("/", 1)[1]
    return node.name


def chain_text(graph: KnowledgeGraph, path: MatchedPath) -> str:
    """Path as ``A -[kind]-> B`` / ``A <-[kind]- B`` chain text."""
    parts = [node_label(graph.node(path.nodes[0]))]
    for traversed, target in zip(path.edges, path.nodes[1:]):
        kind = traversed.edge.kind.value
        if traversed.direction is Direction.FORWARD:
            parts.append(f" -[{kind}]-> ")
        else:
            parts.append(f" <-[{kind}]- ")
        parts.append(node_label(graph.node(target)))
    return "".join(parts)


# -- relationship bundle -------------------------------------------------------


def path_to_json(path: MatchedPath) -> list[dict]:
    """One entry per node; all but the last carry the outgoing step."""
    entries = []
    for index, node_id in enumerate(path.nodes):
        if index < len(path.edges):
            traversed = path.edges[index]
            entries.append(
                {
                    "nodeId": node_id,
                    "edgeKind": traversed.edge.kind.value,
                    "direction": traversed.direction.value,
                }
            )
        else:
            entries.append({"nodeId": node_id, "edgeKind": None, "direction": None})
    return entries


def _document_to_json(doc: DescriptionDocument) -> dict:
    entry: dict = {
        "name": doc.name,
        "description": doc.description,
        "categories": list(doc.categories),
        "references": list(doc.references),
        "dsl": None,
        "analyzer": None,
    }
    if doc.is_dsl:
        entry["dsl"] = {
            "nodeId": dsl_node_id(doc),
            "specifications": [
                {
                    "name": spec.name,
                    "description": spec.description,
                    "elements": [
                        {
                            "nodeId": element_node_id(doc.name, element.name),
                            "name": element.name,
                            "description": element.description,
                            "appliesTo": list(element.applies_to),
                        }
                        for element in spec.elements
                    ],
                    "aspects": [
                        {
                            "nodeId": aspect_node_id(doc.name, aspect.name),
                            "name": aspect.name,
                            "description": aspect.description,
                            "specifiedBy": list(aspect.specified_by),
                            "counteracts": list(aspect.counteracts),
                            "categories": list(aspect.categories),
                        }
                        for aspect in spec.aspects
                    ],
                }
                for spec in doc.specifications
            ],
        }
    if doc.is_analyzer:
        entry["analyzer"] = {
            "nodeId": analyzer_node_id(doc),
            "checks": [
                {
                    "nodeId": check_node_id(doc.name, check.name),
                    "name": check.name,
                    "description": check.description,
                    "analyzes": list(check.analyzes),
                    "detects": list(check.detects),
                    "categories": list(check.categories),
                }
                for check in doc.checks
            ],
        }
    return entry


def _weakness_to_json(graph: KnowledgeGraph, records: Sequence[WeaknessRecord]
                      ) -> list[dict]:
    by_id = {record.id: record for record in records}
    entries = []
    for node in graph.nodes_of_kind(NodeKind.WEAKNESS):
        cwe_id = node.id.split("/", 1)[1]
        record = by_id.get(cwe_id)
        entries.append(
            {
                "nodeId": node.id,
                "id": cwe_id,
                "name": node.name,
                "description": node.description,
                "abstraction": record.abstraction if record else None,
                "parents": list(record.parents) if record else [],
                "scopes": list(record.scopes) if record else [],
            }
        )
    return entries


def relationship_refs(
    documents: Sequence[DescriptionDocument],
) -> tuple[dict[str, dict], dict[str, dict]]:
    """Node-id keyed aspect and check references for bundle entries."""
    aspect_refs: dict[str, dict] = {}
    check_refs: dict[str, dict] = {}
    for doc in documents:
        for aspect in doc.aspects:
            aspect_refs[aspect_node_id(doc.name, aspect.name)] = {
                "document": doc.name,
                "specification": doc.specification_of(aspect.name),
                "name": aspect.name,
            }
        for check in doc.checks:
            check_refs[check_node_id(doc.name, check.name)] = {
                "document": doc.name,
                "name": check.name,
            }
    return aspect_refs, check_refs


def relationship_to_json(
    pair: Relationship,
    aspect_refs: dict[str, dict],
    check_refs: dict[str, dict],
) -> dict:
    return {
        "aspectRef": aspect_refs[pair.aspect_id],
        "checkRef": check_refs[pair.check_id],
        "securityPaths": [path_to_json(p) for p in pair.security_paths],
        "systemPaths": [path_to_json(p) for p in pair.system_paths],
        "shortestSecurity": pair.shortest_security,
        "shortestSystem": pair.shortest_system,
        "shortestTotal": pair.shortest_total,
    }


def bundle_dict(
    graph: KnowledgeGraph,
    relationships: Sequence[Relationship],
    stats: CorpusStats,
    documents: Sequence[DescriptionDocument],
    catalog: Sequence[WeaknessRecord] = (),
) -> dict:
    """The relationship bundle as a JSON-ready dictionary."""
    aspect_refs, check_refs = relationship_refs(documents)

    return {
        "schemaVersion": SCHEMA_VERSION,
        "objectives": [
            {"nodeId": node.id, "name": node.name}
            for node in graph.nodes_of_kind(NodeKind.SECURITY_OBJECTIVE)
        ],
        "threats": [
            {
                "nodeId": node.id,
                "name": node.name,
                "threatens": list(THREATENS.get(node.name, ())),
            }
            for node in graph.nodes_of_kind(NodeKind.THREAT)
        ],
        "elementTypes": [
            {"nodeId": node.id, "name": node.name}
            for node in graph.nodes_of_kind(NodeKind.ELEMENT_TYPE)
        ],
        "weaknesses": _weakness_to_json(graph, catalog),
        "documents": [_document_to_json(doc) for doc in documents],
        "relationships": [
            relationship_to_json(pair, aspect_refs, check_refs)
            for pair in relationships
        ],
        "stats": stats.to_json(),
    }


def export_bundle(
    graph: KnowledgeGraph,
    relationships: Sequence[Relationship],
    stats: CorpusStats,
    documents: Sequence[DescriptionDocument],
    out: Union[str, Path],
    catalog: Sequence[WeaknessRecord] = (),
) -> Path:
    """Write the bundle file and return its path."""
    out = Path(out)
    data = bundle_dict(graph, relationships, stats, documents, catalog)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    return out


# -- static site ----------------------------------------------------------------

_CSS = """body { font-family: Georgia, serif; margin: 2rem auto; max-width: 60rem;
       color: #1c1c1c; line-height: 1.5; padding: 0 1rem; }
nav { border-bottom: 1px solid #999; padding-bottom: .5rem; margin-bottom: 1.5rem; }
nav a { margin-right: 1rem; }
h1, h2, h3 { font-family: Helvetica, Arial, sans-serif; }
code, .chain { font-family: ui-monospace, Menlo, Consolas, monospace; }
.chain { display: block; background: #f5f3ef; border-left: 3px solid #8a7e66;
         padding: .4rem .6rem; margin: .3rem 0; overflow-x: auto; }
table { border-collapse: collapse; margin: 1rem 0; }
td, th { border: 1px solid #bbb; padding: .25rem .6rem; text-align: left; }
.muted { color: #666; }
"""


def _page(title: str, body: str, root: str = "") -> str:
    nav = (
        f'<nav><a href="{root}index.html">Overview</a>'
        f'<a href="{root}model.html">Model</a>'
        f'<a href="{root}relationships.html">Relationships</a></nav>'
    )
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        f"<title>{html.escape(title)}</title>\n"
        f'<link rel="stylesheet" href="{root}style.css">\n'
        "</head>\n<body>\n"
        f"{nav}\n<main>\n{body}\n</main>\n</body>\n</html>\n"
    )


def _doc_page_name(prefix: str, doc: DescriptionDocument) -> str:
    return f"{prefix}-{slugify(doc.name)}.html"


def _relationship_page_name(pair: Relationship) -> str:
    aspect = pair.aspect_id.split("/", 1)[1].replace("/", "--")
    check = pair.check_id.split("/", 1)[1].replace("/", "--")
    return f"rel-{aspect}--{check}.html"


def _weakness_label(graph: KnowledgeGraph, cwe_id: str) -> str:
    node_id = f"cwe/{cwe_id}"
    if graph.has_node(node_id):
        node = graph.node(node_id)
        if node.name != cwe_id:
            return f"{cwe_id}: {node.name}"
    return cwe_id


def _chain_block(graph: KnowledgeGraph, path: MatchedPath) -> str:
    return f'<span class="chain">{html.escape(chain_text(graph, path))}</span>'


def export_html(
    graph: KnowledgeGraph,
    relationships: Sequence[Relationship],
    stats: CorpusStats,
    documents: Sequence[DescriptionDocument],
    out: Union[str, Path],
) -> Path:
    """Write the static site into directory `out`; returns the directory."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "style.css").write_text(_CSS, encoding="utf-8")

    dsl_docs = [doc for doc in documents if doc.is_dsl]
    analyzer_docs = [doc for doc in documents if doc.is_analyzer]
    rel_by_aspect: dict[str, list[Relationship]] = {}
    rel_by_check: dict[str, list[Relationship]] = {}
    for pair in relationships:
        rel_by_aspect.setdefault(pair.aspect_id, []).append(pair)
        rel_by_check.setdefault(pair.check_id, []).append(pair)

    # index ------------------------------------------------------------------
    sections = ["<h1>Security design languages and code analyzers</h1>"]
    sections.append(
        f"<p>{len(documents)} described documents, "
        f"{len(relationships)} aspect/check relationships.</p>"
    )
    if dsl_docs:
        sections.append("<h2>Security DSLs</h2><ul>")
        for doc in dsl_docs:
            sections.append(
                f'<li><a href="{_doc_page_name("dsl", doc)}">'
                f"{html.escape(doc.name)}</a> "
                f'<span class="muted">{len(doc.aspects)} aspects, '
                f"{len(doc.elements)} specification elements</span></li>"
            )
        sections.append("</ul>")
    if analyzer_docs:
        sections.append("<h2>Security analyzers</h2><ul>")
        for doc in analyzer_docs:
            sections.append(
                f'<li><a href="{_doc_page_name("analyzer", doc)}">'
                f"{html.escape(doc.name)}</a> "
                f'<span class="muted">{len(doc.checks)} checks</span></li>'
            )
        sections.append("</ul>")
    (out / "index.html").write_text(
        _page("Overview", "\n".join(sections)), encoding="utf-8"
    )

    # model reference ----------------------------------------------------------
    body = ["<h1>Built-in security and system model</h1>"]
    body.append("<h2>Security objectives</h2><ul>")
    for node in graph.nodes_of_kind(NodeKind.SECURITY_OBJECTIVE):
        body.append(f"<li>{html.escape(node.name)}</li>")
    body.append("</ul><h2>Threats</h2><table><tr><th>Threat</th>"
                "<th>Threatens</th></tr>")
    for node in graph.nodes_of_kind(NodeKind.THREAT):
        objectives = ", ".join(THREATENS.get(node.name, ()))
        body.append(
            f"<tr><td>{html.escape(node.name)}</td>"
            f"<td>{html.escape(objectives)}</td></tr>"
        )
    body.append("</table><h2>Element types</h2><ul>")
    for node in graph.nodes_of_kind(NodeKind.ELEMENT_TYPE):
        body.append(f'<li id="et-{node.id.split("/", 1)[1]}">'
                    f"{html.escape(node.name)}</li>")
    body.append(
        "</ul><h2>If compromised, also compromised</h2>"
        "<table><tr><th>Compromised</th><th>Also compromised</th></tr>"
    )
    for source, target in ICC_RELATIONS:
        body.append(f"<tr><td>{source}</td><td>{target}</td></tr>")
    body.append(
        "</table><h2>Semantic relations</h2>"
        "<table><tr><th>Source</th><th>Relation</th><th>Target</th></tr>"
    )
    for source, verb, target in SEMANTIC_RELATIONS:
        body.append(f"<tr><td>{source}</td><td>{verb}</td><td>{target}</td></tr>")
    body.append("</table>")
    (out / "model.html").write_text(
        _page("Model", "\n".join(body)), encoding="utf-8"
    )

    # per-document pages --------------------------------------------------------
    for doc in dsl_docs:
        body = [f"<h1>{html.escape(doc.name)}</h1>",
                f"<p>{html.escape(doc.description)}</p>"]
        if doc.categories:
            body.append(
                f'<p class="muted">Categories: '
                f"{html.escape(', '.join(doc.categories))}</p>"
            )
        if doc.references:
            body.append("<h2>References</h2><ul>")
            body.extend(f"<li>{html.escape(ref)}</li>" for ref in doc.references)
            body.append("</ul>")
        for spec in doc.specifications:
            body.append(f"<h2>{html.escape(spec.name)}</h2>")
            body.append(f"<p>{html.escape(spec.description)}</p>")
            if spec.elements:
                body.append("<h3>Specification elements</h3><table>"
                            "<tr><th>Element</th><th>Applies to</th>"
                            "<th>Description</th></tr>")
                for element in spec.elements:
                    targets = ", ".join(
                        f'<a href="model.html#et-{t.lower()}">{t}</a>'
                        for t in element.applies_to
                    )
                    body.append(
                        f"<tr><td>{html.escape(element.name)}</td>"
                        f"<td>{targets}</td>"
                        f"<td>{html.escape(element.description)}</td></tr>"
                    )
                body.append("</table>")
            for aspect in spec.aspects:
                body.append(f"<h3>Aspect: {html.escape(aspect.name)}</h3>")
                body.append(f"<p>{html.escape(aspect.description)}</p>")
                body.append(
                    "<p>Specified by: "
                    f"{html.escape(', '.join(aspect.specified_by))}<br>"
                    "Counteracts: "
                    f"{html.escape(', '.join(aspect.counteracts))}</p>"
                )
                pairs = rel_by_aspect.get(aspect_node_id(doc.name, aspect.name), [])
                if pairs:
                    body.append("<p>Related checks:</p><ul>")
                    for pair in pairs:
                        check = graph.node(pair.check_id)
                        body.append(
                            f'<li><a href="{_relationship_page_name(pair)}">'
                            f"{html.escape(check.name)}</a> "
                            f'<span class="muted">shortest total '
                            f"{pair.shortest_total}</span></li>"
                        )
                    body.append("</ul>")
        (out / _doc_page_name("dsl", doc)).write_text(
            _page(doc.name, "\n".join(body)), encoding="utf-8"
        )

    for doc in analyzer_docs:
        body = [f"<h1>{html.escape(doc.name)}</h1>",
                f"<p>{html.escape(doc.description)}</p>"]
        for check in doc.checks:
            body.append(f"<h2>Check: {html.escape(check.name)}</h2>")
            body.append(f"<p>{html.escape(check.description)}</p>")
            body.append(
                f"<p>Analyzes: {html.escape(', '.join(check.analyzes))}</p>"
            )
            body.append("<p>Detected weaknesses:</p><ul>")
            for cwe_id in check.detects:
                body.append(
                    f"<li>{html.escape(_weakness_label(graph, cwe_id))}</li>"
                )
            body.append("</ul>")
            pairs = rel_by_check.get(check_node_id(doc.name, check.name), [])
            if pairs:
                body.append("<p>Related aspects:</p><ul>")
                for pair in pairs:
                    aspect = graph.node(pair.aspect_id)
                    body.append(
                        f'<li><a href="{_relationship_page_name(pair)}">'
                        f"{html.escape(aspect.name)}</a> "
                        f'<span class="muted">shortest total '
                        f"{pair.shortest_total}</span></li>"
                    )
                body.append("</ul>")
        (out / _doc_page_name("analyzer", doc)).write_text(
            _page(doc.name, "\n".join(body)), encoding="utf-8"
        )

    # relationship index and pages ------------------------------------------------
    body = ["<h1>Relationships</h1>"]
    if relationships:
        body.append("<table><tr><th>Aspect</th><th>Check</th>"
                    "<th>Security paths</th><th>System paths</th>"
                    "<th>Shortest total</th></tr>")
        for pair in relationships:
            aspect = graph.node(pair.aspect_id)
            check = graph.node(pair.check_id)
            body.append(
                f'<tr><td>{html.escape(aspect.name)}</td>'
                f'<td>{html.escape(check.name)}</td>'
                f"<td>{len(pair.security_paths)}</td>"
                f"<td>{len(pair.system_paths)}</td>"
                f'<td><a href="{_relationship_page_name(pair)}">'
                f"{pair.shortest_total}</a></td></tr>"
            )
        body.append("</table>")
    else:
        body.append("<p>No relationships were derived for this corpus.</p>")
    (out / "relationships.html").write_text(
        _page("Relationships", "\n".join(body)), encoding="utf-8"
    )

    for pair in relationships:
        aspect = graph.node(pair.aspect_id)
        check = graph.node(pair.check_id)
        body = [
            f"<h1>{html.escape(aspect.name)} &harr; {html.escape(check.name)}</h1>",
            f"<p>Shortest security path: {pair.shortest_security} edges; "
            f"shortest system path: {pair.shortest_system} edges; "
            f"total: {pair.shortest_total}.</p>",
            f"<h2>Security model paths ({len(pair.security_paths)})</h2>",
        ]
        body.extend(_chain_block(graph, path) for path in pair.security_paths)
        body.append(f"<h2>System model paths ({len(pair.system_paths)})</h2>")
        body.extend(_chain_block(graph, path) for path in pair.system_paths)
        (out / _relationship_page_name(pair)).write_text(
            _page(f"{aspect.name} / {check.name}", "\n".join(body)),
            encoding="utf-8",
        )
    return out
