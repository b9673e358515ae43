"""Description documents for security DSLs and security analyzers.

Parses the JSON-compliant textual description syntax into documents,
validates single documents and whole corpora with positioned diagnostics,
serializes documents back to canonical text, and lowers validated
documents into knowledge-graph nodes and edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from . import positioned_json as pj
from .cwe import canonical_weakness_id
from .model import (
    EdgeKind,
    ELEMENT_TYPES,
    GraphEdge,
    GraphNode,
    NodeKind,
    THREATS,
    element_type_id,
    node_id,
    slugify,
    weakness_node_id,
)

DESCRIPTION_SUFFIX = ".seclan.json"

ERROR = "error"
WARNING = "warning"

# Space-separated spellings accepted on input, canonical identifier kept.
_ELEMENT_TYPE_ALIASES = {
    "Information Flow": "InformationFlow",
    "Control Flow": "ControlFlow",
}

_DOCUMENT_FIELDS = (
    "name",
    "description",
    "categories",
    "references",
    "specifications",
    "checks",
)
_SPECIFICATION_FIELDS = ("name", "description", "elements", "aspects")
_ELEMENT_FIELDS = ("name", "description", "applies-to")
_ASPECT_FIELDS = ("name", "description", "specified-by", "counteracts", "categories")
_CHECK_FIELDS = ("name", "description", "analyzes", "detects", "categories")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    file: str
    line: int
    column: int
    code: str

    def __str__(self) -> str:
        return (
            f"{self.file}:{self.line}:{self.column}: "
            f"{self.severity}: {self.message} [{self.code}]"
        )


def _error(message: str, file: str, line: int, column: int, code: str) -> Diagnostic:
    return Diagnostic(ERROR, message, file, line, column, code)


def _warning(message: str, file: str, line: int, column: int, code: str) -> Diagnostic:
    return Diagnostic(WARNING, message, file, line, column, code)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diagnostics)


@dataclass(frozen=True)
class SpecElementDecl:
    name: str
    description: str
    applies_to: tuple[str, ...]


@dataclass(frozen=True)
class AspectDecl:
    name: str
    description: str
    specified_by: tuple[str, ...]
    counteracts: tuple[str, ...]
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class Specification:
    name: str
    description: str
    elements: tuple[SpecElementDecl, ...]
    aspects: tuple[AspectDecl, ...]


@dataclass(frozen=True)
class CheckDecl:
    name: str
    description: str
    analyzes: tuple[str, ...]
    detects: tuple[str, ...]
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class DescriptionDocument:
    name: str
    description: str
    categories: tuple[str, ...] = ()
    references: tuple[str, ...] = ()
    specifications: tuple[Specification, ...] = ()
    checks: tuple[CheckDecl, ...] = ()
    source: str = field(default="<string>", compare=False)

    @property
    def elements(self) -> tuple[SpecElementDecl, ...]:
        return tuple(e for spec in self.specifications for e in spec.elements)

    @property
    def aspects(self) -> tuple[AspectDecl, ...]:
        return tuple(a for spec in self.specifications for a in spec.aspects)

    @property
    def is_dsl(self) -> bool:
        return bool(self.specifications)

    @property
    def is_analyzer(self) -> bool:
        return bool(self.checks)

    def specification_of(self, aspect_name: str) -> Optional[str]:
        for spec in self.specifications:
            if any(a.name == aspect_name for a in spec.aspects):
                return spec.name
        return None


# -- parsing ----------------------------------------------------------------


class _DocReader:
    """Shape/vocabulary checks over the positioned JSON tree."""

    def __init__(self, file: str) -> None:
        self.file = file
        self.diagnostics: list[Diagnostic] = []

    def error(self, message: str, at: pj.Positioned, code: str) -> None:
        self.diagnostics.append(_error(message, self.file, at.line, at.column, code))

    def warning(self, message: str, at: pj.Positioned, code: str) -> None:
        self.diagnostics.append(_warning(message, self.file, at.line, at.column, code))

    def check_fields(self, obj: dict[str, pj.Positioned], allowed: tuple[str, ...],
                     what: str) -> None:
        for key, value in obj.items():
            if key not in allowed:
                self.error(
                    f"unknown field {key!r} in {what}", value, "unknown-field"
                )

    def string(self, obj: dict[str, pj.Positioned], fname: str, at: pj.Positioned,
               what: str, required: bool = True, non_empty: bool = True,
               ) -> Optional[str]:
        entry = obj.get(fname)
        if entry is None:
            if required:
                self.error(
                    f"{what} is missing required field {fname!r}",
                    at,
                    "missing-field",
                )
            return None
        if not isinstance(entry.value, str):
            self.error(f"field {fname!r} must be a string", entry, "bad-type")
            return None
        if non_empty and not entry.value.strip():
            self.error(f"field {fname!r} must be non-empty", entry, "empty-value")
            return None
        return entry.value

    def string_list(self, obj: dict[str, pj.Positioned], fname: str,
                    at: pj.Positioned, what: str, required: bool = False,
                    non_empty: bool = False) -> Optional[list[pj.Positioned]]:
        entry = obj.get(fname)
        if entry is None:
            if required:
                self.error(
                    f"{what} is missing required field {fname!r}",
                    at,
                    "missing-field",
                )
                return None
            return []
        if not isinstance(entry.value, list) or any(
            not isinstance(item.value, str) for item in entry.value
        ):
            self.error(
                f"field {fname!r} must be an array of strings", entry, "bad-type"
            )
            return None
        if non_empty and not entry.value:
            self.error(f"field {fname!r} must not be empty", entry, "empty-list")
            return None
        return entry.value

    def object_list(self, obj: dict[str, pj.Positioned], fname: str,
                    ) -> list[pj.Positioned]:
        entry = obj.get(fname)
        if entry is None:
            return []
        if not isinstance(entry.value, list) or any(
            not isinstance(item.value, dict) for item in entry.value
        ):
            self.error(
                f"field {fname!r} must be an array of objects", entry, "bad-type"
            )
            return []
        return entry.value

    def element_type(self, item: pj.Positioned) -> Optional[str]:
        raw = item.value
        if raw in ELEMENT_TYPES:
            return raw
        if raw in _ELEMENT_TYPE_ALIASES:
            canonical = _ELEMENT_TYPE_ALIASES[raw]
            self.warning(
                f"element type {raw!r} normalized to {canonical!r}",
                item,
                "noncanonical-element-type",
            )
            return canonical
        self.error(f"unknown element type {raw!r}", item, "unknown-element-type")
        return None

    def threat(self, item: pj.Positioned) -> Optional[str]:
        if item.value in THREATS:
            return item.value
        self.error(f"unknown threat {item.value!r}", item, "unknown-threat")
        return None

    def weakness(self, item: pj.Positioned) -> Optional[str]:
        canonical = canonical_weakness_id(item.value)
        if canonical is None:
            self.error(
                f"invalid weakness id {item.value!r} (expected CWE-<digits>)",
                item,
                "invalid-weakness-id",
            )
        return canonical


def parse(
    source: Union[str, Path],
    filename: Optional[str] = None,
) -> tuple[Optional[DescriptionDocument], list[Diagnostic]]:
    """Parse one description from a file path or from text.

    Returns the document (or None when errors prevent construction) plus
    all diagnostics. Unknown fields, unknown vocabulary and shape problems
    are reported with their source position; nothing is dropped silently.
    """
    if isinstance(source, Path):
        filename = filename or str(source)
        text = source.read_text(encoding="utf-8-sig")  # tolerate a BOM
    else:
        filename = filename or "<string>"
        text = source

    reader = _DocReader(filename)
    try:
        root = pj.loads_positioned(text)
    except pj.JsonSyntaxError as error:
        reader.diagnostics.append(
            _error(error.message, filename, error.line, error.column, "json-syntax")
        )
        return None, reader.diagnostics

    if not isinstance(root.value, dict):
        reader.error("description must be a JSON object", root, "bad-type")
        return None, reader.diagnostics

    obj = root.value
    reader.check_fields(obj, _DOCUMENT_FIELDS, "document")
    name = reader.string(obj, "name", root, "document")
    description = reader.string(obj, "description", root, "document", non_empty=False)
    categories = reader.string_list(obj, "categories", root, "document")
    references = reader.string_list(obj, "references", root, "document")

    raw_specifications = reader.object_list(obj, "specifications")
    specifications: list[Specification] = []
    for spec_item in raw_specifications:
        spec = _parse_specification(reader, spec_item)
        if spec is not None:
            specifications.append(spec)

    raw_checks = reader.object_list(obj, "checks")
    checks: list[CheckDecl] = []
    for check_item in raw_checks:
        check = _parse_check(reader, check_item)
        if check is not None:
            checks.append(check)

    if not raw_specifications and not raw_checks:
        reader.error(
            "document must define at least one specification or check",
            root,
            "no-content",
        )

    if has_errors(reader.diagnostics) or name is None or description is None:
        return None, reader.diagnostics

    document = DescriptionDocument(
        name=name,
        description=description,
        categories=tuple(item.value for item in categories or []),
        references=tuple(item.value for item in references or []),
        specifications=tuple(specifications),
        checks=tuple(checks),
        source=filename,
    )
    return document, reader.diagnostics


def _parse_specification(
    reader: _DocReader, item: pj.Positioned
) -> Optional[Specification]:
    obj = item.value
    reader.check_fields(obj, _SPECIFICATION_FIELDS, "specification")
    name = reader.string(obj, "name", item, "specification")
    description = reader.string(obj, "description", item, "specification",
                                non_empty=False)

    elements: list[SpecElementDecl] = []
    for element_item in reader.object_list(obj, "elements"):
        element = _parse_element(reader, element_item)
        if element is not None:
            elements.append(element)

    aspects: list[AspectDecl] = []
    for aspect_item in reader.object_list(obj, "aspects"):
        aspect = _parse_aspect(reader, aspect_item)
        if aspect is not None:
            aspects.append(aspect)

    if name is None or description is None:
        return None
    return Specification(name, description, tuple(elements), tuple(aspects))


def _parse_element(reader: _DocReader, item: pj.Positioned) -> Optional[SpecElementDecl]:
    obj = item.value
    reader.check_fields(obj, _ELEMENT_FIELDS, "specification element")
    name = reader.string(obj, "name", item, "specification element")
    description = reader.string(obj, "description", item, "specification element",
                                non_empty=False)
    raw_targets = reader.string_list(
        obj, "applies-to", item, "specification element",
        required=True, non_empty=True,
    )
    if name is None or description is None or raw_targets is None:
        return None
    targets = []
    for target_item in raw_targets:
        canonical = reader.element_type(target_item)
        if canonical is not None:
            targets.append(canonical)
    return SpecElementDecl(name, description, tuple(targets))


def _parse_aspect(reader: _DocReader, item: pj.Positioned) -> Optional[AspectDecl]:
    obj = item.value
    reader.check_fields(obj, _ASPECT_FIELDS, "security aspect")
    name = reader.string(obj, "name", item, "security aspect")
    description = reader.string(obj, "description", item, "security aspect",
                                non_empty=False)
    specified_by = reader.string_list(
        obj, "specified-by", item, "security aspect", required=True, non_empty=True
    )
    raw_counteracts = reader.string_list(
        obj, "counteracts", item, "security aspect", required=True, non_empty=True
    )
    categories = reader.string_list(obj, "categories", item, "security aspect")
    if None in (name, description, specified_by, raw_counteracts):
        return None
    counteracts = []
    for threat_item in raw_counteracts:
        threat = reader.threat(threat_item)
        if threat is not None:
            counteracts.append(threat)
    return AspectDecl(
        name,
        description,
        tuple(item.value for item in specified_by),
        tuple(counteracts),
        tuple(item.value for item in categories or []),
    )


def _parse_check(reader: _DocReader, item: pj.Positioned) -> Optional[CheckDecl]:
    obj = item.value
    reader.check_fields(obj, _CHECK_FIELDS, "security check")
    name = reader.string(obj, "name", item, "security check")
    description = reader.string(obj, "description", item, "security check",
                                non_empty=False)
    raw_analyzes = reader.string_list(
        obj, "analyzes", item, "security check", required=True, non_empty=True
    )
    raw_detects = reader.string_list(
        obj, "detects", item, "security check", required=True, non_empty=True
    )
    categories = reader.string_list(obj, "categories", item, "security check")
    if None in (name, description, raw_analyzes, raw_detects):
        return None
    analyzes = []
    for target_item in raw_analyzes:
        canonical = reader.element_type(target_item)
        if canonical is not None:
            analyzes.append(canonical)
    detects = []
    for weakness_item in raw_detects:
        canonical = reader.weakness(weakness_item)
        if canonical is not None:
            detects.append(canonical)
    return CheckDecl(
        name,
        description,
        tuple(analyzes),
        tuple(detects),
        tuple(item.value for item in categories or []),
    )


# -- corpus validation -------------------------------------------------------


def validate(
    documents: Iterable[DescriptionDocument],
    catalog_ids: Optional[Iterable[str]] = None,
) -> list[Diagnostic]:
    """Cross-document checks over parsed documents.

    Flags duplicate document names across the corpus, duplicate and
    colliding names within a document, unresolved specified-by references,
    names containing the selector separator ``::``, and (when catalog ids
    are given) detected weaknesses that will be stubbed.
    """
    diagnostics: list[Diagnostic] = []
    known = set(catalog_ids) if catalog_ids is not None else None
    seen_names: dict[str, str] = {}

    for doc in documents:
        at = (doc.source, 1, 1)
        if doc.name in seen_names:
            diagnostics.append(
                _error(
                    f"duplicate document name {doc.name!r} "
                    f"(already defined in {seen_names[doc.name]})",
                    *at,
                    "duplicate-document",
                )
            )
        else:
            seen_names[doc.name] = doc.source

        for label, name in _addressable_names(doc):
            if "::" in name:
                diagnostics.append(
                    _error(
                        f"{label} name {name!r} must not contain '::'",
                        *at,
                        "name-with-separator",
                    )
                )

        _check_unique(diagnostics, doc, "specification element",
                      [e.name for e in doc.elements])
        _check_unique(diagnostics, doc, "security aspect",
                      [a.name for a in doc.aspects])
        _check_unique(diagnostics, doc, "security check",
                      [c.name for c in doc.checks])

        element_names = {element.name for element in doc.elements}
        for aspect in doc.aspects:
            for ref in aspect.specified_by:
                if ref not in element_names:
                    diagnostics.append(
                        _error(
                            f"aspect {aspect.name!r} is specified by "
                            f"unresolved specification element {ref!r}",
                            *at,
                            "unresolved-element",
                        )
                    )

        if known is not None:
            for check in doc.checks:
                for cwe_id in check.detects:
                    if cwe_id not in known:
                        diagnostics.append(
                            _warning(
                                f"check {check.name!r} detects unknown "
                                f"weakness {cwe_id} (stubbed)",
                                *at,
                                "unknown-weakness",
                            )
                        )
    return diagnostics


def _addressable_names(doc: DescriptionDocument) -> list[tuple[str, str]]:
    names = [("document", doc.name)]
    names.extend(("security aspect", a.name) for a in doc.aspects)
    names.extend(("security check", c.name) for c in doc.checks)
    return names


def _check_unique(
    diagnostics: list[Diagnostic],
    doc: DescriptionDocument,
    label: str,
    names: list[str],
) -> None:
    seen: dict[str, str] = {}
    for name in names:
        slug = slugify(name)
        if name in seen:
            diagnostics.append(
                _error(
                    f"duplicate {label} name {name!r} in document {doc.name!r}",
                    doc.source,
                    1,
                    1,
                    "duplicate-name",
                )
            )
        elif slug in seen.values():
            diagnostics.append(
                _error(
                    f"{label} name {name!r} collides with another name "
                    f"after slugging in document {doc.name!r}",
                    doc.source,
                    1,
                    1,
                    "slug-collision",
                )
            )
        seen[name] = slug


# -- lowering ----------------------------------------------------------------


def dsl_node_id(doc: DescriptionDocument) -> str:
    return node_id(NodeKind.SECURITY_DSL, doc.name)


def analyzer_node_id(doc: DescriptionDocument) -> str:
    return node_id(NodeKind.SECURITY_ANALYZER, doc.name)


def aspect_node_id(doc_name: str, aspect_name: str) -> str:
    return node_id(NodeKind.SECURITY_ASPECT, doc_name, aspect_name)


def element_node_id(doc_name: str, element_name: str) -> str:
    return node_id(NodeKind.SPECIFICATION_ELEMENT, doc_name, element_name)


def check_node_id(doc_name: str, check_name: str) -> str:
    return node_id(NodeKind.SECURITY_CHECK, doc_name, check_name)


def lower(doc: DescriptionDocument) -> tuple[list[GraphNode], list[GraphEdge]]:
    """Graph nodes and edges for a document validated without errors."""
    nodes: list[GraphNode] = []
    edges: list[GraphEdge] = []

    if doc.is_dsl:
        dsl_id = dsl_node_id(doc)
        nodes.append(GraphNode(dsl_id, NodeKind.SECURITY_DSL, doc.name,
                               doc.description))
        for element in doc.elements:
            element_id = element_node_id(doc.name, element.name)
            nodes.append(
                GraphNode(element_id, NodeKind.SPECIFICATION_ELEMENT,
                          element.name, element.description)
            )
            edges.append(GraphEdge(dsl_id, element_id, EdgeKind.PROVIDES))
            for target in element.applies_to:
                edges.append(
                    GraphEdge(element_id, element_type_id(target),
                              EdgeKind.APPLIES_TO)
                )
        for aspect in doc.aspects:
            aspect_id = aspect_node_id(doc.name, aspect.name)
            nodes.append(
                GraphNode(aspect_id, NodeKind.SECURITY_ASPECT,
                          aspect.name, aspect.description)
            )
            edges.append(GraphEdge(dsl_id, aspect_id, EdgeKind.PROVIDES))
            for element_name in aspect.specified_by:
                edges.append(
                    GraphEdge(aspect_id, element_node_id(doc.name, element_name),
                              EdgeKind.SPECIFIED_BY)
                )
            for threat in aspect.counteracts:
                edges.append(
                    GraphEdge(aspect_id, node_id(NodeKind.THREAT, threat),
                              EdgeKind.COUNTERACTS)
                )

    if doc.is_analyzer:
        analyzer_id = analyzer_node_id(doc)
        nodes.append(GraphNode(analyzer_id, NodeKind.SECURITY_ANALYZER,
                               doc.name, doc.description))
        for check in doc.checks:
            check_id = check_node_id(doc.name, check.name)
            nodes.append(
                GraphNode(check_id, NodeKind.SECURITY_CHECK,
                          check.name, check.description)
            )
            edges.append(GraphEdge(analyzer_id, check_id, EdgeKind.PROVIDES))
            for target in check.analyzes:
                edges.append(
                    GraphEdge(check_id, element_type_id(target), EdgeKind.ANALYZES)
                )
            for cwe_id in check.detects:
                edges.append(
                    GraphEdge(check_id, weakness_node_id(cwe_id), EdgeKind.DETECTS)
                )

    return nodes, edges


# -- serialization -----------------------------------------------------------


def serialize(doc: DescriptionDocument) -> str:
    """Canonical pretty-printed text; parse(serialize(d)) equals d.

    Field order is fixed; empty optional fields are omitted.
    """
    out: dict = {"name": doc.name, "description": doc.description}
    if doc.categories:
        out["categories"] = list(doc.categories)
    if doc.references:
        out["references"] = list(doc.references)
    if doc.specifications:
        out["specifications"] = [
            {
                "name": spec.name,
                "description": spec.description,
                "elements": [
                    {
                        "name": element.name,
                        "description": element.description,
                        "applies-to": list(element.applies_to),
                    }
                    for element in spec.elements
                ],
                "aspects": [
                    _aspect_to_json(aspect) for aspect in spec.aspects
                ],
            }
            for spec in doc.specifications
        ]
    if doc.checks:
        out["checks"] = [
            {
                "name": check.name,
                "description": check.description,
                "analyzes": list(check.analyzes),
                "detects": list(check.detects),
                **({"categories": list(check.categories)} if check.categories else {}),
            }
            for check in doc.checks
        ]
    return json.dumps(out, indent=2, ensure_ascii=False) + "\n"


def _aspect_to_json(aspect: AspectDecl) -> dict:
    out = {
        "name": aspect.name,
        "description": aspect.description,
        "specified-by": list(aspect.specified_by),
        "counteracts": list(aspect.counteracts),
    }
    if aspect.categories:
        out["categories"] = list(aspect.categories)
    return out


# -- corpus scanning ---------------------------------------------------------


def scan_corpus(directory: Union[str, Path], recursive: bool = False) -> list[Path]:
    """Description files in `directory`, sorted by path for determinism."""
    directory = Path(directory)
    pattern = f"**/*{DESCRIPTION_SUFFIX}" if recursive else f"*{DESCRIPTION_SUFFIX}"
    return sorted(path for path in directory.glob(pattern) if path.is_file())
