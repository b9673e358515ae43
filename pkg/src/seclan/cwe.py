"""Weakness catalog loading and weakness-to-threat edge derivation.

Reads the simplified weakness catalog format (a JSON array of records),
derives parent-of edges from the hierarchy and enables edges from
consequence scopes via a configurable scope-to-threat map.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from .model import (
    EdgeKind,
    GraphEdge,
    GraphNode,
    NodeKind,
    THREATS,
    threat_id,
    weakness_node_id,
)


class CatalogError(Exception):
    """Base class for catalog loading errors."""


class ParseError(CatalogError):
    """The catalog file is malformed or violates the simplified schema."""


class DuplicateWeakness(CatalogError):
    """Two catalog records normalize to the same weakness id."""


class DanglingParent(CatalogError):
    """A record lists a parent id that is not in the same catalog."""


RECOGNIZED_SCOPES: tuple[str, ...] = (
    "Confidentiality",
    "Integrity",
    "Availability",
    "Non-Repudiation",
    "Accountability",
    "Authentication",
    "Access Control",
    "Authorization",
    "Other",
)

# Default consequence-scope to STRIDE alignment. Replaceable via
# load_scope_threat_map() so a different linking can be substituted.
DEFAULT_SCOPE_THREATS: Mapping[str, frozenset[str]] = {
    "Confidentiality": frozenset({"Information Disclosure"}),
    "Integrity": frozenset({"Tampering with Data"}),
    "Availability": frozenset({"Denial of Service"}),
    "Non-Repudiation": frozenset({"Repudiation"}),
    "Accountability": frozenset({"Repudiation"}),
    "Authentication": frozenset({"Spoofing"}),
    "Access Control": frozenset({"Elevation of Privilege"}),
    "Authorization": frozenset({"Elevation of Privilege"}),
    "Other": frozenset(),
}

_CWE_ID_RE = re.compile(r"^\s*cwe[-_ ]?([0-9]+)\s*$", re.IGNORECASE)

_RECORD_FIELDS = ("id", "name", "description", "abstraction", "parents", "scopes")


def canonical_weakness_id(raw: str) -> Optional[str]:
    """Normalize spellings like ``cwe-200`` or ``CWE200`` to ``CWE-200``.

    Returns None when `raw` does not carry a CWE prefix with digits.
    """
    match = _CWE_ID_RE.match(raw)
    if match is None:
        return None
    return f"CWE-{int(match.group(1))}"


@dataclass(frozen=True)
class WeaknessRecord:
    """One catalog entry; `parents` reference canonical ids in the catalog."""

    id: str
    name: str
    description: str = ""
    abstraction: Optional[str] = None
    parents: tuple[str, ...] = ()
    scopes: tuple[str, ...] = ()


def stub_record(cwe_id: str) -> WeaknessRecord:
    """Placeholder for a referenced weakness missing from the catalog."""
    return WeaknessRecord(id=cwe_id, name=cwe_id)


def load_catalog(
    path: Union[str, Path],
    warnings: Optional[list[str]] = None,
) -> list[WeaknessRecord]:
    """Load and validate a simplified catalog file.

    Raises ParseError on malformed JSON (with position), schema violations
    and unknown fields; DuplicateWeakness and DanglingParent on referential
    problems. Unrecognized consequence scopes are kept verbatim with a
    warning appended to `warnings`.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8-sig")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ParseError(
            f"{path}:{error.lineno}:{error.colno}: {error.msg}"
        ) from None

    if not isinstance(data, list):
        raise ParseError(f"{path}: catalog must be a top-level array of records")

    records: list[WeaknessRecord] = []
    seen: set[str] = set()
    for index, entry in enumerate(data):
        where = f"{path}: record {index}"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        for fname in entry:
            if fname not in _RECORD_FIELDS:
                raise ParseError(f"{where}: unknown field {fname!r}")
        raw_id = _expect_str(entry, "id", where, required=True)
        cwe_id = canonical_weakness_id(raw_id)
        if cwe_id is None:
            raise ParseError(
                f"{where}: id {raw_id!r} is not a canonical weakness id "
                "(expected CWE-<digits>)"
            )
        if cwe_id in seen:
            raise DuplicateWeakness(f"{where}: duplicate weakness {cwe_id}")
        seen.add(cwe_id)

        name = _expect_str(entry, "name", where, required=True)
        description = _expect_str(entry, "description", where) or ""
        abstraction = _expect_str(entry, "abstraction", where)
        parents = []
        for raw_parent in _expect_str_list(entry, "parents", where):
            parent = canonical_weakness_id(raw_parent)
            if parent is None:
                raise ParseError(
                    f"{where}: parent {raw_parent!r} is not a canonical weakness id"
                )
            parents.append(parent)
        scopes = _expect_str_list(entry, "scopes", where)
        for scope in scopes:
            if scope not in RECOGNIZED_SCOPES and warnings is not None:
                warnings.append(
                    f"{where}: unrecognized consequence scope {scope!r} "
                    "kept verbatim"
                )
        records.append(
            WeaknessRecord(
                id=cwe_id,
                name=name,
                description=description,
                abstraction=abstraction,
                parents=tuple(parents),
                scopes=tuple(scopes),
            )
        )

    by_id = {record.id for record in records}
    for record in records:
        for parent in record.parents:
            if parent not in by_id:
                raise DanglingParent(
                    f"{path}: {record.id} lists parent {parent} "
                    "which is not in the catalog"
                )
    return records


def _expect_str(
    entry: dict, fname: str, where: str, required: bool = False
) -> Optional[str]:
    value = entry.get(fname)
    if value is None:
        if required:
            raise ParseError(f"{where}: missing required field {fname!r}")
        return None
    if not isinstance(value, str):
        raise ParseError(f"{where}: field {fname!r} must be a string")
    if required and not value.strip():
        raise ParseError(f"{where}: field {fname!r} must be non-empty")
    return value


def _expect_str_list(entry: dict, fname: str, where: str) -> list[str]:
    value = entry.get(fname)
    if value is None:
        return []
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise ParseError(f"{where}: field {fname!r} must be an array of strings")
    return value


def load_scope_threat_map(path: Union[str, Path]) -> dict[str, frozenset[str]]:
    """Load a scope-to-threat map: a JSON object scope -> [threat names].

    The map must cover every recognized scope and may add further scopes;
    every mapped threat must be one of the six STRIDE threats.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8-sig"))
    except json.JSONDecodeError as error:
        raise ParseError(
            f"{path}:{error.lineno}:{error.colno}: {error.msg}"
        ) from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: scope map must be a JSON object")
    result: dict[str, frozenset[str]] = {}
    for scope, threats in data.items():
        if not isinstance(threats, list) or any(
            not isinstance(t, str) for t in threats
        ):
            raise ParseError(f"{path}: scope {scope!r} must map to an array of names")
        for threat in threats:
            if threat not in THREATS:
                raise ParseError(
                    f"{path}: scope {scope!r} maps to unknown threat {threat!r}"
                )
        result[scope] = frozenset(threats)
    for scope in RECOGNIZED_SCOPES:
        if scope not in result:
            raise ParseError(f"{path}: scope map does not cover scope {scope!r}")
    return result


def derive_edges(
    records: Iterable[WeaknessRecord],
    scope_map: Optional[Mapping[str, frozenset[str]]] = None,
) -> tuple[list[GraphNode], list[GraphEdge]]:
    """Weakness nodes plus parent-of and enables edges for `records`.

    One node per record; one parent-of edge per (parent, child) pair
    oriented parent to child; one enables edge per threat any scope of the
    record maps to, deduplicated. Unmapped scopes contribute nothing.
    """
    if scope_map is None:
        scope_map = DEFAULT_SCOPE_THREATS
    nodes: list[GraphNode] = []
    edges: list[GraphEdge] = []
    for record in records:
        nodes.append(
            GraphNode(
                id=weakness_node_id(record.id),
                kind=NodeKind.WEAKNESS,
                name=record.name,
                description=record.description,
            )
        )
        for parent in record.parents:
            edges.append(
                GraphEdge(
                    weakness_node_id(parent),
                    weakness_node_id(record.id),
                    EdgeKind.PARENT_OF,
                )
            )
        enabled: set[str] = set()
        for scope in record.scopes:
            enabled.update(scope_map.get(scope, frozenset()))
        for threat in sorted(enabled):
            edges.append(
                GraphEdge(
                    weakness_node_id(record.id), threat_id(threat), EdgeKind.ENABLES
                )
            )
    return nodes, edges


def prune_to_relevant(
    records: Iterable[WeaknessRecord],
    referenced_ids: Iterable[str],
    warnings: Optional[list[str]] = None,
) -> list[WeaknessRecord]:
    """Subset of `records` reachable from `referenced_ids` in the hierarchy.

    Keeps every referenced record plus all of its ancestors and
    descendants (closure computed on the full catalog). Referenced ids
    missing from the catalog become stub records with a warning; stubs
    carry no scopes or parents and therefore contribute no edges.
    """
    record_list = list(records)
    by_id = {record.id: record for record in record_list}
    children: dict[str, set[str]] = {record.id: set() for record in record_list}
    for record in record_list:
        for parent in record.parents:
            children[parent].add(record.id)

    keep: set[str] = set()
    stubs: list[WeaknessRecord] = []
    for cwe_id in sorted(set(referenced_ids)):
        if cwe_id not in by_id:
            if warnings is not None:
                warnings.append(
                    f"unknown weakness {cwe_id}: not in the loaded catalog, "
                    "added as a stub"
                )
            stubs.append(stub_record(cwe_id))
            continue
        keep.add(cwe_id)
        frontier = list(children[cwe_id])
        while frontier:  # descendants
            current = frontier.pop()
            if current in keep:
                continue
            keep.add(current)
            frontier.extend(children[current])

    # ancestor-close the whole set so every kept parent reference resolves
    frontier = list(keep)
    while frontier:
        current = frontier.pop()
        for parent in by_id[current].parents:
            if parent not in keep:
                keep.add(parent)
                frontier.append(parent)

    kept = [record for record in record_list if record.id in keep]
    return kept + stubs
