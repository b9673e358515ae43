"""Description parsing, validation diagnostics, lowering, and round-trips."""

from __future__ import annotations

import json
import random

import pytest

from seclan.descriptions import (
    DescriptionDocument,
    has_errors,
    lower,
    parse,
    scan_corpus,
    serialize,
    validate,
)
from seclan.model import (
    EDGE_TYPING,
    EdgeKind,
    NodeKind,
    build_seed_graph,
)
from seclan.positioned_json import JsonSyntaxError, loads_positioned

from conftest import CORPUS_DIR, SECDFD_FULL
from generators import random_document_text


MINIMAL = (
    '{"name":"X","description":"d","checks":[{"name":"c","description":"d",'
    '"analyzes":["Data"],"detects":["CWE200"]}]}'
)


def parse_ok(text: str) -> DescriptionDocument:
    doc, diagnostics = parse(text)
    assert doc is not None, [str(d) for d in diagnostics]
    assert not has_errors(diagnostics), [str(d) for d in diagnostics]
    return doc


def errors_with_code(diagnostics, code: str):
    return [d for d in diagnostics if d.code == code and d.severity == "error"]


class TestPositionedJson:
    def test_positions_tracked(self):
        value = loads_positioned('{\n  "a": [1, 2],\n  "b": "x"\n}')
        assert value.value["a"].line == 2
        assert value.value["b"].line == 3

    def test_duplicate_keys_rejected(self):
        with pytest.raises(JsonSyntaxError, match="duplicate"):
            loads_positioned('{"a": 1, "a": 2}')

    def test_escapes(self):
        value = loads_positioned('"a\\n\\t\\u00e9\\ud83d\\ude00"')
        assert value.value == "a\n\té\U0001f600"

    def test_agrees_with_stdlib_on_plain_values(self):
        rng = random.Random(7)
        for _ in range(100):
            text = random_document_text(rng, "Doc")

            def strip(value):
                if isinstance(value.value, dict):
                    return {k: strip(v) for k, v in value.value.items()}
                if isinstance(value.value, list):
                    return [strip(v) for v in value.value]
                return value.value

            assert strip(loads_positioned(text)) == json.loads(text)

    def test_trailing_garbage_rejected(self):
        with pytest.raises(JsonSyntaxError, match="trailing"):
            loads_positioned("{} x")


class TestParse:
    def test_secdfd_full_sample(self):
        doc, diagnostics = parse(SECDFD_FULL)
        assert doc is not None and not has_errors(diagnostics)
        assert len(doc.aspects) == 1
        aspect = doc.aspects[0]
        assert aspect.name == "Secure Data Processing"
        assert aspect.specified_by == ("Responsibility", "Value", "TrustZone")
        assert aspect.counteracts == (
            "Information Disclosure",
            "Tampering with Data",
            "Denial of Service",
            "Repudiation",
        )
        assert {e.name for e in doc.elements} == {
            "Value", "Responsibility", "TrustZone", "Attacker Profile",
            "Assumption",
        }

    def test_weakness_ids_normalized(self):
        doc = parse_ok(MINIMAL)
        assert doc.checks[0].detects == ("CWE-200",)

    def test_unknown_threat_rejected(self):
        text = json.dumps({
            "name": "X", "description": "d",
            "specifications": [{
                "name": "s", "description": "d",
                "elements": [{"name": "e", "description": "d",
                              "applies-to": ["Data"]}],
                "aspects": [{"name": "a", "description": "d",
                             "specified-by": ["e"],
                             "counteracts": ["Phishing"]}],
            }],
        })
        doc, diagnostics = parse(text)
        assert doc is None
        bad = errors_with_code(diagnostics, "unknown-threat")
        assert bad and "Phishing" in bad[0].message

    def test_unknown_field_rejected_with_position(self):
        text = '{\n"name": "X",\n"description": "d",\n"extra": 1,\n"checks": []}'
        doc, diagnostics = parse(text)
        assert doc is None
        bad = errors_with_code(diagnostics, "unknown-field")
        assert bad[0].line == 4
        assert "extra" in bad[0].message

    def test_space_separated_element_type_warns(self):
        text = MINIMAL.replace('"Data"', '"Information Flow"')
        doc, diagnostics = parse(text)
        assert doc is not None
        assert doc.checks[0].analyzes == ("InformationFlow",)
        assert any(d.code == "noncanonical-element-type" for d in diagnostics)

    def test_unknown_element_type_rejected(self):
        text = MINIMAL.replace('"Data"', '"Dataflow"')
        doc, diagnostics = parse(text)
        assert doc is None
        assert errors_with_code(diagnostics, "unknown-element-type")

    def test_document_without_content_rejected(self):
        doc, diagnostics = parse('{"name": "X", "description": "d"}')
        assert doc is None
        assert errors_with_code(diagnostics, "no-content")
        doc, diagnostics = parse(
            '{"name": "X", "description": "d", "specifications": [], "checks": []}'
        )
        assert doc is None
        assert errors_with_code(diagnostics, "no-content")

    def test_syntax_error_reported_with_position(self):
        doc, diagnostics = parse('{"name": "X",\n  "description" "d"}')
        assert doc is None
        assert diagnostics[0].code == "json-syntax"
        assert diagnostics[0].line == 2

    def test_empty_name_rejected(self):
        doc, diagnostics = parse(MINIMAL.replace('"name":"X"', '"name":""'))
        assert doc is None
        assert errors_with_code(diagnostics, "empty-value")

    def test_missing_required_list_rejected(self):
        text = (
            '{"name":"X","description":"d","checks":[{"name":"c",'
            '"description":"d","analyzes":["Data"]}]}'
        )
        doc, diagnostics = parse(text)
        assert doc is None
        assert errors_with_code(diagnostics, "missing-field")

    def test_corpus_fixtures_parse_clean(self):
        for path in scan_corpus(CORPUS_DIR):
            doc, diagnostics = parse(path)
            assert doc is not None
            assert not has_errors(diagnostics), path


class TestValidate:
    def test_duplicate_document_names(self):
        first = parse_ok(MINIMAL)
        second = parse_ok(MINIMAL)
        diagnostics = validate([first, second])
        assert any(d.code == "duplicate-document" for d in diagnostics)

    def test_unknown_weakness_warns_when_catalog_given(self):
        doc = parse_ok(MINIMAL.replace("CWE200", "CWE-9999"))
        diagnostics = validate([doc], catalog_ids=["CWE-200"])
        stubbed = [d for d in diagnostics if d.code == "unknown-weakness"]
        assert stubbed and stubbed[0].severity == "warning"
        assert "stubbed" in stubbed[0].message

    def test_unresolved_specification_element(self):
        text = json.dumps({
            "name": "X", "description": "d",
            "specifications": [{
                "name": "s", "description": "d",
                "elements": [{"name": "e", "description": "d",
                              "applies-to": ["Data"]}],
                "aspects": [{"name": "a", "description": "d",
                             "specified-by": ["Ghost"],
                             "counteracts": ["Spoofing"]}],
            }],
        })
        doc = parse_ok(text)
        diagnostics = validate([doc])
        assert any(d.code == "unresolved-element" for d in diagnostics)

    def test_duplicate_check_names_flagged(self):
        text = json.dumps({
            "name": "X", "description": "d",
            "checks": [
                {"name": "c", "description": "d", "analyzes": ["Data"],
                 "detects": ["CWE-1"]},
                {"name": "c", "description": "d", "analyzes": ["State"],
                 "detects": ["CWE-2"]},
            ],
        })
        doc = parse_ok(text)
        assert any(d.code == "duplicate-name" for d in validate([doc]))

    def test_selector_separator_rejected_in_names(self):
        doc = parse_ok(MINIMAL.replace('"name":"X"', '"name":"A::B"'))
        assert any(d.code == "name-with-separator" for d in validate([doc]))

    def test_clean_corpus_validates(self, mini_corpus):
        assert not has_errors(mini_corpus.diagnostics)


class TestLower:
    def test_flowdroid_lowering(self):
        doc, _ = parse(CORPUS_DIR / "flowdroid.seclan.json")
        nodes, edges = lower(doc)
        kinds = {}
        for node in nodes:
            kinds.setdefault(node.kind, []).append(node)
        assert len(kinds[NodeKind.SECURITY_ANALYZER]) == 1
        assert len(kinds[NodeKind.SECURITY_CHECK]) == 1
        check_id = kinds[NodeKind.SECURITY_CHECK][0].id
        edge_set = {(e.source, e.target, e.kind) for e in edges}
        assert (check_id, "elementtype/informationflow", EdgeKind.ANALYZES) in edge_set
        assert (check_id, "cwe/CWE-200", EdgeKind.DETECTS) in edge_set
        assert (check_id, "cwe/CWE-454", EdgeKind.DETECTS) in edge_set

    def test_cognicrypt_lowering(self):
        doc, _ = parse(CORPUS_DIR / "cognicrypt.seclan.json")
        nodes, edges = lower(doc)
        detects = {
            e.target for e in edges if e.kind is EdgeKind.DETECTS
        }
        assert detects == {
            "cwe/CWE-326", "cwe/CWE-327", "cwe/CWE-798",
            "cwe/CWE-295", "cwe/CWE-330", "cwe/CWE-757",
        }
        checks = [n for n in nodes if n.kind is NodeKind.SECURITY_CHECK]
        assert len(checks) == 1

    def test_document_with_both_sides(self):
        text = json.dumps({
            "name": "Both", "description": "d",
            "specifications": [{
                "name": "s", "description": "d",
                "elements": [{"name": "e", "description": "d",
                              "applies-to": ["Data"]}],
                "aspects": [{"name": "a", "description": "d",
                             "specified-by": ["e"],
                             "counteracts": ["Spoofing"]}],
            }],
            "checks": [{"name": "c", "description": "d",
                        "analyzes": ["Data"], "detects": ["CWE-1"]}],
        })
        doc = parse_ok(text)
        nodes, _ = lower(doc)
        kinds = {node.kind for node in nodes}
        assert NodeKind.SECURITY_DSL in kinds
        assert NodeKind.SECURITY_ANALYZER in kinds

    def test_lowering_deterministic(self):
        doc, _ = parse(CORPUS_DIR / "secdfd.seclan.json")
        assert lower(doc) == lower(doc)

    def test_lowered_edges_satisfy_kind_typing(self):
        kind_of = {}
        all_edges = []
        for path in scan_corpus(CORPUS_DIR):
            doc, _ = parse(path)
            nodes, edges = lower(doc)
            kind_of.update({node.id: node.kind for node in nodes})
            all_edges.extend(edges)
        seed = build_seed_graph()
        kind_of.update({node.id: node.kind for node in seed.nodes})
        for edge in all_edges:
            source = kind_of[edge.source]
            if edge.kind is EdgeKind.DETECTS:
                target = NodeKind.WEAKNESS  # weakness nodes come from the catalog
            else:
                target = kind_of[edge.target]
            assert (source, target) in EDGE_TYPING[edge.kind]

    def test_vocabulary_closure(self):
        from seclan.model import ELEMENT_TYPES, THREATS, element_type_id, threat_id

        element_ids = {element_type_id(name) for name in ELEMENT_TYPES}
        threat_ids = {threat_id(name) for name in THREATS}
        for path in scan_corpus(CORPUS_DIR):
            doc, _ = parse(path)
            _, edges = lower(doc)
            for edge in edges:
                if edge.kind in (EdgeKind.APPLIES_TO, EdgeKind.ANALYZES):
                    assert edge.target in element_ids
                if edge.kind is EdgeKind.COUNTERACTS:
                    assert edge.target in threat_ids


class TestSerialize:
    def test_round_trip_fixture(self):
        for path in scan_corpus(CORPUS_DIR):
            doc, _ = parse(path)
            again, diagnostics = parse(serialize(doc), filename=str(path))
            assert not has_errors(diagnostics)
            assert again == doc

    def test_noncanonical_input_serialized_canonically(self):
        doc = parse_ok(MINIMAL)
        assert '"CWE-200"' in serialize(doc)

    def test_field_order_fixed(self):
        doc = parse_ok(MINIMAL)
        text = serialize(doc)
        assert text.index('"name"') < text.index('"description"')
        assert text.index('"analyzes"') < text.index('"detects"')

    def test_serialize_parse_fixpoint_generated(self):
        rng = random.Random(20260809)
        for index in range(200):
            text = random_document_text(rng, f"Doc {index}")
            doc, diagnostics = parse(text)
            assert doc is not None, (text, [str(d) for d in diagnostics])
            assert not has_errors(diagnostics)
            again, second_diagnostics = parse(serialize(doc))
            assert not has_errors(second_diagnostics)
            assert again == doc
            # serialization is itself a fixpoint
            assert serialize(again) == serialize(doc)


class TestScanCorpus:
    def test_sorted_and_filtered(self, tmp_path):
        (tmp_path / "b.seclan.json").write_text("{}")
        (tmp_path / "a.seclan.json").write_text("{}")
        (tmp_path / "ignored.json").write_text("{}")
        sub = tmp_path / "sub"
        sub.mkdir()
        (sub / "c.seclan.json").write_text("{}")
        flat = scan_corpus(tmp_path)
        assert [p.name for p in flat] == ["a.seclan.json", "b.seclan.json"]
        deep = scan_corpus(tmp_path, recursive=True)
        assert [p.name for p in deep] == [
            "a.seclan.json", "b.seclan.json", "c.seclan.json",
        ]
