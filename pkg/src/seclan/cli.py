"""Command-line interface: validate, relate, stats, export.

Exit codes: 0 success, 1 domain error (validation failures, unknown
selectors), 2 usage or I/O errors. Standard output carries only payload;
diagnostics and warnings go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .cwe import (
    CatalogError,
    WeaknessRecord,
    load_catalog,
    load_scope_threat_map,
)
from .export import BUNDLE_SUFFIX, chain_text, export_bundle, export_html
from .metrics import SECURITY, SYSTEM, CorpusStats, corpus_stats
from .model import ELEMENT_TYPES, KnowledgeGraph, THREATS
from .pipeline import Corpus, assemble_graph, scan_and_load
from .relations import Relationship, all_relationships, provider_name

CATALOG_ENV_VAR = "SECLAN_CWE_CATALOG"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


class UnknownSelector(Exception):
    pass


@dataclass
class RunConfig:
    corpus_dir: Path
    catalog_path: Path
    recursive: bool = False
    edge_simple: bool = False
    transitive: bool = False
    scope_map_path: Optional[Path] = None
    output_format: str = "text"


@dataclass
class LoadedCorpus:
    config: RunConfig
    corpus: Corpus
    catalog: list[WeaknessRecord]
    graph: Optional[KnowledgeGraph]  # None when validation failed
    warnings: list[str]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seclan",
        description=(
            "Describe security DSLs and code analyzers, derive the "
            "relationships between design-time security aspects and "
            "code-level security checks, and export them for exploration."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--corpus", metavar="DIR",
                         help="directory of *.seclan.json descriptions")
        sub.add_argument("--cwe", metavar="FILE",
                         help=f"weakness catalog (default: ${CATALOG_ENV_VAR})")
        sub.add_argument("--recursive", action="store_true",
                         help="descend into corpus subdirectories")
        sub.add_argument("--edge-simple", action="store_true",
                         help="allow node revisits as long as no edge repeats")
        sub.add_argument("--transitive", action="store_true",
                         help="count threats enabled by weakness ancestors "
                              "in threat coverage")
        sub.add_argument("--scope-map", metavar="FILE",
                         help="JSON file mapping consequence scopes to threats")
        sub.add_argument("--format", choices=("text", "machine", "csv"),
                         default="text", help="output format (default: text)")
        sub.add_argument("--out", metavar="PATH", default=".",
                         help="output directory for export (default: .)")

    sub = subparsers.add_parser("validate",
                                help="parse and validate description files")
    sub.add_argument("files", nargs="*", metavar="FILE",
                     help="description files (default: the whole corpus)")
    common(sub)

    sub = subparsers.add_parser("relate",
                                help="list relationships between aspects and checks")
    sub.add_argument("--dsl", help="only aspects of this DSL document")
    sub.add_argument("--analyzer", help="only checks of this analyzer document")
    sub.add_argument("--aspect", metavar="DOC::NAME", help="one aspect")
    sub.add_argument("--check", metavar="DOC::NAME", help="one check")
    sub.add_argument("--paths", choices=("all", "shortest", "none"), default=None,
                     help="path detail (default: shortest for text, all for "
                          "machine output)")
    common(sub)

    sub = subparsers.add_parser("stats", help="corpus statistics")
    common(sub)

    sub = subparsers.add_parser("export",
                                help="write the HTML site and/or bundle")
    sub.add_argument("--html", nargs="?", const="", metavar="DIR",
                     help="write the HTML site (optionally to DIR)")
    sub.add_argument("--bundle", nargs="?", const="", metavar="FILE",
                     help="write the relationship bundle (optionally to FILE)")
    common(sub)

    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    if not args.corpus:
        raise UsageError("--corpus is required")
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise UsageError(f"corpus directory {corpus_dir} does not exist")
    catalog = args.cwe or os.environ.get(CATALOG_ENV_VAR)
    if not catalog:
        raise UsageError(
            f"no weakness catalog: pass --cwe FILE or set ${CATALOG_ENV_VAR}"
        )
    catalog_path = Path(catalog)
    if not catalog_path.is_file():
        raise UsageError(f"weakness catalog {catalog_path} does not exist")
    return RunConfig(
        corpus_dir=corpus_dir,
        catalog_path=catalog_path,
        recursive=args.recursive,
        edge_simple=args.edge_simple,
        transitive=args.transitive,
        scope_map_path=Path(args.scope_map) if args.scope_map else None,
        output_format=args.format,
    )


def _load(config: RunConfig, files: Optional[Sequence[str]] = None) -> LoadedCorpus:
    warnings: list[str] = []
    catalog = load_catalog(config.catalog_path, warnings=warnings)
    if files:
        from .pipeline import load_corpus

        corpus = load_corpus([Path(f) for f in files], catalog)
    else:
        corpus = scan_and_load(config.corpus_dir, catalog,
                               recursive=config.recursive)
    scope_map = (
        load_scope_threat_map(config.scope_map_path)
        if config.scope_map_path
        else None
    )
    graph = None
    if corpus.ok:
        graph = assemble_graph(corpus.documents, catalog, scope_map,
                               warnings=warnings)
    return LoadedCorpus(config, corpus, catalog, graph, warnings)


def _report_diagnostics(loaded: LoadedCorpus) -> None:
    for diagnostic in loaded.corpus.diagnostics:
        print(diagnostic, file=sys.stderr)
    for warning in loaded.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if loaded.graph is not None:
        for warning in loaded.graph.warnings:
            print(f"warning: {warning}", file=sys.stderr)


# -- validate -------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    loaded = _load(config, files=args.files or None)
    _report_diagnostics(loaded)
    errors = sum(
        1 for d in loaded.corpus.diagnostics if d.severity == "error"
    )
    warnings = len(loaded.corpus.diagnostics) - errors
    print(
        f"{len(loaded.corpus.documents)} documents, "
        f"{errors} errors, {warnings} warnings"
    )
    return EXIT_DOMAIN if errors else EXIT_OK


# -- relate ---------------------------------------------------------------------


def _split_selector(value: str, what: str) -> tuple[str, str]:
    if "::" not in value:
        raise UnknownSelector(
            f"{what} selector {value!r} must look like Document::Name"
        )
    document, name = value.split("::", 1)
    return document, name


def _select_relationships(
    loaded: LoadedCorpus, args: argparse.Namespace
) -> list[Relationship]:
    from .descriptions import aspect_node_id, check_node_id

    documents = {doc.name: doc for doc in loaded.corpus.documents}

    aspect_filter: Optional[str] = None
    if args.aspect:
        doc_name, name = _split_selector(args.aspect, "aspect")
        doc = documents.get(doc_name)
        if doc is None or all(a.name != name for a in doc.aspects):
            raise UnknownSelector(f"unknown aspect {args.aspect!r}")
        aspect_filter = aspect_node_id(doc_name, name)

    check_filter: Optional[str] = None
    if args.check:
        doc_name, name = _split_selector(args.check, "check")
        doc = documents.get(doc_name)
        if doc is None or all(c.name != name for c in doc.checks):
            raise UnknownSelector(f"unknown check {args.check!r}")
        check_filter = check_node_id(doc_name, name)

    if args.dsl and (args.dsl not in documents
                     or not documents[args.dsl].is_dsl):
        raise UnknownSelector(f"unknown DSL {args.dsl!r}")
    if args.analyzer and (args.analyzer not in documents
                          or not documents[args.analyzer].is_analyzer):
        raise UnknownSelector(f"unknown analyzer {args.analyzer!r}")

    pairs = all_relationships(
        loaded.graph, node_simple=not loaded.config.edge_simple
    )
    selected = []
    for pair in pairs:
        if aspect_filter and pair.aspect_id != aspect_filter:
            continue
        if check_filter and pair.check_id != check_filter:
            continue
        if args.dsl and provider_name(loaded.graph, pair.aspect_id) != args.dsl:
            continue
        if args.analyzer and (
            provider_name(loaded.graph, pair.check_id) != args.analyzer
        ):
            continue
        selected.append(pair)
    return selected


def _relationship_json(loaded: LoadedCorpus, pair: Relationship) -> dict:
    from .export import relationship_refs, relationship_to_json

    aspect_refs, check_refs = relationship_refs(loaded.corpus.documents)
    return relationship_to_json(pair, aspect_refs, check_refs)


def _print_relationships_text(
    loaded: LoadedCorpus, pairs: list[Relationship], path_mode: str
) -> None:
    graph = loaded.graph
    for pair in pairs:
        aspect = graph.node(pair.aspect_id)
        check = graph.node(pair.check_id)
        print(
            f"{provider_name(graph, pair.aspect_id)}::{aspect.name}"
            f" <-> "
            f"{provider_name(graph, pair.check_id)}::{check.name}"
        )
        print(
            f"  security paths: {len(pair.security_paths)} "
            f"(shortest {pair.shortest_security})  "
            f"system paths: {len(pair.system_paths)} "
            f"(shortest {pair.shortest_system})  "
            f"shortest total: {pair.shortest_total}"
        )
        if path_mode == "none":
            continue
        if path_mode == "shortest":
            security = [pair.security_paths[0]]
            system = [pair.system_paths[0]]
        else:
            security = list(pair.security_paths)
            system = list(pair.system_paths)
        print("  security model:")
        for path in security:
            print(f"    {chain_text(graph, path)}")
        print("  system model:")
        for path in system:
            print(f"    {chain_text(graph, path)}")


def cmd_relate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    loaded = _load(config)
    _report_diagnostics(loaded)
    if not loaded.corpus.ok:
        return EXIT_DOMAIN
    pairs = _select_relationships(loaded, args)
    path_mode = args.paths or ("all" if args.format == "machine" else "shortest")

    if args.format == "machine":
        payload = [_relationship_json(loaded, pair) for pair in pairs]
        if path_mode == "none":
            for entry in payload:
                entry.pop("securityPaths")
                entry.pop("systemPaths")
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(
            ["dsl", "aspect", "analyzer", "check", "securityPaths",
             "systemPaths", "shortestSecurity", "shortestSystem",
             "shortestTotal"]
        )
        for pair in pairs:
            writer.writerow([
                provider_name(loaded.graph, pair.aspect_id),
                loaded.graph.node(pair.aspect_id).name,
                provider_name(loaded.graph, pair.check_id),
                loaded.graph.node(pair.check_id).name,
                len(pair.security_paths),
                len(pair.system_paths),
                pair.shortest_security,
                pair.shortest_system,
                pair.shortest_total,
            ])
    else:
        _print_relationships_text(loaded, pairs, path_mode)
    return EXIT_OK


# -- stats ----------------------------------------------------------------------


def _stats_text(stats: CorpusStats) -> str:
    out = io.StringIO()

    def fraction_table(title: str, rows: Sequence[str],
                       columns: Sequence[tuple[str, dict[str, float]]]) -> None:
        out.write(f"{title}\n")
        header = "  {:<24}".format("")
        header += "".join(f"{name:>12}" for name, _ in columns)
        out.write(header + "\n")
        for row in rows:
            line = f"  {row:<24}"
            line += "".join(
                f"{values.get(row, 0.0):>12.3f}" for _, values in columns
            )
            out.write(line + "\n")

    out.write(
        f"relationships: {stats.relationship_count}\n"
        f"related checks: {stats.related_check_fraction:.3f}\n"
    )
    fraction_table(
        "element coverage", ELEMENT_TYPES,
        [("DSLs", stats.dsl_element_coverage),
         ("checks", stats.check_element_coverage),
         ("analyzers", stats.analyzer_element_coverage),
         ("shortest", stats.shortest_path_element_frequency)],
    )
    fraction_table(
        "threat coverage", THREATS,
        [("DSLs", stats.dsl_threat_coverage),
         ("checks", stats.check_threat_coverage),
         ("analyzers", stats.analyzer_threat_coverage),
         ("shortest", stats.shortest_path_threat_frequency)],
    )
    for title, histogram, mean in (
        ("path lengths", stats.path_length_histogram, stats.path_length_mean),
        ("paths per relationship", stats.path_count_histogram,
         stats.path_count_mean),
    ):
        out.write(f"{title}\n")
        for model in (SECURITY, SYSTEM):
            buckets = ", ".join(
                f"{bucket}: {count}"
                for bucket, count in sorted(histogram[model].items())
            )
            out.write(
                f"  {model:<10} mean {mean[model]:.3f}"
                + (f"  ({buckets})" if buckets else "")
                + "\n"
            )
    out.write("shortest path length mean\n")
    for model in (SECURITY, SYSTEM):
        out.write(f"  {model:<10} {stats.shortest_path_length_mean[model]:.3f}\n")
    if stats.weakness_frequency:
        out.write("most detected weaknesses\n")
        for cwe_id, count in stats.weakness_frequency.items():
            out.write(f"  {cwe_id:<12} {count}\n")
    if stats.category_counts:
        out.write("category counts\n")
        for tag, count in stats.category_counts.items():
            out.write(f"  {tag:<12} {count}\n")
    return out.getvalue()


def _stats_csv(stats: CorpusStats) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["metric", "group", "key", "value"])
    writer.writerow(["relationshipCount", "", "", stats.relationship_count])
    writer.writerow(["relatedCheckFraction", "", "",
                     repr(stats.related_check_fraction)])
    simple = [
        ("dslElementCoverage", stats.dsl_element_coverage),
        ("checkElementCoverage", stats.check_element_coverage),
        ("analyzerElementCoverage", stats.analyzer_element_coverage),
        ("dslThreatCoverage", stats.dsl_threat_coverage),
        ("checkThreatCoverage", stats.check_threat_coverage),
        ("analyzerThreatCoverage", stats.analyzer_threat_coverage),
        ("shortestPathElementFrequency", stats.shortest_path_element_frequency),
        ("shortestPathThreatFrequency", stats.shortest_path_threat_frequency),
    ]
    for metric, values in simple:
        for key, value in values.items():
            writer.writerow([metric, "", key, repr(value)])
    for metric, histogram in (
        ("pathLengthHistogram", stats.path_length_histogram),
        ("pathCountHistogram", stats.path_count_histogram),
    ):
        for model, buckets in histogram.items():
            for bucket, count in sorted(buckets.items()):
                writer.writerow([metric, model, bucket, count])
    for metric, means in (
        ("pathLengthMean", stats.path_length_mean),
        ("shortestPathLengthMean", stats.shortest_path_length_mean),
        ("pathCountMean", stats.path_count_mean),
    ):
        for model, value in means.items():
            writer.writerow([metric, model, "", repr(value)])
    for cwe_id, count in stats.weakness_frequency.items():
        writer.writerow(["weaknessFrequency", "", cwe_id, count])
    for tag, count in stats.category_counts.items():
        writer.writerow(["categoryCounts", "", tag, count])
    return out.getvalue()


def cmd_stats(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    loaded = _load(config)
    _report_diagnostics(loaded)
    if not loaded.corpus.ok:
        return EXIT_DOMAIN
    pairs = all_relationships(
        loaded.graph, node_simple=not config.edge_simple
    )
    stats = corpus_stats(
        loaded.graph, pairs, loaded.corpus.documents,
        transitive=config.transitive,
    )
    if args.format == "machine":
        print(json.dumps(stats.to_json(), indent=2, ensure_ascii=False))
    elif args.format == "csv":
        sys.stdout.write(_stats_csv(stats))
    else:
        sys.stdout.write(_stats_text(stats))
    return EXIT_OK


# -- export ---------------------------------------------------------------------


def cmd_export(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    loaded = _load(config)
    _report_diagnostics(loaded)
    if not loaded.corpus.ok:
        return EXIT_DOMAIN
    pairs = all_relationships(
        loaded.graph, node_simple=not config.edge_simple
    )
    stats = corpus_stats(
        loaded.graph, pairs, loaded.corpus.documents,
        transitive=config.transitive,
    )

    html_target = args.html
    bundle_target = args.bundle
    if html_target is None and bundle_target is None:
        html_target = ""
        bundle_target = ""
    out_dir = Path(args.out)

    if bundle_target is not None:
        bundle_path = (
            Path(bundle_target)
            if bundle_target
            else out_dir / f"corpus{BUNDLE_SUFFIX}"
        )
        export_bundle(loaded.graph, pairs, stats, loaded.corpus.documents,
                      bundle_path, loaded.catalog)
        print(f"bundle: {bundle_path}")
    if html_target is not None:
        site_dir = Path(html_target) if html_target else out_dir / "site"
        export_html(loaded.graph, pairs, stats, loaded.corpus.documents,
                    site_dir)
        print(f"site: {site_dir}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


_COMMANDS = {
    "validate": cmd_validate,
    "relate": cmd_relate,
    "stats": cmd_stats,
    "export": cmd_export,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return error.code if isinstance(error.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as error:
        print(f"usage error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownSelector as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_DOMAIN
    except CatalogError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as error:
        print(f"i/o error: {error}", file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
