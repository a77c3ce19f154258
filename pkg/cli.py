"""Command line front end for uniprov.

Commands::

    convert  XML... [-o OUT]                 evidence XML -> reified Turtle
    query    DATA... QUERY                   run a query, print TSV
    rewrite  QUERY                           print the expanded query
    validate XML...                          evidence-key resolution report
    stale    DATA... --before YYYY-MM-DD     attributions older than a date
    gen      [--config FILE] [flags] [-o OUT]
    stats    DATA... [--histogram PNG] [--pie PNG]

Data goes to standard output (or ``-o``); warnings and reports of problems
go to standard error through :mod:`logging`.  Exit status 0 means success,
1 a data error (dangling evidence keys, invalid values) and 2 a usage,
syntax, configuration or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from datetime import date
from enum import IntEnum
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO

import data_validator
import logger as log_setup
import settings
from corpus_gen import GenConfig, GenerationReport, stats, stream_turtle
from evidence_model import find_stale_attributions, load_category_rules
from rdf_core import Iri, StructuralError, TripleSet, load_document
from report_exporter import (
    format_resolution_report,
    format_solution_tsv,
    format_stale_tsv,
    format_stats_report,
    write_atomic,
)
from settings import SettingsModel, Vocabulary
from sparql import QuerySyntaxError, evaluate, expand_reification, format_query, parse_query
from stats_visuals import ChartFactory, render_png
from turtle_io import (
    PrefixTable,
    TurtleSyntaxError,
    load_prefix_file,
    parse_turtle_with_report,
    serialize_turtle,
)
from uniprot_xml import (
    ConversionPolicy,
    EvidenceError,
    EvidenceXmlError,
    convert_documents,
    parse_entries_xml,
    resolve_evidence,
)

logger = logging.getLogger(__name__)


class ExitStatus(IntEnum):
    OK = 0
    DATA_ERROR = 1
    USAGE_ERROR = 2


@dataclass
class CliContext:
    settings: SettingsModel
    prefixes: PrefixTable
    vocab: Vocabulary
    out: TextIO


def _date_arg(text: str) -> date:
    try:
        return data_validator.parse_iso_date(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _fraction_arg(text: str) -> float:
    try:
        value = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not data_validator.is_fraction(value):
        raise argparse.ArgumentTypeError(f"fraction must lie in [0, 1]: {text!r}")
    return value


def _count_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if not data_validator.is_non_negative_int(value):
        raise argparse.ArgumentTypeError(f"must not be negative: {text!r}")
    return value


def _read_text(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _load_data(paths: Sequence[Path], ctx: CliContext) -> tuple[TripleSet, PrefixTable]:
    """Parse every data file into one store.

    With more than one file the blank labels of each are scoped by a
    ``d<N>`` suffix.  The returned table adds the files' own prefixes.
    """
    store = TripleSet()
    table = ctx.prefixes.copy()
    scoped = len(paths) > 1
    for number, path in enumerate(paths, start=1):
        result = parse_turtle_with_report(_read_text(path), ctx.prefixes)
        load_document(store, result.store, f"d{number}" if scoped else None)
        for label, namespace in result.prefixes.items():
            table.bind(label, namespace)
    logger.info("Loaded %d triples from %d file(s)", len(store), len(paths))
    return store, table


def _emit(ctx: CliContext, output: Optional[Path], data) -> None:
    if output is None:
        if isinstance(data, str):
            ctx.out.write(data)
        else:
            for chunk in data:
                ctx.out.write(chunk)
        ctx.out.flush()
    else:
        write_atomic(output, data)
        logger.info("Wrote %s", output)


def cmd_convert(args: argparse.Namespace, ctx: CliContext) -> ExitStatus:
    if args.policy:
        policy = ConversionPolicy.load(args.policy, ctx.prefixes)
    else:
        policy = ConversionPolicy.default(ctx.prefixes)
    docs = []
    for path in args.xml:
        docs.extend(parse_entries_xml(_read_text(path)))
    for doc in docs:
        logger.info("Entry %s: %s", doc.accession, resolve_evidence(doc).summary())
    store = convert_documents(docs, policy, ctx.vocab)
    _emit(ctx, args.output, serialize_turtle(store, ctx.prefixes))
    return ExitStatus.OK


def cmd_query(args: argparse.Namespace, ctx: CliContext) -> ExitStatus:
    store, table = _load_data(args.data, ctx)
    query = parse_query(_read_text(args.query), ctx.prefixes)
    query = expand_reification(query, args.strict_statement_type, ctx.vocab)
    result = evaluate(query, store, ctx.vocab, opaque_statement_nodes=not args.transparent_statements)
    _emit(ctx, None, format_solution_tsv(result, table))
    return ExitStatus.OK


def cmd_rewrite(args: argparse.Namespace, ctx: CliContext) -> ExitStatus:
    query = parse_query(_read_text(args.query), ctx.prefixes)
    query = expand_reification(query, args.strict_statement_type, ctx.vocab)
    _emit(ctx, None, format_query(query, ctx.prefixes))
    return ExitStatus.OK


def cmd_validate(args: argparse.Namespace, ctx: CliContext) -> ExitStatus:
    status = ExitStatus.OK
    for path in args.xml:
        for doc in parse_entries_xml(_read_text(path)):
            report = resolve_evidence(doc)
            ctx.out.write(format_resolution_report(report))
            for link in report.dangling:
                logger.error("Entry %s: undeclared evidence key %s on %s", doc.accession, link.key, link.path)
            for key in report.unused:
                logger.warning("Entry %s: evidence %s is declared but never referenced", doc.accession, key)
            if not report.ok:
                status = ExitStatus.DATA_ERROR
    ctx.out.flush()
    return status


def cmd_stale(args: argparse.Namespace, ctx: CliContext) -> ExitStatus:
    store, table = _load_data(args.data, ctx)
    report = find_stale_attributions(store, args.before, ctx.vocab)
    for node, value in report.unparseable:
        logger.warning("Attribution %s has an unparseable date %s", node, value)
    rows = []
    for entry in report.stale:
        sources = store.objects(entry.node, Iri(ctx.vocab.source)) or [None]
        rows.extend((entry.node, source, entry.date.isoformat()) for source in sources)
    _emit(ctx, None, format_stale_tsv(rows, table))
    return ExitStatus.OK


def cmd_gen(args: argparse.Namespace, ctx: CliContext) -> ExitStatus:
    overrides = {
        "entries": args.entries,
        "statements_per_entry": args.statements_per_entry,
        "attribution_fraction": args.fraction,
        "source_pool": args.sources,
        "date_start": args.date_start,
        "date_end": args.date_end,
        "seed": args.seed,
        "entity_links": True if args.entity_links else None,
        "evidence_tags": True if args.evidence_tags else None,
    }
    if args.config:
        cfg = GenConfig.load(args.config, **overrides)
    else:
        cfg = GenConfig.from_key_values({}, **overrides)
    report = GenerationReport()
    _emit(ctx, args.output, stream_turtle(cfg, ctx.prefixes, ctx.vocab, report))
    logger.info(
        "Generated %d triples: %d base, %d metadata",
        report.total,
        report.base,
        report.metadata,
    )
    return ExitStatus.OK


def cmd_stats(args: argparse.Namespace, ctx: CliContext) -> ExitStatus:
    store, table = _load_data(args.data, ctx)
    rules = load_category_rules(ctx.settings.source_categories, table)
    report = stats(store, ctx.vocab, category_rules=rules)
    _emit(ctx, None, format_stats_report(report))
    charts = ChartFactory()
    if args.histogram:
        write_atomic(args.histogram, render_png(charts.create_date_histogram(report.date_histogram)))
        logger.info("Wrote date histogram to %s", args.histogram)
    if args.pie:
        write_atomic(args.pie, render_png(charts.create_metadata_pie(report.metadata, report.total)))
        logger.info("Wrote metadata chart to %s", args.pie)
    return ExitStatus.OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniprov",
        description="Statement-level provenance for UniProt-style RDF.",
    )
    parser.add_argument("--prefixes", type=Path, help="Turtle file of @prefix lines overriding the defaults")
    parser.add_argument("--policy", type=Path, help="key = value conversion policy for 'convert'")
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    parser.add_argument("--log-file", type=Path, help="also write log records to this file")
    commands = parser.add_subparsers(dest="command", required=True)

    convert = commands.add_parser("convert", help="convert evidence XML to reified Turtle")
    convert.add_argument("xml", nargs="+", type=Path)
    convert.add_argument("-o", "--output", type=Path)
    convert.set_defaults(handler=cmd_convert)

    query = commands.add_parser("query", help="evaluate a query over Turtle data")
    query.add_argument("data", nargs="+", type=Path)
    query.add_argument("query", type=Path)
    query.add_argument("--strict-statement-type", action="store_true", help="also require rdf:type rdf:Statement")
    query.add_argument("--format", choices=["tsv"], default="tsv")
    query.add_argument(
        "--transparent-statements",
        action="store_true",
        help="let any variable bind reification nodes",
    )
    query.set_defaults(handler=cmd_query)

    rewrite = commands.add_parser("rewrite", help="print the query with reification(...) expanded")
    rewrite.add_argument("query", type=Path)
    rewrite.add_argument("--strict-statement-type", action="store_true")
    rewrite.set_defaults(handler=cmd_rewrite)

    validate = commands.add_parser("validate", help="check evidence keys of XML entries")
    validate.add_argument("xml", nargs="+", type=Path)
    validate.set_defaults(handler=cmd_validate)

    stale = commands.add_parser("stale", help="list attributions dated before a cutoff")
    stale.add_argument("data", nargs="+", type=Path)
    stale.add_argument("--before", type=_date_arg, required=True, metavar="YYYY-MM-DD")
    stale.set_defaults(handler=cmd_stale)

    gen = commands.add_parser("gen", help="generate a synthetic corpus")
    gen.add_argument("--config", type=Path, help="key = value generator settings")
    gen.add_argument("--entries", type=_count_arg)
    gen.add_argument("--statements-per-entry", type=_count_arg)
    gen.add_argument("--fraction", type=_fraction_arg, help="attribution fraction, e.g. 1/45")
    gen.add_argument("--sources", type=_count_arg, help="source pool size")
    gen.add_argument("--date-start", type=_date_arg)
    gen.add_argument("--date-end", type=_date_arg)
    gen.add_argument("--seed", type=_count_arg)
    gen.add_argument("--entity-links", action="store_true")
    gen.add_argument("--evidence-tags", action="store_true")
    gen.add_argument("-o", "--output", type=Path)
    gen.set_defaults(handler=cmd_gen)

    stats_cmd = commands.add_parser("stats", help="metadata statistics of Turtle data")
    stats_cmd.add_argument("data", nargs="+", type=Path)
    stats_cmd.add_argument("--histogram", type=Path, help="save the date histogram as PNG")
    stats_cmd.add_argument("--pie", type=Path, help="save the metadata/base split as PNG")
    stats_cmd.set_defaults(handler=cmd_stats)

    return parser


def _load_context(args: argparse.Namespace) -> CliContext:
    loaded = settings.load_settings()
    table = PrefixTable(loaded.prefixes)
    if args.prefixes:
        table = load_prefix_file(args.prefixes, table)
    vocab = Vocabulary.from_prefixes(table.as_dict())
    return CliContext(loaded, table, vocab, sys.stdout)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    log_setup.init_logging(log_file=args.log_file, quiet=args.quiet)

    handler: Callable[[argparse.Namespace, CliContext], ExitStatus] = args.handler
    try:
        return int(handler(args, _load_context(args)))
    except (TurtleSyntaxError, QuerySyntaxError, EvidenceXmlError) as exc:
        logger.error("Syntax error: %s", exc)
        return int(ExitStatus.USAGE_ERROR)
    except (EvidenceError, StructuralError) as exc:
        logger.error("%s", exc)
        return int(ExitStatus.DATA_ERROR)
    except (OSError, ValueError) as exc:
        logger.error("%s", exc)
        return int(ExitStatus.USAGE_ERROR)
