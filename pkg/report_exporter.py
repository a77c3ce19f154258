"""Text renderings of query results and reports, and atomic file output."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Optional, Union

from rdf_core import Term
from turtle_io import PrefixTable, format_term

if TYPE_CHECKING:
    from corpus_gen import StatsReport
    from sparql import SolutionTable
    from uniprot_xml import ResolutionReport


def _format_cell(term: Optional[Term], prefixes: PrefixTable) -> str:
    """Return the TSV cell for ``term``; unbound is the empty string."""

    if term is None:
        return ""
    return format_term(term, prefixes)


def format_solution_tsv(table: "SolutionTable", prefixes: PrefixTable) -> str:
    """Header of ``?var`` names, then one line per row."""

    lines = ["\t".join(f"?{name}" for name in table.header)]
    for row in table.rows:
        lines.append("\t".join(_format_cell(term, prefixes) for term in row))
    return "\n".join(lines) + "\n"


def format_stale_tsv(rows: Iterable[tuple[Term, Optional[Term], str]], prefixes: PrefixTable) -> str:
    lines = ["attribution\tsource\tdate"]
    for node, source, stamp in rows:
        lines.append(f"{_format_cell(node, prefixes)}\t{_format_cell(source, prefixes)}\t{stamp}")
    return "\n".join(lines) + "\n"


def format_resolution_report(report: "ResolutionReport") -> str:
    lines = [f"{report.accession}\t{report.summary()}"]
    for link in report.dangling:
        lines.append(f"{report.accession}\tdangling\t{link.key}\t{link.path}")
    for key in report.unused:
        lines.append(f"{report.accession}\tunused\t{key}")
    return "\n".join(lines) + "\n"


def format_stats_report(stats: "StatsReport") -> str:
    """Return ``key: value`` lines followed by the date histogram."""

    lines = [
        f"total triples: {stats.total}",
        f"metadata triples: {stats.metadata}/{stats.total}",
        f"metadata fraction: {stats.fraction:.4f}",
        f"attributed statements: {stats.attributed_statements}",
        f"distinct sources: {stats.distinct_sources}",
    ]
    if stats.empty:
        lines.append("empty: true")
    for category, count in stats.source_categories.items():
        lines.append(f"sources ({category}): {count}")
    if stats.date_histogram:
        lines.append("dates:")
        lines.extend(f"  {month}\t{count}" for month, count in stats.date_histogram.items())
    return "\n".join(lines) + "\n"


def write_atomic(path: Union[str, Path], data: Union[str, bytes, Iterable[str]]) -> None:
    """Write ``data`` to ``path`` through a temporary file and a rename.

    ``data`` may be text, bytes or an iterable of text chunks.  On any
    error the temporary file is removed and ``path`` is left untouched.
    """

    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=directory)
    try:
        if isinstance(data, bytes):
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        else:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                if isinstance(data, str):
                    fh.write(data)
                else:
                    for chunk in data:
                        fh.write(chunk)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise
