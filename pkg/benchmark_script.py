"""Desk-scale performance check.

Builds a synthetic store of about one million triples and times the two
operations provenance users run most: a single predicate-bound ``match``
and the full provenance query for one source.  Targets are 50 ms and 2 s
on commodity hardware.  Run with ``python benchmark_script.py``; the exit
status is non-zero when a target is missed.
"""

from __future__ import annotations

import sys
import time
from datetime import date
from typing import Callable

import logger
from corpus_gen import GenConfig, generate_with_report
from rdf_core import Iri
from settings import DEFAULT_VOCABULARY
from sparql import run_query

BENCHMARK_CONFIG = GenConfig(
    entries=90_000,
    statements_per_entry=10,
    attribution_fraction=1 / 45,
    source_pool=2_000,
    date_start=date(2010, 1, 1),
    date_end=date(2010, 12, 31),
    seed=2010,
    entity_links=True,
)

PROVENANCE_QUERY = """
select ?protein ?date ?predicate ?object
where {
  ?reif rdf:subject ?subject ;
        rdf:predicate ?predicate ;
        rdf:object ?object ;
        :attribution ?attribution .
  ?protein :attribution ?attribution .
  ?attribution :source hamap:MF_00000 ;
               :date ?date .
}
"""

MATCH_TARGET_S = 0.050
QUERY_TARGET_S = 2.0


def _timed(fn: Callable[[], object]) -> tuple[float, object]:
    start = time.perf_counter()
    result = fn()
    return time.perf_counter() - start, result


def run_benchmark() -> bool:
    """Run the benchmark and print a summary; return ``True`` if all targets are met."""

    print("Generating corpus...", end="", flush=True)
    elapsed, (store, report) = _timed(lambda: generate_with_report(BENCHMARK_CONFIG))
    print(f"{report.total} triples in {elapsed:.1f}s")

    predicate = Iri(DEFAULT_VOCABULARY.full_name)
    checks: dict[str, tuple[float, float, int]] = {}

    print("Timing predicate match...", end="", flush=True)
    elapsed, matches = _timed(lambda: store.match(None, predicate, None))
    checks["predicate match"] = (elapsed, MATCH_TARGET_S, len(matches))
    print(f"{elapsed * 1000:.1f} ms")

    print("Timing provenance query...", end="", flush=True)
    elapsed, table = _timed(lambda: run_query(PROVENANCE_QUERY, store))
    checks["provenance query"] = (elapsed, QUERY_TARGET_S, len(table))
    print(f"{elapsed:.3f} s")

    print("\nSummary:")
    ok = True
    for name, (seconds, target, size) in checks.items():
        passed = seconds < target
        ok = ok and passed
        status = "SUCCESS" if passed else "FAIL"
        print(f" - {name}: {status} ({seconds:.4f}s, target {target}s, {size} results)")
    return ok


if __name__ == "__main__":
    logger.init_logging(quiet=True)
    sys.exit(0 if run_benchmark() else 1)
