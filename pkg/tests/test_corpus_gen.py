"""Tests for the synthetic corpus generator and :func:`corpus_gen.stats`."""

from __future__ import annotations

import unittest
from datetime import date
from pathlib import Path
from tempfile import TemporaryDirectory

import corpus_gen
import turtle_io
from corpus_gen import GenConfig, GenerationReport
from evidence_model import SourceCategory
from golden import NAME_PROVENANCE_CORRECTED_TTL, NAME_PROVENANCE_TTL
from rdf_core import Iri, TripleSet

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
HAMAP = "http://purl.uniprot.org/hamap/"


class GenConfigTests(unittest.TestCase):
    def test_defaults(self) -> None:
        cfg = GenConfig()
        self.assertEqual(cfg.entries, 1000)
        self.assertAlmostEqual(cfg.attribution_fraction, 1 / 45)
        self.assertEqual(cfg.span_days, 9)

    def test_fraction_as_ratio(self) -> None:
        self.assertAlmostEqual(GenConfig(attribution_fraction="1/9").attribution_fraction, 1 / 9)

    def test_rejects_inverted_date_range(self) -> None:
        with self.assertRaises(ValueError):
            GenConfig(date_start=date(2011, 1, 1), date_end=date(2010, 1, 1))

    def test_rejects_empty_source_pool(self) -> None:
        with self.assertRaises(ValueError):
            GenConfig(source_pool=0)
        self.assertEqual(GenConfig(source_pool=0, attribution_fraction=0).source_pool, 0)

    def test_rejects_fraction_above_one(self) -> None:
        with self.assertRaises(ValueError):
            GenConfig(attribution_fraction=1.5)

    def test_key_value_file_with_overrides(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "gen.conf"
            path.write_text(
                "entries = 20\nattribution_fraction = 1/45\ndate_start = 2010-01-01\nentity_links = yes\n",
                encoding="utf-8",
            )
            cfg = GenConfig.load(path, entries=5, seed=None)
        self.assertEqual(cfg.entries, 5)
        self.assertTrue(cfg.entity_links)
        self.assertEqual(cfg.date_start, date(2010, 1, 1))
        self.assertEqual(cfg.seed, 0)

    def test_unknown_key(self) -> None:
        with self.assertRaises(ValueError):
            GenConfig.from_key_values({"entires": "10"})

    def test_invalid_value(self) -> None:
        with self.assertRaises(ValueError) as ctx:
            GenConfig.from_key_values({"date_start": "2010/01/01"})
        self.assertEqual(str(ctx.exception), "Invalid generator configuration")


class GenerateTests(unittest.TestCase):
    def test_zero_fraction_has_no_reification(self) -> None:
        store, report = corpus_gen.generate_with_report(GenConfig(entries=50, attribution_fraction=0))
        self.assertEqual(report.metadata, 0)
        self.assertEqual(len(store), 500)
        self.assertEqual(store.count(None, Iri(RDF + "type"), Iri(RDF + "Statement")), 0)

    def test_full_fraction_reifies_everything(self) -> None:
        store, report = corpus_gen.generate_with_report(GenConfig(entries=10, attribution_fraction=1))
        self.assertEqual(report.reification, 5 * report.base)
        self.assertEqual(corpus_gen.stats(store).attributed_statements, report.base)

    def test_default_fraction_gives_ten_percent_metadata(self) -> None:
        cfg = GenConfig(entries=10_000, statements_per_entry=10, seed=1)
        store = corpus_gen.generate(cfg)
        summary = corpus_gen.stats(store)
        self.assertAlmostEqual(summary.fraction, 0.10, delta=0.01)

    def test_fraction_is_monotone_in_attribution_fraction(self) -> None:
        fractions = []
        for f in (0.0, 0.01, 1 / 45, 0.05, 0.2, 0.5, 1.0):
            store = corpus_gen.generate(GenConfig(entries=300, attribution_fraction=f, seed=42))
            fractions.append(corpus_gen.stats(store).fraction)
        self.assertEqual(fractions, sorted(fractions))
        self.assertEqual(fractions[0], 0.0)

    def test_stats_agree_with_generation_report(self) -> None:
        cfg = GenConfig(entries=400, attribution_fraction=0.1, entity_links=True, evidence_tags=True, seed=9)
        store, report = corpus_gen.generate_with_report(cfg)
        summary = corpus_gen.stats(store)
        self.assertEqual(summary.total, report.total)
        self.assertEqual(summary.metadata, report.metadata)
        self.assertEqual(len(store), report.total)

    def test_same_seed_same_stream(self) -> None:
        cfg = GenConfig(entries=30, attribution_fraction=0.2, seed=123, entity_links=True)
        first = "".join(corpus_gen.stream_turtle(cfg))
        self.assertEqual(first, "".join(corpus_gen.stream_turtle(cfg)))
        self.assertNotEqual(first, "".join(corpus_gen.stream_turtle(cfg.model_copy(update={"seed": 124}))))

    def test_stream_parses_back_to_generated_store(self) -> None:
        cfg = GenConfig(entries=30, attribution_fraction=0.2, seed=5, evidence_tags=True)
        report = GenerationReport()
        text = "".join(corpus_gen.stream_turtle(cfg, report=report))
        parsed = turtle_io.parse_turtle(text)
        self.assertEqual(set(parsed), set(corpus_gen.generate(cfg)))
        self.assertEqual(len(parsed), report.total)

    def test_entries_are_independent(self) -> None:
        cfg = GenConfig(entries=20, attribution_fraction=0.3, seed=77)
        whole = corpus_gen.generate(cfg)
        alone = list(corpus_gen.iter_entry_triples(cfg, 13, set()))
        self.assertTrue(all(triple in whole for triple in alone))

    def test_dates_stay_in_range(self) -> None:
        cfg = GenConfig(entries=100, attribution_fraction=0.5, date_start=date(2010, 8, 1), date_end=date(2010, 8, 3))
        summary = corpus_gen.stats(corpus_gen.generate(cfg))
        self.assertEqual(list(summary.date_histogram), ["2010-08"])


class StatsTests(unittest.TestCase):
    def test_example_store(self) -> None:
        summary = corpus_gen.stats(turtle_io.parse_turtle(NAME_PROVENANCE_TTL))
        self.assertEqual((summary.metadata, summary.total), (8, 11))
        self.assertEqual(summary.attributed_statements, 1)
        self.assertEqual(summary.distinct_sources, 1)
        self.assertEqual(summary.date_histogram, {"2010-08": 1})

    def test_empty_store(self) -> None:
        summary = corpus_gen.stats(TripleSet())
        self.assertTrue(summary.empty)
        self.assertEqual(summary.fraction, 0.0)

    def test_invalid_dates_bucket(self) -> None:
        store = turtle_io.parse_turtle(NAME_PROVENANCE_CORRECTED_TTL + '_:3 :date "Aug 2010" .\n')
        self.assertEqual(corpus_gen.stats(store).date_histogram, {"2010-08": 1, "invalid": 1})

    def test_source_categories(self) -> None:
        store = corpus_gen.generate(GenConfig(entries=100, attribution_fraction=0.5, source_pool=4))
        summary = corpus_gen.stats(store, category_rules={HAMAP: SourceCategory.PROGRAM})
        self.assertEqual(summary.source_categories, {"Program": summary.distinct_sources})
        other = corpus_gen.stats(store, category_rules={})
        self.assertEqual(other.source_categories, {"Unclassified": summary.distinct_sources})

    def test_custom_metadata_predicates(self) -> None:
        store = turtle_io.parse_turtle(NAME_PROVENANCE_TTL)
        summary = corpus_gen.stats(store, metadata_predicates=frozenset({"http://purl.uniprot.org/core/date"}))
        # the rdf:Statement typing triple always counts
        self.assertEqual(summary.metadata, 2)


if __name__ == "__main__":  # pragma: no cover - manual execution
    unittest.main()
