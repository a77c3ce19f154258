"""Tests for :mod:`turtle_io`."""

from __future__ import annotations

import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

from hypothesis import given, settings as hypothesis_settings, strategies as st

import rdf_core
import turtle_io
from golden import FULL_NAME, NAME_PROVENANCE_CORRECTED_TTL, NAME_PROVENANCE_TTL
from rdf_core import Blank, Iri, Literal, Triple, TripleSet
from turtle_io import PrefixTable, TurtleSyntaxError, UnknownPrefixError

CORE = "http://purl.uniprot.org/core/"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"


class ParseTests(unittest.TestCase):
    def test_hand_typed_text_is_recovered(self) -> None:
        result = turtle_io.parse_turtle_with_report(NAME_PROVENANCE_TTL)
        self.assertEqual(len(result.store), 11)
        self.assertEqual(result.report.normalized_predicates, 3)
        self.assertEqual(result.report.subjectless_continuations, 1)
        self.assertTrue(result.report.missing_terminator)
        self.assertEqual(len(result.report.warnings), 2)

    def test_hand_typed_and_corrected_text_agree(self) -> None:
        hand_typed = set(turtle_io.parse_turtle(NAME_PROVENANCE_TTL))
        corrected = set(turtle_io.parse_turtle(NAME_PROVENANCE_CORRECTED_TTL))
        self.assertEqual(hand_typed, corrected)

    def test_subjectless_statement_describes_attribution_node(self) -> None:
        store = turtle_io.parse_turtle(NAME_PROVENANCE_TTL)
        source = store.match(Blank("2"), Iri(CORE + "source"), None)
        self.assertEqual([t.object for t in source], [Iri("http://purl.uniprot.org/hamap/MF_00536")])
        self.assertEqual(store.objects(Blank("2"), Iri(CORE + "date")), [Literal("2010-08-04")])

    def test_predicates_are_lowercased(self) -> None:
        store = turtle_io.parse_turtle(NAME_PROVENANCE_TTL)
        self.assertEqual(store.objects(Blank("1"), Iri(RDF + "object")), [Literal(FULL_NAME)])
        self.assertEqual(store.count(None, Iri(RDF + "Object"), None), 0)

    def test_keyword_a_and_iri_references(self) -> None:
        store = turtle_io.parse_turtle('<urn:x> a <urn:T> ; <urn:p> "v" , "w" .')
        self.assertIn(Triple(Iri("urn:x"), Iri(RDF + "type"), Iri("urn:T")), store)
        self.assertEqual(store.count(Iri("urn:x"), Iri("urn:p"), None), 2)

    def test_prefix_directive_overrides_default(self) -> None:
        store = turtle_io.parse_turtle("@prefix : <urn:ex:> .\n:s :p :o .")
        self.assertIn(Triple(Iri("urn:ex:s"), Iri("urn:ex:p"), Iri("urn:ex:o")), store)

    def test_escapes(self) -> None:
        store = turtle_io.parse_turtle(':s :p "tab\\there \\"q\\" \\u00e9" .')
        self.assertEqual(store.objects(), [Literal('tab\there "q" é')])

    def test_empty_document(self) -> None:
        self.assertEqual(len(turtle_io.parse_turtle("# nothing here\n")), 0)

    def test_unknown_prefix(self) -> None:
        with self.assertRaises(UnknownPrefixError) as ctx:
            turtle_io.parse_turtle(":s :p :o .\nnope:s :p :o .")
        self.assertEqual((ctx.exception.line, ctx.exception.column), (2, 1))

    def test_unterminated_string(self) -> None:
        with self.assertRaises(TurtleSyntaxError) as ctx:
            turtle_io.parse_turtle(':s :p "open .')
        self.assertEqual(ctx.exception.line, 1)
        self.assertEqual(ctx.exception.column, 7)

    def test_literal_subject(self) -> None:
        with self.assertRaises(TurtleSyntaxError):
            turtle_io.parse_turtle('"s" :p :o .')

    def test_leading_predicate_list_without_subject(self) -> None:
        with self.assertRaises(TurtleSyntaxError):
            turtle_io.parse_turtle(':p "o" .')

    def test_missing_terminator_in_the_middle(self) -> None:
        with self.assertRaises(TurtleSyntaxError):
            turtle_io.parse_turtle(":s :p :o\n:t :p :o .")


class PrefixTableTests(unittest.TestCase):
    def test_compact_prefers_longest_namespace(self) -> None:
        table = PrefixTable({"ex": "urn:ex:", "deep": "urn:ex:deep:"})
        self.assertEqual(table.compact("urn:ex:deep:x"), "deep:x")
        self.assertEqual(table.compact("urn:ex:x"), "ex:x")
        self.assertIsNone(table.compact("urn:other"))

    def test_compact_refuses_invalid_local_names(self) -> None:
        table = PrefixTable({"ex": "urn:ex:"})
        self.assertIsNone(table.compact("urn:ex:a/b"))
        self.assertIsNone(table.compact("urn:ex:trailing."))

    def test_rebound_label_is_not_used_for_old_namespace(self) -> None:
        table = PrefixTable({"ex": "urn:one:"})
        table.bind("ex", "urn:two:")
        self.assertIsNone(table.compact("urn:one:x"))
        self.assertEqual(table.expand("ex:x"), "urn:two:x")

    def test_expand_namespace_forms(self) -> None:
        table = PrefixTable.default()
        self.assertEqual(table.expand_namespace("hamap:"), "http://purl.uniprot.org/hamap/")
        self.assertEqual(table.expand_namespace("<urn:x:>"), "urn:x:")
        self.assertEqual(table.expand_namespace("http://example.org/"), "http://example.org/")
        with self.assertRaises(UnknownPrefixError):
            table.expand_namespace("nope:")

    def test_load_prefix_file(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "prefixes.ttl"
            path.write_text("@prefix hamap: <urn:hamap:> .\n@prefix ex: <urn:ex:> .\n", encoding="utf-8")
            table = turtle_io.load_prefix_file(path)
        self.assertEqual(table["hamap"], "urn:hamap:")
        self.assertEqual(table["ex"], "urn:ex:")
        self.assertEqual(table["rdf"], RDF)


class SerializeTests(unittest.TestCase):
    def test_groups_by_subject(self) -> None:
        store = turtle_io.parse_turtle(NAME_PROVENANCE_CORRECTED_TTL)
        text = turtle_io.serialize_turtle(store)
        self.assertIn('_:2 :source hamap:MF_00536 ;\n    :date "2010-08-04" .', text)
        self.assertTrue(text.startswith("@prefix : <http://purl.uniprot.org/core/> ."))

    def test_round_trip_of_example(self) -> None:
        store = turtle_io.parse_turtle(NAME_PROVENANCE_TTL)
        again = turtle_io.parse_turtle(turtle_io.serialize_turtle(store))
        self.assertTrue(rdf_core.isomorphic(store, again))

    def test_empty_store_without_prefixes(self) -> None:
        self.assertEqual(turtle_io.serialize_turtle(TripleSet(), PrefixTable()), "")


_LOCAL = st.from_regex(r"[A-Za-z0-9_\-]{0,6}", fullmatch=True)
_IRIS = st.one_of(
    _LOCAL.map(lambda local: Iri(CORE + local)),
    _LOCAL.map(lambda local: Iri("http://purl.uniprot.org/hamap/" + local)),
    st.sampled_from([Iri(RDF + "type"), Iri("urn:x:a/b"), Iri("http://example.org/a#b")]),
)
_BLANKS = st.from_regex(r"[A-Za-z0-9_][A-Za-z0-9_\-]{0,5}", fullmatch=True).map(Blank)
_LITERALS = st.text(max_size=20).map(Literal)
_TRIPLES = st.builds(
    Triple,
    st.one_of(_IRIS, _BLANKS),
    _IRIS,
    st.one_of(_IRIS, _BLANKS, _LITERALS),
)


class RoundTripPropertyTests(unittest.TestCase):
    @hypothesis_settings(max_examples=500, deadline=None)
    @given(st.lists(_TRIPLES, max_size=50))
    def test_parse_of_serialize_is_isomorphic(self, triples: list[Triple]) -> None:
        store = TripleSet(triples)
        text = turtle_io.serialize_turtle(store)
        again = turtle_io.parse_turtle(text)
        self.assertTrue(rdf_core.isomorphic(store, again))
        self.assertEqual(set(again), set(store))


if __name__ == "__main__":  # pragma: no cover - manual execution
    unittest.main()
