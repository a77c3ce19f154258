"""Tests for :mod:`uniprot_xml`."""

from __future__ import annotations

import unittest
from datetime import date
from pathlib import Path
from tempfile import TemporaryDirectory

import rdf_core
import turtle_io
import uniprot_xml
from evidence_model import SourceCategory
from golden import FULL_NAME, NAME_EVIDENCE_XML, NAME_PROVENANCE_TTL
from rdf_core import Blank, Iri, Literal, Triple
from uniprot_xml import (
    ConversionPolicy,
    DanglingEvidenceError,
    DuplicateEvidenceKeyError,
    EntryFormatError,
    EvidenceDecl,
    EvidenceXmlError,
    UnknownEvidenceTypeError,
)

CORE = "http://purl.uniprot.org/core/"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

TWO_SOURCES_XML = """\
<entry accession="P12345">
  <recommendedName>
    <fullName evidence="EA1 EA2">Example protein</fullName>
  </recommendedName>
  <evidence key="EA1" category="import" type="HAMAP" attribute="MF_00001" date="2010-01-01"/>
  <evidence key="EA2" category="import" type="HAMAP" attribute="MF_00002" date="2010-01-01"/>
</entry>
"""

DANGLING_XML = """\
<entry accession="Q65EJ5">
  <recommendedName ref="1">
    <fullName evidence="EA9">4-hydroxythreonine-4-phosphate dehydrogenase</fullName>
  </recommendedName>
  <evidence key="EA5" category="import" type="HAMAP" attribute="MF_00536" date="2010-08-04"/>
</entry>
"""

CONTAINER_EVIDENCE_XML = """\
<entry accession="P00002">
  <comment type="function" evidence="EA1">
    <text>Catalyzes a reaction.</text>
  </comment>
  <evidence key="EA1" category="import" type="HAMAP" attribute="MF_00001" date="2010-01-01"/>
</entry>
"""

NAME_CONTAINER_EVIDENCE_XML = """\
<entry accession="P00003">
  <recommendedName evidence="EA1">
    <fullName>Example protein</fullName>
  </recommendedName>
  <evidence key="EA1" category="import" type="HAMAP" attribute="MF_00001" date="2010-01-01"/>
</entry>
"""


class ParseEntryTests(unittest.TestCase):
    def test_name_evidence_fragment(self) -> None:
        doc = uniprot_xml.parse_entry_xml(NAME_EVIDENCE_XML)
        self.assertEqual(doc.accession, "Q65EJ5")
        self.assertEqual(len(doc.values), 1)
        value = doc.values[0]
        self.assertEqual(value.path, "recommendedName/fullName")
        self.assertEqual(value.value, FULL_NAME)
        self.assertEqual(value.evidence_keys, ("EA5",))
        self.assertEqual(
            doc.evidence,
            {"EA5": EvidenceDecl("EA5", "import", "HAMAP", "MF_00536", date(2010, 8, 4))},
        )

    def test_opaque_attributes_are_kept(self) -> None:
        doc = uniprot_xml.parse_entry_xml(NAME_EVIDENCE_XML)
        self.assertEqual(doc.element_attributes[0].path, "recommendedName")
        self.assertEqual(doc.element_attributes[0].attributes, {"ref": "1"})

    def test_container_evidence_is_a_value(self) -> None:
        doc = uniprot_xml.parse_entry_xml(CONTAINER_EVIDENCE_XML)
        self.assertEqual([v.path for v in doc.values], ["comment", "comment/text"])
        comment = doc.values[0]
        self.assertTrue(comment.is_container)
        self.assertEqual((comment.value, comment.evidence_keys), ("function", ("EA1",)))
        self.assertEqual(doc.values[1].evidence_keys, ())

    def test_container_without_type_uses_its_text(self) -> None:
        doc = uniprot_xml.parse_entry_xml(NAME_CONTAINER_EVIDENCE_XML)
        self.assertEqual(doc.values[0].value, "Example protein")

    def test_entry_without_evidence(self) -> None:
        doc = uniprot_xml.parse_entry_xml(
            '<entry accession="X1"><recommendedName><fullName>N</fullName></recommendedName>'
            "<comment>free text</comment></entry>"
        )
        self.assertEqual([v.evidence_keys for v in doc.values], [(), ()])
        self.assertEqual(doc.evidence, {})

    def test_duplicate_key(self) -> None:
        text = NAME_EVIDENCE_XML.replace(
            "</entry>",
            '<evidence key="EA5" category="import" type="HAMAP" attribute="MF_1" date="2011-01-01"/></entry>',
        )
        with self.assertRaises(DuplicateEvidenceKeyError):
            uniprot_xml.parse_entry_xml(text)

    def test_malformed_xml_has_location(self) -> None:
        with self.assertRaises(EvidenceXmlError) as ctx:
            uniprot_xml.parse_entry_xml('<entry accession="X1">\n<fullName>oops</entry>')
        self.assertEqual(ctx.exception.line, 2)

    def test_invalid_date(self) -> None:
        text = NAME_EVIDENCE_XML.replace("2010-08-04", "04/08/2010")
        with self.assertRaises(EntryFormatError):
            uniprot_xml.parse_entry_xml(text)

    def test_accession_child_and_namespace(self) -> None:
        text = (
            '<uniprot xmlns="http://uniprot.org/uniprot">'
            "<entry><accession>A1</accession><name>ONE</name></entry>"
            '<entry accession="A2"><name>TWO</name></entry>'
            "</uniprot>"
        )
        docs = uniprot_xml.parse_entries_xml(text)
        self.assertEqual([d.accession for d in docs], ["A1", "A2"])
        self.assertEqual(docs[0].values[0].path, "name")

    def test_empty_file(self) -> None:
        self.assertEqual(uniprot_xml.parse_entries_xml("   \n"), [])


class ResolveEvidenceTests(unittest.TestCase):
    def test_clean_fragment(self) -> None:
        report = uniprot_xml.resolve_evidence(uniprot_xml.parse_entry_xml(NAME_EVIDENCE_XML))
        self.assertEqual((len(report.resolved), len(report.dangling), len(report.unused)), (1, 0, 0))
        self.assertTrue(report.ok)
        self.assertEqual(report.summary(), "1 resolved, 0 dangling, 0 unused")

    def test_container_evidence_is_referenced(self) -> None:
        report = uniprot_xml.resolve_evidence(uniprot_xml.parse_entry_xml(CONTAINER_EVIDENCE_XML))
        self.assertEqual(report.summary(), "1 resolved, 0 dangling, 0 unused")
        self.assertEqual(report.resolved[0].path, "comment")

    def test_dangling_and_unused(self) -> None:
        report = uniprot_xml.resolve_evidence(uniprot_xml.parse_entry_xml(DANGLING_XML))
        self.assertEqual([link.key for link in report.dangling], ["EA9"])
        self.assertEqual(report.unused, ["EA5"])
        self.assertFalse(report.ok)

    def test_order_independent(self) -> None:
        doc = uniprot_xml.parse_entry_xml(TWO_SOURCES_XML)
        first = uniprot_xml.resolve_evidence(doc)
        doc.values.reverse()
        second = uniprot_xml.resolve_evidence(doc)
        self.assertEqual(sorted(map(repr, first.resolved)), sorted(map(repr, second.resolved)))
        self.assertEqual(first.unused, second.unused)
        self.assertEqual(uniprot_xml.resolve_evidence(doc), second)


class ConversionTests(unittest.TestCase):
    def test_fragment_matches_reference_rdf(self) -> None:
        store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(NAME_EVIDENCE_XML))
        expected = turtle_io.parse_turtle(NAME_PROVENANCE_TTL)
        self.assertEqual(len(store), 11)
        self.assertTrue(rdf_core.isomorphic(store, expected))
        self.assertEqual(set(store), set(expected))

    def test_container_evidence_is_reified(self) -> None:
        store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(CONTAINER_EVIDENCE_XML))
        entity = Iri("http://purl.uniprot.org/uniprot/P00002")
        self.assertIn(Triple(entity, Iri(CORE + "comment"), Literal("function")), store)
        self.assertIn(Triple(entity, Iri(CORE + "text"), Literal("Catalyzes a reaction.")), store)
        statement = [t.subject for t in store.match(None, Iri(RDF + "predicate"), Iri(CORE + "comment"))]
        self.assertEqual(len(statement), 1)
        self.assertEqual(store.objects(statement[0], Iri(RDF + "object")), [Literal("function")])
        # two base, five reification, the entity link, source and date
        self.assertEqual(len(store), 10)

    def test_name_container_evidence_covers_the_link(self) -> None:
        store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(NAME_CONTAINER_EVIDENCE_XML))
        entity = Iri("http://purl.uniprot.org/uniprot/P00003")
        self.assertIn(Triple(entity, Iri(CORE + "recommendedName"), Blank("0")), store)
        self.assertIn(Triple(Blank("1"), Iri(RDF + "object"), Blank("0")), store)
        self.assertIn(Triple(Blank("0"), Iri(CORE + "fullName"), Literal("Example protein")), store)
        self.assertEqual(len(store), 11)

    def test_no_evidence_gives_base_triples_only(self) -> None:
        doc = uniprot_xml.parse_entry_xml(NAME_EVIDENCE_XML.replace(' evidence="EA5"', ""))
        store = uniprot_xml.xml_to_rdf(doc)
        self.assertEqual(len(store), 3)
        self.assertEqual(store.count(None, Iri(RDF + "subject"), None), 0)

    def test_two_sources_triple_count(self) -> None:
        store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(TWO_SOURCES_XML))
        links, attributions = 2, 2
        # base 3, reification 5 per link, entity link per link, source+date per attribution
        self.assertEqual(len(store), 3 + 5 * links + links + 2 * attributions)
        self.assertEqual(store.count(None, Iri(RDF + "type"), Iri(RDF + "Statement")), 2)

    def test_shared_attribution_node(self) -> None:
        text = """\
<entry accession="P1">
  <name evidence="E1">first</name>
  <comment evidence="E2">second</comment>
  <evidence key="E1" category="import" type="HAMAP" attribute="MF_00001" date="2010-01-01"/>
  <evidence key="E2" category="import" type="HAMAP" attribute="MF_00001" date="2010-01-01"/>
</entry>
"""
        store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(text))
        self.assertEqual(store.count(None, Iri(CORE + "source"), None), 1)
        self.assertEqual(store.count(None, Iri(CORE + "attribution"), None), 3)
        self.assertIn(
            Literal("first"),
            store.objects(Iri("http://purl.uniprot.org/uniprot/P1"), Iri(CORE + "name")),
        )

    def test_conflicting_categories_on_shared_node(self) -> None:
        text = """\
<entry accession="P1">
  <name evidence="E1">first</name>
  <comment evidence="E2">second</comment>
  <evidence key="E1" category="import" type="HAMAP" attribute="MF_00001" date="2010-08-04"/>
  <evidence key="E2" category="curated" type="HAMAP" attribute="MF_00001" date="2010-08-04"/>
</entry>
"""
        policy = ConversionPolicy(category_map={"import": "Database", "curated": "Literature"})
        with self.assertLogs("uniprot_xml", level="WARNING") as logs:
            store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(text), policy)
        self.assertTrue(any("Database" in line and "Literature" in line for line in logs.output))
        self.assertEqual(store.count(None, Iri(CORE + "source"), None), 1)
        self.assertCountEqual(
            [t.object for t in store.match(None, Iri(CORE + "category"), None)],
            [Literal("Database"), Literal("Literature")],
        )

    def test_dangling_strict(self) -> None:
        with self.assertRaises(DanglingEvidenceError) as ctx:
            uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(DANGLING_XML))
        self.assertIn("EA9", str(ctx.exception))

    def test_dangling_lenient(self) -> None:
        policy = ConversionPolicy(strict=False)
        with self.assertLogs("uniprot_xml", level="WARNING"):
            store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(DANGLING_XML), policy)
        self.assertEqual(len(store), 3)

    def test_unknown_evidence_type(self) -> None:
        text = NAME_EVIDENCE_XML.replace('type="HAMAP"', 'type="PROSITE"')
        with self.assertRaises(UnknownEvidenceTypeError):
            uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(text))

    def test_iri_node_style(self) -> None:
        policy = ConversionPolicy(node_style="iri")
        store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(NAME_EVIDENCE_XML), policy)
        self.assertEqual(len(store), 11)
        self.assertFalse(any(isinstance(term, rdf_core.Blank) for term in store.terms()))
        self.assertIn(Iri("urn:uniprov:node:statement/Q65EJ5/0"), store.terms())

    def test_category_mapping_adds_category_triple(self) -> None:
        policy = ConversionPolicy(category_map={"import": "Database"})
        store = uniprot_xml.xml_to_rdf(uniprot_xml.parse_entry_xml(NAME_EVIDENCE_XML), policy)
        self.assertEqual(store.objects(None, Iri(CORE + "category")), [Literal("Database")])

    def test_documents_share_context(self) -> None:
        docs = uniprot_xml.parse_entries_xml(f"<entries>{NAME_EVIDENCE_XML}{TWO_SOURCES_XML}</entries>")
        store = uniprot_xml.convert_documents(docs)
        self.assertEqual(len(store), 11 + 19)


class PolicyTests(unittest.TestCase):
    def test_key_value_policy(self) -> None:
        with TemporaryDirectory() as tmp:
            path = Path(tmp) / "policy.conf"
            path.write_text(
                "# conversion policy\n"
                "strict = false\n"
                "type.PROSITE = <https://prosite.expasy.org/>\n"
                "category.import = Database\n",
                encoding="utf-8",
            )
            policy = ConversionPolicy.load(path)
        self.assertFalse(policy.strict)
        self.assertEqual(policy.type_namespaces["PROSITE"], "https://prosite.expasy.org/")
        self.assertIn("HAMAP", policy.type_namespaces)
        self.assertIs(policy.category_map["import"], SourceCategory.DATABASE)

    def test_unknown_key(self) -> None:
        with self.assertRaises(ValueError):
            ConversionPolicy.from_key_values({"colour": "blue"})

    def test_bad_value(self) -> None:
        with self.assertRaises(ValueError):
            ConversionPolicy.from_key_values({"node_style": "hash"})


if __name__ == "__main__":  # pragma: no cover - manual execution
    unittest.main()
