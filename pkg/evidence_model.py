"""Provenance vocabulary and the reification encoding of attributions.

An :class:`Attribution` records where a statement came from (``source``) and
when it was last updated (``date``), optionally with one of the four
historical evidence tags and a source category.  Attributions are attached
to individual statements through RDF reification::

    _:1 rdf:type rdf:Statement ;
        rdf:subject _:0 ; rdf:predicate :fullName ; rdf:object "..." ;
        :attribution _:2 .
    protein:Q65EJ5 :attribution _:2 .
    _:2 :source hamap:MF_00536 ; :date "2010-08-04" .

Evidence tags and categories have no standard RDF encoding; they are
written as plain literals under ``:evidence`` and ``:category``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Mapping, NamedTuple, Optional, Union

import data_validator
from rdf_core import Iri, Literal, StructuralError, Term, Triple, TripleSet, is_node
from settings import DEFAULT_VOCABULARY, Vocabulary
from turtle_io import PrefixTable

logger = logging.getLogger(__name__)


def _normalize_label(text: str) -> str:
    return "".join(ch for ch in text.lower() if ch.isalnum())


class EvidenceTag(Enum):
    EXPERIMENTAL = "Experimental"
    PROBABLE = "Probable"
    BY_SIMILARITY = "By similarity"
    POTENTIAL = "Potential"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "EvidenceTag":
        """Accept the printed label or the member name, ignoring case and spacing."""
        wanted = _normalize_label(text)
        for tag in cls:
            if wanted in (_normalize_label(tag.value), _normalize_label(tag.name)):
                return tag
        raise ValueError(f"unknown evidence tag {text!r}")


class SourceCategory(Enum):
    LITERATURE = "Literature"
    PROGRAM = "Program"
    DATABASE = "Database"

    @classmethod
    def parse(cls, text: str) -> "SourceCategory":
        wanted = _normalize_label(text)
        for category in cls:
            if wanted in (_normalize_label(category.value), _normalize_label(category.name)):
                return category
        raise ValueError(f"unknown source category {text!r}")


@dataclass(frozen=True)
class Unclassified:
    """Classification outcome when no rule applies; ``raw`` keeps any input string."""

    raw: Optional[str] = None


UNCLASSIFIED = Unclassified()


@dataclass(frozen=True)
class Attribution:
    source: Iri
    date: date
    evidence_tag: Optional[EvidenceTag] = None
    category: Optional[SourceCategory] = None
    raw_category: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.source, Iri):
            raise StructuralError(f"attribution source must be an IRI, got {self.source!r}")
        if not isinstance(self.date, date):
            raise ValueError(f"attribution date must be a calendar date, got {self.date!r}")

    @property
    def date_literal(self) -> Literal:
        return Literal(self.date.isoformat())


class AnnotatedStatement(NamedTuple):
    entity: Term
    date: Term
    predicate: Term
    object: Term


class StaleAttribution(NamedTuple):
    node: Term
    date: date


@dataclass
class ProvenanceDiagnostics:
    malformed_nodes: list[Term] = field(default_factory=list)


@dataclass
class StaleReport:
    stale: list[StaleAttribution] = field(default_factory=list)
    unparseable: list[tuple[Term, Term]] = field(default_factory=list)


def _require_node(term: Term, role: str) -> None:
    if not is_node(term):
        raise StructuralError(f"{role} must be an IRI or blank node, got {term}")


def reify(
    subject: Term,
    predicate: Term,
    object: Term,
    stmt_node: Term,
    attr_node: Term,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
) -> list[Triple]:
    """Return the five triples describing ``(subject, predicate, object)`` as ``stmt_node``.

    The base triple itself is not included.
    """
    if not isinstance(predicate, Iri):
        raise StructuralError(f"reified predicate must be an IRI, got {predicate}")
    _require_node(stmt_node, "statement node")
    _require_node(attr_node, "attribution node")
    return [
        Triple(stmt_node, Iri(vocab.rdf_type), Iri(vocab.statement)),
        Triple(stmt_node, Iri(vocab.subject), subject),
        Triple(stmt_node, Iri(vocab.predicate), predicate),
        Triple(stmt_node, Iri(vocab.object), object),
        Triple(stmt_node, Iri(vocab.attribution), attr_node),
    ]


def encode_attribution(
    attribution: Attribution, attr_node: Term, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> list[Triple]:
    _require_node(attr_node, "attribution node")
    triples = [
        Triple(attr_node, Iri(vocab.source), attribution.source),
        Triple(attr_node, Iri(vocab.date), attribution.date_literal),
    ]
    if attribution.evidence_tag is not None:
        triples.append(Triple(attr_node, Iri(vocab.evidence), Literal(attribution.evidence_tag.label)))
    if attribution.category is not None:
        triples.append(Triple(attr_node, Iri(vocab.category), Literal(attribution.category.value)))
    return triples


def attach_entity_attribution(
    entity: Term, attr_node: Term, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> list[Triple]:
    _require_node(entity, "entity")
    _require_node(attr_node, "attribution node")
    return [Triple(entity, Iri(vocab.attribution), attr_node)]


def reification_nodes(store: TripleSet, vocab: Vocabulary = DEFAULT_VOCABULARY) -> set[Term]:
    """Subjects described with ``rdf:subject``/``predicate``/``object`` or typed ``rdf:Statement``."""
    nodes: set[Term] = set()
    for predicate in vocab.reification_predicates():
        nodes.update(t.subject for t in store.match(None, Iri(predicate), None))
    nodes.update(t.subject for t in store.match(None, Iri(vocab.rdf_type), Iri(vocab.statement)))
    return nodes


def find_annotated_statements(
    store: TripleSet, source: Term, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> tuple[list[AnnotatedStatement], ProvenanceDiagnostics]:
    """Return one row per reified statement attributed to ``source``.

    Rows join the reification node, its attribution node, the attribution's
    date and every entity sharing that attribution node, exactly like the
    SPARQL provenance query with statement-node opacity.  Reification nodes
    missing one of their three components are skipped and reported.
    """
    statement_nodes = reification_nodes(store, vocab)
    attribution_p = Iri(vocab.attribution)
    subject_p, predicate_p, object_p = (Iri(p) for p in vocab.reification_predicates())
    rows: list[AnnotatedStatement] = []
    malformed: dict[Term, None] = {}

    for source_triple in store.match(None, Iri(vocab.source), source):
        attr_node = source_triple.subject
        dates = store.objects(attr_node, Iri(vocab.date))
        holders = [t.subject for t in store.match(None, attribution_p, attr_node)]
        entities = [h for h in holders if h not in statement_nodes]
        for reif in (h for h in holders if h in statement_nodes):
            subjects = store.objects(reif, subject_p)
            predicates = store.objects(reif, predicate_p)
            objects = store.objects(reif, object_p)
            if not (subjects and predicates and objects):
                malformed[reif] = None
                continue
            for _ in subjects:
                for predicate in predicates:
                    for obj in objects:
                        for entity in entities:
                            for stamp in dates:
                                rows.append(AnnotatedStatement(entity, stamp, predicate, obj))

    diagnostics = ProvenanceDiagnostics(list(malformed))
    return rows, diagnostics


def annotated_statements(
    store: TripleSet, source: Term, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> list[AnnotatedStatement]:
    rows, diagnostics = find_annotated_statements(store, source, vocab)
    if diagnostics.malformed_nodes:
        logger.warning(
            "Skipped %d malformed reification nodes: %s",
            len(diagnostics.malformed_nodes),
            ", ".join(str(n) for n in diagnostics.malformed_nodes),
        )
    return rows


def find_stale_attributions(
    store: TripleSet, cutoff: date, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> StaleReport:
    """Split every ``:date`` value into stale (strictly before ``cutoff``) or unparseable."""
    report = StaleReport()
    for triple in store.match(None, Iri(vocab.date), None):
        value = triple.object
        try:
            if not isinstance(value, Literal):
                raise ValueError(f"date is not a literal: {value}")
            stamp = data_validator.parse_iso_date(value.lexical)
        except ValueError:
            report.unparseable.append((triple.subject, value))
            continue
        if stamp < cutoff:
            report.stale.append(StaleAttribution(triple.subject, stamp))
    return report


def stale_attributions(
    store: TripleSet, cutoff: date, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> list[StaleAttribution]:
    report = find_stale_attributions(store, cutoff, vocab)
    for node, value in report.unparseable:
        logger.warning("Unparseable date %s on attribution %s", value, node)
    return report.stale


def classify_source(
    source: Term, rules: Mapping[str, SourceCategory]
) -> Union[SourceCategory, Unclassified]:
    """Return the category of the longest namespace in ``rules`` that prefixes ``source``."""
    if not isinstance(source, Iri):
        return UNCLASSIFIED
    best: Optional[str] = None
    for namespace in rules:
        if source.value.startswith(namespace) and (best is None or len(namespace) > len(best)):
            best = namespace
    return rules[best] if best is not None else UNCLASSIFIED


def load_category_rules(raw: Mapping[str, str], prefixes: PrefixTable) -> dict[str, SourceCategory]:
    """Expand ``{"hamap:": "Program"}`` style settings into namespace rules."""
    return {prefixes.expand_namespace(key): SourceCategory.parse(value) for key, value in raw.items()}
