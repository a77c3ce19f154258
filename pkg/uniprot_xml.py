"""Read UniProt-style entry XML and convert its evidence attributions to RDF.

An entry carries annotated values (leaf elements whose text is a value,
optionally with an ``evidence="EA1 EA2"`` attribute, and container elements
that carry an ``evidence`` attribute themselves) and ``<evidence>``
declarations::

    <entry accession="Q65EJ5">
      <recommendedName ref="1">
        <fullName evidence="EA1">4-hydroxythreonine-4-phosphate dehydrogenase</fullName>
      </recommendedName>
      <evidence key="EA1" category="Automatic" type="HAMAP" attribute="MF_00536" date="2010-08-04"/>
    </entry>

:func:`xml_to_rdf` emits the base statement of every value, and for each
evidence key resolving to a declaration a reified statement node linked to
a shared attribution node.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Literal as TypingLiteral
from typing import Mapping, Optional

from lxml import etree
from pydantic import BaseModel, ValidationError, field_validator

import data_validator
import settings
from evidence_model import (
    Attribution,
    SourceCategory,
    attach_entity_attribution,
    encode_attribution,
    reify,
)
from rdf_core import Blank, Iri, Literal, Term, Triple, TripleSet
from settings import DEFAULT_VOCABULARY, Vocabulary
from turtle_io import PrefixTable

logger = logging.getLogger(__name__)

NAME_CONTAINERS = frozenset({"recommendedName", "alternativeName", "submittedName"})
_SKIPPED_ELEMENTS = frozenset({"accession", "evidence"})


class EvidenceError(ValueError):
    """Base class for problems found in evidence XML."""


class EvidenceXmlError(EvidenceError):
    """Malformed XML; ``line`` and ``column`` locate the problem when known."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class EntryFormatError(EvidenceError):
    """Well-formed XML that lacks a required field or carries an invalid one."""


class DuplicateEvidenceKeyError(EvidenceError):
    def __init__(self, accession: str, key: str) -> None:
        self.accession = accession
        self.key = key
        super().__init__(f"entry {accession}: evidence key {key!r} declared more than once")


class DanglingEvidenceError(EvidenceError):
    def __init__(self, accession: str, links: list["EvidenceLink"]) -> None:
        self.accession = accession
        self.links = links
        keys = ", ".join(sorted({link.key for link in links}))
        super().__init__(f"entry {accession}: undeclared evidence keys {keys}")


class UnknownEvidenceTypeError(EvidenceError):
    def __init__(self, evidence_type: str, key: str) -> None:
        self.evidence_type = evidence_type
        self.key = key
        super().__init__(f"evidence {key}: no namespace configured for type {evidence_type!r}")


@dataclass(frozen=True)
class EvidenceDecl:
    key: str
    category: str
    type: str
    attribute: str
    date: date


@dataclass(frozen=True)
class AnnotatedValue:
    path: str
    value: str
    evidence_keys: tuple[str, ...] = ()
    container: int = 0
    attributes: Mapping[str, str] = field(default_factory=dict, compare=False)
    # Element with children; ``value`` is its ``type`` or its joined text.
    is_container: bool = False

    @property
    def element(self) -> str:
        return self.path.rsplit("/", 1)[-1]

    @property
    def parent(self) -> Optional[str]:
        parts = self.path.split("/")
        return parts[-2] if len(parts) > 1 else None


@dataclass(frozen=True)
class ElementAttributes:
    """Attributes of a non-value element such as ``<recommendedName ref="1">``."""

    path: str
    attributes: Mapping[str, str]


@dataclass
class EntryDocument:
    accession: str
    values: list[AnnotatedValue] = field(default_factory=list)
    evidence: dict[str, EvidenceDecl] = field(default_factory=dict)
    element_attributes: list[ElementAttributes] = field(default_factory=list)


@dataclass(frozen=True)
class EvidenceLink:
    path: str
    value: str
    key: str


@dataclass
class ResolutionReport:
    accession: str
    resolved: list[EvidenceLink] = field(default_factory=list)
    dangling: list[EvidenceLink] = field(default_factory=list)
    unused: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.dangling

    def summary(self) -> str:
        return (
            f"{len(self.resolved)} resolved, {len(self.dangling)} dangling, "
            f"{len(self.unused)} unused"
        )


def _localname(element: etree._Element) -> str:
    return etree.QName(element).localname


def _is_element(node: object) -> bool:
    return isinstance(getattr(node, "tag", None), str)


def _parse_decl(element: etree._Element, accession: str) -> EvidenceDecl:
    key = (element.get("key") or "").strip()
    if not key:
        raise EntryFormatError(f"entry {accession}: evidence without key (line {element.sourceline})")
    raw_date = (element.get("date") or "").strip()
    try:
        stamp = data_validator.parse_iso_date(raw_date)
    except ValueError as exc:
        raise EntryFormatError(
            f"entry {accession}: evidence {key} has invalid date {raw_date!r} (line {element.sourceline})"
        ) from exc
    return EvidenceDecl(
        key=key,
        category=(element.get("category") or "").strip(),
        type=(element.get("type") or "").strip(),
        attribute=(element.get("attribute") or "").strip(),
        date=stamp,
    )


def _parse_entry(entry: etree._Element) -> EntryDocument:
    accession = (entry.get("accession") or "").strip()
    if not accession:
        for child in entry:
            if _is_element(child) and _localname(child) == "accession" and (child.text or "").strip():
                accession = child.text.strip()
                break
    if not accession:
        raise EntryFormatError(f"entry without accession (line {entry.sourceline})")

    doc = EntryDocument(accession)
    containers = 0

    def walk(node: etree._Element, path: list[str], container: int) -> None:
        nonlocal containers
        for child in node:
            if not _is_element(child):
                continue
            name = _localname(child)
            if name == "evidence":
                decl = _parse_decl(child, accession)
                if decl.key in doc.evidence:
                    raise DuplicateEvidenceKeyError(accession, decl.key)
                doc.evidence[decl.key] = decl
                continue
            if name in _SKIPPED_ELEMENTS:
                continue
            child_path = path + [name]
            attributes = {etree.QName(k).localname: v for k, v in child.attrib.items()}
            keys = tuple(attributes.pop("evidence", "").split())
            has_children = any(_is_element(c) for c in child)
            text = (child.text or "").strip()
            if has_children:
                containers += 1
                if keys:
                    label = attributes.get("type") or " ".join(" ".join(child.itertext()).split())
                    doc.values.append(
                        AnnotatedValue("/".join(child_path), label, keys, containers, attributes, is_container=True)
                    )
                elif attributes:
                    doc.element_attributes.append(ElementAttributes("/".join(child_path), attributes))
                walk(child, child_path, containers)
            elif text or keys:
                doc.values.append(AnnotatedValue("/".join(child_path), text, keys, container, attributes))
            elif attributes:
                doc.element_attributes.append(ElementAttributes("/".join(child_path), attributes))

    walk(entry, [], 0)
    return doc


def parse_entries_xml(text: str) -> list[EntryDocument]:
    """Parse every ``<entry>`` of ``text``; the root may be an entry or wrap several."""
    if not text.strip():
        return []
    parser = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=True)
    try:
        root = etree.fromstring(text.encode("utf-8"), parser)
    except etree.XMLSyntaxError as exc:
        line, column = exc.position
        raise EvidenceXmlError(exc.msg or "malformed XML", line, column) from exc
    if _localname(root) == "entry":
        entries = [root]
    else:
        entries = [el for el in root.iter() if _is_element(el) and _localname(el) == "entry"]
    return [_parse_entry(entry) for entry in entries]


def parse_entry_xml(text: str) -> EntryDocument:
    """Parse a document holding exactly one entry."""
    entries = parse_entries_xml(text)
    if len(entries) != 1:
        raise EntryFormatError(f"expected exactly one entry, found {len(entries)}")
    return entries[0]


def resolve_evidence(doc: EntryDocument) -> ResolutionReport:
    """Match every evidence reference against the entry's declarations.

    Pure; the partition does not depend on the order of values or
    declarations.
    """
    report = ResolutionReport(doc.accession)
    referenced: set[str] = set()
    for value in doc.values:
        for key in value.evidence_keys:
            link = EvidenceLink(value.path, value.value, key)
            if key in doc.evidence:
                report.resolved.append(link)
                referenced.add(key)
            else:
                report.dangling.append(link)
    report.unused = [key for key in doc.evidence if key not in referenced]
    return report


class ConversionPolicy(BaseModel):
    """How evidence declarations become RDF.

    ``type_namespaces`` maps an evidence ``type`` to the namespace of its
    ``attribute`` (``HAMAP`` + ``MF_00536`` gives ``hamap:MF_00536``);
    ``category_map`` maps raw XML categories to source categories.  Raw
    categories without a mapping stay unclassified and produce no
    ``:category`` triple.
    """

    strict: bool = True
    node_style: TypingLiteral["blank", "iri"] = "blank"
    node_base: str = "urn:uniprov:node:"
    entity_namespace: str = settings.DEFAULT_SETTINGS["prefixes"]["protein"]
    type_namespaces: dict[str, str] = {"HAMAP": settings.DEFAULT_SETTINGS["prefixes"]["hamap"]}
    category_map: dict[str, SourceCategory] = {}

    @field_validator("category_map", mode="before")
    @classmethod
    def _parse_categories(cls, value: object) -> object:
        if isinstance(value, Mapping):
            return {
                key: SourceCategory.parse(cat) if isinstance(cat, str) else cat
                for key, cat in value.items()
            }
        return value

    @classmethod
    def default(cls, prefixes: Optional[PrefixTable] = None) -> "ConversionPolicy":
        table = prefixes if prefixes is not None else PrefixTable.default()
        fallback = cls()
        return cls(
            entity_namespace=table.get("protein", fallback.entity_namespace),
            type_namespaces={"HAMAP": table.get("hamap", fallback.type_namespaces["HAMAP"])},
        )

    @classmethod
    def from_key_values(
        cls, values: Mapping[str, str], prefixes: Optional[PrefixTable] = None
    ) -> "ConversionPolicy":
        """Build a policy from ``key = value`` settings.

        Recognised keys: ``strict``, ``node_style``, ``node_base``,
        ``entity_namespace``, ``type.<TYPE>`` and ``category.<raw>``.
        Type mappings extend the default ``HAMAP`` mapping.
        """
        table = prefixes if prefixes is not None else PrefixTable.default()
        base = cls.default(table)
        data: dict[str, object] = {
            "entity_namespace": base.entity_namespace,
            "type_namespaces": dict(base.type_namespaces),
            "category_map": {},
        }
        try:
            for key, value in values.items():
                if key == "strict":
                    data["strict"] = settings.parse_bool(value)
                elif key in ("node_style", "node_base"):
                    data[key] = value
                elif key == "entity_namespace":
                    data[key] = table.expand_namespace(value)
                elif key.startswith("type."):
                    data["type_namespaces"][key[len("type."):]] = table.expand_namespace(value)
                elif key.startswith("category."):
                    data["category_map"][key[len("category."):]] = value
                else:
                    raise ValueError(f"unknown policy key {key!r}")
            return cls.model_validate(data)
        except ValidationError as exc:
            logger.error("Policy validation error: %s", exc)
            raise ValueError("Invalid conversion policy") from exc

    @classmethod
    def load(cls, path: Path, prefixes: Optional[PrefixTable] = None) -> "ConversionPolicy":
        return cls.from_key_values(settings.read_key_value_file(path), prefixes)

    def source_for(self, decl: EvidenceDecl) -> Iri:
        namespace = self.type_namespaces.get(decl.type)
        if namespace is None:
            raise UnknownEvidenceTypeError(decl.type, decl.key)
        return Iri(namespace + decl.attribute)

    def attribution_for(self, decl: EvidenceDecl) -> Attribution:
        return Attribution(
            source=self.source_for(decl),
            date=decl.date,
            category=self.category_map.get(decl.category),
            raw_category=decl.category or None,
        )


class ConversionContext:
    """Node allocation shared by every entry converted in one run.

    Blank labels are numbered from ``0`` in allocation order; attribution
    nodes are shared per ``(source, date)`` across entries.
    """

    def __init__(self, policy: ConversionPolicy) -> None:
        self.policy = policy
        self._next_label = 0
        self._statement_counts: dict[str, int] = {}
        self._attribution_nodes: dict[tuple[Iri, date], Term] = {}
        self._attribution_categories: dict[tuple[Iri, date], set[Optional[SourceCategory]]] = {}

    def _blank(self) -> Blank:
        node = Blank(str(self._next_label))
        self._next_label += 1
        return node

    def name_node(self, accession: str, container: int) -> Term:
        if self.policy.node_style == "blank":
            return self._blank()
        return Iri(f"{self.policy.node_base}name/{accession}/{container}")

    def statement_node(self, accession: str) -> Term:
        if self.policy.node_style == "blank":
            return self._blank()
        index = self._statement_counts.get(accession, 0)
        self._statement_counts[accession] = index + 1
        return Iri(f"{self.policy.node_base}statement/{accession}/{index}")

    def attribution_node(self, attribution: Attribution) -> tuple[Term, bool]:
        """Return the node for ``attribution`` and whether it was just created."""
        key = (attribution.source, attribution.date)
        node = self._attribution_nodes.get(key)
        if node is not None:
            return node, False
        if self.policy.node_style == "blank":
            node = self._blank()
        else:
            digest = hashlib.sha1(f"{attribution.source.value}|{attribution.date.isoformat()}".encode("utf-8"))
            node = Iri(f"{self.policy.node_base}attribution/{digest.hexdigest()[:16]}")
        self._attribution_nodes[key] = node
        self._attribution_categories[key] = {attribution.category}
        return node, True

    def new_category(self, attribution: Attribution) -> bool:
        """Record the category of a declaration sharing an existing node.

        Returns whether it differs from every category seen on that node,
        in which case the caller adds it as a further ``:category``.
        """
        seen = self._attribution_categories.setdefault((attribution.source, attribution.date), set())
        if attribution.category is None or attribution.category in seen:
            return False
        logger.warning(
            "Attribution %s on %s has categories %s and %s",
            attribution.source,
            attribution.date.isoformat(),
            ", ".join(sorted(c.value for c in seen if c is not None)) or "none",
            attribution.category.value,
        )
        seen.add(attribution.category)
        return True


def xml_to_rdf(
    doc: EntryDocument,
    policy: Optional[ConversionPolicy] = None,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    context: Optional[ConversionContext] = None,
) -> TripleSet:
    """Convert one entry to RDF.

    For every annotated value the base statement is emitted, and for each
    of its resolved evidence keys a reified statement node, the
    entity-level attribution link and (once per attribution node) the
    attribution's source and date.  Values under ``recommendedName`` and
    the other name containers hang off a typed ``:Structured_Name`` node;
    evidence on a name container attributes the link to that node.
    """
    policy = policy or ConversionPolicy.default()
    context = context or ConversionContext(policy)
    report = resolve_evidence(doc)
    if report.dangling:
        if policy.strict:
            raise DanglingEvidenceError(doc.accession, report.dangling)
        for link in report.dangling:
            logger.warning("Entry %s: dangling evidence key %s on %s", doc.accession, link.key, link.path)
    for key in report.unused:
        logger.warning("Entry %s: evidence %s is never referenced", doc.accession, key)

    core = vocab.core_namespace()
    entity = Iri(policy.entity_namespace + doc.accession)
    triples: list[Triple] = []
    name_nodes: dict[int, Term] = {}

    def name_node(container: int, element: str) -> Term:
        node = name_nodes.get(container)
        if node is None:
            node = context.name_node(doc.accession, container)
            name_nodes[container] = node
            triples.append(Triple(entity, Iri(core + element), node))
            triples.append(Triple(node, Iri(vocab.rdf_type), Iri(vocab.structured_name)))
        return node

    for value in doc.values:
        if value.is_container and value.element in NAME_CONTAINERS:
            base = Triple(entity, Iri(core + value.element), name_node(value.container, value.element))
        elif value.parent in NAME_CONTAINERS:
            node = name_node(value.container, value.parent)
            base = Triple(node, Iri(core + value.element), Literal(value.value))
        else:
            base = Triple(entity, Iri(core + value.element), Literal(value.value))
        triples.append(base)

        for key in value.evidence_keys:
            decl = doc.evidence.get(key)
            if decl is None:
                continue
            attribution = policy.attribution_for(decl)
            stmt_node = context.statement_node(doc.accession)
            attr_node, created = context.attribution_node(attribution)
            triples.extend(reify(base.subject, base.predicate, base.object, stmt_node, attr_node, vocab))
            triples.extend(attach_entity_attribution(entity, attr_node, vocab))
            if created:
                triples.extend(encode_attribution(attribution, attr_node, vocab))
            elif context.new_category(attribution):
                triples.append(Triple(attr_node, Iri(vocab.category), Literal(attribution.category.value)))

    store = TripleSet(triples)
    logger.info("Converted entry %s: %d values, %d triples", doc.accession, len(doc.values), len(store))
    return store


def convert_documents(
    docs: list[EntryDocument],
    policy: Optional[ConversionPolicy] = None,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
) -> TripleSet:
    """Convert several entries into one store with a shared node context."""
    policy = policy or ConversionPolicy.default()
    context = ConversionContext(policy)
    store = TripleSet()
    for doc in docs:
        store.update(xml_to_rdf(doc, policy, vocab, context))
    return store
