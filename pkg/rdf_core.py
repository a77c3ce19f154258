"""RDF terms, triples and the indexed in-memory triple store.

Terms are immutable values: :class:`Iri`, :class:`Blank` and
:class:`Literal`.  A :class:`TripleSet` keeps every triple once, in insertion
order, and maintains three access indexes (subject-first, predicate-first,
object-first).  Pattern matching consults the index of the most selective
bound position so that provenance queries, which mostly bind only the
predicate or the attribution node, never scan the whole store.

The store follows a many-readers/one-writer discipline: ``match`` and
``count`` may run concurrently, ``insert``/``update`` are exclusive and a
reader never observes a half-indexed triple.
"""

from __future__ import annotations

import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

import rdflib
from rdflib.compare import isomorphic as _rdflib_isomorphic

import data_validator

logger = logging.getLogger(__name__)


class StructuralError(ValueError):
    """Raised for a triple whose subject is a literal or predicate is not an IRI."""


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class Blank:
    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str

    def __str__(self) -> str:
        return quote_literal(self.lexical)


Term = Union[Iri, Blank, Literal]

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def quote_literal(lexical: str) -> str:
    """Return ``lexical`` as a double-quoted string with escapes applied."""
    return '"' + "".join(_ESCAPES.get(ch, ch) for ch in lexical) + '"'


def is_node(term: object) -> bool:
    """Return ``True`` for terms allowed in subject position."""
    return isinstance(term, (Iri, Blank))


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def check(self) -> "Triple":
        """Return ``self`` or raise :class:`StructuralError`."""
        if not is_node(self.subject):
            raise StructuralError(f"subject must be an IRI or blank node, got {self.subject}")
        if not isinstance(self.predicate, Iri):
            raise StructuralError(f"predicate must be an IRI, got {self.predicate}")
        if not isinstance(self.object, (Iri, Blank, Literal)):
            raise StructuralError(f"object is not an RDF term: {self.object!r}")
        return self

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object} ."


class _ReadWriteLock:
    """Any number of concurrent readers or one exclusive writer."""

    def __init__(self) -> None:
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False

    @contextmanager
    def reading(self) -> Iterator[None]:
        with self._cond:
            while self._writer:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def writing(self) -> Iterator[None]:
        with self._cond:
            while self._writer or self._readers:
                self._cond.wait()
            self._writer = True
        try:
            yield
        finally:
            with self._cond:
                self._writer = False
                self._cond.notify_all()


class TripleSet:
    """Set of triples with insertion-ordered subject/predicate/object indexes."""

    def __init__(self, triples: Iterable[Triple] = ()) -> None:
        self._lock = _ReadWriteLock()
        self._triples: dict[Triple, None] = {}
        self._by_subject: dict[Term, list[Triple]] = {}
        self._by_predicate: dict[Term, list[Triple]] = {}
        self._by_object: dict[Term, list[Triple]] = {}
        self.update(triples)

    @property
    def size(self) -> int:
        return len(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        with self._lock.reading():
            snapshot = list(self._triples)
        return iter(snapshot)

    def __repr__(self) -> str:
        return f"TripleSet(size={len(self._triples)})"

    def _add(self, triple: Triple) -> bool:
        if triple in self._triples:
            return False
        self._triples[triple] = None
        self._by_subject.setdefault(triple.subject, []).append(triple)
        self._by_predicate.setdefault(triple.predicate, []).append(triple)
        self._by_object.setdefault(triple.object, []).append(triple)
        return True

    def insert(self, triple: Triple) -> bool:
        """Add ``triple``; return ``True`` iff it was not already present."""
        triple.check()
        with self._lock.writing():
            return self._add(triple)

    def update(self, triples: Iterable[Triple]) -> int:
        """Insert every triple of ``triples``; return how many were new.

        All triples are validated before the store is touched, so a
        structural error leaves the store unchanged.
        """
        batch = [t.check() for t in triples]
        if not batch:
            return 0
        with self._lock.writing():
            return sum(1 for t in batch if self._add(t))

    def _candidates(
        self, s: Optional[Term], p: Optional[Term], o: Optional[Term]
    ) -> Optional[list[Triple]]:
        """Return the smallest index list covering a bound position.

        ``None`` means no position is bound; an empty list means some bound
        term does not occur at all.
        """
        best: Optional[list[Triple]] = None
        for term, index in ((s, self._by_subject), (p, self._by_predicate), (o, self._by_object)):
            if term is None:
                continue
            entries = index.get(term)
            if entries is None:
                return []
            if best is None or len(entries) < len(best):
                best = entries
        return best

    def match(
        self,
        s: Optional[Term] = None,
        p: Optional[Term] = None,
        o: Optional[Term] = None,
    ) -> list[Triple]:
        """Return triples agreeing with every bound position, in insertion order."""
        with self._lock.reading():
            if s is not None and p is not None and o is not None:
                triple = Triple(s, p, o)
                return [triple] if triple in self._triples else []
            candidates = self._candidates(s, p, o)
            if candidates is None:
                return list(self._triples)
            bound = (s is not None) + (p is not None) + (o is not None)
            if bound == 1:
                return list(candidates)
            return [
                t
                for t in candidates
                if (s is None or t.subject == s)
                and (p is None or t.predicate == p)
                and (o is None or t.object == o)
            ]

    def count(
        self,
        s: Optional[Term] = None,
        p: Optional[Term] = None,
        o: Optional[Term] = None,
    ) -> int:
        """Return ``len(self.match(s, p, o))`` without copying single-key results."""
        with self._lock.reading():
            if s is not None and p is not None and o is not None:
                return int(Triple(s, p, o) in self._triples)
            candidates = self._candidates(s, p, o)
            if candidates is None:
                return len(self._triples)
            bound = (s is not None) + (p is not None) + (o is not None)
            if bound == 1:
                return len(candidates)
        return len(self.match(s, p, o))

    def subjects(self) -> list[Term]:
        with self._lock.reading():
            return list(self._by_subject)

    def objects(self, s: Optional[Term] = None, p: Optional[Term] = None) -> list[Term]:
        return [t.object for t in self.match(s, p, None)]

    def terms(self) -> set[Term]:
        """Every term occurring in any position."""
        with self._lock.reading():
            return set(self._by_subject) | set(self._by_predicate) | set(self._by_object)


def rename_blanks(triples: Iterable[Triple], suffix: str) -> Iterator[Triple]:
    """Yield ``triples`` with every blank label extended by ``_suffix``."""
    cache: dict[Blank, Blank] = {}

    def scoped(term: Term) -> Term:
        if isinstance(term, Blank):
            if term not in cache:
                cache[term] = Blank(f"{term.label}_{suffix}")
            return cache[term]
        return term

    for t in triples:
        yield Triple(scoped(t.subject), t.predicate, scoped(t.object))


def load_document(
    store: TripleSet, triples: Iterable[Triple], document_tag: Optional[str] = None
) -> int:
    """Load one parsed document into ``store``.

    With a ``document_tag`` every blank label of the document is suffixed
    with it, so independently parsed documents never share blank nodes.
    Without a tag the labels are kept verbatim.
    """
    if document_tag is not None:
        if not data_validator.is_valid_blank_label(document_tag):
            raise ValueError(f"document tag {document_tag!r} cannot extend a blank label")
        triples = rename_blanks(triples, document_tag)
    added = store.update(triples)
    logger.debug("Loaded %d new triples (tag=%s)", added, document_tag)
    return added


def to_rdflib_term(term: Term) -> rdflib.term.Node:
    if isinstance(term, Iri):
        return rdflib.URIRef(term.value)
    if isinstance(term, Blank):
        return rdflib.BNode(term.label)
    return rdflib.Literal(term.lexical)


def to_rdflib(triples: Iterable[Triple]) -> rdflib.Graph:
    graph = rdflib.Graph()
    for t in triples:
        graph.add((to_rdflib_term(t.subject), to_rdflib_term(t.predicate), to_rdflib_term(t.object)))
    return graph


def isomorphic(a: Iterable[Triple], b: Iterable[Triple]) -> bool:
    """Return ``True`` if ``a`` and ``b`` are equal up to blank node renaming."""
    return _rdflib_isomorphic(to_rdflib(a), to_rdflib(b))
