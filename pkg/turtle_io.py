"""Reader and writer for the Turtle subset used by uniprov.

Supported: ``@prefix`` directives, prefixed names, ``<IRI>`` references,
blank node labels, double-quoted string literals, the ``a`` keyword,
``;`` predicate lists, ``,`` object lists, ``.`` terminators and ``#``
comments.

Two relaxations let hand-written provenance snippets load without
weakening the grammar elsewhere:

* a predicate-object list that appears where a statement should start
  (``:source hamap:MF_00536 ;`` right after ``... :attribution _:2 .``)
  continues the description of the previous statement's last object;
* the final statement of a document may omit its ``.``.

Both are accepted with a warning and counted in the :class:`ParseReport`.
Capitalised ``rdf:Subject``/``rdf:Predicate``/``rdf:Object`` predicates are
rewritten to the lowercase W3C terms on ingest.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Optional

import data_validator
import settings
from rdf_core import Blank, Iri, Literal, Term, Triple, TripleSet, quote_literal

logger = logging.getLogger(__name__)


class TurtleSyntaxError(ValueError):
    """Syntax error carrying the 1-based line and column of the offending token."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnknownPrefixError(TurtleSyntaxError):
    pass


class PrefixTable:
    """Mapping from prefix label (``""`` for ``:``) to namespace IRI."""

    def __init__(self, bindings: Optional[Mapping[str, str]] = None) -> None:
        self._namespaces: dict[str, str] = {}
        self._labels: dict[str, str] = {}
        self._by_length: Optional[list[str]] = None
        for label, namespace in (bindings or {}).items():
            self.bind(label, namespace)

    @classmethod
    def default(cls) -> "PrefixTable":
        return cls(settings.DEFAULT_SETTINGS["prefixes"])

    def bind(self, label: str, namespace: str) -> None:
        if not data_validator.is_valid_prefix_label(label):
            raise ValueError(f"invalid prefix label {label!r}")
        self._namespaces[label] = namespace
        # The most recent binding of a namespace wins when compacting.
        self._labels[namespace] = label
        self._by_length = None

    def copy(self) -> "PrefixTable":
        return PrefixTable(self._namespaces)

    def __contains__(self, label: object) -> bool:
        return label in self._namespaces

    def __getitem__(self, label: str) -> str:
        return self._namespaces[label]

    def __len__(self) -> int:
        return len(self._namespaces)

    def get(self, label: str, default: Optional[str] = None) -> Optional[str]:
        return self._namespaces.get(label, default)

    def items(self) -> list[tuple[str, str]]:
        return list(self._namespaces.items())

    def as_dict(self) -> dict[str, str]:
        return dict(self._namespaces)

    def expand(self, pname: str) -> str:
        """Return the absolute IRI for ``prefix:local``."""
        label, sep, local = pname.partition(":")
        if not sep:
            raise ValueError(f"not a prefixed name: {pname!r}")
        if label not in self._namespaces:
            raise UnknownPrefixError(f"unknown prefix {label + ':'!r}")
        return self._namespaces[label] + local

    def compact(self, iri: str) -> Optional[str]:
        """Return ``prefix:local`` for ``iri`` or ``None`` if no binding fits."""
        if self._by_length is None:
            self._by_length = sorted(self._labels, key=len, reverse=True)
        for namespace in self._by_length:
            if iri.startswith(namespace):
                local = iri[len(namespace):]
                label = self._labels[namespace]
                if self._namespaces.get(label) == namespace and data_validator.is_valid_local_name(local):
                    return f"{label}:{local}"
        return None

    def expand_namespace(self, value: str) -> str:
        """Resolve a configuration value naming a namespace.

        Accepts ``label:`` (or ``label:partial``), ``<absolute>`` and bare
        absolute IRIs.
        """
        value = value.strip()
        if value.startswith("<") and value.endswith(">"):
            return value[1:-1]
        if "://" in value or value.startswith("urn:"):
            return value
        return self.expand(value)


@dataclass
class ParseReport:
    normalized_predicates: int = 0
    subjectless_continuations: int = 0
    missing_terminator: bool = False
    warnings: list[str] = field(default_factory=list)


@dataclass
class ParseResult:
    store: TripleSet
    prefixes: PrefixTable
    report: ParseReport


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>[ \t\r\n]+)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<PREFIX>@prefix\b)
  | (?P<IRIREF><[^<>"{}|^`\\\x00-\x20]*>)
  | (?P<BLANK>_:[A-Za-z0-9_][A-Za-z0-9_\-]*)
  | (?P<STRING>"(?:[^"\\\n\r]|\\.)*")
  | (?P<UNTERMINATED>")
  | (?P<PNAME>(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_\-]+(?:\.[A-Za-z0-9_\-]+)*)?)
  | (?P<A>a\b)
  | (?P<PUNCT>[.;,])
  | (?P<ERROR>.)
    """,
    re.VERBOSE,
)

_UNESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")
_SIMPLE_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

_VERB_KINDS = frozenset({"PNAME", "IRIREF", "A"})
_OBJECT_KINDS = frozenset({"PNAME", "IRIREF", "BLANK", "STRING"})
_CAPITALISED = {"Subject": "subject", "Predicate": "predicate", "Object": "object"}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    pos: int


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, column


def _unescape(body: str, text: str, pos: int) -> str:
    def replace(match: re.Match[str]) -> str:
        code = match.group(1)
        if code[0] in "uU" and len(code) > 1:
            return chr(int(code[1:], 16))
        if code in _SIMPLE_ESCAPES:
            return _SIMPLE_ESCAPES[code]
        raise TurtleSyntaxError(f"invalid escape \\{code}", *_line_col(text, pos))

    return _UNESCAPE_RE.sub(replace, body)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        if kind in ("WS", "COMMENT"):
            continue
        if kind == "UNTERMINATED":
            raise TurtleSyntaxError("unterminated string literal", *_line_col(text, match.start()))
        if kind == "ERROR":
            raise TurtleSyntaxError(f"unexpected character {match.group()!r}", *_line_col(text, match.start()))
        tokens.append(_Token(kind, match.group(), match.start()))
    tokens.append(_Token("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, prefixes: PrefixTable) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes = prefixes.copy()
        self.report = ParseReport()
        self.triples: list[Triple] = []
        self.rdf_namespaces = {settings.RDF_NAMESPACE}
        if "rdf" in prefixes:
            self.rdf_namespaces.add(prefixes["rdf"])
        self.rdf_type = Iri(prefixes.get("rdf", settings.RDF_NAMESPACE) + "type")
        self.last_object: Optional[Term] = None

    # token helpers

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def error(self, message: str, token: Optional[_Token] = None, cls: type = TurtleSyntaxError) -> TurtleSyntaxError:
        token = token or self.peek()
        return cls(message, *_line_col(self.text, token.pos))

    def expect_punct(self, char: str) -> _Token:
        token = self.peek()
        if token.kind != "PUNCT" or token.text != char:
            found = token.text or "end of input"
            raise self.error(f"expected {char!r}, found {found!r}", token)
        return self.advance()

    def warn(self, message: str, token: _Token) -> None:
        line, column = _line_col(self.text, token.pos)
        text = f"{message} (line {line}, column {column})"
        self.report.warnings.append(text)
        logger.warning(text)

    # terms

    def iri_from(self, token: _Token) -> Iri:
        if token.kind == "IRIREF":
            return Iri(token.text[1:-1])
        try:
            return Iri(self.prefixes.expand(token.text))
        except UnknownPrefixError as exc:
            raise self.error(exc.message, token, UnknownPrefixError) from exc

    def term(self, token: _Token) -> Term:
        if token.kind in ("IRIREF", "PNAME"):
            return self.iri_from(token)
        if token.kind == "BLANK":
            return Blank(token.text[2:])
        if token.kind == "STRING":
            return Literal(_unescape(token.text[1:-1], self.text, token.pos))
        raise self.error(f"unexpected {token.text or 'end of input'!r}", token)

    def subject(self) -> Term:
        token = self.advance()
        if token.kind == "STRING":
            raise self.error("a literal cannot be a subject", token)
        if token.kind not in ("IRIREF", "PNAME", "BLANK"):
            raise self.error(f"expected a subject, found {token.text or 'end of input'!r}", token)
        return self.term(token)

    def verb(self) -> Iri:
        token = self.advance()
        if token.kind == "A":
            return self.rdf_type
        if token.kind not in ("IRIREF", "PNAME"):
            raise self.error(f"expected a predicate, found {token.text or 'end of input'!r}", token)
        iri = self.iri_from(token)
        for namespace in self.rdf_namespaces:
            if iri.value.startswith(namespace):
                local = iri.value[len(namespace):]
                if local in _CAPITALISED:
                    self.report.normalized_predicates += 1
                    return Iri(namespace + _CAPITALISED[local])
        return iri

    def object(self) -> Term:
        token = self.advance()
        if token.kind not in _OBJECT_KINDS:
            raise self.error(f"expected an object, found {token.text or 'end of input'!r}", token)
        return self.term(token)

    # grammar

    def parse(self) -> ParseResult:
        while self.peek().kind != "EOF":
            if self.peek().kind == "PREFIX":
                self.directive()
            else:
                self.statement()
        if self.report.normalized_predicates:
            logger.warning(
                "Normalized %d capitalised rdf:Subject/Predicate/Object predicates",
                self.report.normalized_predicates,
            )
        return ParseResult(TripleSet(self.triples), self.prefixes, self.report)

    def directive(self) -> None:
        self.advance()
        label_token = self.advance()
        if label_token.kind != "PNAME" or not label_token.text.endswith(":"):
            raise self.error("expected a prefix label such as 'ex:'", label_token)
        iri_token = self.advance()
        if iri_token.kind != "IRIREF":
            raise self.error("expected a namespace IRI in angle brackets", iri_token)
        self.prefixes.bind(label_token.text[:-1], iri_token.text[1:-1])
        self.expect_punct(".")

    def starts_subjectless(self) -> bool:
        first, second, third = self.peek(), self.peek(1), self.peek(2)
        if first.kind == "A":
            return True
        return (
            first.kind in _VERB_KINDS
            and second.kind in _OBJECT_KINDS
            and (third.kind == "EOF" or (third.kind == "PUNCT" and third.text in ".;,"))
        )

    def statement(self) -> None:
        start = self.peek()
        if self.starts_subjectless():
            if not isinstance(self.last_object, (Iri, Blank)):
                raise self.error("predicate list without a subject", start)
            subject = self.last_object
            self.report.subjectless_continuations += 1
            self.warn(f"subjectless predicate list attached to {subject}", start)
        else:
            subject = self.subject()
        self.predicate_object_list(subject)
        token = self.peek()
        if token.kind == "EOF":
            self.report.missing_terminator = True
            self.warn("final statement is missing its '.' terminator", token)
            return
        self.expect_punct(".")

    def predicate_object_list(self, subject: Term) -> None:
        while True:
            predicate = self.verb()
            while True:
                obj = self.object()
                self.triples.append(Triple(subject, predicate, obj))
                self.last_object = obj
                token = self.peek()
                if token.kind == "PUNCT" and token.text == ",":
                    self.advance()
                    continue
                break
            token = self.peek()
            if not (token.kind == "PUNCT" and token.text == ";"):
                return
            while self.peek().kind == "PUNCT" and self.peek().text == ";":
                self.advance()
            if self.peek().kind not in _VERB_KINDS:
                return


def parse_turtle_with_report(text: str, prefixes: Optional[PrefixTable] = None) -> ParseResult:
    """Parse ``text`` and return the store, the final prefix table and a report."""
    table = prefixes if prefixes is not None else PrefixTable.default()
    return _Parser(text, table).parse()


def parse_turtle(text: str, prefixes: Optional[PrefixTable] = None) -> TripleSet:
    """Return the triples denoted by the Turtle document ``text``."""
    return parse_turtle_with_report(text, prefixes).store


def load_prefix_file(path: Path, base: Optional[PrefixTable] = None) -> PrefixTable:
    """Return ``base`` (defaults if omitted) overridden by the ``@prefix`` lines of ``path``."""
    table = base.copy() if base is not None else PrefixTable.default()
    result = parse_turtle_with_report(path.read_text(encoding="utf-8"), PrefixTable())
    if len(result.store):
        logger.warning("Ignoring %d triples in prefix file %s", len(result.store), path)
    for label, namespace in result.prefixes.items():
        table.bind(label, namespace)
    return table


def format_term(term: Term, prefixes: PrefixTable) -> str:
    """Render ``term`` in Turtle/SPARQL syntax, compacting IRIs when possible."""
    if isinstance(term, Iri):
        return prefixes.compact(term.value) or f"<{term.value}>"
    if isinstance(term, Blank):
        return f"_:{term.label}"
    return quote_literal(term.lexical)


def prefix_lines(prefixes: PrefixTable) -> list[str]:
    return [f"@prefix {label}: <{namespace}> ." for label, namespace in prefixes.items()]


def subject_blocks(store: TripleSet, prefixes: PrefixTable) -> Iterator[str]:
    """Yield one Turtle statement block per subject, in insertion order."""
    for subject in store.subjects():
        grouped: dict[Term, list[Term]] = {}
        for triple in store.match(subject, None, None):
            grouped.setdefault(triple.predicate, []).append(triple.object)
        parts = [
            f"{format_term(predicate, prefixes)} "
            + " , ".join(format_term(obj, prefixes) for obj in objects)
            for predicate, objects in grouped.items()
        ]
        yield f"{format_term(subject, prefixes)} " + " ;\n    ".join(parts) + " ."


def serialize_turtle(store: TripleSet, prefixes: Optional[PrefixTable] = None) -> str:
    """Return ``store`` as Turtle grouped by subject in insertion order."""
    table = prefixes if prefixes is not None else PrefixTable.default()
    lines = prefix_lines(table)
    blocks = list(subject_blocks(store, table))
    if blocks:
        if lines:
            lines.append("")
        lines.extend(blocks)
    return "\n".join(lines) + "\n" if lines else ""
