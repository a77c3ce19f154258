"""SPARQL basic graph patterns with a ``reification(S P O)`` shorthand.

The accepted subset is ``PREFIX`` declarations, ``SELECT`` with an explicit
variable list and a ``WHERE`` block of triple patterns using ``;`` and
``,`` continuations.  In subject position a pattern may instead start with
``reification(S P O)``; the predicate-object pairs that follow it describe
the reified statement::

    select ?protein ?date ?predicate ?object
    where {
        reification(?subject ?predicate ?object) ;
            :attribution ?attribution .
        ?protein :attribution ?attribution .
        ?attribution :source hamap:MF_00536 ;
            :date ?date .
    }

:func:`expand_reification` rewrites every such anchor into the three
``rdf:subject``/``rdf:predicate``/``rdf:object`` patterns over a fresh
``?_reifN`` variable, after which :func:`evaluate` joins the patterns over a
:class:`~rdf_core.TripleSet`.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal as TypingLiteral, Optional, Union

from lark import Lark, Token, Transformer, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, VisitError

import data_validator
import settings
from evidence_model import reification_nodes
from rdf_core import Iri, Literal, Term, TripleSet
from settings import DEFAULT_VOCABULARY, Vocabulary
from turtle_io import PrefixTable, UnknownPrefixError, format_term

logger = logging.getLogger(__name__)

QUERY_GRAMMAR = r"""
start: prefix_decl* select_clause where_clause

prefix_decl: PREFIX PNAME IRIREF
select_clause: SELECT VAR+
where_clause: WHERE? "{" triples_block? "}"

triples_block: triples_same_subject ("." triples_same_subject?)*

triples_same_subject: subject_term property_list              -> plain_triples
                    | reification_term (";" property_list?)?  -> reified_triples

property_list: property (";" property?)*
property: verb object_term ("," object_term)*

reification_term: REIFICATION "(" slot slot slot ")"

subject_term: VAR | iri
verb: VAR | iri | A
object_term: VAR | iri | STRING
slot: VAR | iri | STRING
iri: PNAME | IRIREF

PREFIX: "prefix"i
SELECT: "select"i
WHERE: "where"i
REIFICATION: "reification"i
A: "a"
VAR: /[?$][A-Za-z_][A-Za-z0-9_]*/
PNAME: /(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_\-]+(?:\.[A-Za-z0-9_\-]+)*)?/
IRIREF: /<[^<>"{}|^`\\\x00-\x20]*>/
STRING: /"(?:[^"\\\n\r\t]|\\[nrt"\\])*"/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_PARSER = Lark(QUERY_GRAMMAR, parser="lalr", start="start", propagate_positions=True)

_GAP = r"(?:\s|#[^\n]*)*"
_TERM = (
    r"(?:[?$][A-Za-z_][A-Za-z0-9_]*"
    r"|(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_\-]+(?:\.[A-Za-z0-9_\-]+)*)?"
    r"|<[^<>\"{}|^`\\\x00-\x20]*>"
    r'|"(?:[^"\\\n\r\t]|\\[nrt"\\])*"'
    r"|a(?![A-Za-z0-9_:\-]))"
)
_TERM_RE = re.compile(_TERM)
# ``;`` followed by two terms, ending where the parser hit a third one.
_BROKEN_CONTINUATION_RE = re.compile(rf";{_GAP}{_TERM}{_GAP}{_TERM}{_GAP}\Z")

_ESCAPE_RE = re.compile(r"\\(.)")
_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}

FRESH_PREFIX = "_reif"


class QuerySyntaxError(ValueError):
    """Query text outside the supported subset, located by line and column."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class MisplacedReificationError(QuerySyntaxError):
    """``reification(...)`` used in predicate or object position."""


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not data_validator.is_valid_variable_name(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True, slots=True)
class Ground:
    term: Term


PatternTerm = Union[Var, Ground]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm

    def variables(self) -> set[str]:
        return {t.name for t in (self.s, self.p, self.o) if isinstance(t, Var)}


@dataclass(frozen=True)
class ReificationTerm:
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm


@dataclass(frozen=True)
class ReificationAnchor:
    """A reification term in subject position with its attached (verb, object) pairs."""

    term: ReificationTerm
    properties: tuple[tuple[PatternTerm, PatternTerm], ...] = ()

    def variables(self) -> set[str]:
        terms = [self.term.s, self.term.p, self.term.o]
        for verb, obj in self.properties:
            terms.extend((verb, obj))
        return {t.name for t in terms if isinstance(t, Var)}


GraphItem = Union[TriplePattern, ReificationAnchor]


@dataclass(frozen=True)
class Query:
    projection: tuple[Var, ...]
    where: tuple[GraphItem, ...] = ()
    prefixes: dict[str, str] = field(default_factory=dict)

    @property
    def patterns(self) -> list[TriplePattern]:
        return [item for item in self.where if isinstance(item, TriplePattern)]

    @property
    def anchors(self) -> list[ReificationAnchor]:
        return [item for item in self.where if isinstance(item, ReificationAnchor)]

    def pattern_variables(self) -> set[str]:
        names: set[str] = set()
        for item in self.where:
            names |= item.variables()
        return names

    def variables(self) -> set[str]:
        return self.pattern_variables() | {v.name for v in self.projection}


@dataclass
class QueryParseReport:
    continuations_closed: int = 0
    warnings: list[str] = field(default_factory=list)


@dataclass
class SolutionTable:
    header: tuple[str, ...]
    rows: list[tuple[Optional[Term], ...]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def as_multiset(self) -> Counter:
        return Counter(self.rows)


def _unescape(body: str) -> str:
    return _ESCAPE_RE.sub(lambda m: _ESCAPES[m.group(1)], body)


class _QueryBuilder(Transformer):
    """Turn the parse tree into :class:`Query` objects."""

    def __init__(self, prefixes: PrefixTable, declared: dict[str, str]) -> None:
        super().__init__()
        self.prefixes = prefixes
        self.declared = declared
        self.rdf_type = Iri(settings.RDF_NAMESPACE + "type")

    def iri(self, children: list[Token]) -> Ground:
        token = children[0]
        if token.type == "IRIREF":
            return Ground(Iri(token[1:-1]))
        try:
            return Ground(Iri(self.prefixes.expand(str(token))))
        except UnknownPrefixError as exc:
            raise QuerySyntaxError(exc.message, token.line, token.column) from exc

    def _term(self, children: list) -> PatternTerm:
        item = children[0]
        if isinstance(item, Ground):
            return item
        if item.type == "VAR":
            return Var(item[1:])
        if item.type == "STRING":
            return Ground(Literal(_unescape(item[1:-1])))
        return Ground(self.rdf_type)

    subject_term = _term
    verb = _term
    object_term = _term
    slot = _term

    def property(self, children: list) -> list[tuple[PatternTerm, PatternTerm]]:
        verb, *objects = children
        return [(verb, obj) for obj in objects]

    def property_list(self, children: list) -> list[tuple[PatternTerm, PatternTerm]]:
        return [pair for pairs in children for pair in pairs]

    def reification_term(self, children: list) -> ReificationTerm:
        keyword, s, p, o = children
        if isinstance(p, Ground) and not isinstance(p.term, Iri):
            raise QuerySyntaxError(
                "the predicate slot of reification(...) must be a variable or an IRI",
                keyword.line,
                keyword.column,
            )
        return ReificationTerm(s, p, o)

    def plain_triples(self, children: list) -> list[GraphItem]:
        subject, pairs = children
        return [TriplePattern(subject, verb, obj) for verb, obj in pairs]

    def reified_triples(self, children: list) -> list[GraphItem]:
        term, *rest = children
        pairs = rest[0] if rest else []
        return [ReificationAnchor(term, tuple(pairs))]

    def triples_block(self, children: list) -> list[GraphItem]:
        return [item for items in children for item in items]

    def where_clause(self, children: list) -> tuple[GraphItem, ...]:
        for child in children:
            if isinstance(child, list):
                return tuple(child)
        return ()

    def select_clause(self, children: list) -> tuple[Var, ...]:
        return tuple(Var(token[1:]) for token in children if token.type == "VAR")

    def prefix_decl(self, children: list) -> None:
        return None

    def start(self, children: list) -> Query:
        projection, where = children[-2], children[-1]
        return Query(projection, where, dict(self.declared))


def _end_position(text: str) -> tuple[int, int]:
    line = text.count("\n") + 1
    return line, len(text) - (text.rfind("\n") + 1) + 1


def _syntax_error(text: str, exc: UnexpectedInput) -> QuerySyntaxError:
    token = getattr(exc, "token", None)
    line, column = getattr(exc, "line", None), getattr(exc, "column", None)
    if line is None or line < 1:
        line, column = _end_position(text)

    misplaced = isinstance(token, Token) and token.type == "REIFICATION"
    if isinstance(exc, UnexpectedCharacters):
        misplaced = text[exc.pos_in_stream:].lower().startswith("reification")
    if misplaced:
        return MisplacedReificationError(
            "reification(...) is only allowed in subject position", line, column
        )

    if isinstance(token, Token) and token.type != "$END":
        found = repr(str(token))
    elif isinstance(exc, UnexpectedCharacters):
        found = repr(text[exc.pos_in_stream])
    else:
        found = "end of input"
    expected = sorted(getattr(exc, "expected", None) or getattr(exc, "allowed", None) or ())
    message = f"unexpected {found}"
    if expected:
        message += f", expected one of {', '.join(expected)}"
    return QuerySyntaxError(message, line, column)


def _error_offset(exc: UnexpectedInput) -> Optional[int]:
    if isinstance(exc, UnexpectedCharacters):
        return exc.pos_in_stream
    token = getattr(exc, "token", None)
    if isinstance(token, Token) and token.type != "$END":
        return token.start_pos
    return None


def _close_continuation(text: str, exc: UnexpectedInput) -> Optional[int]:
    """Offset of a ``;`` that should have been ``.``, or ``None``.

    Matches ``?x :p ?y ; ?y :q ?z``: after the ``;`` two terms parse as a
    predicate-object pair and the parser fails on a third term.
    """
    offset = _error_offset(exc)
    if offset is None or not _TERM_RE.match(text, offset):
        return None
    match = _BROKEN_CONTINUATION_RE.search(text, 0, offset)
    return match.start() if match else None


def _parse_tree(text: str, report: QueryParseReport) -> Tree:
    for _ in range(text.count(";") + 1):
        try:
            return _PARSER.parse(text)
        except UnexpectedInput as exc:
            position = _close_continuation(text, exc)
            if position is None:
                raise _syntax_error(text, exc) from exc
            line = text.count("\n", 0, position) + 1
            column = position - (text.rfind("\n", 0, position) + 1) + 1
            message = f"';' followed by a new triple, read as '.' (line {line}, column {column})"
            logger.warning("Query: %s", message)
            report.warnings.append(message)
            report.continuations_closed += 1
            text = f"{text[:position]}.{text[position + 1:]}"
    raise QuerySyntaxError("too many malformed continuations")


def parse_query(text: str, prefixes: Optional[PrefixTable] = None) -> Query:
    """Parse query ``text``; ``prefixes`` are in scope before any ``PREFIX`` line."""
    return parse_query_with_report(text, prefixes)[0]


def parse_query_with_report(
    text: str, prefixes: Optional[PrefixTable] = None
) -> tuple[Query, QueryParseReport]:
    """Parse ``text`` and report the repairs applied.

    A ``;`` followed by a complete triple is read as ``.``, the way
    hand-typed queries often end a subject block.
    """
    table = prefixes.copy() if prefixes is not None else PrefixTable.default()
    report = QueryParseReport()
    tree = _parse_tree(text, report)

    declared: dict[str, str] = {}
    for decl in tree.find_data("prefix_decl"):
        _, label, namespace = decl.children
        if not label.endswith(":"):
            raise QuerySyntaxError("expected a prefix label such as 'ex:'", label.line, label.column)
        declared[str(label)[:-1]] = str(namespace)[1:-1]
        table.bind(str(label)[:-1], str(namespace)[1:-1])

    try:
        query = _QueryBuilder(table, declared).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, QuerySyntaxError):
            raise exc.orig_exc from None
        raise

    used = query.pattern_variables()
    for var in query.projection:
        if var.name not in used:
            logger.warning("Projected variable ?%s does not occur in the pattern; it stays unbound", var.name)
    return query, report


def expand_reification(
    q: Query, strict_statement_type: bool = False, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> Query:
    """Replace every ``reification(S P O)`` anchor by standard triple patterns.

    Each anchor gets a fresh ``?_reifN`` variable, skipping names already
    used in ``q``.  Queries without anchors are returned unchanged.
    """
    if not q.anchors:
        return q
    used = q.variables()
    fresh: list[str] = []
    counter = 0

    def next_variable() -> Var:
        nonlocal counter
        while f"{FRESH_PREFIX}{counter}" in used:
            counter += 1
        name = f"{FRESH_PREFIX}{counter}"
        used.add(name)
        fresh.append(name)
        return Var(name)

    where: list[GraphItem] = []
    for item in q.where:
        if isinstance(item, TriplePattern):
            where.append(item)
            continue
        node = next_variable()
        where.append(TriplePattern(node, Ground(Iri(vocab.subject)), item.term.s))
        where.append(TriplePattern(node, Ground(Iri(vocab.predicate)), item.term.p))
        where.append(TriplePattern(node, Ground(Iri(vocab.object)), item.term.o))
        if strict_statement_type:
            where.append(TriplePattern(node, Ground(Iri(vocab.rdf_type)), Ground(Iri(vocab.statement))))
        where.extend(TriplePattern(node, verb, obj) for verb, obj in item.properties)

    assert not set(fresh) & q.variables()
    logger.debug("Expanded %d reification terms into %s", len(fresh), ", ".join(fresh))
    return replace(q, where=tuple(where))


def _format_pattern_term(term: PatternTerm, prefixes: PrefixTable) -> str:
    if isinstance(term, Var):
        return f"?{term.name}"
    return format_term(term.term, prefixes)


def format_query(q: Query, prefixes: Optional[PrefixTable] = None) -> str:
    """Pretty-print ``q`` with one pattern per line.

    IRIs are compacted with ``prefixes`` (defaults if omitted) overridden by
    the query's own declarations, which are printed first.
    """
    table = prefixes.copy() if prefixes is not None else PrefixTable.default()
    for label, namespace in q.prefixes.items():
        table.bind(label, namespace)

    def fmt(term: PatternTerm) -> str:
        return _format_pattern_term(term, table)

    lines = [f"PREFIX {label}: <{namespace}>" for label, namespace in q.prefixes.items()]
    lines.append("SELECT " + " ".join(f"?{v.name}" for v in q.projection))
    lines.append("WHERE {")
    for item in q.where:
        if isinstance(item, TriplePattern):
            lines.append(f"  {fmt(item.s)} {fmt(item.p)} {fmt(item.o)} .")
            continue
        term = item.term
        head = f"  reification({fmt(term.s)} {fmt(term.p)} {fmt(term.o)})"
        if not item.properties:
            lines.append(head + " .")
            continue
        lines.append(head + " ;")
        for index, (verb, obj) in enumerate(item.properties):
            end = " ." if index == len(item.properties) - 1 else " ;"
            lines.append(f"      {fmt(verb)} {fmt(obj)}{end}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _ground(term: PatternTerm) -> Optional[Term]:
    return term.term if isinstance(term, Ground) else None


def plan(patterns: Union[Query, Iterable[TriplePattern]], store: TripleSet) -> list[TriplePattern]:
    """Order patterns for evaluation.

    Patterns are ranked by their exact match count with variables left
    unbound (ties keep textual order).  The cheapest goes first; after that
    the cheapest pattern sharing a variable with those already placed is
    preferred, falling back to the cheapest remaining one.
    """
    items = patterns.patterns if isinstance(patterns, Query) else list(patterns)
    ranked = sorted(
        ((store.count(_ground(p.s), _ground(p.p), _ground(p.o)), index, p) for index, p in enumerate(items)),
        key=lambda entry: (entry[0], entry[1]),
    )
    remaining = [entry[2] for entry in ranked]
    ordered: list[TriplePattern] = []
    bound: set[str] = set()
    while remaining:
        position = 0
        if ordered:
            position = next((k for k, p in enumerate(remaining) if p.variables() & bound), 0)
        chosen = remaining.pop(position)
        ordered.append(chosen)
        bound |= chosen.variables()
    return ordered


def anchored_variables(patterns: Iterable[TriplePattern], vocab: Vocabulary = DEFAULT_VOCABULARY) -> set[str]:
    """Variables constrained to be statement nodes by the pattern itself."""
    reification = {Iri(p) for p in vocab.reification_predicates()}
    statement_type = (Ground(Iri(vocab.rdf_type)), Ground(Iri(vocab.statement)))
    names: set[str] = set()
    for p in patterns:
        if not isinstance(p.s, Var):
            continue
        if isinstance(p.p, Ground) and p.p.term in reification:
            names.add(p.s.name)
        elif (p.p, p.o) == statement_type:
            names.add(p.s.name)
    return names


def guarded_variables(patterns: Iterable[TriplePattern], vocab: Vocabulary = DEFAULT_VOCABULARY) -> set[str]:
    """Variables kept away from reification nodes when statements are opaque.

    Only queries that describe statements themselves (some variable is
    anchored, see :func:`anchored_variables`) are affected.  In those, a
    variable in subject position of an ``:attribution`` pattern that is not
    anchored stands for an entity and may not bind a statement node.
    Reification-free queries get plain BGP results.
    """
    patterns = list(patterns)
    anchored = anchored_variables(patterns, vocab)
    if not anchored:
        return set()
    attribution = Ground(Iri(vocab.attribution))
    return {p.s.name for p in patterns if isinstance(p.s, Var) and p.p == attribution} - anchored


def evaluate(
    q: Query,
    store: TripleSet,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    *,
    opaque_statement_nodes: bool = True,
    join_order: TypingLiteral["greedy", "textual"] = "greedy",
) -> SolutionTable:
    """Join the query's patterns over ``store`` and project the SELECT list.

    Rows follow bag semantics; unbound projected variables are ``None``.
    With ``opaque_statement_nodes`` the variables named by
    :func:`guarded_variables` may not bind a reification node; this keeps
    ``?x :attribution ?a`` from matching the statement nodes that share an
    attribution node with an entity.  Otherwise the result is the natural
    join of the patterns.
    """
    if q.anchors:
        raise ValueError("query still contains reification terms; run expand_reification first")
    header = tuple(v.name for v in q.projection)
    patterns = q.patterns
    ordered = plan(patterns, store) if join_order == "greedy" else list(patterns)

    hidden: set[Term] = set()
    guarded: set[str] = set()
    if opaque_statement_nodes:
        guarded = guarded_variables(patterns, vocab)
        if guarded:
            hidden = reification_nodes(store, vocab)

    table = SolutionTable(header)

    def bind(pattern: TriplePattern, values: tuple[Term, Term, Term], binding: dict[str, Term]) -> Optional[dict[str, Term]]:
        extended = dict(binding)
        for term, value in zip((pattern.s, pattern.p, pattern.o), values):
            if not isinstance(term, Var):
                continue
            current = extended.get(term.name)
            if current is not None:
                if current != value:
                    return None
                continue
            if value in hidden and term.name in guarded:
                return None
            extended[term.name] = value
        return extended

    def extend(depth: int, binding: dict[str, Term]) -> None:
        if depth == len(ordered):
            table.rows.append(tuple(binding.get(name) for name in header))
            return
        pattern = ordered[depth]
        s, p, o = (
            binding.get(t.name) if isinstance(t, Var) else t.term
            for t in (pattern.s, pattern.p, pattern.o)
        )
        for triple in store.match(s, p, o):
            extended = bind(pattern, (triple.subject, triple.predicate, triple.object), binding)
            if extended is not None:
                extend(depth + 1, extended)

    extend(0, {})
    logger.debug("Evaluated %d patterns: %d rows", len(ordered), len(table.rows))
    return table


def run_query(
    text: str,
    store: TripleSet,
    prefixes: Optional[PrefixTable] = None,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    *,
    strict_statement_type: bool = False,
    opaque_statement_nodes: bool = True,
) -> SolutionTable:
    """Parse, expand and evaluate ``text`` in one call."""
    query = expand_reification(parse_query(text, prefixes), strict_statement_type, vocab)
    return evaluate(query, store, vocab, opaque_statement_nodes=opaque_statement_nodes)
