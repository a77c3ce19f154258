"""Synthetic UniProt-like corpus generator and triple statistics.

Each entry is a protein with ``statements_per_entry`` base statements.  A
fraction ``attribution_fraction`` of those statements is reified and linked
to an attribution node shared per ``(source, date)``.  Every entry draws
from its own ``random.Random`` seeded with ``"<seed>:<index>"`` (Python's
Mersenne Twister, string seeds hashed with SHA-512), so any entry can be
regenerated on its own and shards concatenate in entry order.

With ``f`` the attribution fraction the metadata share tends to
``5f / (1 + 5f)`` once attribution nodes are amortised; ``f = 1/45`` gives
about 10%.  This is a calibration knob, not a model of real UniProtKB data.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

import data_validator
import settings
from evidence_model import (
    Attribution,
    EvidenceTag,
    SourceCategory,
    attach_entity_attribution,
    classify_source,
    encode_attribution,
    reify,
    reification_nodes,
)
from rdf_core import Blank, Iri, Literal, Triple, TripleSet
from settings import DEFAULT_VOCABULARY, Vocabulary
from turtle_io import PrefixTable, prefix_lines, subject_blocks

logger = logging.getLogger(__name__)

PREDICATES = ("fullName", "shortName", "comment", "function", "catalyticActivity", "pathway")
_TAGS = tuple(EvidenceTag)


class GenConfig(BaseModel):
    entries: int = Field(1000, ge=0)
    statements_per_entry: int = Field(10, ge=0)
    attribution_fraction: float = Field(1 / 45, ge=0.0, le=1.0)
    source_pool: int = Field(10, ge=0)
    date_start: date = date(2010, 8, 1)
    date_end: date = date(2010, 8, 10)
    seed: int = Field(0, ge=0, lt=2**64)
    entity_links: bool = False
    evidence_tags: bool = False

    @field_validator("attribution_fraction", mode="before")
    @classmethod
    def _parse_fraction(cls, value: object) -> object:
        if isinstance(value, str) and "/" in value:
            return float(Fraction(value.strip()))
        return value

    @field_validator("date_start", "date_end", mode="before")
    @classmethod
    def _parse_date(cls, value: object) -> object:
        if isinstance(value, str):
            return data_validator.parse_iso_date(value.strip())
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> "GenConfig":
        if self.date_start > self.date_end:
            raise ValueError("date_start must not be after date_end")
        if self.attribution_fraction > 0 and self.source_pool == 0:
            raise ValueError("source_pool must be positive when attribution_fraction > 0")
        return self

    @property
    def span_days(self) -> int:
        return (self.date_end - self.date_start).days

    @classmethod
    def from_key_values(cls, values: Mapping[str, str], **overrides: object) -> "GenConfig":
        """Build a config from ``key = value`` settings; ``overrides`` win."""
        data: dict[str, object] = dict(values)
        for key in ("entity_links", "evidence_tags"):
            if key in data:
                data[key] = settings.parse_bool(data[key])
        data.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(data) - set(cls.model_fields)
        if unknown:
            raise ValueError(f"unknown generator setting(s): {', '.join(sorted(unknown))}")
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            logger.error("Generator config validation error: %s", exc)
            raise ValueError("Invalid generator configuration") from exc

    @classmethod
    def load(cls, path: Path, **overrides: object) -> "GenConfig":
        return cls.from_key_values(settings.read_key_value_file(path), **overrides)


@dataclass
class GenerationReport:
    base: int = 0
    reification: int = 0
    attribution: int = 0
    entity_links: int = 0

    @property
    def metadata(self) -> int:
        return self.reification + self.attribution + self.entity_links

    @property
    def total(self) -> int:
        return self.base + self.metadata


class _Namespaces:
    def __init__(self, prefixes: PrefixTable, vocab: Vocabulary) -> None:
        self.entity = prefixes.get("protein", settings.DEFAULT_SETTINGS["prefixes"]["protein"])
        self.source = prefixes.get("hamap", settings.DEFAULT_SETTINGS["prefixes"]["hamap"])
        self.core = vocab.core_namespace()


def iter_entry_triples(
    cfg: GenConfig,
    index: int,
    seen_attributions: set[tuple[int, int]],
    report: Optional[GenerationReport] = None,
    prefixes: Optional[PrefixTable] = None,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
) -> Iterator[Triple]:
    """Yield the triples of entry ``index``.

    ``seen_attributions`` holds the ``(source, day)`` keys whose
    attribution node was already described; it is updated in place.
    """
    names = _Namespaces(prefixes or PrefixTable.default(), vocab)
    report = report if report is not None else GenerationReport()
    rng = random.Random(f"{cfg.seed}:{index}")
    entity = Iri(f"{names.entity}SYN{index:07d}")
    linked: set[Blank] = set()

    for k in range(cfg.statements_per_entry):
        # every draw happens for every statement so that raising f only adds metadata
        u = rng.random()
        source_index = rng.randrange(cfg.source_pool) if cfg.source_pool else 0
        day = rng.randrange(cfg.span_days + 1)
        predicate = PREDICATES[rng.randrange(len(PREDICATES))]

        base = Triple(entity, Iri(names.core + predicate), Literal(f"{predicate} {index}.{k}"))
        report.base += 1
        yield base
        if u >= cfg.attribution_fraction:
            continue

        attr_node = Blank(f"a{source_index}_{day}")
        for triple in reify(base.subject, base.predicate, base.object, Blank(f"s{index}_{k}"), attr_node, vocab):
            report.reification += 1
            yield triple
        if cfg.entity_links and attr_node not in linked:
            linked.add(attr_node)
            for triple in attach_entity_attribution(entity, attr_node, vocab):
                report.entity_links += 1
                yield triple
        key = (source_index, day)
        if key not in seen_attributions:
            seen_attributions.add(key)
            attribution = Attribution(
                source=Iri(f"{names.source}MF_{source_index:05d}"),
                date=cfg.date_start + timedelta(days=day),
                evidence_tag=_TAGS[(source_index + day) % len(_TAGS)] if cfg.evidence_tags else None,
            )
            for triple in encode_attribution(attribution, attr_node, vocab):
                report.attribution += 1
                yield triple


def generate_with_report(
    cfg: GenConfig, prefixes: Optional[PrefixTable] = None, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> tuple[TripleSet, GenerationReport]:
    report = GenerationReport()
    seen: set[tuple[int, int]] = set()
    store = TripleSet()
    for index in range(cfg.entries):
        store.update(iter_entry_triples(cfg, index, seen, report, prefixes, vocab))
    logger.info(
        "Generated %d triples (%d base, %d reification, %d attribution, %d entity links)",
        report.total,
        report.base,
        report.reification,
        report.attribution,
        report.entity_links,
    )
    return store, report


def generate(
    cfg: GenConfig, prefixes: Optional[PrefixTable] = None, vocab: Vocabulary = DEFAULT_VOCABULARY
) -> TripleSet:
    return generate_with_report(cfg, prefixes, vocab)[0]


def stream_turtle(
    cfg: GenConfig,
    prefixes: Optional[PrefixTable] = None,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    report: Optional[GenerationReport] = None,
) -> Iterator[str]:
    """Yield the corpus as Turtle text, one chunk per entry, without building a store."""
    table = prefixes if prefixes is not None else PrefixTable.default()
    seen: set[tuple[int, int]] = set()
    report = report if report is not None else GenerationReport()
    header = prefix_lines(table)
    if header:
        yield "\n".join(header) + "\n\n"
    for index in range(cfg.entries):
        entry = TripleSet(iter_entry_triples(cfg, index, seen, report, table, vocab))
        blocks = list(subject_blocks(entry, table))
        if blocks:
            yield "\n".join(blocks) + "\n"


@dataclass
class StatsReport:
    total: int = 0
    metadata: int = 0
    attributed_statements: int = 0
    distinct_sources: int = 0
    date_histogram: dict[str, int] = field(default_factory=dict)
    source_categories: dict[str, int] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.total == 0

    @property
    def fraction(self) -> float:
        return self.metadata / self.total if self.total else 0.0


def stats(
    store: TripleSet,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    metadata_predicates: Optional[frozenset[str]] = None,
    category_rules: Optional[Mapping[str, SourceCategory]] = None,
) -> StatsReport:
    """Count metadata triples and summarise attributions.

    A triple is metadata when its predicate is in ``metadata_predicates``
    (the provenance vocabulary by default) or its object is
    ``rdf:Statement``.  Dates are bucketed by month; values that are not
    ``YYYY-MM-DD`` land in the ``invalid`` bucket.
    """
    predicates = {Iri(p) for p in (metadata_predicates or vocab.metadata_predicates())}
    statement = Iri(vocab.statement)
    metadata = sum(store.count(None, p, None) for p in predicates)
    metadata += sum(1 for t in store.match(None, None, statement) if t.predicate not in predicates)

    statement_nodes = reification_nodes(store, vocab)
    attributed = {
        t.subject for t in store.match(None, Iri(vocab.attribution), None) if t.subject in statement_nodes
    }
    sources = {t.object for t in store.match(None, Iri(vocab.source), None)}

    histogram: Counter[str] = Counter()
    for value in store.objects(None, Iri(vocab.date)):
        if isinstance(value, Literal) and data_validator.is_iso_date(value.lexical):
            histogram[value.lexical[:7]] += 1
        else:
            histogram["invalid"] += 1

    categories: Counter[str] = Counter()
    if category_rules is not None:
        for source in sources:
            outcome = classify_source(source, category_rules)
            categories[outcome.value if isinstance(outcome, SourceCategory) else "Unclassified"] += 1

    return StatsReport(
        total=len(store),
        metadata=metadata,
        attributed_statements=len(attributed),
        distinct_sources=len(sources),
        date_histogram=dict(sorted(histogram.items())),
        source_categories=dict(sorted(categories.items())),
    )
