import json
import logging
import os
from pathlib import Path
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

import data_validator

RDF_NAMESPACE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
CORE_NAMESPACE = "http://purl.uniprot.org/core/"

# Placeholder bindings; ``--prefixes`` and ``config.json`` override them.
DEFAULT_SETTINGS = {
    "prefixes": {
        "": CORE_NAMESPACE,
        "rdf": RDF_NAMESPACE,
        "protein": "http://purl.uniprot.org/uniprot/",
        "hamap": "http://purl.uniprot.org/hamap/",
    },
    "source_categories": {
        "hamap:": "Program",
    },
}

CONFIG_FILENAME = "config.json"
CONFIG_ENV = "UNIPROV_CONFIG"


logger = logging.getLogger(__name__)


class SettingsModel(BaseModel):
    prefixes: dict[str, str]
    source_categories: dict[str, str]

    @field_validator("prefixes")
    @classmethod
    def _check_labels(cls, value: dict[str, str]) -> dict[str, str]:
        for label in value:
            if not data_validator.is_valid_prefix_label(label):
                raise ValueError(f"invalid prefix label {label!r}")
        return value


class Vocabulary(BaseModel):
    """IRIs of the provenance vocabulary shared by every module.

    ``attribution``, ``source`` and ``date`` are the terms used by the
    reified provenance records; ``evidence`` and ``category`` are the
    plain-literal extension carrying evidence tags and source categories.
    The remaining core terms describe structured protein names.
    """

    model_config = ConfigDict(frozen=True)

    attribution: str
    source: str
    date: str
    evidence: str
    category: str
    recommended_name: str
    structured_name: str
    full_name: str
    rdf_type: str
    statement: str
    subject: str
    predicate: str
    object: str

    @classmethod
    def from_namespaces(cls, core: str = CORE_NAMESPACE, rdf: str = RDF_NAMESPACE) -> "Vocabulary":
        return cls(
            attribution=f"{core}attribution",
            source=f"{core}source",
            date=f"{core}date",
            evidence=f"{core}evidence",
            category=f"{core}category",
            recommended_name=f"{core}recommendedName",
            structured_name=f"{core}Structured_Name",
            full_name=f"{core}fullName",
            rdf_type=f"{rdf}type",
            statement=f"{rdf}Statement",
            subject=f"{rdf}subject",
            predicate=f"{rdf}predicate",
            object=f"{rdf}object",
        )

    @classmethod
    def from_prefixes(cls, prefixes: Dict[str, str]) -> "Vocabulary":
        return cls.from_namespaces(
            prefixes.get("", CORE_NAMESPACE), prefixes.get("rdf", RDF_NAMESPACE)
        )

    def core_namespace(self) -> str:
        return self.attribution[: -len("attribution")]

    def reification_predicates(self) -> tuple[str, str, str]:
        return (self.subject, self.predicate, self.object)

    def metadata_predicates(self) -> frozenset[str]:
        """Predicates whose triples count as provenance metadata."""
        return frozenset(
            {
                self.subject,
                self.predicate,
                self.object,
                self.attribution,
                self.source,
                self.date,
                self.evidence,
                self.category,
            }
        )


DEFAULT_VOCABULARY = Vocabulary.from_namespaces()


def default_config_path() -> Path:
    return Path(os.getenv(CONFIG_ENV, CONFIG_FILENAME))


def load_settings(path: Path | None = None) -> SettingsModel:
    """Load configuration from ``path`` or the default location.

    A missing file yields the defaults; an explicitly configured path that
    does not exist is reported as a warning.
    """
    explicit = path is not None or CONFIG_ENV in os.environ
    if path is None:
        path = default_config_path()
    try:
        with path.open(encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        if explicit:
            logger.warning("Config file %s not found, using defaults", path)
        data = {}
    except json.JSONDecodeError as exc:
        logger.error("Invalid JSON in config file %s", path)
        raise ValueError("Invalid configuration file") from exc

    merged = {**DEFAULT_SETTINGS, **data}
    try:
        return SettingsModel.model_validate(merged)
    except ValidationError as exc:
        logger.error("Configuration validation error: %s", exc)
        raise ValueError("Invalid configuration structure") from exc


def read_key_value_file(path: Path) -> Dict[str, str]:
    """Read a ``key = value`` file; ``#`` starts a comment line."""
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ValueError(f"Configuration file {path} not found") from exc
    return parse_key_values(text, source=str(path))


def parse_key_values(text: str, source: str = "<string>") -> Dict[str, str]:
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        values[key.strip()] = value.strip()
    return values


def parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in {"1", "true", "yes", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {value!r}")
