"""Input validation helpers.

This module centralizes the small lexical checks shared by the Turtle reader,
the SPARQL parser, the XML evidence parser and the corpus generator.  Each
function is intentionally lightweight so that callers can decide how to report
a failure.
"""

from __future__ import annotations

import re
from datetime import date

ISO_DATE_PATTERN = re.compile(r"^\d{4}-\d{2}-\d{2}$")
VARIABLE_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
PREFIX_LABEL_PATTERN = re.compile(r"^(?:[A-Za-z][A-Za-z0-9_\-]*)?$")
LOCAL_NAME_PATTERN = re.compile(r"^(?:[A-Za-z0-9_\-]+(?:\.[A-Za-z0-9_\-]+)*)?$")
BLANK_LABEL_PATTERN = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_\-]*$")


def parse_iso_date(value: str) -> date:
    """Return the calendar date written as ``YYYY-MM-DD`` in ``value``.

    Raises ``ValueError`` for any other shape, including ISO forms that
    :meth:`datetime.date.fromisoformat` would accept such as ``20100804``.
    """

    if not isinstance(value, str) or not ISO_DATE_PATTERN.fullmatch(value):
        raise ValueError(f"not a YYYY-MM-DD date: {value!r}")
    return date.fromisoformat(value)


def is_iso_date(value: str) -> bool:
    """Return ``True`` if ``value`` is a valid ``YYYY-MM-DD`` date."""
    try:
        parse_iso_date(value)
    except ValueError:
        return False
    return True


def is_valid_variable_name(value: str) -> bool:
    """Return ``True`` if ``value`` is usable as a query variable name."""
    return bool(VARIABLE_PATTERN.fullmatch(value))


def is_valid_prefix_label(value: str) -> bool:
    """Return ``True`` if ``value`` is a prefix label (empty is the default prefix)."""
    return bool(PREFIX_LABEL_PATTERN.fullmatch(value))


def is_valid_local_name(value: str) -> bool:
    """Return ``True`` if ``value`` can follow ``prefix:`` in a prefixed name."""
    return bool(LOCAL_NAME_PATTERN.fullmatch(value))


def is_valid_blank_label(value: str) -> bool:
    """Return ``True`` if ``value`` can follow ``_:`` in a blank node label."""
    return bool(BLANK_LABEL_PATTERN.fullmatch(value))


def is_fraction(value: float) -> bool:
    """Return ``True`` if ``value`` lies in the closed interval [0, 1]."""
    return 0.0 <= value <= 1.0


def is_non_negative_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0
