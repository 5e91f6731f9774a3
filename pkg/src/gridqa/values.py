"""Typed attribute values, comparators, and predicate evaluation.

Attribute values are plain Python objects (str, int, float, bool,
datetime.date). Durations are first-class because time-window constraints
("within five years") compare a date attribute against a moving window
anchored at a reference date.
"""
from __future__ import annotations

import calendar
from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum

from .errors import TypeMismatch


class Datatype(str, Enum):
    STRING = "string"
    INTEGER = "integer"
    DECIMAL = "decimal"
    DATE = "date"
    BOOLEAN = "boolean"


class Comparator(str, Enum):
    EQ = "eq"
    NEQ = "neq"
    LT = "lt"
    LE = "le"
    GT = "gt"
    GE = "ge"
    WITHIN_DURATION = "within_duration"
    IN_YEAR = "in_year"
    CONTAINS = "contains"


ORDERED_COMPARATORS = {Comparator.LT, Comparator.LE, Comparator.GT, Comparator.GE}

#: fixed fallback reference for time-window predicates; injected rather than
#: taken from the wall clock so identical inputs always produce identical answers
DEFAULT_EVALUATION_DATE = date(2021, 12, 31)


@dataclass(frozen=True)
class Duration:
    """Calendar duration used by within_duration windows."""

    amount: int
    unit: str  # "years" | "months" | "days"

    def to_json(self) -> dict:
        return {"amount": self.amount, "unit": self.unit}

    def __str__(self) -> str:
        return f"{self.amount} {self.unit}"


def subtract_duration(ref: date, duration: Duration) -> date:
    """Calendar-aware ref - duration, clamping to the last day of month."""
    if duration.unit == "days":
        return ref - timedelta(days=duration.amount)
    if duration.unit == "months":
        total = ref.year * 12 + (ref.month - 1) - duration.amount
        year, month = divmod(total, 12)
        month += 1
    elif duration.unit == "years":
        year, month = ref.year - duration.amount, ref.month
    else:
        raise TypeMismatch(f"unknown duration unit: {duration.unit}")
    day = min(ref.day, calendar.monthrange(year, month)[1])
    return date(year, month, day)


def parse_typed_value(raw, datatype: Datatype):
    """Validate and convert a JSON-decoded value to its attribute datatype."""
    if datatype is Datatype.STRING:
        if not isinstance(raw, str):
            raise TypeMismatch(f"expected string, got {raw!r}")
        return raw
    if datatype is Datatype.BOOLEAN:
        if not isinstance(raw, bool):
            raise TypeMismatch(f"expected boolean, got {raw!r}")
        return raw
    if datatype is Datatype.INTEGER:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise TypeMismatch(f"expected integer, got {raw!r}")
        return raw
    if datatype is Datatype.DECIMAL:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise TypeMismatch(f"expected decimal, got {raw!r}")
        return float(raw)
    if datatype is Datatype.DATE:
        if isinstance(raw, date):
            return raw
        if not isinstance(raw, str):
            raise TypeMismatch(f"expected ISO date string, got {raw!r}")
        try:
            return date.fromisoformat(raw)
        except ValueError as exc:
            raise TypeMismatch(f"bad date {raw!r}: {exc}") from None
    raise TypeMismatch(f"unknown datatype {datatype!r}")


def comparator_valid(comparator: Comparator, datatype: Datatype) -> bool:
    if comparator in (Comparator.EQ, Comparator.NEQ):
        return True
    if comparator in ORDERED_COMPARATORS:
        return datatype in (Datatype.INTEGER, Datatype.DECIMAL, Datatype.DATE)
    if comparator in (Comparator.WITHIN_DURATION, Comparator.IN_YEAR):
        return datatype is Datatype.DATE
    if comparator is Comparator.CONTAINS:
        return datatype is Datatype.STRING
    return False


def evaluate_predicate(attr_value, comparator: Comparator, value, *, reference_date: date) -> bool:
    """Apply one comparator. attr_value is an already-typed stored value.

    within_duration tests attr_value in [reference_date - value, reference_date].
    """
    if attr_value is None:
        return False
    if comparator is Comparator.EQ:
        return attr_value == value
    if comparator is Comparator.NEQ:
        return attr_value != value
    if comparator is Comparator.LT:
        return attr_value < value
    if comparator is Comparator.LE:
        return attr_value <= value
    if comparator is Comparator.GT:
        return attr_value > value
    if comparator is Comparator.GE:
        return attr_value >= value
    if comparator is Comparator.CONTAINS:
        return isinstance(attr_value, str) and str(value).lower() in attr_value.lower()
    if comparator is Comparator.IN_YEAR:
        return isinstance(attr_value, date) and attr_value.year == int(value)
    if comparator is Comparator.WITHIN_DURATION:
        if not isinstance(attr_value, date) or not isinstance(value, Duration):
            return False
        return subtract_duration(reference_date, value) <= attr_value <= reference_date
    raise TypeMismatch(f"unknown comparator {comparator!r}")


def value_to_json(value):
    if isinstance(value, Duration):
        return value.to_json()
    if isinstance(value, date):
        return value.isoformat()
    return value


def value_from_json(raw):
    if isinstance(raw, dict) and set(raw) == {"amount", "unit"}:
        return Duration(int(raw["amount"]), str(raw["unit"]))
    return raw
