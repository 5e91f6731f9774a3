from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridqa.errors import TypeMismatch
from gridqa.values import (
    Comparator,
    Datatype,
    Duration,
    comparator_valid,
    evaluate_predicate,
    parse_typed_value,
    subtract_duration,
    value_from_json,
    value_to_json,
)

dates = st.dates(min_value=date(1990, 1, 1), max_value=date(2030, 12, 31))
durations = st.builds(
    Duration,
    st.integers(min_value=0, max_value=120),
    st.sampled_from(["years", "months", "days"]),
)


@given(ref=dates, duration=durations)
def test_subtract_duration_never_exceeds_reference(ref, duration):
    start = subtract_duration(ref, duration)
    assert start <= ref
    if duration.amount == 0:
        assert start == ref


@given(ref=dates, amount=st.integers(min_value=1, max_value=80))
def test_subtract_years_matches_day_count_roughly(ref, amount):
    start = subtract_duration(ref, Duration(amount, "years"))
    assert start.month == ref.month
    assert abs((ref - start).days - 365.25 * amount) < 367


def test_subtract_duration_clamps_leap_day():
    assert subtract_duration(date(2020, 2, 29), Duration(1, "years")) == date(2019, 2, 28)
    assert subtract_duration(date(2021, 3, 31), Duration(1, "months")) == date(2021, 2, 28)


@given(attr=dates, ref=dates, duration=durations)
@settings(max_examples=200)
def test_within_duration_equals_interval_check(attr, ref, duration):
    got = evaluate_predicate(attr, Comparator.WITHIN_DURATION, duration, reference_date=ref)
    assert got == (subtract_duration(ref, duration) <= attr <= ref)


@given(attr=dates, year=st.integers(min_value=1990, max_value=2030))
def test_in_year_matches_year_field(attr, year):
    got = evaluate_predicate(attr, Comparator.IN_YEAR, year, reference_date=date(2021, 12, 31))
    assert got == (attr.year == year)


@given(a=st.floats(allow_nan=False, allow_infinity=False), b=st.floats(allow_nan=False, allow_infinity=False))
def test_ordered_comparators_agree_with_python(a, b):
    ref = date(2021, 12, 31)
    assert evaluate_predicate(a, Comparator.LT, b, reference_date=ref) == (a < b)
    assert evaluate_predicate(a, Comparator.GE, b, reference_date=ref) == (a >= b)


def test_none_attribute_never_matches():
    ref = date(2021, 12, 31)
    for comp in Comparator:
        assert evaluate_predicate(None, comp, "x", reference_date=ref) is False


def test_contains_is_case_insensitive():
    ref = date(2021, 12, 31)
    assert evaluate_predicate("Oil Leakage", Comparator.CONTAINS, "leak", reference_date=ref)
    assert not evaluate_predicate("overheating", Comparator.CONTAINS, "leak", reference_date=ref)


def test_parse_typed_value_round_trips():
    assert parse_typed_value("2019-07-15", Datatype.DATE) == date(2019, 7, 15)
    assert parse_typed_value(date(2019, 7, 15), Datatype.DATE) == date(2019, 7, 15)
    assert parse_typed_value(220, Datatype.INTEGER) == 220
    assert parse_typed_value(150, Datatype.DECIMAL) == 150.0
    assert parse_typed_value("in service", Datatype.STRING) == "in service"


def test_parse_typed_value_rejects_mismatches():
    for raw, datatype in [
        ("heavy", Datatype.DECIMAL),
        (True, Datatype.INTEGER),
        (5, Datatype.STRING),
        ("2019-13-40", Datatype.DATE),
        (7, Datatype.DATE),
    ]:
        with pytest.raises(TypeMismatch):
            parse_typed_value(raw, datatype)


def test_comparator_validity_table():
    assert comparator_valid(Comparator.EQ, Datatype.STRING)
    assert comparator_valid(Comparator.CONTAINS, Datatype.STRING)
    assert not comparator_valid(Comparator.CONTAINS, Datatype.DECIMAL)
    assert comparator_valid(Comparator.GT, Datatype.DECIMAL)
    assert comparator_valid(Comparator.GT, Datatype.DATE)
    assert not comparator_valid(Comparator.GT, Datatype.STRING)
    assert comparator_valid(Comparator.WITHIN_DURATION, Datatype.DATE)
    assert not comparator_valid(Comparator.WITHIN_DURATION, Datatype.INTEGER)
    assert not comparator_valid(Comparator.IN_YEAR, Datatype.STRING)


@given(duration=durations)
def test_duration_json_round_trip(duration):
    assert value_from_json(value_to_json(duration)) == duration


@given(d=dates)
def test_date_serializes_to_iso(d):
    assert value_to_json(d) == d.isoformat()


@given(ref=dates, days=st.integers(min_value=0, max_value=5000))
def test_days_duration_is_exact(ref, days):
    assert subtract_duration(ref, Duration(days, "days")) == ref - timedelta(days=days)
