from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nets import L3_S, L_S
from synthminer.event_log import (
    EventLog,
    LogParseError,
    causality,
    count_activity,
    count_directly_follows,
    end_activities,
    filter_variant_coverage,
    following_set,
    parse_csv,
    parse_xes,
    preceding_set,
    project,
    read_log,
    start_activities,
    to_csv_string,
)

ACTS = "abcde"
traces = st.lists(st.sampled_from(ACTS), max_size=6).map(tuple)
logs = st.dictionaries(traces, st.integers(1, 5), max_size=6).map(EventLog)
subsets = st.frozensets(st.sampled_from(ACTS))


def test_running_example_totals():
    assert L_S.total == 100
    assert len(L_S) == 13


def test_projection_example():
    log = EventLog({tuple("aba"): 6, tuple("abc"): 6, tuple("bac"): 2})
    assert project(log, {"b", "c"}) == EventLog({("b",): 6, ("b", "c"): 8})


def test_projection_running_example():
    assert project(L_S, {"h", "g", "d"}) == L3_S


def test_projection_onto_nothing_keeps_empty_traces():
    assert project(L_S, set()) == EventLog({(): 100})


def test_counts():
    assert count_activity("d", L3_S) == 100
    assert count_activity("x", L3_S) == 0
    assert count_activity("a", EventLog({("a", "a"): 3})) == 6
    assert count_directly_follows("d", "g", L3_S) == 76
    assert count_directly_follows("g", "d", L3_S) == 24
    assert count_directly_follows("a", "a", EventLog([tuple("aaa")])) == 2


def test_causality_values():
    assert causality("d", "h", L3_S) == Fraction(24, 25)
    assert causality("d", "g", L3_S) == Fraction(52, 101)
    assert causality("a", "a", EventLog([("a", "a")])) == Fraction(1, 2)


def test_preceding_and_following_sets():
    assert preceding_set("d", L3_S, Fraction(9, 10)) == set()
    assert following_set("d", L3_S, Fraction(9, 10)) == {"h"}
    assert preceding_set("h", L3_S, Fraction(9, 10)) == {"d", "g"}
    assert following_set("h", L3_S, Fraction(9, 10)) == set()
    assert following_set("a", EventLog(), Fraction(9, 10)) == set()
    assert "b" in preceding_set("a", EventLog([("b", "a")]), 0)


def test_causality_threshold_is_exact():
    # 9 successions and none back give 9/10, exactly on the threshold
    log = EventLog({("x", "y"): 9})
    assert causality("x", "y", log) == Fraction(9, 10)
    assert following_set("x", log, Fraction(9, 10)) == {"y"}


def test_start_and_end_activities():
    assert start_activities(L3_S) == {"d", "g"}
    assert end_activities(L3_S) == {"h"}
    assert start_activities(EventLog({(): 1})) == set()
    assert start_activities(L_S) == {"a"}


def test_variant_coverage_filter():
    log = EventLog({("a",): 50, ("b",): 30, ("c",): 15, ("d",): 5})
    assert filter_variant_coverage(log, Fraction(95, 100)) == EventLog({("a",): 50, ("b",): 30, ("c",): 15})
    assert filter_variant_coverage(log, 1) == log
    # ties: lexicographic trace order decides which variant goes first
    tied = EventLog({("b",): 1, ("a",): 1})
    assert filter_variant_coverage(tied, Fraction(1, 2)) == EventLog({("a",): 1})


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        EventLog({("a",): -1})


XES = b"""<?xml version="1.0"?>
<log xmlns="http://www.xes-standard.org/">
  <trace><string key="concept:name" value="c1"/>
    <event><string key="concept:name" value="a"/></event>
    <event><string key="concept:name" value="b"/></event>
  </trace>
  <trace>
    <event><string key="concept:name" value="a"/><string key="lifecycle:transition" value="start"/></event>
    <event><string key="concept:name" value="a"/><string key="lifecycle:transition" value="COMPLETE"/></event>
    <event><string key="org:resource" value="nobody"/></event>
  </trace>
  <trace><event><string key="concept:name" value="a"/></event></trace>
</log>
"""


def test_parse_xes():
    assert parse_xes(XES) == EventLog({("a", "b"): 1, ("a",): 2})


def test_parse_xes_errors():
    with pytest.raises(LogParseError, match="empty"):
        parse_xes(b"   ")
    with pytest.raises(LogParseError, match="line 2"):
        parse_xes(b"<log>\n<trace></log>")


def test_parse_csv_file_order():
    text = b"case,activity\n1,a\n1,b\n2,a\n"
    assert parse_csv(text) == EventLog({("a", "b"): 1, ("a",): 1})


def test_parse_csv_ordered_by_timestamp():
    text = b"case,activity,time\n1,b,2024-01-01T10:00:00\n2,a,2024-01-01T09:00:00\n1,a,2024-01-01T09:30:00\n"
    assert parse_csv(text, order_column="time") == EventLog({("a", "b"): 1, ("a",): 1})


def test_parse_csv_numeric_order_is_not_lexicographic():
    text = b"case,activity,i\n1,b,10\n1,a,9\n"
    assert parse_csv(text, order_column="i") == EventLog({("a", "b"): 1})


def test_parse_csv_header_only():
    assert parse_csv(b"case,activity\n") == EventLog()


def test_parse_csv_errors():
    with pytest.raises(LogParseError, match="'activity'"):
        parse_csv(b"case,act\n1,a\n")
    with pytest.raises(LogParseError, match="row 3"):
        parse_csv(b"case,activity,t\n1,a,2024-01-01\n1,b,yesterday\n", order_column="t")


def test_read_log_by_extension(tmp_path):
    path = tmp_path / "log.csv"
    path.write_text(to_csv_string(L_S))
    assert read_log(path) == L_S
    xes = tmp_path / "log.xes"
    xes.write_bytes(XES)
    assert read_log(xes).total == 3
    with pytest.raises(LogParseError, match="unsupported"):
        read_log(tmp_path / "log.json")


@given(logs, subsets, subsets)
def test_projection_composes(log, x, y):
    assert project(project(log, x), y) == project(log, x & y)


@given(logs, subsets)
def test_projection_drops_exactly_the_filtered_events(log, keep):
    before = sum(n * len(t) for t, n in log.items())
    removed = sum(n * sum(a not in keep for a in t) for t, n in log.items())
    after = sum(n * len(t) for t, n in project(log, keep).items())
    assert after == before - removed
    assert project(log, keep).total == log.total


@given(logs, st.sampled_from(ACTS), st.sampled_from(ACTS))
def test_causality_range_and_antisymmetry(log, a, b):
    value = causality(a, b, log)
    assert -1 < value <= 1
    if a != b:
        assert value == -causality(b, a, log)
        assert count_directly_follows(a, b, log) <= count_activity(a, log)
        assert count_directly_follows(a, b, log) <= count_activity(b, log)


@settings(max_examples=50)
@given(logs)
def test_csv_round_trip(log):
    log = EventLog({t: n for t, n in log.items() if t})  # empty traces have no CSV rows
    assert parse_csv(to_csv_string(log).encode()) == log
