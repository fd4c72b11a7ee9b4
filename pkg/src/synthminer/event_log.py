"""Event logs: a multiset of activity sequences plus the log statistics used
by the discovery heuristics (occurrence and directly-follows counts, causal
strength, preceding/following sets)."""

from __future__ import annotations

import csv
import io
import os
import xml.etree.ElementTree as ET
from collections import Counter
from datetime import datetime
from fractions import Fraction
from functools import cached_property
from typing import IO, Iterable, Mapping, Union

Trace = tuple  # tuple of activity names

Source = Union[str, bytes, os.PathLike, IO]


class LogParseError(ValueError):
    """Raised when an XES or CSV source cannot be read into an event log."""


class EventLog:
    """Immutable multiset of traces.

    Traces are tuples of activity names; counts are positive integers.
    The empty trace is a legal key.
    """

    def __init__(self, variants: Mapping[Trace, int] | Iterable[Trace] = ()):
        counts: Counter = Counter()
        if isinstance(variants, Mapping):
            for trace, n in variants.items():
                if n < 0:
                    raise ValueError(f"negative count {n} for trace {trace!r}")
                if n:
                    counts[tuple(trace)] += n
        else:
            for trace in variants:
                counts[tuple(trace)] += 1
        self._variants = dict(sorted(counts.items()))

    @classmethod
    def from_traces(cls, traces: Iterable[Iterable[str]]) -> "EventLog":
        return cls([tuple(t) for t in traces])

    @property
    def variants(self) -> Mapping[Trace, int]:
        return dict(self._variants)

    def items(self):
        return self._variants.items()

    def __iter__(self):
        return iter(self._variants)

    def __len__(self):
        """Number of distinct variants."""
        return len(self._variants)

    def __getitem__(self, trace) -> int:
        return self._variants.get(tuple(trace), 0)

    def __eq__(self, other):
        if isinstance(other, EventLog):
            return self._variants == other._variants
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._variants.items()))

    def __repr__(self):
        body = ", ".join(f"<{','.join(t)}>^{n}" for t, n in self._variants.items())
        return f"EventLog([{body}])"

    @property
    def total(self) -> int:
        return sum(self._variants.values())

    @cached_property
    def activities(self) -> frozenset:
        return frozenset(a for t in self._variants for a in t)

    @cached_property
    def activity_counts(self) -> Counter:
        counts: Counter = Counter()
        for trace, n in self._variants.items():
            for a in trace:
                counts[a] += n
        return counts

    @cached_property
    def df_counts(self) -> Counter:
        counts: Counter = Counter()
        for trace, n in self._variants.items():
            for a, b in zip(trace, trace[1:]):
                counts[(a, b)] += n
        return counts


def project(log: EventLog, keep: Iterable[str]) -> EventLog:
    keep = frozenset(keep)
    out: Counter = Counter()
    for trace, n in log.items():
        out[tuple(a for a in trace if a in keep)] += n
    return EventLog(out)


def count_activity(a: str, log: EventLog) -> int:
    return log.activity_counts.get(a, 0)


def count_directly_follows(a: str, b: str, log: EventLog) -> int:
    return log.df_counts.get((a, b), 0)


def causality(a: str, b: str, log: EventLog) -> Fraction:
    ab = count_directly_follows(a, b, log)
    if a == b:
        return Fraction(ab, ab + 1)
    ba = count_directly_follows(b, a, log)
    return Fraction(ab - ba, ab + ba + 1)


def preceding_set(a: str, log: EventLog, c=Fraction(9, 10)) -> set:
    # the universe is restricted to activities of the log
    c = Fraction(c)
    return {b for b in log.activities if causality(b, a, log) >= c}


def following_set(a: str, log: EventLog, c=Fraction(9, 10)) -> set:
    c = Fraction(c)
    return {b for b in log.activities if causality(a, b, log) >= c}


def start_activities(log: EventLog) -> set:
    return {t[0] for t in log if t}


def end_activities(log: EventLog) -> set:
    return {t[-1] for t in log if t}


def filter_variant_coverage(log: EventLog, coverage=Fraction(95, 100)) -> EventLog:
    """Keep the most frequent variants until at least ``coverage`` of all
    cases is covered. Ties in frequency are broken by lexicographic trace
    order."""
    coverage = Fraction(coverage)
    if coverage >= 1 or log.total == 0:
        return log
    needed = coverage * log.total
    kept = {}
    covered = 0
    for trace, n in sorted(log.items(), key=lambda kv: (-kv[1], kv[0])):
        if covered >= needed:
            break
        kept[trace] = n
        covered += n
    return EventLog(kept)


# ---------------------------------------------------------------- parsing


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    data = source.read()
    return data.encode("utf-8") if isinstance(data, str) else data


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_xes(source: Source) -> EventLog:
    """Read the ``concept:name`` of every event, trace by trace.

    Events without a name are skipped. When an event carries
    ``lifecycle:transition``, only ``complete`` events are kept.
    """
    data = _read_bytes(source)
    if not data.strip():
        raise LogParseError("empty XES document")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogParseError(f"malformed XES at line {line}, column {col}: {exc}") from exc
    if _local(root.tag) != "log":
        raise LogParseError(f"expected <log> root element, got <{_local(root.tag)}>")

    traces = []
    for trace_el in root:
        if _local(trace_el.tag) != "trace":
            continue
        trace = []
        for event_el in trace_el:
            if _local(event_el.tag) != "event":
                continue
            name = lifecycle = None
            for attr in event_el:
                key = attr.get("key")
                if key == "concept:name":
                    name = attr.get("value")
                elif key == "lifecycle:transition":
                    lifecycle = attr.get("value")
            if not name:
                continue
            if lifecycle is not None and lifecycle.lower() != "complete":
                continue
            trace.append(name)
        traces.append(tuple(trace))
    return EventLog(traces)


def _order_keys(values, rows):
    try:
        return [float(v) for v in values]
    except ValueError:
        pass
    keys = []
    for v, row in zip(values, rows):
        try:
            keys.append(datetime.fromisoformat(v.strip().replace("Z", "+00:00")))
        except ValueError:
            raise LogParseError(f"row {row}: cannot parse order value {v!r}") from None
    if len({k.tzinfo is None for k in keys}) > 1:
        raise LogParseError("order column mixes timezone-aware and naive timestamps")
    return keys


def parse_csv(source: Source, case_column="case", activity_column="activity",
              order_column=None) -> EventLog:
    """Group rows by case id; order events within a case by ``order_column``
    (numeric if every value is numeric, otherwise ISO-8601) or by file order."""
    text = _read_bytes(source).decode("utf-8-sig")
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    for col in (case_column, activity_column, order_column):
        if col is not None and col not in header:
            raise LogParseError(f"missing column {col!r} (header: {', '.join(header)})")

    cases: dict = {}
    values, rows = [], []
    for rowno, row in enumerate(reader, start=2):
        case = row[case_column]
        cases.setdefault(case, []).append((len(values), row[activity_column]))
        values.append(row[order_column] if order_column else None)
        rows.append(rowno)

    if order_column is not None and values:
        keys = _order_keys(values, rows)
    else:
        keys = list(range(len(values)))

    traces = []
    for events in cases.values():
        events.sort(key=lambda e: (keys[e[0]], e[0]))
        traces.append(tuple(a for _, a in events))
    return EventLog(traces)


def write_csv(log: EventLog, target: IO[str]) -> None:
    """Serialize as ``case,activity,index`` rows, one case per trace copy."""
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(["case", "activity", "index"])
    case = 0
    for trace, n in log.items():
        for _ in range(n):
            case += 1
            for i, a in enumerate(trace, start=1):
                writer.writerow([case, a, i])
            # empty traces have no rows and cannot round-trip through CSV


def to_csv_string(log: EventLog) -> str:
    buf = io.StringIO()
    write_csv(log, buf)
    return buf.getvalue()


def read_log(path: str | os.PathLike, case_column="case", activity_column="activity",
             order_column=None) -> EventLog:
    path = os.fspath(path)
    if path.lower().endswith(".xes"):
        return parse_xes(path)
    if path.lower().endswith(".csv"):
        return parse_csv(path, case_column, activity_column, order_column)
    raise LogParseError(f"unsupported log format: {path} (expected .xes or .csv)")
