"""Event ingestion, trace construction and labeling.

Raw event rows become :class:`Event` records, events are grouped per case
into time-ordered :class:`Trace` objects, and a :class:`Labeler` turns a
trace into the plain sequence of labels every later stage works on.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

from .errors import SchemaError

logger = logging.getLogger(__name__)

DEFAULT_SEPARATOR = "‖"
REQUIRED_ROLES = ("event_id", "case_id", "activity", "timestamp", "diag_code")
DEFAULT_SCHEMA = MappingProxyType({role: role for role in REQUIRED_ROLES})

_NO_EXTRAS: Mapping[str, str] = MappingProxyType({})


@dataclass(frozen=True, slots=True)
class Event:
    """A single recorded event.

    ``diag_code`` is ``None`` when the row carries no diagnosis code; an
    empty string is never used as a stand-in.
    """

    event_id: str
    case_id: str
    activity: str
    timestamp: datetime
    diag_code: str | None = None
    extras: Mapping[str, str] = field(default=_NO_EXTRAS, compare=False)

    def __post_init__(self):
        if not self.activity:
            raise ValueError(f"event {self.event_id!r} has an empty activity")


@dataclass(frozen=True, slots=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]

    def __len__(self):
        return len(self.events)


@dataclass(frozen=True, slots=True)
class LabelSequence:
    case_id: str
    labels: tuple[str, ...]

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class Labeler:
    """Maps events to labels.

    ``mode`` is ``"activity+diag"`` (activity and diagnosis code joined by
    ``separator``) or ``"activity"``. Events without a diagnosis code are
    labeled by their activity alone in either mode.
    """

    mode: str = "activity+diag"
    separator: str = DEFAULT_SEPARATOR

    MODES = ("activity+diag", "activity")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise ValueError(f"unknown labeler mode {self.mode!r}; expected one of {self.MODES}")

    def __call__(self, event: Event) -> str:
        if self.mode == "activity" or event.diag_code is None:
            return event.activity
        return f"{event.activity}{self.separator}{event.diag_code}"


class EventLog:
    """Immutable collection of traces keyed by case id."""

    __slots__ = ("_traces", "labeler", "_alphabet")

    def __init__(self, traces: Mapping[str, Trace] | Iterable[Trace], labeler: Labeler | None = None):
        if isinstance(traces, Mapping):
            traces = traces.values()
        table: dict[str, Trace] = {}
        for trace in traces:
            if trace.case_id in table:
                raise ValueError(f"duplicate trace for case {trace.case_id!r}")
            table[trace.case_id] = trace
        self._traces = MappingProxyType(table)
        self.labeler = labeler if labeler is not None else Labeler()
        self._alphabet: frozenset[str] | None = None

    @property
    def traces(self) -> Mapping[str, Trace]:
        return self._traces

    @property
    def label_alphabet(self) -> frozenset[str]:
        if self._alphabet is None:
            lab = self.labeler
            self._alphabet = frozenset(lab(e) for t in self._traces.values() for e in t.events)
        return self._alphabet

    @property
    def n_events(self) -> int:
        return sum(len(t) for t in self._traces.values())

    def __len__(self):
        return len(self._traces)

    def __iter__(self):
        return iter(self._traces.values())

    def __contains__(self, case_id):
        return case_id in self._traces

    def __getitem__(self, case_id) -> Trace:
        return self._traces[case_id]

    def simplified(self, labeler: Labeler | None = None) -> list[LabelSequence]:
        """Label sequences of all traces, in case-id order."""
        labeler = labeler or self.labeler
        return [simplify(self._traces[c], labeler) for c in sorted(self._traces)]

    def __repr__(self):
        return f"EventLog({len(self)} traces, {self.n_events} events)"


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str

    def __str__(self):
        return f"line {self.line}: {self.reason}"


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 date or datetime; aware values are normalized to naive UTC."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts


def _open_text(source) -> tuple[io.TextIOBase, bool]:
    if isinstance(source, (str, Path)):
        return open(source, encoding="utf-8", newline=""), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"), newline=""), False
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def parse_event_csv(
    source,
    schema: Mapping[str, str] | None = None,
    delimiter: str = ",",
    errors: list[RowError] | None = None,
) -> list[Event]:
    """Read events from delimited UTF-8 text with a header row.

    Parameters
    ----------
    source : path, bytes, or binary/text stream
        The CSV input (RFC-4180 quoting).
    schema : mapping, optional
        Role name -> column name for the roles in ``REQUIRED_ROLES``.
        Defaults to columns named after the roles.
    delimiter : str
        Field delimiter.
    errors : list, optional
        Row-level problems are appended here as :class:`RowError`. Without a
        list they are logged as warnings. Bad rows never produce an event.

    Raises
    ------
    SchemaError
        If a required column is absent from the header.
    """
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    missing_roles = [r for r in REQUIRED_ROLES if r not in schema]
    if missing_roles:
        raise SchemaError(f"schema does not map roles: {', '.join(missing_roles)}")

    def report(line, reason):
        err = RowError(line, reason)
        if errors is None:
            logger.warning("skipping row: %s", err)
        else:
            errors.append(err)

    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream, delimiter=delimiter)
        header = next(reader, None)
        if header is None:
            raise SchemaError("input has no header row")
        header = [h.strip() for h in header]
        if header and header[0].startswith("﻿"):
            header[0] = header[0][1:]
        col = {name: i for i, name in enumerate(header)}
        absent = [schema[r] for r in REQUIRED_ROLES if schema[r] not in col]
        if absent:
            raise SchemaError(f"missing required column(s): {', '.join(absent)}")
        idx = {r: col[schema[r]] for r in REQUIRED_ROLES}
        mapped = set(idx.values())
        extra_cols = [(i, name) for i, name in enumerate(header) if i not in mapped]

        events: list[Event] = []
        seen_ids: set[str] = set()
        for row in reader:
            line = reader.line_num
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                report(line, f"expected {len(header)} fields, got {len(row)}")
                continue
            event_id = row[idx["event_id"]].strip()
            case_id = row[idx["case_id"]].strip()
            activity = row[idx["activity"]].strip()
            if not event_id or not case_id or not activity:
                report(line, "empty event_id, case_id or activity")
                continue
            if event_id in seen_ids:
                report(line, f"duplicate event_id {event_id!r}")
                continue
            try:
                ts = parse_timestamp(row[idx["timestamp"]])
            except ValueError:
                report(line, f"unparseable timestamp {row[idx['timestamp']]!r}")
                continue
            diag = row[idx["diag_code"]].strip() or None
            extras = {name: row[i] for i, name in extra_cols} if extra_cols else _NO_EXTRAS
            seen_ids.add(event_id)
            events.append(Event(event_id, case_id, activity, ts, diag, extras))
        return events
    finally:
        if owned:
            stream.close()
        elif isinstance(stream, io.TextIOWrapper) and not isinstance(source, io.TextIOBase):
            stream.detach()


def write_event_csv(log: EventLog | Iterable[Event], path, delimiter: str = ",") -> None:
    """Write events in the format :func:`parse_event_csv` reads (default schema)."""
    if isinstance(log, EventLog):
        events = (e for c in sorted(log.traces) for e in log[c].events)
    else:
        events = iter(log)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(REQUIRED_ROLES)
        for e in events:
            w.writerow((e.event_id, e.case_id, e.activity, e.timestamp.isoformat(), e.diag_code or ""))


def build_traces(events: Iterable[Event], labeler: Labeler | None = None) -> EventLog:
    """Group events by case and order each group by timestamp.

    Equal timestamps keep their input order.
    """
    groups: dict[str, list[Event]] = {}
    for e in events:
        groups.setdefault(e.case_id, []).append(e)
    traces = []
    for case_id, evs in groups.items():
        evs.sort(key=lambda e: e.timestamp)  # list.sort is stable
        traces.append(Trace(case_id, tuple(evs)))
    return EventLog(traces, labeler)


def simplify(trace: Trace, labeler: Labeler | None = None) -> LabelSequence:
    labeler = labeler or Labeler()
    return LabelSequence(trace.case_id, tuple(labeler(e) for e in trace.events))


def filter_log(log: EventLog, keep: Callable[[Event], bool]) -> EventLog:
    """Drop events failing ``keep``; traces left empty are removed."""
    traces = []
    for trace in log:
        evs = tuple(e for e in trace.events if keep(e))
        if evs:
            traces.append(Trace(trace.case_id, evs) if len(evs) != len(trace) else trace)
    return EventLog(traces, log.labeler)


def read_case_ids(path) -> list[str]:
    """Read a newline-delimited id list; blank lines and a leading JSON header are skipped."""
    ids = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line or (i == 0 and line.startswith("{")):
                continue
            ids.append(line)
    return ids
