"""Parsers for student command logs.

Two input formats are supported:

* Structured Log: one JSON object per line with keys ``student``, ``cmd`` and
  optional ``ts``, ``host``, ``output``.
* History Log: plain text, ``### student: <id>`` headers, ``ENTRY <n>: <cmd>``
  lines and optional ``--- output`` / ``--- end`` blocks.

Both parsers are total: they return ``(events, issues)`` and never raise on
bad input.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from itertools import groupby
from typing import Iterable, Optional

__all__ = [
    "CommandEvent",
    "SessionTrace",
    "ParseIssue",
    "MalformedRecord",
    "MalformedBlock",
    "UnterminatedBlock",
    "parse_structured_log",
    "parse_history_log",
    "serialize_structured_log",
    "serialize_history_log",
    "normalize",
]


@dataclass(frozen=True)
class CommandEvent:
    student_id: str
    seq: int
    input_line: str
    timestamp: Optional[datetime] = None
    output_text: Optional[str] = None
    host: Optional[str] = None


@dataclass(frozen=True)
class SessionTrace:
    student_id: str
    exercise_id: str
    events: tuple[CommandEvent, ...]

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class ParseIssue:
    line_no: int
    reason: str

    def __str__(self) -> str:
        return f"{type(self).__name__} at line {self.line_no}: {self.reason}"


class MalformedRecord(ParseIssue):
    pass


class MalformedBlock(ParseIssue):
    pass


class UnterminatedBlock(ParseIssue):
    pass


_CONTINUATION = re.compile(r"\\\r?\n")


def _join_continuations(text: str) -> str:
    # bash semantics: backslash-newline disappears entirely
    return _CONTINUATION.sub("", text)


def _decode(data: bytes | str, issues: list[ParseIssue], issue_type) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        issues.append(issue_type(0, f"invalid UTF-8 at byte {exc.start}; undecodable bytes replaced"))
        return data.decode("utf-8", errors="replace")


def _lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 instant into an aware UTC datetime with millisecond precision.

    A missing offset is read as UTC. Raises ValueError on bad input.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    ts = ts.astimezone(timezone.utc)
    return ts.replace(microsecond=ts.microsecond // 1000 * 1000)


def format_timestamp(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc)
    return ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts.microsecond // 1000:03d}Z"


def _assign_seq(events: list[CommandEvent]) -> list[CommandEvent]:
    counters: dict[str, int] = {}
    out = []
    for ev in events:
        counters[ev.student_id] = counters.get(ev.student_id, 0) + 1
        out.append(replace(ev, seq=counters[ev.student_id]))
    return out


def _optional_str(record: dict, key: str) -> Optional[str]:
    value = record.get(key)
    if value is None or isinstance(value, str):
        return value
    raise ValueError(f"field {key!r} must be a string, got {type(value).__name__}")


def parse_structured_log(data: bytes | str) -> tuple[list[CommandEvent], list[ParseIssue]]:
    """Parse a Structured Log. Bad records are skipped and reported."""
    issues: list[ParseIssue] = []
    text = _decode(data, issues, MalformedRecord)
    events: list[CommandEvent] = []
    for line_no, line in enumerate(_lines(text), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except ValueError as exc:
            issues.append(MalformedRecord(line_no, f"not valid JSON: {exc.msg}"))
            continue
        if not isinstance(record, dict):
            issues.append(MalformedRecord(line_no, "record is not an object"))
            continue
        student = record.get("student")
        if not isinstance(student, str) or not student:
            issues.append(MalformedRecord(line_no, "missing or non-string 'student'"))
            continue
        cmd = record.get("cmd")
        if not isinstance(cmd, str) or not cmd.strip():
            issues.append(MalformedRecord(line_no, "missing or empty 'cmd'"))
            continue
        cmd = _join_continuations(cmd).strip()
        if "\n" in cmd or "\r" in cmd:
            issues.append(MalformedRecord(line_no, "'cmd' spans several lines without continuation"))
            continue
        timestamp = None
        try:
            raw_ts = _optional_str(record, "ts")
            if raw_ts is not None:
                timestamp = parse_timestamp(raw_ts)
            host = _optional_str(record, "host")
            output = _optional_str(record, "output")
        except ValueError as exc:
            issues.append(MalformedRecord(line_no, str(exc)))
            continue
        events.append(CommandEvent(student, 0, cmd, timestamp, output, host))
    return _assign_seq(events), issues


def serialize_structured_log(events: Iterable[CommandEvent]) -> bytes:
    lines = []
    for ev in events:
        record: dict = {"student": ev.student_id, "cmd": ev.input_line}
        if ev.timestamp is not None:
            record["ts"] = format_timestamp(ev.timestamp)
        if ev.host is not None:
            record["host"] = ev.host
        if ev.output_text is not None:
            record["output"] = ev.output_text
        lines.append(json.dumps(record, ensure_ascii=False) + "\n")
    return "".join(lines).encode("utf-8")


_STUDENT_HEADER = re.compile(r"^### student:\s*(\S.*?)\s*$")
_ENTRY = re.compile(r"^ENTRY (\d+): (.*)$")
_OUTPUT_START = "--- output"
_OUTPUT_END = "--- end"


def parse_history_log(data: bytes | str) -> tuple[list[CommandEvent], list[ParseIssue]]:
    """Parse a History Log.

    Output blocks attach to the immediately preceding ENTRY line. An ENTRY whose
    command ends in a backslash continues on the next line. The ``<n>`` in
    ``ENTRY <n>:`` is informational; order in the file decides ``seq``.
    """
    issues: list[ParseIssue] = []
    text = _decode(data, issues, MalformedBlock)
    events: list[CommandEvent] = []

    line_no = 0
    student: Optional[str] = None
    command: Optional[str] = None
    output: Optional[str] = None
    continuing = False
    in_output = False
    orphan_output = False
    output_lines: list[str] = []
    output_start = 0

    def flush() -> None:
        nonlocal command, output
        if command is not None and not command.strip():
            issues.append(MalformedBlock(line_no, "command empty after line continuation"))
        elif command is not None:
            events.append(CommandEvent(student, 0, command.strip(), None, output))
        command = output = None

    for line_no, line in enumerate(_lines(text), start=1):
        if in_output:
            if line == _OUTPUT_END:
                if not orphan_output:
                    output = "\n".join(output_lines)
                in_output = False
            else:
                output_lines.append(line)
            continue
        if continuing:
            command = command[:-1] + line
            continuing = command.endswith("\\")
            continue
        if line == _OUTPUT_START:
            orphan_output = command is None or output is not None
            if orphan_output:
                issues.append(MalformedBlock(line_no, "output block without a preceding input line"))
            in_output = True
            output_lines = []
            output_start = line_no
            continue
        header = _STUDENT_HEADER.match(line)
        if header:
            flush()
            student = header.group(1)
            continue
        entry = _ENTRY.match(line)
        if entry:
            flush()
            if student is None:
                issues.append(MalformedBlock(line_no, "ENTRY before any '### student:' header"))
            elif not entry.group(2).strip():
                issues.append(MalformedBlock(line_no, "empty command"))
            else:
                command = entry.group(2)
                continuing = command.endswith("\\")
            continue
        if line == _OUTPUT_END:
            issues.append(MalformedBlock(line_no, "'--- end' without an open output block"))
        elif line.strip():
            issues.append(MalformedBlock(line_no, f"unexpected line {line[:40]!r}"))

    if in_output:
        issues.append(UnterminatedBlock(output_start, "output block not closed before end of input"))
    flush()
    return _assign_seq(events), issues


def serialize_history_log(events: Iterable[CommandEvent]) -> bytes:
    """Write events in History Log form, one block per student in first-seen order."""
    by_student: dict[str, list[CommandEvent]] = {}
    for ev in events:
        by_student.setdefault(ev.student_id, []).append(ev)
    lines = []
    for student, evs in by_student.items():
        lines.append(f"### student: {student}")
        for n, ev in enumerate(evs, start=1):
            lines.append(f"ENTRY {n}: {ev.input_line}")
            if ev.output_text is not None:
                lines.append(_OUTPUT_START)
                lines.extend(ev.output_text.split("\n") if ev.output_text else [])
                lines.append(_OUTPUT_END)
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def _sort_key(ev: CommandEvent):
    # events without a timestamp sort after timestamped ones; order is stable otherwise
    return (ev.timestamp is None, ev.timestamp or datetime.min.replace(tzinfo=timezone.utc))


def normalize(events: Iterable[CommandEvent], exercise_id: str) -> list[SessionTrace]:
    """Group events into one trace per student, ordered by (timestamp, input order)."""
    indexed = sorted(enumerate(events), key=lambda p: (p[1].student_id, _sort_key(p[1]), p[0]))
    traces = []
    for student, group in groupby((ev for _, ev in indexed), key=lambda ev: ev.student_id):
        evs = tuple(replace(ev, seq=i) for i, ev in enumerate(group, start=1))
        traces.append(SessionTrace(student, exercise_id, evs))
    return traces
