import json
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmdgraphs.log_ingest import (
    CommandEvent,
    MalformedBlock,
    MalformedRecord,
    UnterminatedBlock,
    normalize,
    parse_history_log,
    parse_structured_log,
    parse_timestamp,
    serialize_history_log,
    serialize_structured_log,
)


def rec(**kw):
    return json.dumps(kw)


class TestStructured:
    def test_empty(self):
        assert parse_structured_log(b"") == ([], [])

    def test_single_record(self):
        events, issues = parse_structured_log(rec(student="s1", ts="2020-07-14T10:00:00Z", cmd="nmap 10.1.26.9").encode())
        assert issues == []
        assert events == [
            CommandEvent("s1", 1, "nmap 10.1.26.9", datetime(2020, 7, 14, 10, tzinfo=timezone.utc))
        ]

    def test_extras_ignored_and_optionals_kept(self):
        line = rec(student="s1", cmd="cat flag", host="attacker", output="flag{x}\n", extra=[1, 2])
        (ev,), issues = parse_structured_log(line)
        assert issues == []
        assert (ev.host, ev.output_text, ev.timestamp) == ("attacker", "flag{x}\n", None)

    def test_seq_per_student_in_file_order(self):
        data = "\n".join(
            [rec(student="a", cmd="ls"), rec(student="b", cmd="pwd"), rec(student="a", cmd="id")]
        )
        events, _ = parse_structured_log(data)
        assert [(e.student_id, e.seq) for e in events] == [("a", 1), ("b", 1), ("a", 2)]

    @pytest.mark.parametrize(
        "line, reason",
        [
            ("{not json", "JSON"),
            ("[1, 2]", "object"),
            (rec(cmd="ls"), "student"),
            (rec(student="s1"), "cmd"),
            (rec(student="s1", cmd="   "), "cmd"),
            (rec(student="s1", cmd="ls", ts="yesterday"), ""),
            (rec(student="s1", cmd="ls", host=5), "host"),
            (rec(student="s1", cmd="echo a\necho b"), "several lines"),
        ],
    )
    def test_bad_records_reported_and_skipped(self, line, reason):
        data = "\n".join([rec(student="s1", cmd="first"), line, rec(student="s1", cmd="last")])
        events, issues = parse_structured_log(data)
        assert [e.input_line for e in events] == ["first", "last"]
        assert len(issues) == 1
        assert isinstance(issues[0], MalformedRecord)
        assert issues[0].line_no == 2
        assert reason in issues[0].reason

    def test_line_continuation_joined(self):
        (ev,), _ = parse_structured_log(rec(student="s1", cmd="scp user@host:id_rsa \\\n  /tmp/key"))
        assert ev.input_line == "scp user@host:id_rsa   /tmp/key"

    def test_invalid_utf8_is_reported_not_fatal(self):
        events, issues = parse_structured_log(b'{"student": "s1", "cmd": "ls \xff"}\n')
        assert len(events) == 1
        assert issues and issues[0].line_no == 0


def test_timestamps_to_utc_milliseconds():
    assert parse_timestamp("2020-07-14T12:00:00.123456+02:00") == datetime(
        2020, 7, 14, 10, 0, 0, 123000, tzinfo=timezone.utc
    )
    assert parse_timestamp("2020-07-14T10:00:00") == datetime(2020, 7, 14, 10, tzinfo=timezone.utc)


HISTORY = """\
### student: s1
ENTRY 1: ls -a
ENTRY 2: cat .hidden
--- output
flag{x}
--- end
"""


class TestHistory:
    def test_empty(self):
        assert parse_history_log(b"") == ([], [])

    def test_two_entries_with_output(self):
        events, issues = parse_history_log(HISTORY.encode())
        assert issues == []
        assert events == [
            CommandEvent("s1", 1, "ls -a"),
            CommandEvent("s1", 2, "cat .hidden", output_text="flag{x}"),
        ]

    def test_multiline_output_and_blocks(self):
        text = (
            "### student: a\nENTRY 1: ls\n--- output\nx\n\ny\n--- end\n\n"
            "### student: b\nENTRY 1: whoami\n--- output\n--- end\n"
        )
        events, issues = parse_history_log(text)
        assert issues == []
        assert [(e.student_id, e.output_text) for e in events] == [("a", "x\n\ny"), ("b", "")]

    def test_continuation(self):
        events, _ = parse_history_log("### student: a\nENTRY 1: find / \\\n-name flag\nENTRY 2: ls\n")
        assert [e.input_line for e in events] == ["find / -name flag", "ls"]

    def test_orphan_output_block(self):
        text = "### student: a\n--- output\nstray\n--- end\nENTRY 1: ls\n"
        events, issues = parse_history_log(text)
        assert [e.input_line for e in events] == ["ls"]
        assert issues == [MalformedBlock(2, "output block without a preceding input line")]

    def test_second_output_block_is_orphan(self):
        text = "### student: a\nENTRY 1: ls\n--- output\nx\n--- end\n--- output\ny\n--- end\n"
        events, issues = parse_history_log(text)
        assert events[0].output_text == "x"
        assert [type(i) for i in issues] == [MalformedBlock]

    def test_unterminated_block(self):
        events, issues = parse_history_log("### student: a\nENTRY 1: cat big\n--- output\nline\n")
        assert [e.input_line for e in events] == ["cat big"]
        assert events[0].output_text is None
        assert issues == [UnterminatedBlock(3, "output block not closed before end of input")]

    def test_entry_before_header(self):
        events, issues = parse_history_log("ENTRY 1: ls\n")
        assert events == [] and issues[0].line_no == 1

    def test_unexpected_line(self):
        _, issues = parse_history_log("### student: a\nrandom noise\n")
        assert issues[0].line_no == 2


class TestNormalize:
    def test_empty(self):
        assert normalize([], "ex") == []

    def test_interleaved_students(self):
        names = [("s1", "a"), ("s2", "b"), ("s1", "c"), ("s2", "d"), ("s1", "e")]
        traces = normalize([CommandEvent(s, 0, c) for s, c in names], "ex")
        # hand-grouped oracle
        assert [(t.student_id, [(e.seq, e.input_line) for e in t.events]) for t in traces] == [
            ("s1", [(1, "a"), (2, "c"), (3, "e")]),
            ("s2", [(1, "b"), (2, "d")]),
        ]
        assert all(t.exercise_id == "ex" for t in traces)

    def test_sorted_by_timestamp_stable_on_ties(self):
        t = lambda m: datetime(2020, 1, 1, 0, m, tzinfo=timezone.utc)  # noqa: E731
        events = [
            CommandEvent("s", 0, "late", t(5)),
            CommandEvent("s", 0, "tie1", t(1)),
            CommandEvent("s", 0, "tie2", t(1)),
            CommandEvent("s", 0, "early", t(0)),
        ]
        (trace,) = normalize(events, "ex")
        assert [e.input_line for e in trace.events] == ["early", "tie1", "tie2", "late"]


@given(st.binary(max_size=400))
def test_parsers_are_total(data):
    for parse in (parse_structured_log, parse_history_log):
        events, issues = parse(data)
        for ev in events:
            assert ev.input_line.strip() == ev.input_line and ev.input_line
            assert "\n" not in ev.input_line


@given(st.text(alphabet="### studenENTRY:0123456789-outpend \\\nabc", max_size=300))
def test_history_parser_total_on_near_miss_text(text):
    events, _ = parse_history_log(text)
    assert all(ev.input_line for ev in events)


single_line = st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\n\r"), min_size=1).filter(
    lambda s: s.strip() == s and s
)
timestamps = st.datetimes(
    min_value=datetime(1990, 1, 1), max_value=datetime(2100, 1, 1), timezones=st.just(timezone.utc)
).map(lambda ts: ts.replace(microsecond=ts.microsecond // 1000 * 1000))
events_strategy = st.lists(
    st.builds(
        CommandEvent,
        student_id=st.sampled_from(["s1", "s2", "stü 3"]),
        seq=st.just(0),
        input_line=single_line,
        timestamp=st.none() | timestamps,
        output_text=st.none() | st.text(),
        host=st.none() | st.text(),
    ),
    max_size=20,
)


@settings(max_examples=200)
@given(events_strategy)
def test_structured_round_trip(events):
    parsed, issues = parse_structured_log(serialize_structured_log(events))
    assert issues == []
    assert [(e.student_id, e.input_line, e.timestamp, e.output_text, e.host) for e in parsed] == [
        (e.student_id, e.input_line, e.timestamp, e.output_text, e.host) for e in events
    ]
    again, _ = parse_structured_log(serialize_structured_log(parsed))
    assert again == parsed


history_output = st.lists(
    st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\n\r"), max_size=10).filter(
        lambda s: s not in ("--- end", "--- output")
    ),
    max_size=3,
).map("\n".join)


@settings(max_examples=200)
@given(
    st.lists(
        st.builds(
            CommandEvent,
            student_id=st.sampled_from(["s1", "s2"]),
            seq=st.just(0),
            input_line=single_line.filter(lambda s: not s.endswith("\\")),
            output_text=st.none() | history_output,
        ),
        max_size=15,
    )
)
def test_history_round_trip(events):
    parsed, issues = parse_history_log(serialize_history_log(events))
    assert issues == []
    by_student = {}
    for e in events:
        by_student.setdefault(e.student_id, []).append((e.input_line, e.output_text))
    got = {}
    for e in parsed:
        got.setdefault(e.student_id, []).append((e.input_line, e.output_text))
    assert got == by_student
