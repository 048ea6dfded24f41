"""Command-line front end: ``cmdgraphs validate | generate | report``.

Exit codes: 0 success, 1 input error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from cmdgraphs.dot import DotSyntaxError
from cmdgraphs.log_ingest import normalize, parse_history_log, parse_structured_log
from cmdgraphs.milestones import MilestoneSpec, MilestoneSpecError, build_milestone_graph, parse_milestone_spec
from cmdgraphs.reference_graph import ReferenceGraph, ReferenceGraphError, parse_reference_dot, validate
from cmdgraphs.render import PALETTES, StudentSummary, emit_milestone_dot, emit_summary, emit_trainee_dot
from cmdgraphs.report import cmd_report
from cmdgraphs.trainee import build_trainee_graph

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVALID = 2

PARSERS = {"structured": parse_structured_log, "history": parse_history_log}
REPORT_NAME = "class_report.json"


@dataclass
class RunConfig:
    inputs: Sequence[Path] = ()
    format: str = "structured"
    refgraph: Optional[Path] = None
    milestones: Optional[Path] = None
    out: Path = Path("out")
    palette: str = "default"
    split: Optional[int] = None
    exercise: Optional[str] = None

    def __post_init__(self):
        if self.refgraph is None and self.milestones is None:
            raise ValueError("give --refgraph, --milestones, or both")
        if self.format not in PARSERS:
            raise ValueError(f"unknown format {self.format!r}")
        if self.palette not in PALETTES:
            raise ValueError(f"unknown palette {self.palette!r}")
        if self.split is not None and self.split < 1:
            raise ValueError("--split must be at least 1")


class _Abort(Exception):
    def __init__(self, status: int, messages: list[str]):
        self.status = status
        self.messages = messages


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _Abort(EXIT_INPUT, [f"{path}: cannot read: {exc}"]) from None


def _load_models(config: RunConfig) -> tuple[Optional[ReferenceGraph], Optional[MilestoneSpec], list[str]]:
    """Load and check the authoring inputs. Returns models plus non-fatal messages."""
    messages: list[str] = []
    errors: list[str] = []
    graph = spec = None
    if config.refgraph is not None:
        text = _read(config.refgraph)
        try:
            graph = parse_reference_dot(text)
        except (DotSyntaxError, ReferenceGraphError) as exc:
            errors.append(f"{config.refgraph}: {type(exc).__name__}: {exc}")
        else:
            for diag in validate(graph):
                (errors if diag.is_error else messages).append(f"{config.refgraph}: {diag}")
    if config.milestones is not None:
        text = _read(config.milestones)
        try:
            spec = parse_milestone_spec(text)
        except MilestoneSpecError as exc:
            errors.append(f"{config.milestones}: MilestoneSpecError: {exc}")
    if errors:
        raise _Abort(EXIT_INVALID, messages + errors)
    return graph, spec, messages


def cmd_validate(config: RunConfig) -> tuple[int, list[str]]:
    try:
        _, _, messages = _load_models(config)
    except _Abort as abort:
        return abort.status, abort.messages
    return EXIT_OK, messages


def _input_files(paths: Sequence[Path]) -> list[Path]:
    files = []
    for path in paths:
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.is_file() and not p.name.startswith(".")))
        elif path.is_file():
            files.append(path)
        else:
            raise _Abort(EXIT_INPUT, [f"{path}: no such file or directory"])
    return files


def safe_filename(student_id: str) -> str:
    name = re.sub(r"[^A-Za-z0-9._-]", "_", student_id).lstrip(".")
    return name or "_"


def cmd_generate(config: RunConfig) -> tuple[int, list[str]]:
    """Write per-student graphs and summaries plus the class report into ``config.out``."""
    try:
        graph, spec, messages = _load_models(config)
        files = _input_files(config.inputs)
    except _Abort as abort:
        return abort.status, abort.messages

    parse = PARSERS[config.format]
    events = []
    status = EXIT_OK
    for path in files:
        data = path.read_bytes()
        file_events, issues = parse(data)
        for issue in issues:
            messages.append(f"{path}: {issue}")
        if issues:
            status = EXIT_INPUT
        events.extend(file_events)

    exercise = config.exercise or (spec.exercise_id if spec is not None else "exercise")
    config.out.mkdir(parents=True, exist_ok=True)
    summaries = []
    used: set[str] = set()
    for trace in normalize(events, exercise):
        name = base = safe_filename(trace.student_id)
        n = 1
        while name in used:
            n += 1
            name = f"{base}_{n}"
        used.add(name)
        stem = config.out / name
        tg = mg = None
        if graph is not None:
            tg = build_trainee_graph(trace, graph, config.palette)
            _write(stem.with_name(stem.name + ".trainee.dot"), emit_trainee_dot(tg, split=config.split))
        if spec is not None:
            mg = build_milestone_graph(trace, spec, config.palette)
            _write(stem.with_name(stem.name + ".milestone.dot"), emit_milestone_dot(mg))
        summary = emit_summary(tg, mg)
        summaries.append(summary)
        _write(stem.with_name(stem.name + ".summary.json"), summary.to_json())
    _write(config.out / REPORT_NAME, cmd_report(summaries).to_json())
    return status, messages


def _write(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def _summary_files(paths: Sequence[Path]) -> list[Path]:
    files = []
    for path in paths:
        if path.is_dir():
            files.extend(sorted(path.glob("*.summary.json")))
        elif path.is_file():
            files.append(path)
        else:
            raise _Abort(EXIT_INPUT, [f"{path}: no such file or directory"])
    return files


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmdgraphs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def models(p):
        p.add_argument("--refgraph", type=Path, help="reference graph (.dot)")
        p.add_argument("--milestones", type=Path, help="milestone spec (YAML or JSON)")

    p_val = sub.add_parser("validate", help="check a reference graph and/or milestone spec")
    models(p_val)

    p_gen = sub.add_parser("generate", help="build graphs for every student in the input logs")
    p_gen.add_argument("inputs", nargs="*", type=Path, help="log files or directories of log files")
    p_gen.add_argument("--format", choices=sorted(PARSERS), default="structured")
    models(p_gen)
    p_gen.add_argument("--out", type=Path, default=Path("out"))
    p_gen.add_argument("--palette", choices=sorted(PALETTES), default="default")
    p_gen.add_argument("--split", type=int, help="max visited nodes per section in trainee graphs")
    p_gen.add_argument("--exercise", help="exercise id (defaults to the milestone spec's)")

    p_rep = sub.add_parser("report", help="aggregate *.summary.json files into a class report")
    p_rep.add_argument("summaries", nargs="+", type=Path, help="summary files or directories")
    p_rep.add_argument("--out", type=Path, help="write the report here instead of stdout")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "report":
        try:
            files = _summary_files(args.summaries)
            summaries = [StudentSummary.from_json(_read(f)) for f in files]
        except _Abort as abort:
            print("\n".join(abort.messages), file=sys.stderr)
            return abort.status
        except (ValueError, KeyError, TypeError) as exc:
            print(f"bad summary file: {exc}", file=sys.stderr)
            return EXIT_INPUT
        text = cmd_report(summaries).to_json()
        if args.out:
            _write(args.out, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    try:
        if args.command == "validate":
            config = RunConfig(refgraph=args.refgraph, milestones=args.milestones)
        else:
            config = RunConfig(
                inputs=args.inputs,
                format=args.format,
                refgraph=args.refgraph,
                milestones=args.milestones,
                out=args.out,
                palette=args.palette,
                split=args.split,
                exercise=args.exercise,
            )
    except ValueError as exc:
        print(f"cmdgraphs: {exc}", file=sys.stderr)
        return EXIT_INPUT

    run = cmd_validate if args.command == "validate" else cmd_generate
    status, messages = run(config)
    for msg in messages:
        print(msg, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
