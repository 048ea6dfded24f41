"""Milestone Graph: ordered regex milestones matched line by line.

A milestone is a conjunction of regular expressions. A command that satisfies
every expression of some milestone is a successful attempt at the
lowest-indexed such milestone. Otherwise, if the first input expression of a
milestone matches, the command is an unsuccessful attempt at the lowest-indexed
such milestone. Anything else is dropped from the graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import yaml

from cmdgraphs.log_ingest import CommandEvent, SessionTrace

__all__ = [
    "Milestone",
    "MilestoneSpec",
    "MilestoneSpecError",
    "Success",
    "Attempt",
    "NoMatch",
    "Classification",
    "AttemptNode",
    "MilestoneSummary",
    "MilestoneGraph",
    "classify_line",
    "build_milestone_graph",
    "load_milestone_spec",
    "parse_milestone_spec",
]


class MilestoneSpecError(ValueError):
    def __init__(self, message: str, milestone: Optional[str] = None, regex: Optional[str] = None):
        super().__init__(message)
        self.milestone = milestone
        self.regex = regex


@dataclass(frozen=True)
class Milestone:
    index: int
    name: str
    description: str
    input_regexes: tuple[str, ...]
    output_regexes: tuple[str, ...] = ()
    _compiled: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.input_regexes:
            raise MilestoneSpecError(f"milestone {self.name!r} has no input regexes", self.name)
        compiled = []
        for rx in (*self.input_regexes, *self.output_regexes):
            try:
                compiled.append(re.compile(rx))
            except re.error as exc:
                raise MilestoneSpecError(
                    f"milestone {self.name!r}: regex {rx!r} does not compile: {exc}", self.name, rx
                ) from None
        n = len(self.input_regexes)
        object.__setattr__(self, "_compiled", (tuple(compiled[:n]), tuple(compiled[n:])))

    def is_similar(self, event: CommandEvent) -> bool:
        return self._compiled[0][0].search(event.input_line) is not None

    def is_satisfied(self, event: CommandEvent) -> bool:
        inputs, outputs = self._compiled
        if not all(rx.search(event.input_line) for rx in inputs):
            return False
        if outputs and event.output_text is None:
            return False
        return all(rx.search(event.output_text) for rx in outputs)


@dataclass(frozen=True)
class MilestoneSpec:
    exercise_id: str
    milestones: tuple[Milestone, ...]

    def __post_init__(self):
        names = [m.name for m in self.milestones]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise MilestoneSpecError(f"duplicate milestone names: {', '.join(dupes)}", dupes[0])
        if [m.index for m in self.milestones] != list(range(len(self.milestones))):
            raise MilestoneSpecError("milestone indexes must be 0..K-1 in order")

    def __len__(self) -> int:
        return len(self.milestones)


def parse_milestone_spec(text: str) -> MilestoneSpec:
    """Read a milestone spec from YAML (or JSON, which YAML accepts).

    Expected keys: ``exercise`` and an ordered ``milestones`` list whose entries
    have ``name``, ``description``, ``input`` and optional ``output``.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MilestoneSpecError(f"not valid YAML/JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MilestoneSpecError("top level must be a mapping with 'exercise' and 'milestones'")
    exercise = doc.get("exercise")
    if not isinstance(exercise, str):
        raise MilestoneSpecError("'exercise' must be a string")
    entries = doc.get("milestones")
    if not isinstance(entries, list):
        raise MilestoneSpecError("'milestones' must be a list")

    milestones = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise MilestoneSpecError(f"milestone #{i} must be a mapping")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise MilestoneSpecError(f"milestone #{i} needs a non-empty 'name'")
        description = entry.get("description", "")
        if not isinstance(description, str):
            raise MilestoneSpecError(f"milestone {name!r}: 'description' must be a string", name)
        inputs = entry.get("input")
        outputs = entry.get("output", []) or []
        for key, value in (("input", inputs), ("output", outputs)):
            if not isinstance(value, list) or not all(isinstance(rx, str) for rx in value):
                raise MilestoneSpecError(f"milestone {name!r}: {key!r} must be a list of strings", name)
        milestones.append(Milestone(i, name, description, tuple(inputs), tuple(outputs)))
    return MilestoneSpec(exercise, tuple(milestones))


def load_milestone_spec(path: Union[str, Path]) -> MilestoneSpec:
    return parse_milestone_spec(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class Success:
    milestone: int


@dataclass(frozen=True)
class Attempt:
    milestone: int


@dataclass(frozen=True)
class NoMatch:
    pass


Classification = Union[Success, Attempt, NoMatch]


def classify_line(event: CommandEvent, spec: MilestoneSpec) -> Classification:
    for m in spec.milestones:
        if m.is_satisfied(event):
            return Success(m.index)
    for m in spec.milestones:
        if m.is_similar(event):
            return Attempt(m.index)
    return NoMatch()


@dataclass(frozen=True)
class AttemptNode:
    milestone_index: int
    entry: int
    command_text: str
    success: bool


@dataclass(frozen=True)
class MilestoneSummary:
    achieved: bool
    attempt_count: int


@dataclass(frozen=True)
class MilestoneGraph:
    student_id: str
    spec: MilestoneSpec
    attempts: tuple[AttemptNode, ...]
    summaries: tuple[MilestoneSummary, ...]
    total_events: int
    palette: str = "default"

    def attempts_for(self, index: int) -> list[AttemptNode]:
        return [a for a in self.attempts if a.milestone_index == index]


def build_milestone_graph(trace: SessionTrace, spec: MilestoneSpec, palette: str = "default") -> MilestoneGraph:
    """Classify each event in seq order. ENTRY numbers are seqs in the full trace."""
    attempts = []
    for event in sorted(trace.events, key=lambda ev: ev.seq):
        result = classify_line(event, spec)
        if isinstance(result, NoMatch):
            continue
        attempts.append(AttemptNode(result.milestone, event.seq, event.input_line, isinstance(result, Success)))
    summaries = []
    for m in spec.milestones:
        mine = [a for a in attempts if a.milestone_index == m.index]
        summaries.append(MilestoneSummary(any(a.success for a in mine), len(mine)))
    return MilestoneGraph(trace.student_id, spec, tuple(attempts), tuple(summaries), len(trace.events), palette)
