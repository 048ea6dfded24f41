"""Class-level aggregation of per-student summaries."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Iterable

from cmdgraphs.render import StudentSummary

__all__ = ["ClassReport", "MilestoneCompletion", "RedCommand", "cmd_report"]


@dataclass(frozen=True)
class MilestoneCompletion:
    name: str
    achieved: int
    students: int
    rate: float


@dataclass(frozen=True)
class RedCommand:
    command: str
    count: int


@dataclass(frozen=True)
class ClassReport:
    students: tuple[StudentSummary, ...]
    milestone_completion: tuple[MilestoneCompletion, ...]
    red_commands: tuple[RedCommand, ...]

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, ensure_ascii=False) + "\n"


def cmd_report(summaries: Iterable[StudentSummary]) -> ClassReport:
    """Aggregate summaries; students are listed by id.

    Completion rate is achieved-count over the number of students that have a
    milestone view. Red commands are ranked by count, then text.
    """
    students = tuple(sorted(summaries, key=lambda s: s.student_id))

    names: list[str] = []
    achieved: Counter = Counter()
    seen: Counter = Counter()
    for s in students:
        for m in s.milestones or ():
            if m.name not in seen:
                names.append(m.name)
            seen[m.name] += 1
            achieved[m.name] += m.achieved
    completion = tuple(
        MilestoneCompletion(name, achieved[name], seen[name], achieved[name] / seen[name]) for name in names
    )

    red: Counter = Counter()
    for s in students:
        for text, count in s.red_commands or ():
            red[text] += count
    ranking = tuple(RedCommand(t, c) for t, c in sorted(red.items(), key=lambda kv: (-kv[1], kv[0])))
    return ClassReport(students, completion, ranking)
