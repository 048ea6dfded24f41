"""Trainee Graph: a student's trace mapped onto a reference graph.

Each command is matched against every edge of the reference graph, not only
the edges leaving states the student has already reached. An edge whose target
has all prerequisites reached gives a green step; a match whose target still
misses prerequisites gives a yellow step; a command matching no edge becomes a
red node hanging off the state the student reached most recently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Union

from cmdgraphs.log_ingest import CommandEvent, SessionTrace
from cmdgraphs.reference_graph import PatternEdge, ReferenceGraph

__all__ = [
    "StateStatus",
    "MatchedOk",
    "MatchedMissingPrereq",
    "Unmatched",
    "MatchOutcome",
    "Traversal",
    "RedNode",
    "TraineeGraph",
    "match_command",
    "build_trainee_graph",
    "normalize_command",
]


class StateStatus(enum.Enum):
    UNVISITED = "unvisited"
    REACHED_OK = "reached_ok"
    REACHED_MISSING_PREREQ = "reached_missing_prereq"


@dataclass(frozen=True)
class MatchedOk:
    edge: PatternEdge
    event: CommandEvent


@dataclass(frozen=True)
class MatchedMissingPrereq:
    edge: PatternEdge
    event: CommandEvent
    missing: frozenset[str]


@dataclass(frozen=True)
class Unmatched:
    event: CommandEvent


MatchOutcome = Union[MatchedOk, MatchedMissingPrereq, Unmatched]


@dataclass(frozen=True)
class Traversal:
    """One event that fired an edge."""

    seq: int
    event: CommandEvent
    ok: bool


@dataclass(frozen=True)
class RedNode:
    text: str
    attach_point: str
    first_seq: int
    seqs: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.seqs)


@dataclass(frozen=True)
class TraineeGraph:
    student_id: str
    base: ReferenceGraph
    state_status: dict[str, StateStatus]
    edge_annotations: dict[PatternEdge, tuple[Traversal, ...]]
    extra_nodes: tuple[RedNode, ...]
    outcomes: tuple[MatchOutcome, ...]
    palette: str = "default"

    @property
    def total_events(self) -> int:
        return len(self.outcomes)

    def counts(self) -> tuple[int, int, int]:
        """(green, yellow, red) event counts."""
        green = sum(isinstance(o, MatchedOk) for o in self.outcomes)
        yellow = sum(isinstance(o, MatchedMissingPrereq) for o in self.outcomes)
        return green, yellow, len(self.outcomes) - green - yellow

    def reached(self) -> set[str]:
        return {self.base.start_state} | {
            sid for sid, st in self.state_status.items() if st is not StateStatus.UNVISITED
        }


def normalize_command(text: str) -> str:
    return " ".join(text.split())


def match_command(event: CommandEvent, g: ReferenceGraph, reached: Iterable[str]) -> MatchOutcome:
    """Classify one command against every edge of ``g``.

    Edges whose target has all prerequisites in ``reached`` win over the rest;
    among equals the lowest declaration index wins.
    """
    reached = reached if isinstance(reached, (set, frozenset)) else set(reached)
    first_blocked = None
    for edge in g.edges:
        if not edge.matches(event.input_line):
            continue
        missing = g.state(edge.target).prerequisites - reached
        if not missing:
            return MatchedOk(edge, event)
        if first_blocked is None:
            first_blocked = MatchedMissingPrereq(edge, event, frozenset(missing))
    if first_blocked is not None:
        return first_blocked
    return Unmatched(event)


def build_trainee_graph(trace: SessionTrace, g: ReferenceGraph, palette: str = "default") -> TraineeGraph:
    reached = {g.start_state}
    status = {s.id: StateStatus.UNVISITED for s in g.states}
    annotations: dict[PatternEdge, list[Traversal]] = {e: [] for e in g.edges}
    red: dict[tuple[str, str], list[int]] = {}
    attach = g.start_state
    outcomes = []

    for event in sorted(trace.events, key=lambda ev: ev.seq):
        outcome = match_command(event, g, reached)
        outcomes.append(outcome)
        if isinstance(outcome, Unmatched):
            red.setdefault((normalize_command(event.input_line), attach), []).append(event.seq)
            continue
        target = outcome.edge.target
        ok = isinstance(outcome, MatchedOk)
        annotations[outcome.edge].append(Traversal(event.seq, event, ok))
        if ok:
            status[target] = StateStatus.REACHED_OK
        elif status[target] is not StateStatus.REACHED_OK:
            status[target] = StateStatus.REACHED_MISSING_PREREQ
        # yellow progress still satisfies later prerequisites
        reached.add(target)
        attach = target

    extra = sorted(
        (RedNode(text, point, seqs[0], tuple(seqs)) for (text, point), seqs in red.items()),
        key=lambda n: n.first_seq,
    )
    return TraineeGraph(
        trace.student_id,
        g,
        status,
        {e: tuple(v) for e, v in annotations.items()},
        tuple(extra),
        tuple(outcomes),
        palette,
    )
