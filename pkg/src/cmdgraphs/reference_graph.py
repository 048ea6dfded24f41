"""Instructor-authored reference graphs.

A reference graph is a DOT digraph whose nodes are exercise subgoals and whose
edges carry a regular expression (Python ``re`` syntax) that a student command
must match to make that transition. Conventions::

    digraph locust {
        scan  [label="scanned the server", start="true"];
        shell [label="got a shell"];
        key   [label="copied the key", prereq="shell"];
        scan -> shell [pattern="^msfconsole\\\\b"];
        shell -> key  [pattern="^scp\\\\b.*id_rsa"];
    }

Every state must be declared by a node statement. ``start`` defaults to the
first declared node. Patterns match anywhere in the line unless anchored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from cmdgraphs.dot import (
    Assignment,
    AttrStmt,
    DotSyntaxError,
    EdgeStmt,
    NodeStmt,
    Subgraph,
    parse_dot,
    quote,
)

__all__ = [
    "State",
    "PatternEdge",
    "ReferenceGraph",
    "ReferenceGraphError",
    "DotSyntaxError",
    "MissingPattern",
    "UnknownState",
    "InvalidPattern",
    "Diagnostic",
    "parse_reference_dot",
    "emit_reference_dot",
    "validate",
]


class ReferenceGraphError(ValueError):
    pass


class MissingPattern(ReferenceGraphError):
    def __init__(self, edge: tuple[str, str], line: int):
        super().__init__(f"line {line}: edge {edge[0]} -> {edge[1]} has no 'pattern' attribute")
        self.edge = edge
        self.line = line


class UnknownState(ReferenceGraphError):
    def __init__(self, state_id: str, line: int):
        super().__init__(f"line {line}: reference to undeclared state {state_id!r}")
        self.state_id = state_id
        self.line = line


class InvalidPattern(ReferenceGraphError):
    def __init__(self, edge: tuple[str, str], pattern: str, error: re.error, line: int):
        super().__init__(f"line {line}: pattern {pattern!r} on {edge[0]} -> {edge[1]} does not compile: {error}")
        self.edge = edge
        self.pattern = pattern
        self.line = line


@dataclass(frozen=True)
class State:
    id: str
    label: str
    prerequisites: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PatternEdge:
    source: str
    target: str
    pattern: str
    declaration_index: int

    @cached_property
    def regex(self) -> re.Pattern:
        return re.compile(self.pattern)

    def matches(self, line: str) -> bool:
        return self.regex.search(line) is not None

    def __str__(self) -> str:
        return f"{self.source} -> {self.target} [{self.pattern}]"


@dataclass(frozen=True)
class ReferenceGraph:
    states: tuple[State, ...]
    edges: tuple[PatternEdge, ...]
    start_state: str
    name: str | None = None
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {s.id: s for s in self.states})

    def state(self, state_id: str) -> State:
        return self._by_id[state_id]

    def __contains__(self, state_id: str) -> bool:
        return state_id in self._by_id

    def in_edges(self, state_id: str) -> list[PatternEdge]:
        return [e for e in self.edges if e.target == state_id]


_VALID_START = {"true"}
_FALSE_START = {"false", ""}


def _split_ids(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def parse_reference_dot(text: str) -> ReferenceGraph:
    """Parse a reference graph written in the DOT conventions above.

    Raises DotSyntaxError, MissingPattern, UnknownState or InvalidPattern.
    """
    dot = parse_dot(text)
    if not dot.directed:
        raise DotSyntaxError(1, "reference graph must be a digraph")

    labels: dict[str, str] = {}
    prereqs: dict[str, tuple[list[str], int]] = {}
    starts: list[tuple[str, int]] = []
    node_lines: dict[str, int] = {}
    raw_edges: list[tuple[str, str, str | None, int]] = []

    for stmt in dot.statements:
        if isinstance(stmt, Subgraph):
            raise DotSyntaxError(stmt.line, "subgraphs are not allowed in reference graphs")
        if isinstance(stmt, (AttrStmt, Assignment)):
            # layout hints; no meaning for matching
            continue
        if isinstance(stmt, NodeStmt):
            sid = stmt.id
            if sid not in node_lines:
                node_lines[sid] = stmt.line
                labels[sid] = sid
            if "label" in stmt.attrs:
                labels[sid] = stmt.attrs["label"]
            if "prereq" in stmt.attrs:
                prereqs[sid] = (_split_ids(stmt.attrs["prereq"]), stmt.line)
            if "start" in stmt.attrs:
                flag = stmt.attrs["start"].strip().lower()
                if flag in _VALID_START:
                    starts.append((sid, stmt.line))
                elif flag not in _FALSE_START:
                    raise DotSyntaxError(stmt.line, f"start must be \"true\" or \"false\", got {flag!r}")
        elif isinstance(stmt, EdgeStmt):
            for src, dst in zip(stmt.ids, stmt.ids[1:]):
                raw_edges.append((src, dst, stmt.attrs.get("pattern"), stmt.line))

    if not node_lines:
        raise DotSyntaxError(1, "reference graph declares no states")
    if len({sid for sid, _ in starts}) > 1:
        raise DotSyntaxError(starts[1][1], "more than one node has start=\"true\"")

    for sid, (ids, line) in prereqs.items():
        for pid in ids:
            if pid not in node_lines:
                raise UnknownState(pid, line)

    edges = []
    for index, (src, dst, pattern, line) in enumerate(raw_edges):
        for sid in (src, dst):
            if sid not in node_lines:
                raise UnknownState(sid, line)
        if pattern is None:
            raise MissingPattern((src, dst), line)
        try:
            re.compile(pattern)
        except re.error as exc:
            raise InvalidPattern((src, dst), pattern, exc, line) from None
        edges.append(PatternEdge(src, dst, pattern, index))

    states = tuple(
        State(sid, labels[sid], frozenset(prereqs.get(sid, ([], 0))[0])) for sid in node_lines
    )
    start = starts[0][0] if starts else states[0].id
    return ReferenceGraph(states, tuple(edges), start, dot.name)


def emit_reference_dot(g: ReferenceGraph) -> str:
    """Canonical DOT text for a reference graph; parse_reference_dot inverts it."""
    lines = ["digraph {" if g.name is None else f"digraph {quote(g.name)} {{"]
    for s in g.states:
        attrs = [f"label={quote(s.label)}"]
        if s.prerequisites:
            attrs.append(f"prereq={quote(','.join(sorted(s.prerequisites)))}")
        if s.id == g.start_state:
            attrs.append('start="true"')
        lines.append(f"  {quote(s.id)} [{', '.join(attrs)}];")
    for e in g.edges:
        lines.append(f"  {quote(e.source)} -> {quote(e.target)} [pattern={quote(e.pattern)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str  # "error" or "warning"
    message: str
    subjects: tuple[str, ...] = ()

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        return f"{self.severity}: {self.code}: {self.message}"


def validate(g: ReferenceGraph) -> list[Diagnostic]:
    """Authoring checks. An empty list means the graph is clean.

    Errors: UnreachableState, PrerequisiteCycle. Warnings: DuplicateEdge,
    EmptyMatchWarning.
    """
    diagnostics: list[Diagnostic] = []

    transitions = nx.DiGraph()
    transitions.add_nodes_from(s.id for s in g.states)
    transitions.add_edges_from((e.source, e.target) for e in g.edges)
    reachable = nx.descendants(transitions, g.start_state) | {g.start_state}
    for s in g.states:
        if s.id not in reachable:
            diagnostics.append(
                Diagnostic(
                    "UnreachableState",
                    "error",
                    f"state {s.id!r} has no path of edges from start state {g.start_state!r}",
                    (s.id,),
                )
            )

    requires = nx.DiGraph()
    requires.add_nodes_from(s.id for s in g.states)
    requires.add_edges_from((s.id, p) for s in g.states for p in s.prerequisites)
    order = {s.id: i for i, s in enumerate(g.states)}
    cycles = []
    for component in nx.strongly_connected_components(requires):
        if len(component) > 1 or any(requires.has_edge(n, n) for n in component):
            cycles.append(tuple(sorted(component, key=order.__getitem__)))
    for members in sorted(cycles, key=lambda c: order[c[0]]):
        diagnostics.append(
            Diagnostic(
                "PrerequisiteCycle",
                "error",
                "prerequisites form a cycle among " + ", ".join(repr(m) for m in members),
                members,
            )
        )

    seen: dict[tuple[str, str, str], PatternEdge] = {}
    for e in g.edges:
        key = (e.source, e.target, e.pattern)
        if key in seen:
            diagnostics.append(
                Diagnostic(
                    "DuplicateEdge",
                    "warning",
                    f"edge {e} repeats declaration #{seen[key].declaration_index} and can never be chosen",
                    (e.source, e.target),
                )
            )
        else:
            seen[key] = e
        if e.matches(""):
            diagnostics.append(
                Diagnostic(
                    "EmptyMatchWarning",
                    "warning",
                    f"pattern {e.pattern!r} on {e.source} -> {e.target} matches the empty string, so it matches every command",
                    (e.source, e.target),
                )
            )
    return diagnostics
