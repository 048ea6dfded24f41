"""DOT and JSON emission for Trainee and Milestone graphs.

All output is deterministic: the same graph always yields the same bytes.
Colors only ever appear in ``fillcolor`` (nodes) and ``color`` (edges)
attributes, so switching palettes never changes graph structure.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Optional

from cmdgraphs.dot import quote
from cmdgraphs.milestones import MilestoneGraph
from cmdgraphs.trainee import StateStatus, TraineeGraph

__all__ = [
    "Palette",
    "PALETTES",
    "get_palette",
    "emit_trainee_dot",
    "emit_milestone_dot",
    "StudentSummary",
    "MilestoneResult",
    "MismatchedStudent",
    "emit_summary",
]


@dataclass(frozen=True)
class Palette:
    id: str
    ok_color: str
    warn_color: str
    error_color: str
    neutral_color: str

    def __post_init__(self):
        if len({self.ok_color, self.warn_color, self.error_color}) != 3:
            raise ValueError(f"palette {self.id!r}: status colors must be pairwise distinct")


PALETTES = {
    "default": Palette("default", "green", "yellow", "red", "white"),
    # Okabe-Ito blue and orange; gray for errors, which are also drawn with a thick black border
    "colorblind": Palette("colorblind", "#0072B2", "#E69F00", "#999999", "white"),
}

# unvisited reference edges; deliberately outside the palette
_PLAIN_EDGE = "black"


def get_palette(palette: "Palette | str") -> Palette:
    if isinstance(palette, Palette):
        return palette
    try:
        return PALETTES[palette]
    except KeyError:
        raise ValueError(f"unknown palette {palette!r}; choose from {', '.join(PALETTES)}") from None


def _dot_label(*lines: str) -> str:
    # lines joined by the DOT "\n" escape
    return '"' + "\\n".join(quote(line)[1:-1] for line in lines) + '"'


def emit_trainee_dot(tg: TraineeGraph, palette: "Palette | str | None" = None, split: Optional[int] = None) -> str:
    """Render a TraineeGraph as a DOT digraph.

    With ``split`` set, visited states and red nodes are grouped, in order of
    first visit, into ``cluster`` subgraphs of at most ``split`` nodes each.
    """
    pal = get_palette(palette if palette is not None else tg.palette)
    if split is not None and split < 1:
        raise ValueError("split must be a positive integer")
    g = tg.base
    status_color = {
        StateStatus.UNVISITED: pal.neutral_color,
        StateStatus.REACHED_OK: pal.ok_color,
        StateStatus.REACHED_MISSING_PREREQ: pal.warn_color,
    }

    node_lines: dict[str, str] = {}
    first_visit: dict[str, int] = {}
    for s in g.states:
        extra = {"peripheries": "2"} if s.id == g.start_state else {}
        node_lines[s.id] = (
            f"{quote(s.id)} [label={_dot_label(s.label)}, shape=\"ellipse\", "
            f"fillcolor={quote(status_color[tg.state_status[s.id]])}"
            + "".join(f", {k}={quote(v)}" for k, v in extra.items())
            + "];"
        )
    for edge, traversals in tg.edge_annotations.items():
        if traversals:
            seq = traversals[0].seq
            first_visit[edge.target] = min(first_visit.get(edge.target, seq), seq)

    red_ids = {}
    for node in tg.extra_nodes:
        rid = f"red_{node.first_seq}"
        while rid in g:
            rid = "_" + rid
        red_ids[node] = rid
        text = node.text if node.count == 1 else f"{node.text} (×{node.count})"
        node_lines[rid] = (
            f"{quote(rid)} [label={_dot_label(text)}, shape=\"box\", "
            f"fillcolor={quote(pal.error_color)}, penwidth=\"2\"];"
        )
        first_visit[rid] = node.first_seq

    edge_lines = []
    for edge, traversals in tg.edge_annotations.items():
        if not traversals:
            label = _dot_label(edge.pattern)
            color = _PLAIN_EDGE
        else:
            seqs = ", ".join(f"#{t.seq}" for t in traversals)
            label = _dot_label(traversals[0].event.input_line, seqs)
            color = pal.ok_color if any(t.ok for t in traversals) else pal.warn_color
        edge_lines.append(f"{quote(edge.source)} -> {quote(edge.target)} [label={label}, color={quote(color)}];")
    for node in tg.extra_nodes:
        edge_lines.append(
            f"{quote(node.attach_point)} -> {quote(red_ids[node])} "
            f"[color={quote(pal.error_color)}, style=\"dashed\"];"
        )

    out = [f"digraph {quote('trainee ' + tg.student_id)} {{"]
    out.append('  node [style="filled", fontname="Helvetica"];')
    out.append('  edge [fontname="Helvetica", fontsize="10"];')
    if split is None:
        out.extend(f"  {line}" for line in node_lines.values())
    else:
        visited = sorted(first_visit, key=lambda nid: (first_visit[nid], nid))
        unvisited = [nid for nid in node_lines if nid not in first_visit]
        out.extend(f"  {node_lines[nid]}" for nid in unvisited)
        for k in range(0, len(visited), split):
            section = k // split + 1
            out.append(f"  subgraph {quote(f'cluster_{section}')} {{")
            out.append(f"    graph [label={quote(f'section {section}')}];")
            out.extend(f"    {node_lines[nid]}" for nid in visited[k : k + split])
            out.append("  }")
    out.extend(f"  {line}" for line in edge_lines)
    out.append("}")
    return "\n".join(out) + "\n"


def emit_milestone_dot(mg: MilestoneGraph, palette: "Palette | str | None" = None) -> str:
    """Render a MilestoneGraph.

    Template nodes are chained in author order; each template leads through its
    attempt nodes (ascending ENTRY) to a summary node.
    """
    pal = get_palette(palette if palette is not None else mg.palette)
    out = [f"digraph {quote('milestones ' + mg.student_id)} {{"]
    if not mg.spec.milestones:
        out.append("}")
        return "\n".join(out) + "\n"
    out.append('  node [style="filled", fontname="Helvetica"];')

    edges = []
    templates = []
    for m, summary in zip(mg.spec.milestones, mg.summaries):
        tid = f"m{m.index}"
        templates.append(tid)
        fill = pal.error_color if summary.attempt_count == 0 else pal.neutral_color
        title = f"{m.index + 1}. {m.name}"
        label = _dot_label(title, m.description) if m.description else _dot_label(title)
        out.append(f"  {quote(tid)} [label={label}, shape=\"box\", fillcolor={quote(fill)}];")
        prev = tid
        for a in sorted(mg.attempts_for(m.index), key=lambda a: a.entry):
            aid = f"{tid}_entry_{a.entry}"
            color = pal.ok_color if a.success else pal.warn_color
            out.append(
                f"  {quote(aid)} [label={_dot_label(f'ENTRY {a.entry}: {a.command_text}')}, "
                f"shape=\"ellipse\", fillcolor={quote(color)}];"
            )
            edges.append(f"  {quote(prev)} -> {quote(aid)};")
            prev = aid
        sid = f"{tid}_summary"
        verdict = "ACHIEVED" if summary.achieved else "NOT ACHIEVED"
        color = pal.ok_color if summary.achieved else pal.error_color
        out.append(
            f"  {quote(sid)} [label={_dot_label(f'{verdict} ({summary.attempt_count} attempts)')}, "
            f"shape=\"octagon\", fillcolor={quote(color)}];"
        )
        edges.append(f"  {quote(prev)} -> {quote(sid)};")
    for a, b in zip(templates, templates[1:]):
        edges.append(f"  {quote(a)} -> {quote(b)} [style=\"bold\"];")
    out.extend(edges)
    out.append("}")
    return "\n".join(out) + "\n"


class MismatchedStudent(ValueError):
    pass


@dataclass(frozen=True)
class MilestoneResult:
    name: str
    achieved: bool
    attempt_count: int


@dataclass(frozen=True)
class StudentSummary:
    student_id: str
    total_events: int
    green_events: Optional[int] = None
    yellow_events: Optional[int] = None
    red_events: Optional[int] = None
    red_commands: Optional[tuple[tuple[str, int], ...]] = None
    milestones: Optional[tuple[MilestoneResult, ...]] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "StudentSummary":
        doc = json.loads(text)
        red = doc.get("red_commands")
        ms = doc.get("milestones")
        return cls(
            student_id=doc["student_id"],
            total_events=doc["total_events"],
            green_events=doc.get("green_events"),
            yellow_events=doc.get("yellow_events"),
            red_events=doc.get("red_events"),
            red_commands=None if red is None else tuple((t, c) for t, c in red),
            milestones=None if ms is None else tuple(MilestoneResult(**m) for m in ms),
        )


def emit_summary(tg: Optional[TraineeGraph] = None, mg: Optional[MilestoneGraph] = None) -> StudentSummary:
    if tg is None and mg is None:
        raise ValueError("emit_summary needs a trainee graph, a milestone graph, or both")
    if tg is not None and mg is not None and tg.student_id != mg.student_id:
        raise MismatchedStudent(f"trainee graph is for {tg.student_id!r}, milestone graph for {mg.student_id!r}")
    student = tg.student_id if tg is not None else mg.student_id
    total = tg.total_events if tg is not None else mg.total_events
    fields: dict = {}
    if tg is not None:
        green, yellow, red = tg.counts()
        counts = Counter()
        for node in tg.extra_nodes:
            counts[node.text] += node.count
        fields.update(
            green_events=green,
            yellow_events=yellow,
            red_events=red,
            red_commands=tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))),
        )
    if mg is not None:
        fields["milestones"] = tuple(
            MilestoneResult(m.name, s.achieved, s.attempt_count) for m, s in zip(mg.spec.milestones, mg.summaries)
        )
    return StudentSummary(student, total, **fields)
