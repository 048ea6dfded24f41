"""Random instance generators and brute-force oracles shared by the tests.

The oracles here deliberately avoid the package's matching code: they call
``re.search`` on raw pattern strings and apply the classification rules
literally, so a bug in the implementation cannot hide in both places.
"""

import random
import re

from cmdgraphs.log_ingest import CommandEvent, SessionTrace
from cmdgraphs.milestones import Milestone, MilestoneSpec
from cmdgraphs.reference_graph import PatternEdge, ReferenceGraph, State

COMMANDS = [
    "ls",
    "ls -a",
    "ls -la /home",
    "cat .hidden",
    "cat secret.txt",
    "cd secret.txt",
    "cp secret.txt /tmp/",
    "nmap 10.1.26.9",
    "nmap -sV 10.1.26.9",
    "ssh user@host",
    "ssh -i id_rsa user@10.1.26.9",
    "john --wordlist=rockyou.txt hash",
    "chmod 600 id_rsa",
    "file data.bin",
    "whoami",
    "man cp",
    "",  # replaced below; keeps index arithmetic simple
]
COMMANDS = [c for c in COMMANDS if c]

PATTERNS = [
    r"^ls\b",
    r"-a",
    r"^cat\b",
    r"secret\.txt",
    r"^cp\b",
    r"^cd\b",
    r"nmap",
    r"^nmap\b.*-sV",
    r"^ssh\b",
    r"-i\s+\S+",
    r"^john\b",
    r"chmod\s+600",
    r"^file\b",
    r"10\.1\.26\.9",
    r"rsa",
    r"^c",
    r"x{2}",
]

OUTPUTS = [None, "", "flag{x}", "Permission denied", "id_rsa\nflag{hidden}", "22/tcp open ssh"]


def random_graph(rng: random.Random, max_states: int = 8, max_edges: int = 14) -> ReferenceGraph:
    n = rng.randint(1, max_states)
    ids = [f"s{i}" for i in range(n)]
    states = []
    for sid in ids:
        others = [o for o in ids if o != sid]
        k = rng.randint(0, min(2, len(others)))
        states.append(State(sid, f"goal {sid}", frozenset(rng.sample(others, k))))
    edges = [
        PatternEdge(rng.choice(ids), rng.choice(ids), rng.choice(PATTERNS), i)
        for i in range(rng.randint(0, max_edges))
    ]
    return ReferenceGraph(tuple(states), tuple(edges), rng.choice(ids))


def random_trace(rng: random.Random, max_len: int = 30, student: str = "s1", outputs: bool = False) -> SessionTrace:
    events = tuple(
        CommandEvent(student, i, rng.choice(COMMANDS), output_text=rng.choice(OUTPUTS) if outputs else None)
        for i in range(1, rng.randint(0, max_len) + 1)
    )
    return SessionTrace(student, "ex", events)


def random_spec(rng: random.Random, max_milestones: int = 6) -> MilestoneSpec:
    milestones = []
    for i in range(rng.randint(0, max_milestones)):
        inputs = tuple(rng.sample(PATTERNS, rng.randint(1, 3)))
        outputs = tuple(rng.sample([r"flag\{", r"denied", r"ssh"], rng.choice([0, 0, 1])))
        milestones.append(Milestone(i, f"m{i}", f"task {i}", inputs, outputs))
    return MilestoneSpec("ex", tuple(milestones))


def oracle_trainee(trace: SessionTrace, g: ReferenceGraph) -> list[tuple]:
    """Per-event classification by enumeration.

    Returns ("ok", decl_index), ("missing", decl_index, missing_ids) or ("red",).
    """
    prereq = {s.id: set(s.prerequisites) for s in g.states}
    reached = {g.start_state}
    result = []
    for ev in trace.events:
        candidates = [e for e in g.edges if re.search(e.pattern, ev.input_line)]
        satisfied = [e for e in candidates if prereq[e.target] <= reached]
        if satisfied:
            best = min(satisfied, key=lambda e: e.declaration_index)
            result.append(("ok", best.declaration_index))
            reached.add(best.target)
        elif candidates:
            best = min(candidates, key=lambda e: e.declaration_index)
            result.append(("missing", best.declaration_index, frozenset(prereq[best.target] - reached)))
            reached.add(best.target)
        else:
            result.append(("red",))
    return result


def oracle_classify(event: CommandEvent, spec: MilestoneSpec) -> tuple:
    """("success", i), ("attempt", i) or ("none",) by direct enumeration."""

    def full(m):
        if not all(re.search(rx, event.input_line) for rx in m.input_regexes):
            return False
        if not m.output_regexes:
            return True
        return event.output_text is not None and all(re.search(rx, event.output_text) for rx in m.output_regexes)

    wins = [m.index for m in spec.milestones if full(m)]
    if wins:
        return ("success", min(wins))
    similar = [m.index for m in spec.milestones if re.search(m.input_regexes[0], event.input_line)]
    if similar:
        return ("attempt", min(similar))
    return ("none",)


def oracle_milestones(trace: SessionTrace, spec: MilestoneSpec):
    """Map each line independently, then group by milestone.

    Returns (per_event_labels, {index: [(entry, success)]}, [(achieved, count)]).
    """
    labels = [oracle_classify(ev, spec) for ev in trace.events]
    groups = {m.index: [] for m in spec.milestones}
    for ev, label in zip(trace.events, labels):
        if label[0] != "none":
            groups[label[1]].append((ev.seq, label[0] == "success"))
    summaries = [(any(ok for _, ok in groups[i]), len(groups[i])) for i in sorted(groups)]
    return labels, groups, summaries
