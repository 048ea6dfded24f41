"""Trainee and Milestone graphs from student command-line logs."""

from cmdgraphs.log_ingest import (
    CommandEvent,
    SessionTrace,
    normalize,
    parse_history_log,
    parse_structured_log,
)
from cmdgraphs.milestones import (
    MilestoneSpec,
    build_milestone_graph,
    classify_line,
    load_milestone_spec,
    parse_milestone_spec,
)
from cmdgraphs.reference_graph import ReferenceGraph, parse_reference_dot, validate
from cmdgraphs.render import emit_milestone_dot, emit_summary, emit_trainee_dot, get_palette
from cmdgraphs.report import cmd_report
from cmdgraphs.trainee import build_trainee_graph, match_command

__version__ = "0.1.0"
