import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cmdgraphs.milestones import parse_milestone_spec  # noqa: E402
from cmdgraphs.reference_graph import parse_reference_dot  # noqa: E402

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_log():
    """Record one pass/fail line per acceptance criterion; printed in the summary."""

    def record(criterion: str, ok, detail: str = "") -> None:
        # ok=None marks a criterion that could not run here
        tag = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"[{tag}] {criterion}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


MINIMAL_DOT = 'digraph g { a [start="true"]; b; a -> b [pattern="^nmap\\\\b"]; }'

# scan -> exploit -> key -> crack -> access; each later step needs the one before
LOCUST_DOT = r"""
digraph locust {
    start   [label="begin", start="true"];
    scan    [label="scanned the server"];
    exploit [label="exploited the service"];
    key     [label="copied the SSH key", prereq="exploit"];
    crack   [label="cracked the passphrase", prereq="key"];
    access  [label="logged into the target", prereq="crack"];
    start -> scan      [pattern="^nmap\\b"];
    scan -> exploit    [pattern="^msfconsole\\b"];
    exploit -> key     [pattern="^scp\\b.*id_rsa"];
    key -> crack       [pattern="^john\\b"];
    crack -> access    [pattern="^ssh\\b.*-i"];
}
"""

FILE_WRANGLER_YAML = r"""
exercise: file-wrangler
milestones:
  - name: hidden
    description: List hidden files
    input: ['^ls\b', '\s-\w*a']
  - name: copy
    description: Copy secret.txt to /tmp
    input: ['secret\.txt', '^cp\b', '/tmp']
  - name: identify
    description: Identify the file format
    input: ['^file\b', 'data\.bin']
"""


@pytest.fixture
def minimal_graph():
    return parse_reference_dot(MINIMAL_DOT)


@pytest.fixture
def locust_graph():
    return parse_reference_dot(LOCUST_DOT)


@pytest.fixture
def wrangler_spec():
    return parse_milestone_spec(FILE_WRANGLER_YAML)
