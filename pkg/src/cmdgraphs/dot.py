"""A small DOT reader and quoting helpers.

Covers the part of the Graphviz grammar this package writes and reads:
``[strict] digraph|graph [id] { ... }`` with node, edge, attribute and
assignment statements, edge chains, and ``subgraph`` blocks. Ports, HTML
strings and subgraphs used as edge endpoints raise :class:`DotSyntaxError`.

Quoted strings use escaped-backslash quoting: ``\\\\`` reads as one backslash,
``\\"`` as a double quote, and any other backslash is kept as written.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

__all__ = [
    "DotSyntaxError",
    "Token",
    "tokenize",
    "parse_dot",
    "DotGraph",
    "NodeStmt",
    "EdgeStmt",
    "AttrStmt",
    "Assignment",
    "Subgraph",
    "quote",
    "unquote",
]

KEYWORDS = frozenset({"strict", "graph", "digraph", "node", "edge", "subgraph"})


class DotSyntaxError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class Token:
    kind: str  # ID, STRING, KEYWORD, EDGEOP, or the punctuation character itself
    value: str
    line: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<newline>\n)
  | (?P<linecomment>//[^\n]*)
  | (?P<blockcomment>/\*.*?\*/)
  | (?P<string>"(?:\\.|[^"\\])*")
  | (?P<edgeop>->|--)
  | (?P<numeral>-?(?:\.[0-9]+|[0-9]+(?:\.[0-9]*)?))
  | (?P<id>[A-Za-z_\x80-\U0010ffff][A-Za-z_0-9\x80-\U0010ffff]*)
  | (?P<punct>[{}\[\]=;,:])
  | (?P<html><)
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(text: str) -> Iterator[Token]:
    line = 1
    pos = 0
    at_line_start = True
    while pos < len(text):
        if at_line_start and text.startswith("#", pos):
            # C preprocessor output line
            end = text.find("\n", pos)
            pos = len(text) if end < 0 else end
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text.startswith('"', pos):
                raise DotSyntaxError(line, "unterminated string")
            if text.startswith("/*", pos):
                raise DotSyntaxError(line, "unterminated comment")
            raise DotSyntaxError(line, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        pos = m.end()
        if kind == "newline":
            line += 1
            at_line_start = True
            continue
        if kind in ("ws",):
            continue
        at_line_start = False
        if kind in ("linecomment", "blockcomment"):
            line += value.count("\n")
            continue
        if kind == "html":
            raise DotSyntaxError(line, "HTML strings are not supported")
        if kind == "string":
            yield Token("STRING", unquote(value[1:-1]), line)
            line += value.count("\n")
        elif kind == "edgeop":
            yield Token("EDGEOP", value, line)
        elif kind == "numeral":
            yield Token("ID", value, line)
        elif kind == "id":
            if value.lower() in KEYWORDS:
                yield Token("KEYWORD", value.lower(), line)
            else:
                yield Token("ID", value, line)
        else:
            yield Token(value, value, line)


def unquote(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body) and body[i + 1] in '\\"':
            out.append(body[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass
class NodeStmt:
    id: str
    attrs: dict[str, str]
    line: int


@dataclass
class EdgeStmt:
    ids: list[str]
    attrs: dict[str, str]
    line: int


@dataclass
class AttrStmt:
    target: str  # "graph", "node" or "edge"
    attrs: dict[str, str]
    line: int


@dataclass
class Assignment:
    key: str
    value: str
    line: int


@dataclass
class Subgraph:
    name: str | None
    statements: list["Statement"]
    line: int


Statement = Union[NodeStmt, EdgeStmt, AttrStmt, Assignment, Subgraph]


@dataclass
class DotGraph:
    directed: bool
    strict: bool
    name: str | None
    statements: list[Statement] = field(default_factory=list)

    def walk(self) -> Iterator[Statement]:
        """All statements, descending into subgraphs (subgraph first, then its body)."""
        stack = [iter(self.statements)]
        while stack:
            for stmt in stack[-1]:
                yield stmt
                if isinstance(stmt, Subgraph):
                    stack.append(iter(stmt.statements))
                    break
            else:
                stack.pop()


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(tokenize(text))
        self.pos = 0
        self.last_line = self.tokens[-1].line if self.tokens else 1

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise DotSyntaxError(self.last_line, "unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value or kind
            raise DotSyntaxError(tok.line, f"expected {want!r}, found {tok.value!r}")
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (value is None or tok.value == value)

    def ident(self) -> Token:
        tok = self.next()
        if tok.kind not in ("ID", "STRING"):
            raise DotSyntaxError(tok.line, f"expected an identifier, found {tok.value!r}")
        return tok

    def graph(self) -> DotGraph:
        strict = False
        if self.at("KEYWORD", "strict"):
            self.next()
            strict = True
        tok = self.next()
        if tok.kind != "KEYWORD" or tok.value not in ("graph", "digraph"):
            raise DotSyntaxError(tok.line, "expected 'graph' or 'digraph'")
        directed = tok.value == "digraph"
        name = None
        if self.at("ID") or self.at("STRING"):
            name = self.next().value
        self.expect("{")
        g = DotGraph(directed, strict, name, self.stmt_list(directed))
        self.expect("}")
        if self.peek() is not None:
            raise DotSyntaxError(self.peek().line, "content after the closing brace")
        return g

    def stmt_list(self, directed: bool) -> list[Statement]:
        stmts: list[Statement] = []
        while not self.at("}"):
            if self.peek() is None:
                raise DotSyntaxError(self.last_line, "missing closing '}'")
            stmts.append(self.stmt(directed))
            if self.at(";"):
                self.next()
        return stmts

    def attr_list(self) -> dict[str, str]:
        attrs: dict[str, str] = {}
        while self.at("["):
            self.next()
            while not self.at("]"):
                key = self.ident()
                self.expect("=")
                attrs[key.value] = self.ident().value
                if self.at(",") or self.at(";"):
                    self.next()
            self.expect("]")
        return attrs

    def stmt(self, directed: bool) -> Statement:
        tok = self.peek()
        if tok.kind == "KEYWORD" and tok.value in ("graph", "node", "edge"):
            self.next()
            if not self.at("["):
                raise DotSyntaxError(tok.line, f"expected attribute list after {tok.value!r}")
            return AttrStmt(tok.value, self.attr_list(), tok.line)
        if (tok.kind == "KEYWORD" and tok.value == "subgraph") or tok.kind == "{":
            sub = self.subgraph(directed)
            if self.at("EDGEOP"):
                raise DotSyntaxError(tok.line, "subgraphs as edge endpoints are not supported")
            return sub
        if tok.kind == "KEYWORD":
            raise DotSyntaxError(tok.line, f"unexpected keyword {tok.value!r}")
        first = self.ident()
        if self.at("="):
            self.next()
            return Assignment(first.value, self.ident().value, first.line)
        if self.at(":"):
            raise DotSyntaxError(first.line, "ports are not supported")
        ids = [first.value]
        while self.at("EDGEOP"):
            op = self.next()
            if (op.value == "->") != directed:
                raise DotSyntaxError(op.line, f"edge operator {op.value!r} does not match graph type")
            if self.at("{") or self.at("KEYWORD", "subgraph"):
                raise DotSyntaxError(op.line, "subgraphs as edge endpoints are not supported")
            ids.append(self.ident().value)
            if self.at(":"):
                raise DotSyntaxError(op.line, "ports are not supported")
        attrs = self.attr_list()
        if len(ids) > 1:
            return EdgeStmt(ids, attrs, first.line)
        return NodeStmt(first.value, attrs, first.line)

    def subgraph(self, directed: bool) -> Subgraph:
        line = self.peek().line
        name = None
        if self.at("KEYWORD", "subgraph"):
            self.next()
            if self.at("ID") or self.at("STRING"):
                name = self.next().value
        self.expect("{")
        body = self.stmt_list(directed)
        self.expect("}")
        return Subgraph(name, body, line)


def parse_dot(text: str) -> DotGraph:
    """Parse one DOT graph. Raises DotSyntaxError with a line number on failure."""
    return _Parser(text).graph()
