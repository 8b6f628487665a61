"""Plain-text graph format.

A maidfile is a sequence of agent declarations and node blocks:

    agent a;
    agent b;

    chance J {
      domain H M L;
      cpt 0.3333333333333333 0.3333333333333333 0.3333333333333333;
    }

    decision A {
      agent a;
      domain H M L;
      parents J;
    }

    utility U_A {
      agent a;
      parents B;
      table 10.0 5.0 2.0;
    }

Whitespace is free-form and `#` starts a comment running to end of line.
Nodes may reference agents and nodes declared later in the file. Parsing
checks syntax only (plus duplicate declarations, which have no sensible
meaning); everything else, unknown parents included, is left to
:func:`maidkit.core.validate` so a structurally broken file can still be
loaded and inspected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .core import Maid, MaidError, Node, NodeKind

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<lbrace>\{)
  | (?P<rbrace>\})
  | (?P<semi>;)
""", re.VERBOSE)

_KINDS = {"chance": NodeKind.CHANCE,
          "decision": NodeKind.DECISION,
          "utility": NodeKind.UTILITY}
_CLAUSES = ("agent", "domain", "parents", "cpt", "table")


class MaidParseError(MaidError):
    """Syntax error in a maidfile, with 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise MaidParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise MaidParseError(message, tok.line, tok.col)

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.text or "end of input"
            self.fail(f"expected {what}, found {shown!r}", tok)
        return self.advance()

    def parse_file(self) -> Maid:
        agents: list[str] = []
        nodes: list[Node] = []
        seen_nodes: dict[str, _Token] = {}
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind != "ident":
                shown = tok.text or "end of input"
                self.fail(f"expected a declaration, found {shown!r}", tok)
            if tok.text == "agent":
                self.advance()
                name = self.expect("ident", "an agent name")
                self.expect("semi", "';'")
                if name.text in agents:
                    self.fail(f"agent {name.text!r} declared twice", name)
                agents.append(name.text)
            elif tok.text in _KINDS:
                node, name_tok = self.parse_node(_KINDS[tok.text])
                if node.id in seen_nodes:
                    self.fail(f"node {node.id!r} declared twice", name_tok)
                seen_nodes[node.id] = name_tok
                nodes.append(node)
            else:
                self.fail(f"expected 'agent', 'chance', 'decision' or 'utility', "
                          f"found {tok.text!r}", tok)
        return Maid.build(agents=agents, nodes=nodes)

    def parse_node(self, kind: NodeKind) -> tuple[Node, _Token]:
        self.advance()
        name = self.expect("ident", "a node name")
        self.expect("lbrace", "'{'")
        owner: str | None = None
        domain: tuple[str, ...] | None = None
        parents: tuple[str, ...] = ()
        cpt: tuple[float, ...] | None = None
        table: tuple[float, ...] | None = None
        seen: set[str] = set()
        while self.peek().kind != "rbrace":
            clause = self.peek()
            if clause.kind != "ident" or clause.text not in _CLAUSES:
                shown = clause.text or "end of input"
                self.fail(f"expected a clause ({', '.join(_CLAUSES)}) or '}}', "
                          f"found {shown!r}", clause)
            if clause.text in seen:
                self.fail(f"clause {clause.text!r} given twice in {name.text!r}", clause)
            seen.add(clause.text)
            self.advance()
            if clause.text == "agent":
                owner = self.expect("ident", "an agent name").text
                self.expect("semi", "';'")
            elif clause.text == "domain":
                values = self.ident_list(minimum=1, what="a domain value")
                domain = values
            elif clause.text == "parents":
                parents = self.ident_list(minimum=0, what="a parent name")
            elif clause.text == "cpt":
                cpt = self.number_list("a probability")
            else:
                table = self.number_list("a payoff")
        self.expect("rbrace", "'}'")
        node = Node(id=name.text, kind=kind, owner=owner, domain=domain,
                    parents=parents, cpt=cpt, table=table)
        return node, name

    def ident_list(self, minimum: int, what: str) -> tuple[str, ...]:
        values: list[str] = []
        while self.peek().kind == "ident":
            values.append(self.advance().text)
        if len(values) < minimum:
            self.fail(f"expected {what}")
        self.expect("semi", "';'")
        return tuple(values)

    def number_list(self, what: str) -> tuple[float, ...]:
        values: list[float] = []
        while self.peek().kind == "number":
            values.append(float(self.advance().text))
        if not values:
            self.fail(f"expected {what}")
        self.expect("semi", "';'")
        return tuple(values)


def parse_maidfile(text: str) -> Maid:
    """Parse maidfile text into a graph. Raises :class:`MaidParseError` on
    bad syntax or duplicate declarations; semantic problems are reported by
    :func:`maidkit.core.validate` instead."""
    return _Parser(_tokenize(text)).parse_file()


def _format_number(v: float) -> str:
    return repr(float(v))


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _require_ident(value: str, what: str) -> str:
    if not _IDENT_RE.match(value):
        raise MaidError(f"{what} {value!r} cannot be written in this format "
                        f"(names must look like identifiers)")
    return value


def render_maidfile(maid: Maid) -> str:
    """Canonical text for a graph: agents sorted, nodes in dependency order,
    two-space indents. Parsing the output reproduces the graph exactly.

    Agents, node ids and domain values must lex as identifiers; anything
    else would not survive a round trip and is rejected up front."""
    lines: list[str] = []
    for agent in sorted(maid.agents):
        lines.append(f"agent {_require_ident(agent, 'agent')};")
    if maid.agents and maid.nodes:
        lines.append("")
    first = True
    for node_id in maid.topological_order:
        node = maid.nodes[node_id]
        if not first:
            lines.append("")
        first = False
        lines.append(f"{node.kind.value} {_require_ident(node.id, 'node')} {{")
        if node.owner is not None:
            lines.append(f"  agent {_require_ident(node.owner, 'agent')};")
        if node.domain is not None:
            values = " ".join(_require_ident(v, "domain value") for v in node.domain)
            lines.append(f"  domain {values};")
        if node.parents:
            lines.append(f"  parents {' '.join(node.parents)};")
        if node.cpt is not None:
            lines.append(f"  cpt {' '.join(_format_number(v) for v in node.cpt)};")
        if node.table is not None:
            lines.append(f"  table {' '.join(_format_number(v) for v in node.table)};")
        lines.append("}")
    return "\n".join(lines) + ("\n" if lines else "")
