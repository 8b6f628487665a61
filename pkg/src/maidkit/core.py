"""Immutable graph model for multi-agent influence diagrams.

A diagram is a DAG of chance, decision, and utility nodes. Decisions and
utilities belong to agents; chance and decision nodes carry finite value
domains. Numeric parameters (conditional probability tables for chance
nodes, payoff tables for utility nodes) are optional, so purely structural
algorithms can run on unparameterized graphs.

Graphs are values: every mutation helper returns a new ``Maid``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

PROB_TOL = 1e-9


class MaidError(ValueError):
    """Base class for all errors raised by this package."""


class UnknownNodeError(MaidError):
    pass


class UnknownAgentError(MaidError):
    pass


class EdgeNotFoundError(MaidError):
    pass


class NotADecisionError(MaidError):
    pass


class CyclicGraphError(MaidError):
    pass


class ValidationError(MaidError):
    """Raised by operations that require a graph passing :func:`validate`."""

    def __init__(self, diagnostics: Sequence["Diagnostic"]):
        self.diagnostics = list(diagnostics)
        head = "; ".join(str(d) for d in self.diagnostics[:3])
        more = "" if len(self.diagnostics) <= 3 else f" (+{len(self.diagnostics) - 3} more)"
        super().__init__(f"invalid graph: {head}{more}")


class NodeKind(enum.Enum):
    CHANCE = "chance"
    DECISION = "decision"
    UTILITY = "utility"


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding: the offending node (if any), a stable rule
    identifier, and a human-readable message."""

    node: str | None
    rule: str
    message: str

    def __str__(self) -> str:
        where = f"{self.node}: " if self.node else ""
        return f"{where}{self.message} [{self.rule}]"


def _flatten_params(values: Iterable) -> tuple[float, ...]:
    vals = list(values)
    if vals and isinstance(vals[0], (list, tuple)):
        vals = [v for row in vals for v in row]
    return tuple(float(v) for v in vals)


@dataclass(frozen=True)
class Node:
    """A single node. ``parents`` is an ordered tuple; parameter tables are
    stored flat in row-major order with the last parent varying fastest.

    ``synthetic_params`` marks tables produced by marginalization rather
    than supplied by the modeler; it is ignored by equality.
    """

    id: str
    kind: NodeKind
    owner: str | None = None
    domain: tuple[str, ...] | None = None
    parents: tuple[str, ...] = ()
    cpt: tuple[float, ...] | None = None
    table: tuple[float, ...] | None = None
    synthetic_params: bool = field(default=False, compare=False)

    @classmethod
    def chance(cls, node_id: str, domain: Sequence[str], parents: Sequence[str] = (),
               cpt: Iterable | None = None) -> "Node":
        return cls(id=node_id, kind=NodeKind.CHANCE, domain=tuple(domain),
                   parents=tuple(parents),
                   cpt=None if cpt is None else _flatten_params(cpt))

    @classmethod
    def decision(cls, node_id: str, owner: str, domain: Sequence[str],
                 parents: Sequence[str] = ()) -> "Node":
        return cls(id=node_id, kind=NodeKind.DECISION, owner=owner,
                   domain=tuple(domain), parents=tuple(parents))

    @classmethod
    def utility(cls, node_id: str, owner: str, parents: Sequence[str] = (),
                table: Iterable | None = None) -> "Node":
        return cls(id=node_id, kind=NodeKind.UTILITY, owner=owner,
                   parents=tuple(parents),
                   table=None if table is None else _flatten_params(table))

    @property
    def is_chance(self) -> bool:
        return self.kind is NodeKind.CHANCE

    @property
    def is_decision(self) -> bool:
        return self.kind is NodeKind.DECISION

    @property
    def is_utility(self) -> bool:
        return self.kind is NodeKind.UTILITY


@dataclass(frozen=True)
class Maid:
    """An influence diagram over a fixed set of agents.

    Derived indexes (children, topological order, descendant sets) are
    computed lazily and cached; they are safe to share because the value
    never mutates.
    """

    agents: frozenset[str]
    nodes: Mapping[str, Node]

    @classmethod
    def build(cls, agents: Iterable[str], nodes: Iterable[Node]) -> "Maid":
        table: dict[str, Node] = {}
        for node in nodes:
            if node.id in table:
                raise MaidError(f"duplicate node id: {node.id!r}")
            table[node.id] = node
        return cls(agents=frozenset(agents), nodes=table)

    def __repr__(self) -> str:
        return (f"Maid(agents={sorted(self.agents)}, nodes={len(self.nodes)}, "
                f"edges={len(self.edges)})")

    # -- lookups ---------------------------------------------------------

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node: {node_id!r}") from None

    def parents(self, node_id: str) -> tuple[str, ...]:
        return self.node(node_id).parents

    def children(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._children_map.get(node_id, ())

    def has_edge(self, tail: str, head: str) -> bool:
        return (tail, head) in self.edge_set

    def utilities_of(self, agent: str) -> tuple[str, ...]:
        if agent not in self.agents:
            raise UnknownAgentError(f"unknown agent: {agent!r}")
        return tuple(u for u in self.utilities if self.nodes[u].owner == agent)

    def decisions_of(self, agent: str) -> tuple[str, ...]:
        if agent not in self.agents:
            raise UnknownAgentError(f"unknown agent: {agent!r}")
        return tuple(d for d in self.decisions if self.nodes[d].owner == agent)

    # -- derived structure ----------------------------------------------

    @cached_property
    def _children_map(self) -> dict[str, tuple[str, ...]]:
        acc: dict[str, list[str]] = {}
        for node_id in self.nodes:
            for p in self.nodes[node_id].parents:
                if p in self.nodes:
                    acc.setdefault(p, []).append(node_id)
        return {k: tuple(sorted(v)) for k, v in acc.items()}

    @cached_property
    def edges(self) -> tuple[tuple[str, str], ...]:
        out = []
        for node_id in self.nodes:
            for p in self.nodes[node_id].parents:
                if p in self.nodes:
                    out.append((p, node_id))
        return tuple(sorted(out))

    @cached_property
    def edge_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.edges)

    @cached_property
    def decisions(self) -> tuple[str, ...]:
        return tuple(sorted(n for n, nd in self.nodes.items() if nd.is_decision))

    @cached_property
    def utilities(self) -> tuple[str, ...]:
        return tuple(sorted(n for n, nd in self.nodes.items() if nd.is_utility))

    @cached_property
    def chance_nodes(self) -> tuple[str, ...]:
        return tuple(sorted(n for n, nd in self.nodes.items() if nd.is_chance))

    def _topo_or_none(self) -> tuple[str, ...] | None:
        # Kahn's algorithm; ties broken lexicographically so the order is
        # reproducible. Unresolved parent references are skipped here and
        # reported by validate() instead.
        indeg = {n: 0 for n in self.nodes}
        for node_id, node in self.nodes.items():
            indeg[node_id] += sum(1 for p in node.parents if p in self.nodes)
        import heapq

        ready = [n for n, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order: list[str] = []
        while ready:
            n = heapq.heappop(ready)
            order.append(n)
            for c in self._children_map.get(n, ()):
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, c)
        if len(order) != len(self.nodes):
            return None
        return tuple(order)

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        order = self._topo_or_none()
        if order is None:
            raise CyclicGraphError("graph contains a directed cycle")
        return order

    @cached_property
    def _descendant_map(self) -> dict[str, frozenset[str]]:
        # Reflexive-transitive closure: x is always a descendant of itself.
        order = self._topo_or_none()
        acc: dict[str, frozenset[str]] = {}
        if order is not None:
            for n in reversed(order):
                closure = {n}
                for c in self._children_map.get(n, ()):
                    closure.update(acc[c])
                acc[n] = frozenset(closure)
            return acc
        # Cyclic or broken graphs: fall back to per-node search.
        for n in self.nodes:
            seen = {n}
            frontier = [n]
            while frontier:
                cur = frontier.pop()
                for c in self._children_map.get(cur, ()):
                    if c not in seen:
                        seen.add(c)
                        frontier.append(c)
            acc[n] = frozenset(seen)
        return acc

    @cached_property
    def _ancestor_map(self) -> dict[str, frozenset[str]]:
        acc: dict[str, set[str]] = {n: {n} for n in self.nodes}
        order = self._topo_or_none() or tuple(self.nodes)
        for n in order:
            for p in self.nodes[n].parents:
                if p in self.nodes:
                    acc[n].update(acc.get(p, {p}))
        return {k: frozenset(v) for k, v in acc.items()}

    # -- functional updates ----------------------------------------------

    def with_node(self, node: Node) -> "Maid":
        table = dict(self.nodes)
        table[node.id] = node
        return Maid(agents=self.agents, nodes=table)


EffectivenessMap = dict  # decision id -> bool


def all_effective(maid: Maid) -> dict[str, bool]:
    """Fresh effectiveness flags with every current decision set to True."""
    return {d: True for d in maid.decisions}


def descendants(maid: Maid, x: str) -> frozenset[str]:
    """All nodes reachable from ``x`` along directed edges, including ``x``."""
    maid.node(x)
    return maid._descendant_map[x]


def ancestors(maid: Maid, x: str) -> frozenset[str]:
    """All nodes from which ``x`` is reachable along directed edges,
    including ``x``."""
    maid.node(x)
    return maid._ancestor_map[x]


# -- parameter access -----------------------------------------------------


def parent_domains(maid: Maid, node_id: str) -> list[tuple[str, ...]]:
    out = []
    for p in maid.parents(node_id):
        dom = maid.node(p).domain
        if dom is None:
            raise MaidError(f"parent {p!r} of {node_id!r} has no domain")
        out.append(dom)
    return out


def parent_configs(maid: Maid, node_id: str) -> Iterator[tuple[str, ...]]:
    """All parent value combinations, last parent varying fastest."""
    return itertools.product(*parent_domains(maid, node_id))


def n_parent_configs(maid: Maid, node_id: str) -> int:
    return math.prod(len(d) for d in parent_domains(maid, node_id))


def _row_index(maid: Maid, node: Node, parent_values: Sequence[str]) -> int:
    if len(parent_values) != len(node.parents):
        raise MaidError(
            f"{node.id}: expected {len(node.parents)} parent values, got {len(parent_values)}")
    idx = 0
    for p, v in zip(node.parents, parent_values):
        dom = maid.node(p).domain
        if dom is None or v not in dom:
            raise MaidError(f"{node.id}: value {v!r} not in domain of parent {p!r}")
        idx = idx * len(dom) + dom.index(v)
    return idx


def chance_row(maid: Maid, node_id: str, parent_values: Sequence[str]) -> tuple[float, ...]:
    """The probability distribution of a chance node for one parent config."""
    node = maid.node(node_id)
    if not node.is_chance or node.cpt is None:
        raise MaidError(f"{node_id}: no probability table")
    k = len(node.domain)
    row = _row_index(maid, node, parent_values)
    return node.cpt[row * k:(row + 1) * k]


def utility_value(maid: Maid, node_id: str, parent_values: Sequence[str]) -> float:
    node = maid.node(node_id)
    if not node.is_utility or node.table is None:
        raise MaidError(f"{node_id}: no payoff table")
    return node.table[_row_index(maid, node, parent_values)]


def is_fully_parameterized(maid: Maid) -> bool:
    return all(maid.nodes[n].cpt is not None for n in maid.chance_nodes) and \
        all(maid.nodes[n].table is not None for n in maid.utilities)


def strip_parameters(maid: Maid) -> Maid:
    """Drop every probability and payoff table, keeping the structure."""
    table = {}
    for node_id, node in maid.nodes.items():
        if node.cpt is not None or node.table is not None:
            node = Node(id=node.id, kind=node.kind, owner=node.owner,
                        domain=node.domain, parents=node.parents)
        table[node_id] = node
    return Maid(agents=maid.agents, nodes=table)


# -- validation ------------------------------------------------------------


def validate(maid: Maid) -> list[Diagnostic]:
    """Check every structural invariant; an empty list means the graph is
    well formed. Diagnostics are ordered by node id, then rule."""
    out: list[Diagnostic] = []

    for node_id in sorted(maid.nodes):
        node = maid.nodes[node_id]
        if not node_id:
            out.append(Diagnostic(node_id, "node-id", "node id must be non-empty"))
        if node.id != node_id:
            out.append(Diagnostic(node_id, "node-id", f"node keyed as {node_id!r} reports id {node.id!r}"))

        needs_owner = node.kind in (NodeKind.DECISION, NodeKind.UTILITY)
        if needs_owner and node.owner is None:
            out.append(Diagnostic(node_id, "owner-required", f"{node.kind.value} node has no owning agent"))
        if not needs_owner and node.owner is not None:
            out.append(Diagnostic(node_id, "owner-forbidden", "chance node must not have an owner"))
        if node.owner is not None and node.owner not in maid.agents:
            out.append(Diagnostic(node_id, "owner-declared", f"owner {node.owner!r} is not a declared agent"))

        needs_domain = node.kind in (NodeKind.CHANCE, NodeKind.DECISION)
        if needs_domain:
            if node.domain is None or len(node.domain) < 2:
                out.append(Diagnostic(node_id, "domain-size", "domain must list at least two values"))
            elif len(set(node.domain)) != len(node.domain):
                out.append(Diagnostic(node_id, "domain-distinct", "domain values must be distinct"))
        elif node.domain is not None:
            out.append(Diagnostic(node_id, "domain-forbidden", "utility node must not declare a domain"))

        if len(set(node.parents)) != len(node.parents):
            out.append(Diagnostic(node_id, "parents-distinct", "parent list contains duplicates"))
        unresolved = [p for p in node.parents if p not in maid.nodes]
        for p in unresolved:
            out.append(Diagnostic(node_id, "parent-resolves", f"parent {p!r} is not a node"))
        for p in node.parents:
            if p in maid.nodes and maid.nodes[p].is_utility:
                out.append(Diagnostic(node_id, "utility-sink", f"utility node {p!r} is not a sink"))

        if node.is_decision and (node.cpt is not None or node.table is not None):
            out.append(Diagnostic(node_id, "params-kind", "decision node must not carry parameters"))
        if node.is_chance and node.table is not None:
            out.append(Diagnostic(node_id, "params-kind", "chance node must not carry a payoff table"))
        if node.is_utility and node.cpt is not None:
            out.append(Diagnostic(node_id, "params-kind", "utility node must not carry a probability table"))

        resolvable = not unresolved and all(
            maid.nodes[p].domain is not None for p in node.parents if p in maid.nodes)
        if node.cpt is not None and node.is_chance and node.domain and resolvable:
            k = len(node.domain)
            rows = math.prod(len(maid.nodes[p].domain) for p in node.parents)
            if len(node.cpt) != rows * k:
                out.append(Diagnostic(node_id, "cpt-arity",
                                      f"probability table has {len(node.cpt)} entries, expected {rows * k}"))
            else:
                for r in range(rows):
                    row = node.cpt[r * k:(r + 1) * k]
                    if any(v < 0 for v in row):
                        out.append(Diagnostic(node_id, "cpt-nonnegative",
                                              f"row {r} contains a negative probability"))
                    if abs(sum(row) - 1.0) > PROB_TOL:
                        out.append(Diagnostic(node_id, "cpt-normalized",
                                              f"row {r} does not normalize (sum {sum(row)!r})"))
        if node.table is not None and node.is_utility and resolvable:
            rows = math.prod(len(maid.nodes[p].domain) for p in node.parents)
            if len(node.table) != rows:
                out.append(Diagnostic(node_id, "table-arity",
                                      f"payoff table has {len(node.table)} entries, expected {rows}"))
            elif any(not math.isfinite(v) for v in node.table):
                out.append(Diagnostic(node_id, "table-finite", "payoffs must be finite reals"))

    if maid._topo_or_none() is None:
        cyclic = _cycle_members(maid)
        out.append(Diagnostic(None, "acyclic",
                              f"graph contains a directed cycle among {{{', '.join(cyclic)}}}"))
    return out


def _cycle_members(maid: Maid) -> list[str]:
    indeg = {n: sum(1 for p in maid.nodes[n].parents if p in maid.nodes) for n in maid.nodes}
    ready = [n for n, d in indeg.items() if d == 0]
    while ready:
        n = ready.pop()
        for c in maid._children_map.get(n, ()):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return sorted(n for n, d in indeg.items() if d > 0)


# -- structural edits ------------------------------------------------------


def convert_decision_to_chance(maid: Maid, decision_id: str) -> Maid:
    """Replace a decision with a parentless chance node that is uniform over
    the decision's domain. All information edges into the decision vanish;
    outgoing edges are untouched."""
    node = maid.node(decision_id)
    if not node.is_decision:
        raise NotADecisionError(f"{decision_id!r} is not a decision node")
    k = len(node.domain)
    uniform = tuple(1.0 / k for _ in range(k))
    return maid.with_node(Node(id=node.id, kind=NodeKind.CHANCE, domain=node.domain,
                               parents=(), cpt=uniform))


def remove_edge(maid: Maid, tail: str, head: str) -> Maid:
    """Delete the edge ``tail -> head``. If the head carries parameters, the
    removed axis is marginalized out by averaging over the tail's values and
    the resulting table is marked synthetic."""
    node = maid.node(head)
    maid.node(tail)
    if tail not in node.parents:
        raise EdgeNotFoundError(f"no edge {tail!r} -> {head!r}")
    removed_at = node.parents.index(tail)
    new_parents = node.parents[:removed_at] + node.parents[removed_at + 1:]

    cpt, table, synthetic = node.cpt, node.table, node.synthetic_params
    if cpt is not None or table is not None:
        sizes = []
        for p in node.parents:
            dom = maid.node(p).domain
            if dom is None:
                sizes = None
                break
            sizes.append(len(dom))
        if sizes is None:
            cpt = table = None  # cannot average without parent domains
        else:
            width = len(node.domain) if cpt is not None else 1
            flat = cpt if cpt is not None else table
            expected = math.prod(sizes) * width
            if len(flat) != expected:
                cpt = table = None  # malformed table: invalidate rather than guess
            else:
                merged = _marginalize(flat, sizes, removed_at, width)
                if node.cpt is not None:
                    cpt = merged
                else:
                    table = merged
        synthetic = True
    return maid.with_node(Node(id=node.id, kind=node.kind, owner=node.owner,
                               domain=node.domain, parents=new_parents,
                               cpt=cpt, table=table, synthetic_params=synthetic))


def _marginalize(flat: tuple[float, ...], sizes: list[int], axis: int,
                 width: int) -> tuple[float, ...]:
    # Row index arithmetic for row-major tables, last parent fastest.
    kept = sizes[:axis] + sizes[axis + 1:]
    strides = [0] * len(sizes)
    acc = 1
    for i in range(len(sizes) - 1, -1, -1):
        strides[i] = acc
        acc *= sizes[i]
    out: list[float] = []
    for cfg in itertools.product(*(range(s) for s in kept)):
        sums = [0.0] * width
        for v in range(sizes[axis]):
            full = list(cfg[:axis]) + [v] + list(cfg[axis:])
            row = sum(i * s for i, s in zip(full, strides))
            for j in range(width):
                sums[j] += flat[row * width + j]
        out.extend(s / sizes[axis] for s in sums)
    return tuple(out)
