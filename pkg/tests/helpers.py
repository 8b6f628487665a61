"""Shared test machinery.

Random graph generators sized for the property suites, an independent
d-separation oracle built on exhaustive simple-trail enumeration, small
hand-built games, and samplers for strategy profiles. The oracle works on
raw edge lists so it shares no graph code with the package.
"""
from __future__ import annotations

import itertools
import math
import random

from maidkit import Maid, Node, validate
from maidkit.semantics import DecisionRule, rule_from_rows

AGENTS = ("p0", "p1", "p2", "p3")
_DOMAIN_VALUES = ("v0", "v1", "v2")


def _random_row(k: int, rng: random.Random) -> tuple[float, ...]:
    raw = [rng.random() + 0.05 for _ in range(k)]
    total = sum(raw)
    return tuple(v / total for v in raw)


def random_structure_maid(rng: random.Random, max_nodes: int = 12,
                          max_decisions: int = 5) -> Maid:
    """A valid structure-only game: random DAG core of chance and decision
    nodes, utilities attached as sinks."""
    total = rng.randint(4, max_nodes)
    n_utilities = rng.randint(1, min(3, total - 2))
    n_core = total - n_utilities
    n_decisions = rng.randint(1, min(max_decisions, n_core))
    n_agents = rng.randint(1, 3)
    agents = list(AGENTS[:n_agents])

    core_ids = [f"n{i}" for i in range(n_core)]
    decision_positions = set(rng.sample(range(n_core), n_decisions))
    nodes: list[Node] = []
    for i, node_id in enumerate(core_ids):
        k = rng.randint(2, 3)
        domain = _DOMAIN_VALUES[:k]
        candidates = core_ids[:i]
        n_parents = min(len(candidates), rng.randint(0, 3))
        parents = tuple(sorted(rng.sample(candidates, n_parents)))
        if i in decision_positions:
            nodes.append(Node.decision(node_id, owner=rng.choice(agents),
                                       domain=domain, parents=parents))
        else:
            nodes.append(Node.chance(node_id, domain=domain, parents=parents))
    for j in range(n_utilities):
        n_parents = min(len(core_ids), rng.randint(0, 3))
        parents = tuple(sorted(rng.sample(core_ids, n_parents)))
        nodes.append(Node.utility(f"u{j}", owner=rng.choice(agents),
                                  parents=parents))
    maid = Maid.build(agents=agents, nodes=nodes)
    assert validate(maid) == []
    return maid


def random_parameterized_maid(rng: random.Random, max_nodes: int = 8,
                              max_domain: int = 3) -> Maid:
    """A valid fully parameterized game small enough for exhaustive best
    responses and equilibrium search.

    Each decision belongs to its own agent and the joint pure-profile space
    is trimmed (by dropping decision parents) below 10^5, so nothing in the
    numeric layer can hit a scale guard.
    """
    total = rng.randint(4, max_nodes)
    n_utilities = rng.randint(1, min(3, total - 2))
    n_core = total - n_utilities
    n_decisions = rng.randint(1, min(3, max(1, n_core - 1)))

    core_ids = [f"n{i}" for i in range(n_core)]
    decision_positions = sorted(rng.sample(range(n_core), n_decisions))
    owner_of = {f"n{pos}": AGENTS[j] for j, pos in enumerate(decision_positions)}
    agents = [AGENTS[j] for j in range(n_decisions)]

    domains: dict[str, tuple[str, ...]] = {}
    parent_lists: dict[str, list[str]] = {}
    for i, node_id in enumerate(core_ids):
        k = rng.randint(2, max_domain)
        domains[node_id] = _DOMAIN_VALUES[:k]
        candidates = core_ids[:i]
        n_parents = min(len(candidates), rng.randint(0, 2))
        parent_lists[node_id] = sorted(rng.sample(candidates, n_parents))

    def config_count(d: str) -> int:
        return math.prod(len(domains[p]) for p in parent_lists[d])

    def profile_space() -> int:
        return math.prod(len(domains[d]) ** config_count(d)
                         for d in owner_of)

    while profile_space() > 100_000:
        widest = max((d for d in owner_of if parent_lists[d]),
                     key=lambda d: (config_count(d), d))
        parent_lists[widest].pop()

    # occasionally decouple one agent's payoffs from everything their
    # decision can influence, so eliminations actually occur
    blocked_parents: dict[str, set[str]] = {}
    if owner_of and rng.random() < 0.4:
        victim = rng.choice(sorted(owner_of))
        reach = {victim}
        changed = True
        while changed:
            changed = False
            for node_id in core_ids:
                if node_id not in reach and any(p in reach for p in parent_lists[node_id]):
                    reach.add(node_id)
                    changed = True
        blocked_parents[owner_of[victim]] = reach

    nodes: list[Node] = []
    for node_id in core_ids:
        parents = tuple(parent_lists[node_id])
        if node_id in owner_of:
            nodes.append(Node.decision(node_id, owner=owner_of[node_id],
                                       domain=domains[node_id], parents=parents))
        else:
            k = len(domains[node_id])
            n_rows = math.prod(len(domains[p]) for p in parents)
            cpt = tuple(v for _ in range(n_rows) for v in _random_row(k, rng))
            nodes.append(Node.chance(node_id, domain=domains[node_id],
                                     parents=parents, cpt=cpt))
    for j in range(n_utilities):
        owner = agents[j % len(agents)]
        pool = [c for c in core_ids if c not in blocked_parents.get(owner, set())]
        n_parents = min(len(pool), rng.randint(1, 3))
        parents = tuple(sorted(rng.sample(pool, n_parents))) if pool else ()
        n_rows = math.prod(len(domains[p]) for p in parents)
        table = tuple(rng.uniform(-5.0, 10.0) for _ in range(n_rows))
        nodes.append(Node.utility(f"u{j}", owner=owner, parents=parents,
                                  table=table))
    maid = Maid.build(agents=agents, nodes=nodes)
    assert validate(maid) == []
    return maid


def random_dag_maid(rng: random.Random, max_nodes: int = 10) -> Maid:
    """A bare DAG of chance nodes for independence testing."""
    total = rng.randint(4, max_nodes)
    ids = [f"x{i}" for i in range(total)]
    nodes = []
    for i, node_id in enumerate(ids):
        parents = tuple(p for p in ids[:i] if rng.random() < 0.3)
        nodes.append(Node.chance(node_id, domain=("f", "t"), parents=parents))
    return Maid.build(agents=[], nodes=nodes)


class DSepOracle:
    """Brute-force d-separation on a raw edge list.

    Enumerates every simple trail between two nodes once, recording the
    interior non-colliders and, per collider, the collider's reflexive
    descendant set. A trail is active given W iff no non-collider is in W
    and every collider's descendant set meets W.
    """

    def __init__(self, node_ids, edges):
        self.node_ids = list(node_ids)
        self.edges = set(edges)
        children: dict[str, list[str]] = {n: [] for n in self.node_ids}
        neighbors: dict[str, list[tuple[str, str]]] = {n: [] for n in self.node_ids}
        for p, c in edges:
            children[p].append(c)
            neighbors[p].append((c, "->"))
            neighbors[c].append((p, "<-"))
        self.desc: dict[str, frozenset[str]] = {}
        for n in self.node_ids:
            seen = {n}
            frontier = [n]
            while frontier:
                cur = frontier.pop()
                for ch in children[cur]:
                    if ch not in seen:
                        seen.add(ch)
                        frontier.append(ch)
            self.desc[n] = frozenset(seen)
        self.neighbors = neighbors
        self._trails: dict[tuple[str, str], list] = {}

    def _trail_features(self, nodes, dirs):
        noncolliders = set()
        collider_desc = []
        for i in range(1, len(nodes) - 1):
            if dirs[i - 1] == "->" and dirs[i] == "<-":
                collider_desc.append(self.desc[nodes[i]])
            else:
                noncolliders.add(nodes[i])
        return frozenset(noncolliders), collider_desc

    def trails(self, x, y):
        key = (x, y)
        if key in self._trails:
            return self._trails[key]
        found = []
        stack = [(x, [x], [])]
        while stack:
            cur, nodes, dirs = stack.pop()
            for nb, direction in self.neighbors[cur]:
                if nb == y:
                    found.append(self._trail_features(nodes + [nb], dirs + [direction]))
                elif nb not in nodes:
                    stack.append((nb, nodes + [nb], dirs + [direction]))
        self._trails[key] = found
        return found

    def d_separated(self, x, y, w) -> bool:
        w = frozenset(w)
        if x == y:
            return False
        for noncolliders, collider_desc in self.trails(x, y):
            if noncolliders & w:
                continue
            if all(dd & w for dd in collider_desc):
                return False
        return True


def sample_measurable_profile(original: Maid, result,
                              rng: random.Random) -> dict[str, DecisionRule]:
    """A random behavior profile on the original game whose rules only
    condition on information the simplified game retained.

    Surviving decisions get random rows constant across pruned parents;
    eliminated decisions get one random row used everywhere (they observe
    nothing in the simplified game).
    """
    final = result.final
    profile: dict[str, DecisionRule] = {}
    for d in original.decisions:
        node = original.nodes[d]
        k = len(node.domain)
        orig_parents = node.parents
        orig_domains = [original.nodes[p].domain for p in orig_parents]
        if d in final.nodes and final.nodes[d].is_decision:
            kept = [i for i, p in enumerate(orig_parents)
                    if p in set(final.parents(d))]
            kept_domains = [orig_domains[i] for i in kept]
            table = {cfg: _random_row(k, rng)
                     for cfg in itertools.product(*kept_domains)}
            rows = [table[tuple(cfg[i] for i in kept)]
                    for cfg in itertools.product(*orig_domains)]
        else:
            row = _random_row(k, rng)
            rows = [row] * math.prod(len(dom) for dom in orig_domains)
        profile[d] = rule_from_rows(original, d, rows)
    return profile


# -- small hand-built games --------------------------------------------------


def cascade_maid() -> Maid:
    """Three agents in a line; the middle node keeps the first decision
    alive only while the last decision survives, so elimination has to
    re-run within one phase."""
    return Maid.build(agents=["gA", "gB", "gC"], nodes=[
        Node.decision("dA", owner="gA", domain=("l", "r")),
        Node.decision("nB", owner="gB", domain=("l", "r"), parents=("dA",)),
        Node.decision("dC", owner="gC", domain=("l", "r"), parents=("nB",)),
        Node.utility("uA", owner="gA", parents=("dC",)),
        Node.utility("uB", owner="gB", parents=("dA", "nB")),
        Node.utility("uC", owner="gC"),
    ])


def matching_pennies() -> Maid:
    return Maid.build(agents=["x", "y"], nodes=[
        Node.decision("X", owner="x", domain=("h", "t")),
        Node.decision("Y", owner="y", domain=("h", "t")),
        Node.utility("U_X", owner="x", parents=("X", "Y"),
                     table=(1.0, 0.0, 0.0, 1.0)),
        Node.utility("U_Y", owner="y", parents=("X", "Y"),
                     table=(0.0, 1.0, 1.0, 0.0)),
    ])


def minimal_signaling() -> Maid:
    """Smallest graph where signaling fires: d_A observes t (correlated
    with h), d_B observes only d_A, and h feeds d_B's payoff directly."""
    return Maid.build(agents=["A", "B"], nodes=[
        Node.chance("h", domain=("lo", "hi")),
        Node.chance("t", domain=("lo", "hi"), parents=("h",)),
        Node.decision("d_A", owner="A", domain=("lo", "hi"), parents=("t",)),
        Node.decision("d_B", owner="B", domain=("lo", "hi"), parents=("d_A",)),
        Node.utility("u_A", owner="A", parents=("d_B",)),
        Node.utility("u_B", owner="B", parents=("d_B", "h")),
    ])
