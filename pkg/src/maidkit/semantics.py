"""Numeric game semantics by exhaustive enumeration.

Everything here works on fully parameterized diagrams and small joint
state spaces: joint probabilities, expected utilities, best-response gaps
over joint pure deviations, a pure-strategy equilibrium search, a
brute-force motivation test, and the check that a simplification preserved
equilibria. Enumeration sizes are guarded; callers hitting the guard get a
:class:`ScaleGuardError` rather than an open-ended computation.

Decision rules are tables in the same layout as node parameters: one
distribution per parent configuration, last parent varying fastest.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .core import (
    Maid,
    MaidError,
    NotADecisionError,
    PROB_TOL,
    is_fully_parameterized,
    parent_configs,
)

MAX_JOINT_STATES = 2_000_000
MAX_PURE_PROFILES = 1_000_000
_TIE_EPS = 1e-12


class ScaleGuardError(MaidError):
    """The requested enumeration is larger than the configured bound."""


# -- decision rules -----------------------------------------------------------


@dataclass(frozen=True)
class DecisionRule:
    """A behavioral rule for one decision: a distribution over the decision's
    domain for every configuration of its parents.

    The rule snapshots the parent list and domains it was built against, so
    a profile constructed for one graph cannot silently be applied to a
    structurally different one.
    """

    decision: str
    parents: tuple[str, ...]
    parent_domains: tuple[tuple[str, ...], ...]
    domain: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        expected = math.prod(len(d) for d in self.parent_domains)
        if len(self.rows) != expected:
            raise MaidError(f"{self.decision}: rule has {len(self.rows)} rows, "
                            f"expected {expected}")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.domain):
                raise MaidError(f"{self.decision}: row {i} has {len(row)} entries, "
                                f"expected {len(self.domain)}")
            if any(v < 0 for v in row) or abs(sum(row) - 1.0) > PROB_TOL:
                raise MaidError(f"{self.decision}: row {i} is not a distribution")

    def config_index(self, parent_values: Sequence[str]) -> int:
        if len(parent_values) != len(self.parents):
            raise MaidError(f"{self.decision}: expected {len(self.parents)} parent "
                            f"values, got {len(parent_values)}")
        idx = 0
        for dom, v in zip(self.parent_domains, parent_values):
            idx = idx * len(dom) + dom.index(v)
        return idx

    def row_for(self, parent_values: Sequence[str]) -> tuple[float, ...]:
        return self.rows[self.config_index(parent_values)]

    @property
    def is_pure(self) -> bool:
        return all(any(v == 1.0 for v in row) for row in self.rows)


def _rule_shape(maid: Maid, d: str) -> tuple[tuple[str, ...], tuple[tuple[str, ...], ...], tuple[str, ...]]:
    node = maid.node(d)
    if not node.is_decision:
        raise NotADecisionError(f"{d!r} is not a decision node")
    pdoms = []
    for p in node.parents:
        dom = maid.node(p).domain
        if dom is None:
            raise MaidError(f"{d}: parent {p!r} has no domain")
        pdoms.append(dom)
    return node.parents, tuple(pdoms), node.domain


def uniform_rule(maid: Maid, d: str) -> DecisionRule:
    parents, pdoms, domain = _rule_shape(maid, d)
    k = len(domain)
    row = tuple(1.0 / k for _ in range(k))
    n_rows = math.prod(len(dd) for dd in pdoms)
    return DecisionRule(d, parents, pdoms, domain, tuple(row for _ in range(n_rows)))


def constant_rule(maid: Maid, d: str, action: str) -> DecisionRule:
    parents, pdoms, domain = _rule_shape(maid, d)
    if action not in domain:
        raise MaidError(f"{d}: {action!r} is not in the domain")
    row = tuple(1.0 if v == action else 0.0 for v in domain)
    n_rows = math.prod(len(dd) for dd in pdoms)
    return DecisionRule(d, parents, pdoms, domain, tuple(row for _ in range(n_rows)))


def rule_from_function(maid: Maid, d: str, choose) -> DecisionRule:
    """Build a pure rule from a callable mapping a parent-value tuple to an
    action in the decision's domain."""
    parents, pdoms, domain = _rule_shape(maid, d)
    rows = []
    for config in itertools.product(*pdoms):
        action = choose(config)
        if action not in domain:
            raise MaidError(f"{d}: {action!r} is not in the domain")
        rows.append(tuple(1.0 if v == action else 0.0 for v in domain))
    return DecisionRule(d, parents, pdoms, domain, tuple(rows))


def rule_from_rows(maid: Maid, d: str, rows: Iterable[Iterable[float]]) -> DecisionRule:
    parents, pdoms, domain = _rule_shape(maid, d)
    return DecisionRule(d, parents, pdoms, domain,
                        tuple(tuple(float(v) for v in row) for row in rows))


def uniform_profile(maid: Maid) -> dict[str, DecisionRule]:
    return {d: uniform_rule(maid, d) for d in maid.decisions}


def _check_profile(maid: Maid, profile: Mapping[str, DecisionRule],
                   exclude: frozenset[str] = frozenset()) -> None:
    for d in maid.decisions:
        if d in exclude:
            continue
        rule = profile.get(d)
        if rule is None:
            raise MaidError(f"profile has no rule for decision {d!r}")
        parents, pdoms, domain = _rule_shape(maid, d)
        if rule.decision != d or rule.parents != parents or rule.domain != domain \
                or rule.parent_domains != pdoms:
            raise MaidError(f"rule for {d!r} was built against a different structure")


# -- joint state enumeration ----------------------------------------------------


class _JointSpace:
    """Precomputed scaffolding for enumerating joint assignments of the
    non-utility nodes as tuples of domain indexes."""

    def __init__(self, maid: Maid, max_states: int = MAX_JOINT_STATES):
        if not is_fully_parameterized(maid):
            raise MaidError("numeric evaluation requires a fully parameterized graph")
        self.maid = maid
        self.order = tuple(n for n in maid.topological_order
                           if not maid.nodes[n].is_utility)
        self.pos = {n: i for i, n in enumerate(self.order)}
        self.domains = tuple(maid.nodes[n].domain for n in self.order)
        self.n_states = math.prod(len(d) for d in self.domains) if self.order else 1
        if self.n_states > max_states:
            raise ScaleGuardError(f"joint state space has {self.n_states} states "
                                  f"(limit {max_states})")
        self.chance_factors = []
        for c in maid.chance_nodes:
            node = maid.nodes[c]
            self.chance_factors.append((self.pos[c], len(node.domain), node.cpt,
                                        tuple(self.pos[p] for p in node.parents),
                                        tuple(len(maid.nodes[p].domain) for p in node.parents)))
        self.decision_inputs = {}
        for d in maid.decisions:
            node = maid.nodes[d]
            self.decision_inputs[d] = (self.pos[d],
                                       tuple(self.pos[p] for p in node.parents),
                                       tuple(len(maid.nodes[p].domain) for p in node.parents))
        self.utility_readers = {}
        for u in maid.utilities:
            node = maid.nodes[u]
            self.utility_readers[u] = (node.table,
                                       tuple(self.pos[p] for p in node.parents),
                                       tuple(len(maid.nodes[p].domain) for p in node.parents))

    def states(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(len(d)) for d in self.domains))

    @staticmethod
    def _row(state: tuple[int, ...], positions: tuple[int, ...],
             radices: tuple[int, ...]) -> int:
        idx = 0
        for p, r in zip(positions, radices):
            idx = idx * r + state[p]
        return idx

    def chance_weight(self, state: tuple[int, ...]) -> float:
        w = 1.0
        for pos, k, cpt, ppos, prad in self.chance_factors:
            w *= cpt[self._row(state, ppos, prad) * k + state[pos]]
            if w == 0.0:
                return 0.0
        return w

    def rule_weight(self, state: tuple[int, ...], profile: Mapping[str, DecisionRule],
                    skip: frozenset[str] = frozenset()) -> float:
        w = 1.0
        for d, (pos, ppos, prad) in self.decision_inputs.items():
            if d in skip:
                continue
            w *= profile[d].rows[self._row(state, ppos, prad)][state[pos]]
            if w == 0.0:
                return 0.0
        return w

    def utility_total(self, state: tuple[int, ...], agent: str) -> float:
        total = 0.0
        for u in self.maid.utilities_of(agent):
            table, ppos, prad = self.utility_readers[u]
            total += table[self._row(state, ppos, prad)]
        return total

    def decision_observation(self, state: tuple[int, ...], d: str) -> tuple[tuple[int, ...], int]:
        """(parent-config index tuple, chosen-action index) of ``d`` in a state."""
        pos, ppos, _ = self.decision_inputs[d]
        return tuple(state[p] for p in ppos), state[pos]


# -- probabilities and utilities -------------------------------------------------


def joint_probability(maid: Maid, profile: Mapping[str, DecisionRule],
                      assignment: Mapping[str, str]) -> float:
    """Probability of one full assignment of every chance and decision node."""
    _check_profile(maid, profile)
    space = _JointSpace(maid)
    if set(assignment) != set(space.order):
        missing = sorted(set(space.order) - set(assignment))
        extra = sorted(set(assignment) - set(space.order))
        raise MaidError(f"assignment must cover exactly the chance and decision "
                        f"nodes (missing {missing}, unexpected {extra})")
    state = []
    for n, dom in zip(space.order, space.domains):
        v = assignment[n]
        if v not in dom:
            raise MaidError(f"{n}: value {v!r} not in domain")
        state.append(dom.index(v))
    state = tuple(state)
    return space.chance_weight(state) * space.rule_weight(state, profile)


def expected_utility(maid: Maid, profile: Mapping[str, DecisionRule],
                     agent: str) -> float:
    """Expected total utility of one agent under a full strategy profile."""
    _check_profile(maid, profile)
    if agent not in maid.agents:
        raise MaidError(f"unknown agent: {agent!r}")
    space = _JointSpace(maid)
    total = 0.0
    for state in space.states():
        w = space.chance_weight(state)
        if w == 0.0:
            continue
        w *= space.rule_weight(state, profile)
        if w == 0.0:
            continue
        total += w * space.utility_total(state, agent)
    return total


# -- best response over joint pure deviations -------------------------------------


def _response_cells(space: _JointSpace, profile: Mapping[str, DecisionRule],
                    decisions: tuple[str, ...], agent: str) -> dict:
    """Aggregate opponent-weighted utility by the (observation, action) tuple
    of each deviating decision.

    The resulting table S satisfies: the expected utility of any behavior at
    ``decisions`` (others fixed) is the S-weighted sum of the probabilities
    that behavior assigns to each cell.
    """
    skip = frozenset(decisions)
    cells: dict[tuple, float] = {}
    for state in space.states():
        w = space.chance_weight(state)
        if w == 0.0:
            continue
        w *= space.rule_weight(state, profile, skip=skip)
        if w == 0.0:
            continue
        value = w * space.utility_total(state, agent)
        key = tuple(space.decision_observation(state, d) for d in decisions)
        cells[key] = cells.get(key, 0.0) + value
    return cells


def _profile_value_from_cells(cells: dict, decisions: tuple[str, ...],
                              rules: Mapping[str, DecisionRule],
                              space: _JointSpace) -> float:
    total = 0.0
    for key, s in cells.items():
        prob = 1.0
        for d, (config, action) in zip(decisions, key):
            _, _, prad = space.decision_inputs[d]
            idx = 0
            for c, r in zip(config, prad):
                idx = idx * r + c
            prob *= rules[d].rows[idx][action]
            if prob == 0.0:
                break
        total += prob * s
    return total


def _pure_response_space(maid: Maid, decisions: tuple[str, ...]) -> list[tuple[str, list, int]]:
    """Per decision: (id, parent config list, action count); used to size and
    enumerate the joint pure deviation space."""
    out = []
    for d in decisions:
        configs = list(parent_configs(maid, d))
        out.append((d, configs, len(maid.nodes[d].domain)))
    return out


def _count_joint_pure(space_desc: list[tuple[str, list, int]]) -> int:
    return math.prod(k ** len(configs) for _, configs, k in space_desc)


def _best_pure_response(maid: Maid, space: _JointSpace,
                        profile: Mapping[str, DecisionRule], agent: str,
                        max_profiles: int = MAX_PURE_PROFILES) -> tuple[float, dict[str, DecisionRule]]:
    """Value and rules of the best joint pure deviation of one agent's
    decisions, holding everyone else fixed. Ties keep the incumbent rules."""
    decisions = maid.decisions_of(agent)
    if not decisions:
        return expected_utility(maid, profile, agent), {}
    cells = _response_cells(space, profile, decisions, agent)

    if len(decisions) == 1:
        d = decisions[0]
        node = maid.nodes[d]
        incumbent = profile[d]
        parents, pdoms, domain = _rule_shape(maid, d)
        by_config: dict[tuple[int, ...], dict[int, float]] = {}
        for ((config, action),), s in cells.items():
            by_config.setdefault(config, {})[action] = \
                by_config.get(config, {}).get(action, 0.0) + s
        rows = []
        best_total = 0.0
        for config in itertools.product(*(range(len(dd)) for dd in pdoms)):
            idx = 0
            for c, dd in zip(config, pdoms):
                idx = idx * len(dd) + c
            options = by_config.get(config)
            if not options:
                rows.append(incumbent.rows[idx])
                continue
            top = max(options.values())
            best_total += top
            current_row = incumbent.rows[idx]
            current_action = max(range(len(domain)), key=lambda a: current_row[a])
            if options.get(current_action, -math.inf) >= top - _TIE_EPS:
                chosen = current_action
            else:
                chosen = min(a for a, v in options.items() if v >= top - _TIE_EPS)
            rows.append(tuple(1.0 if i == chosen else 0.0 for i in range(len(domain))))
        rule = DecisionRule(d, parents, pdoms, domain, tuple(rows))
        return best_total, {d: rule}

    space_desc = _pure_response_space(maid, decisions)
    n = _count_joint_pure(space_desc)
    if n > max_profiles:
        raise ScaleGuardError(f"joint pure deviation space for agent {agent!r} has "
                              f"{n} members (limit {max_profiles})")
    incumbent_rules = {d: profile[d] for d in decisions}
    best_value = _profile_value_from_cells(cells, decisions, incumbent_rules, space)
    best_rules = incumbent_rules
    choice_spaces = [itertools.product(range(k), repeat=len(configs))
                     for _, configs, k in space_desc]
    for joint in itertools.product(*choice_spaces):
        rules = {}
        for (d, configs, k), picks in zip(space_desc, joint):
            parents, pdoms, domain = _rule_shape(maid, d)
            rows = tuple(tuple(1.0 if i == a else 0.0 for i in range(k)) for a in picks)
            rules[d] = DecisionRule(d, parents, pdoms, domain, rows)
        value = _profile_value_from_cells(cells, decisions, rules, space)
        if value > best_value + _TIE_EPS:
            best_value = value
            best_rules = rules
    return best_value, best_rules


def best_response_gap(maid: Maid, profile: Mapping[str, DecisionRule],
                      agent: str) -> float:
    """How much one agent can gain by jointly deviating all of their
    decisions to the best pure alternative. Zero (up to float noise) means
    the profile is a best response for that agent."""
    _check_profile(maid, profile)
    if agent not in maid.agents:
        raise MaidError(f"unknown agent: {agent!r}")
    decisions = maid.decisions_of(agent)
    if not decisions:
        return 0.0
    space = _JointSpace(maid)
    cells = _response_cells(space, profile, decisions, agent)
    current = _profile_value_from_cells(cells, decisions,
                                        {d: profile[d] for d in decisions}, space)
    best, _ = _best_pure_response(maid, space, profile, agent)
    return best - current


# -- equilibrium search ------------------------------------------------------------


def find_equilibrium_small(maid: Maid, seed: int = 0, tol: float = 1e-9,
                           max_profiles: int = MAX_PURE_PROFILES,
                           max_rounds: int = 50) -> dict[str, DecisionRule] | None:
    """A pure-strategy equilibrium of a small game, or None when no pure
    profile is an equilibrium.

    Best-response iteration from a seeded random pure profile is tried
    first (agents keep their current rule on ties); if it fails to settle,
    every joint pure profile is checked in lexicographic order. The size of
    the pure profile space is guarded.
    """
    _require_parameterized(maid)
    decisions = maid.decisions
    if not decisions:
        return {}
    space_desc = _pure_response_space(maid, decisions)
    n = _count_joint_pure(space_desc)
    if n > max_profiles:
        raise ScaleGuardError(f"pure profile space has {n} members (limit {max_profiles})")
    agents = sorted({maid.nodes[d].owner for d in decisions})
    rng = random.Random(seed)
    space = _JointSpace(maid)

    profile: dict[str, DecisionRule] = {}
    for d, configs, k in space_desc:
        parents, pdoms, domain = _rule_shape(maid, d)
        rows = []
        for _ in configs:
            pick = rng.randrange(k)
            rows.append(tuple(1.0 if i == pick else 0.0 for i in range(k)))
        profile[d] = DecisionRule(d, parents, pdoms, domain, tuple(rows))

    for _ in range(max_rounds):
        changed = False
        for agent in agents:
            owned = maid.decisions_of(agent)
            cells = _response_cells(space, profile, owned, agent)
            current = _profile_value_from_cells(cells, owned,
                                                {d: profile[d] for d in owned}, space)
            best, rules = _best_pure_response(maid, space, profile, agent,
                                              max_profiles=max_profiles)
            if best > current + tol:
                profile.update(rules)
                changed = True
        if not changed:
            return profile

    choice_spaces = [itertools.product(range(k), repeat=len(configs))
                     for _, configs, k in space_desc]
    for joint in itertools.product(*choice_spaces):
        candidate = {}
        for (d, configs, k), picks in zip(space_desc, joint):
            parents, pdoms, domain = _rule_shape(maid, d)
            rows = tuple(tuple(1.0 if i == a else 0.0 for i in range(k)) for a in picks)
            candidate[d] = DecisionRule(d, parents, pdoms, domain, rows)
        if all(best_response_gap(maid, candidate, agent) <= tol for agent in agents):
            return candidate
    return None


def _require_parameterized(maid: Maid) -> None:
    if not is_fully_parameterized(maid):
        raise MaidError("numeric evaluation requires a fully parameterized graph")


# -- motivation --------------------------------------------------------------------


def is_motivated_bruteforce(maid: Maid, d: str,
                            others: Mapping[str, DecisionRule],
                            tol: float = 1e-9) -> bool:
    """Does the owner of ``d`` care which action is taken there, holding all
    other decisions to ``others``?

    True iff some positive-probability configuration of d's parents gives
    two actions different conditional expected utilities. The parent
    configuration distribution does not depend on d's own behavior, so
    ``others`` needs no rule for d.
    """
    node = maid.node(d)
    if not node.is_decision:
        raise NotADecisionError(f"{d!r} is not a decision node")
    if d in others:
        raise MaidError(f"others must not contain a rule for {d!r}")
    _check_profile(maid, others, exclude=frozenset((d,)))
    agent = node.owner
    space = _JointSpace(maid)
    skip = frozenset((d,))

    value: dict[tuple[tuple[int, ...], int], float] = {}
    mass: dict[tuple[tuple[int, ...], int], float] = {}
    for state in space.states():
        w = space.chance_weight(state)
        if w == 0.0:
            continue
        w *= space.rule_weight(state, others, skip=skip)
        if w == 0.0:
            continue
        key = space.decision_observation(state, d)
        mass[key] = mass.get(key, 0.0) + w
        value[key] = value.get(key, 0.0) + w * space.utility_total(state, agent)

    configs = {config for config, _ in mass}
    for config in configs:
        conditional = []
        for action in range(len(node.domain)):
            m = mass.get((config, action), 0.0)
            if m > 0.0:
                conditional.append(value[(config, action)] / m)
        if conditional and max(conditional) - min(conditional) > tol:
            return True
    return False


# -- simplification checking ---------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of replaying a simplified equilibrium in the original game.

    ``status`` is "pass" when no agent can improve beyond tolerance, "fail"
    when some agent can, and "inconclusive" when the simplified game has no
    pure-strategy equilibrium to extend.
    """

    status: str
    gaps: Mapping[str, float]
    equilibrium: Mapping[str, DecisionRule] | None
    detail: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _lift_rule(original: Maid, d: str, rule: DecisionRule) -> DecisionRule:
    """Reindex a rule over a reduced parent list onto the original parent
    list; the rule's behavior is constant across dropped parents."""
    parents, pdoms, domain = _rule_shape(original, d)
    if rule.domain != domain:
        raise MaidError(f"{d}: domain changed between graphs")
    keep = [i for i, p in enumerate(parents) if p in rule.parents]
    if tuple(parents[i] for i in keep) != rule.parents:
        raise MaidError(f"{d}: simplified parents are not a subsequence of the "
                        f"original parents")
    rows = []
    for config in itertools.product(*pdoms):
        rows.append(rule.row_for(tuple(config[i] for i in keep)))
    return DecisionRule(d, parents, pdoms, domain, tuple(rows))


def verify_simplification(maid: Maid, result, seed: int = 0,
                          tol: float = 1e-9) -> VerificationReport:
    """Find a pure equilibrium of the simplified game, extend it to the
    original game (eliminated decisions become uniform, surviving rules are
    lifted over their original parent lists), and measure every agent's
    best-response gap in the original game."""
    _require_parameterized(maid)
    simplified = result.final
    eq = find_equilibrium_small(simplified, seed=seed, tol=tol)
    if eq is None:
        return VerificationReport(status="inconclusive", gaps={}, equilibrium=None,
                                  detail="the simplified game has no pure-strategy "
                                         "equilibrium to extend")
    extended: dict[str, DecisionRule] = {}
    for d in maid.decisions:
        if d in eq:
            extended[d] = _lift_rule(maid, d, eq[d])
        else:
            extended[d] = uniform_rule(maid, d)
    agents = sorted({maid.nodes[d].owner for d in maid.decisions})
    gaps = {agent: best_response_gap(maid, extended, agent) for agent in agents}
    failing = sorted(a for a, g in gaps.items() if g > tol)
    if failing:
        detail = "deviation improves " + ", ".join(
            f"{a} by {gaps[a]:.6g}" for a in failing)
        return VerificationReport(status="fail", gaps=gaps, equilibrium=extended,
                                  detail=detail)
    return VerificationReport(status="pass", gaps=gaps, equilibrium=extended,
                              detail="no agent can improve beyond tolerance")


# -- solution cost metric ---------------------------------------------------------------


@dataclass(frozen=True)
class LeafMetric:
    """Game tree sizes: one tree over all decisions jointly, versus one tree
    per decision over the variables its owner's payoff can involve."""

    monolithic: int
    per_decision: Mapping[str, int]
    decoupled_total: int


def leaf_metric(maid: Maid) -> LeafMetric:
    monolithic = math.prod(len(maid.nodes[d].domain) for d in maid.decisions)
    per_decision: dict[str, int] = {}
    for d in maid.decisions:
        scope = {d}
        for u in maid.utilities_of(maid.nodes[d].owner):
            for p in maid.parents(u):
                if not maid.nodes[p].is_utility:
                    scope.add(p)
        leaves = 1
        for v in sorted(scope):
            dom = maid.nodes[v].domain
            if dom is None:
                raise MaidError(f"{v}: no domain, cannot size a game tree")
            leaves *= len(dom)
        per_decision[d] = leaves
    return LeafMetric(monolithic=monolithic, per_decision=per_decision,
                      decoupled_total=sum(per_decision.values()))
