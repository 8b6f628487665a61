"""Iterative graph simplification.

Two reductions alternate until neither changes the graph:

* identification: a decision that takes part in no reasoning pattern is
  demoted to a parentless uniform chance node (its owner has nothing to
  gain there, so any fixed behavior preserves everyone's incentives);
* retraction: an information edge into a decision is removed when its
  source is conditionally independent of every payoff node of the
  decision's owner, given the decision and its other observations.

Demotions can unlock retractions and vice versa, hence the outer loop.
Both reductions only ever shrink the graph, so the loop terminates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    Maid,
    MaidError,
    ValidationError,
    all_effective,
    convert_decision_to_chance,
    remove_edge,
    validate,
)
from .analysis import BlockCache, d_separated, invalidate_cache
from .patterns import decision_is_effective


@dataclass(frozen=True)
class PhaseOutcome:
    """Result of one identification phase: the (possibly reduced) graph, the
    updated participation flags, and what was demoted along the way."""

    maid: Maid
    effectiveness: Mapping[str, bool]
    changed: bool
    eliminated: tuple[str, ...]
    removed_edges: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class IterationRecord:
    index: int
    eliminated: tuple[str, ...]
    conversion_removed_edges: tuple[tuple[str, str], ...]
    pruned_edges: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class SimplificationResult:
    """Full account of a simplification run.

    ``effectiveness`` keeps one flag for every decision of the original
    graph; eliminated decisions stay in the mapping with a False flag.
    ``removed_edges`` lists edges in removal order: the incoming edges of
    each demoted decision, then the pruned information edges, iteration by
    iteration.
    """

    original: Maid
    final: Maid
    eliminated: tuple[str, ...]
    removed_edges: tuple[tuple[str, str], ...]
    effectiveness: Mapping[str, bool]
    iterations: int
    trace: tuple[IterationRecord, ...] = field(default=())


def _ordered(items: Sequence[str], rng: random.Random | None) -> list[str]:
    out = sorted(items)
    if rng is not None:
        rng.shuffle(out)
    return out


def identification_phase(maid: Maid, effectiveness: Mapping[str, bool],
                         cache: BlockCache | None = None,
                         rng: random.Random | None = None,
                         literal_reveal_blocking: bool = False) -> PhaseOutcome:
    """Repeatedly demote pattern-free decisions until a full pass over the
    remaining decisions demotes nothing.

    A demotion clears the decision's flag and converts the node to a
    parentless uniform chance node in one step, so later pattern checks in
    the same phase see a consistent graph.
    """
    eff = dict(effectiveness)
    eliminated: list[str] = []
    removed: list[tuple[str, str]] = []
    changed_any = False
    while True:
        changed = False
        for d in _ordered(maid.decisions, rng):
            if not eff.get(d, False):
                continue
            if decision_is_effective(maid, d, eff, cache=cache,
                                     literal_reveal_blocking=literal_reveal_blocking):
                continue
            eff[d] = False
            for p in maid.parents(d):
                removed.append((p, d))
            maid = convert_decision_to_chance(maid, d)
            if cache is not None:
                invalidate_cache(cache)
            eliminated.append(d)
            changed = True
            changed_any = True
        if not changed:
            break
    return PhaseOutcome(maid=maid, effectiveness=eff, changed=changed_any,
                        eliminated=tuple(eliminated), removed_edges=tuple(removed))


def retract_edges(maid: Maid, cache: BlockCache | None = None,
                  rng: random.Random | None = None) -> tuple[Maid, tuple[tuple[str, str], ...], bool]:
    """Remove information edges whose source tells the observing decision's
    owner nothing about their payoff.

    All information edges start disabled; an edge (p, d) is re-enabled when
    p is d-connected, through currently enabled edges only, to some payoff
    node of d's owner given d and d's other parents. Re-enabling repeats to
    a fixed point (an edge revived late can be the route that revives an
    earlier one), then whatever stayed disabled is removed.
    """
    decision_order = [n for n in maid.topological_order
                      if maid.nodes[n].is_decision]
    info_edges = [(p, d) for d in decision_order for p in maid.parents(d)]
    if not info_edges:
        return maid, (), False
    order = list(info_edges)
    if rng is not None:
        rng.shuffle(order)
    disabled = set(info_edges)
    enabled = set(maid.edge_set) - disabled

    progress = True
    while progress:
        progress = False
        for p, d in order:
            if (p, d) not in disabled:
                continue
            w = frozenset((d,)) | (frozenset(maid.parents(d)) - {p})
            mask = frozenset(enabled)
            for u in maid.utilities_of(maid.nodes[d].owner):
                if not d_separated(maid, p, u, w, enabled_edges=mask):
                    disabled.discard((p, d))
                    enabled.add((p, d))
                    progress = True
                    break

    removed = tuple(e for e in info_edges if e in disabled)
    for p, d in removed:
        maid = remove_edge(maid, p, d)
    if removed and cache is not None:
        invalidate_cache(cache)
    return maid, removed, bool(removed)


def simplify(maid: Maid, order_seed: int | None = None,
             literal_reveal_blocking: bool = False) -> SimplificationResult:
    """Alternate identification and retraction until neither changes the
    graph. The final graph, the order of every removal, and the surviving
    participation flags are all reported.

    ``order_seed`` permutes the per-pass visiting order of decisions and
    edges; the fixed point does not depend on it.
    """
    diagnostics = validate(maid)
    if diagnostics:
        raise ValidationError(diagnostics)
    rng = random.Random(order_seed) if order_seed is not None else None
    cache = BlockCache()
    original = maid
    eff: dict[str, bool] = dict(all_effective(maid))
    eliminated_all: list[str] = []
    removed_all: list[tuple[str, str]] = []
    trace: list[IterationRecord] = []
    bound = len(maid.edges) + 2
    iterations = 0
    while True:
        iterations += 1
        if iterations > bound:
            raise MaidError("simplification did not reach a fixed point within "
                            "the structural bound")
        phase = identification_phase(maid, eff, cache=cache, rng=rng,
                                     literal_reveal_blocking=literal_reveal_blocking)
        maid = phase.maid
        eff = dict(phase.effectiveness)
        maid, pruned, pruned_changed = retract_edges(maid, cache=cache, rng=rng)
        trace.append(IterationRecord(index=iterations, eliminated=phase.eliminated,
                                     conversion_removed_edges=phase.removed_edges,
                                     pruned_edges=pruned))
        eliminated_all.extend(phase.eliminated)
        removed_all.extend(phase.removed_edges)
        removed_all.extend(pruned)
        if not phase.changed and not pruned_changed:
            break
    return SimplificationResult(original=original, final=maid,
                                eliminated=tuple(eliminated_all),
                                removed_edges=tuple(removed_all),
                                effectiveness=eff, iterations=iterations,
                                trace=tuple(trace))
