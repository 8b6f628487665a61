"""Detector behavior on the fixtures, frozen instance sets, and auditing."""
from __future__ import annotations

import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maidkit import (
    DetectionMode,
    NotADecisionError,
    PatternKind,
    all_effective,
    check_instance,
    convert_decision_to_chance,
    decision_is_effective,
    direct_effect,
    enumerate_patterns,
    manipulation,
    reveal_deny,
    signaling,
    simplify,
)

import helpers


def keys(instances):
    return {i.key() for i in instances}


ALL_DETECTORS = (direct_effect, manipulation, signaling, reveal_deny)


# -- principal-agent: the full frozen report ----------------------------------


PA_EXPECTED = {
    "P1": {
        ("direct_effect", "P1", "U_P1", "", "", ""),
        ("manipulation", "P1", "U_P1", "D1", "U_D1", ""),
        ("manipulation", "P1", "U_P1", "D1", "U_D2", ""),
        ("manipulation", "P1", "U_P2", "D1", "U_D1", ""),
        ("manipulation", "P1", "U_P2", "D1", "U_D2", ""),
        ("manipulation", "P1", "U_P2", "P2", "U_P1", ""),
        ("manipulation", "P1", "U_P2", "P2", "U_P2", ""),
        ("reveal_deny", "P1", "U_P2", "P2", "U_P2", ""),
    },
    "P2": {
        ("direct_effect", "P2", "U_P2", "", "", ""),
        ("manipulation", "P2", "U_P2", "D2", "U_D2", ""),
        ("signaling", "P2", "U_P2", "D2", "U_D1", "D1"),
        ("signaling", "P2", "U_P2", "D2", "U_D1", "r1"),
        ("signaling", "P2", "U_P2", "D2", "U_D2", "D1"),
        ("signaling", "P2", "U_P2", "D2", "U_D2", "P1"),
        ("signaling", "P2", "U_P2", "D2", "U_D2", "r1"),
    },
    "D1": {
        ("direct_effect", "D1", "U_D1", "", "", ""),
        ("manipulation", "D1", "U_D2", "D2", "U_D1", ""),
        ("manipulation", "D1", "U_D2", "D2", "U_D2", ""),
        ("manipulation", "D1", "U_D2", "P2", "U_P1", ""),
        ("manipulation", "D1", "U_D2", "P2", "U_P2", ""),
        ("signaling", "D1", "U_D2", "D2", "U_D2", "P1"),
        ("signaling", "D1", "U_D2", "P2", "U_P2", "P1"),
        ("reveal_deny", "D1", "U_D2", "D2", "U_D1", ""),
    },
    "D2": {
        ("direct_effect", "D2", "U_D2", "", "", ""),
    },
}


def test_principal_agent_full_report(pa):
    report = enumerate_patterns(pa, original=True)
    assert set(report.instances) == {"P1", "P2", "D1", "D2"}
    for d, expected in PA_EXPECTED.items():
        assert keys(report.instances[d]) == expected
    assert report.effectiveness == {"P1": True, "P2": True, "D1": True, "D2": True}


def test_principal_agent_signature_instances(pa):
    # Each decision exhibits its characteristic pattern: both stages have a
    # direct stake, each stage manipulates the next mover, the first worker
    # signals its type, and the first contract opens a channel the second
    # contract would otherwise rely on.
    report = enumerate_patterns(pa, original=True)
    found = keys(report.all_instances())
    assert ("direct_effect", "P1", "U_P1", "", "", "") in found
    assert ("direct_effect", "P2", "U_P2", "", "", "") in found
    assert ("direct_effect", "D1", "U_D1", "", "", "") in found
    assert ("direct_effect", "D2", "U_D2", "", "", "") in found
    assert ("manipulation", "P1", "U_P1", "D1", "U_D1", "") in found
    assert ("manipulation", "P2", "U_P2", "D2", "U_D2", "") in found
    assert ("manipulation", "D1", "U_D2", "P2", "U_P2", "") in found
    assert ("signaling", "D1", "U_D2", "P2", "U_P2", "P1") in found
    assert ("reveal_deny", "P1", "U_P2", "P2", "U_P2", "") in found


def test_principal_agent_reveal_witness(pa):
    # The channel the first contract can open runs through the collider at
    # D1: conditioning on P2's observations leaves it closed until P1 acts.
    report = enumerate_patterns(pa, original=True)
    (inst,) = [i for i in report.instances["P1"]
               if i.kind is PatternKind.REVEAL_DENY]
    witnesses = dict(inst.witness_paths)
    assert str(witnesses["d_to_u_prime_front_door"]) == \
        "P1 -> D1 <- type -> D2 -> U_P2"


def test_principal_agent_no_root_signaling(pa):
    # P1's only ancestor is the root r0; a root has no back-door path, so
    # there is nothing upstream for P1 to pass along.
    assert signaling(pa, "P1") == []


def test_witness_names_by_kind(pa):
    names_by_kind = {
        PatternKind.DIRECT_EFFECT: {"d_to_u"},
        PatternKind.MANIPULATION: {"d_to_n", "n_to_u", "d_to_u_prime"},
        PatternKind.SIGNALING: {"d_to_n", "n_to_u", "a_to_u_prime_back_door",
                                "a_to_u_effective"},
        PatternKind.REVEAL_DENY: {"d_to_n", "n_to_u", "d_to_u_prime_front_door"},
    }
    report = enumerate_patterns(pa, original=True)
    seen = set()
    for inst in report.all_instances():
        assert {name for name, _ in inst.witness_paths} == names_by_kind[inst.kind]
        seen.add(inst.kind)
    assert seen == set(names_by_kind)


def test_bindings_dict(pa):
    report = enumerate_patterns(pa, original=True)
    for inst in report.all_instances():
        b = inst.bindings()
        assert b["u"] == inst.u
        if inst.kind is PatternKind.DIRECT_EFFECT:
            assert set(b) == {"u"}
        elif inst.kind is PatternKind.SIGNALING:
            assert set(b) == {"u", "n", "u_prime", "a"}
        else:
            assert set(b) == {"u", "n", "u_prime"}


# -- card game -----------------------------------------------------------------


def test_card_game_original_patterns(card1):
    report = enumerate_patterns(card1, original=True)
    assert keys(report.instances["A"]) == set()
    assert keys(report.instances["B"]) == {("direct_effect", "B", "U_B", "", "", "")}
    assert keys(report.instances["C"]) == {("direct_effect", "C", "U_C", "", "", "")}


def test_card_game_default_report_reflects_simplification(card1):
    report = enumerate_patterns(card1)
    # Keyed by the decisions of the input graph even though A is gone from
    # the simplified one.
    assert set(report.instances) == {"A", "B", "C"}
    assert report.instances["A"] == ()
    assert report.effectiveness == {"A": False, "B": True, "C": True}
    assert keys(report.instances["B"]) == {("direct_effect", "B", "U_B", "", "", "")}
    assert keys(report.instances["C"]) == {("direct_effect", "C", "U_C", "", "", "")}


# -- small handmade graphs -------------------------------------------------------


def test_minimal_signaling_fires(sig_min):
    report = enumerate_patterns(sig_min, original=True)
    assert keys(report.instances["d_A"]) == {
        ("signaling", "d_A", "u_A", "d_B", "u_B", "t"),
    }
    assert keys(report.instances["d_B"]) == {
        ("direct_effect", "d_B", "u_B", "", "", ""),
    }
    # Signaling is the only thing keeping d_A effective.
    assert direct_effect(sig_min, "d_A") == []
    assert manipulation(sig_min, "d_A") == []
    assert reveal_deny(sig_min, "d_A") == []
    assert decision_is_effective(sig_min, "d_A")


def test_minimal_signaling_collapses_after_pruning(sig_min):
    # Retraction drops both information edges: given the observer's own
    # action neither source says anything more about the observer's payoff.
    # That starves the signaling pattern, so the next pass eliminates d_A.
    result = simplify(sig_min)
    assert result.eliminated == ("d_A",)
    assert result.removed_edges == (("t", "d_A"), ("d_A", "d_B"))
    report = enumerate_patterns(sig_min)
    assert report.instances["d_A"] == ()
    assert report.effectiveness["d_A"] is False


def test_cascade_patterns(cascade):
    report = enumerate_patterns(cascade, original=True)
    assert keys(report.instances["dA"]) == {
        ("manipulation", "dA", "uA", "nB", "uB", ""),
    }
    assert report.instances["dC"] == ()
    assert keys(report.instances["nB"]) == {("direct_effect", "nB", "uB", "", "", "")}


def test_manipulation_needs_lever(cascade):
    # Once dC is a chance node, nB no longer leads anywhere dA cares about.
    collapsed = convert_decision_to_chance(cascade, "dC")
    assert manipulation(collapsed, "dA") == []
    assert decision_is_effective(collapsed, "dA") is False


# -- modes, flags, and errors ----------------------------------------------------


def test_first_witness_is_prefix_of_all(pa):
    for d in pa.decisions:
        for detector in ALL_DETECTORS:
            full = detector(pa, d, mode=DetectionMode.ALL)
            first = detector(pa, d, mode=DetectionMode.FIRST_WITNESS)
            assert len(first) <= 1
            assert first == full[:len(first)]
            assert bool(first) == bool(full)


def test_detectors_reject_non_decisions(pa):
    for detector in ALL_DETECTORS:
        with pytest.raises(NotADecisionError):
            detector(pa, "r0")
    with pytest.raises(NotADecisionError):
        decision_is_effective(pa, "U_P1")


def test_effectiveness_flags_mask_interior_decisions(pa):
    # Flags gate decisions appearing in the interior of a witness path, not
    # decisions standing at its endpoints (endpoint removal is conversion's
    # job). With D2 and P2 flagged off, exactly the D1 instances whose
    # witnesses route through one of them disappear.
    flags = all_effective(pa)
    flags["D2"] = False
    flags["P2"] = False
    assert keys(manipulation(pa, "D1", flags)) == {
        ("manipulation", "D1", "U_D2", "D2", "U_D1", ""),
        ("manipulation", "D1", "U_D2", "P2", "U_P1", ""),
    }
    # Both signaling instances needed an a-to-u route through D2 or P2.
    assert signaling(pa, "D1", flags) == []


def test_literal_reveal_blocking_never_fires(pa, card1, cascade, sig_min):
    # The first converging node on any front-door path out of d descends
    # from d, so excluding descendants of d from the blocking set leaves
    # every such collider closed.
    for maid in (pa, card1, cascade, sig_min):
        for d in maid.decisions:
            assert reveal_deny(maid, d, literal_blocking=True) == []


def test_literal_blocking_drops_reveal_instances(pa):
    report = enumerate_patterns(pa, original=True, literal_reveal_blocking=True)
    found = keys(report.all_instances())
    assert not any(k[0] == "reveal_deny" for k in found)
    # Everything else is untouched.
    expected = {k for ks in PA_EXPECTED.values() for k in ks if k[0] != "reveal_deny"}
    assert found == expected


# -- auditing -------------------------------------------------------------------


def test_check_instance_accepts_reported(pa, card1, cascade, sig_min):
    for maid in (pa, card1, cascade, sig_min):
        report = enumerate_patterns(maid, original=True)
        flags = all_effective(maid)
        for inst in report.all_instances():
            assert check_instance(maid, inst, flags)


def test_check_instance_rejects_tampering(pa):
    report = enumerate_patterns(pa, original=True)
    flags = all_effective(pa)
    (rev,) = [i for i in report.instances["P1"]
              if i.kind is PatternKind.REVEAL_DENY]
    # Foreign utility in the u slot.
    assert not check_instance(pa, dataclasses.replace(rev, u="U_D1"), flags)
    # n must be a decision.
    assert not check_instance(pa, dataclasses.replace(rev, n="r1"), flags)
    # u_prime must belong to n's owner.
    assert not check_instance(pa, dataclasses.replace(rev, u_prime="U_D1"), flags)
    # Witnesses from one kind do not prove another.
    assert not check_instance(
        pa, dataclasses.replace(rev, kind=PatternKind.MANIPULATION), flags)
    # A dropped witness is caught by name, not just by content.
    assert not check_instance(
        pa, dataclasses.replace(rev, witness_paths=rev.witness_paths[:-1]), flags)


def test_check_instance_rejects_misattributed_decision(pa):
    report = enumerate_patterns(pa, original=True)
    (df,) = report.instances["D2"]
    assert not check_instance(pa, dataclasses.replace(df, decision="P1"), flags := all_effective(pa))
    assert not check_instance(pa, dataclasses.replace(df, decision="type"), flags)


# -- properties over random structures -------------------------------------------


@settings(max_examples=40)
@given(seed=st.integers(0, 10_000))
def test_effectiveness_matches_detectors(seed):
    maid = helpers.random_structure_maid(random.Random(seed))
    flags = all_effective(maid)
    for d in maid.decisions:
        fired = any(detector(maid, d, flags, DetectionMode.ALL)
                    for detector in ALL_DETECTORS)
        assert decision_is_effective(maid, d, flags) == fired


@settings(max_examples=40)
@given(seed=st.integers(0, 10_000))
def test_reported_instances_audit_clean(seed):
    maid = helpers.random_structure_maid(random.Random(seed))
    report = enumerate_patterns(maid, original=True)
    flags = all_effective(maid)
    for inst in report.all_instances():
        assert check_instance(maid, inst, flags)


@settings(max_examples=25)
@given(seed=st.integers(0, 10_000))
def test_default_report_instances_audit_against_simplified(seed):
    maid = helpers.random_structure_maid(random.Random(seed))
    result = simplify(maid)
    report = enumerate_patterns(maid)
    flags = dict(result.effectiveness)
    for d, insts in report.instances.items():
        if not flags.get(d, False):
            assert insts == ()
        for inst in insts:
            assert check_instance(result.final, inst, flags)
