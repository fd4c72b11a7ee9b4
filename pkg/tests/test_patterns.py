import pytest
from hypothesis import given, settings, strategies as st

from nets import net_gh, net_dgh
from randomnets import random_rule_sequence
from synthminer.patterns import (
    LOOP_STRICT,
    LOOP_TAU,
    NONE,
    CandidateNet,
    SKIP,
    SKIP_LOOP,
    candidate_set,
    dedupe,
    loop_strict,
    loop_tau,
    skip,
    skip_loop,
)
from synthminer.petri_net import canonical_form, initial_net, is_free_choice, is_sound, is_workflow_net, language
from synthminer.synthesis import EnumerationCaps, RuleError


def test_skip_adds_silent_twin():
    a = net_dgh()
    b = skip(a, "d")
    assert b.transitions - a.transitions == {"t4"}
    assert b.places == a.places
    assert b.is_silent("t4")
    assert b.preset("t4") == a.preset("t3") and b.postset("t4") == a.postset("t3")
    assert is_sound(b)


def test_skip_is_idempotent():
    b = skip(net_dgh(), "d")
    assert skip(b, "d") == b


def test_patterns_need_exactly_one_labeled_transition():
    with pytest.raises(RuleError):
        skip(net_dgh(), "x")
    with pytest.raises(RuleError):
        loop_strict(initial_net(), "a")
    with pytest.raises(RuleError):
        loop_tau(net_dgh(), "zz")


def test_loop_strict_reroute_case():
    a = net_dgh()
    # t3's output p4 feeds t1, which also consumes p2
    assert a.postset("t3") == {"p4"} and a.preset("t1") == {"p2", "p4"}
    d = loop_strict(a, "d")
    assert d.places - a.places == {"p6"}
    assert d.transitions - a.transitions == {"t4", "t5"}
    assert {("t3", "p6"), ("p6", "t4"), ("t4", "p4")} <= d.arcs
    assert d.preset("t5") == {"p6"} and d.postset("t5") == {"p5"}
    assert d.is_silent("t4") and d.is_silent("t5") and d.labels["t3"] == "d"
    assert is_sound(d) and is_free_choice(d)


def test_loop_strict_first_case():
    c = net_gh()
    out = loop_strict(c, "g")
    assert out.places == c.places
    (back,) = out.transitions - c.transitions
    assert out.preset(back) == c.postset("t2") and out.postset(back) == c.preset("t2")
    assert ("g", "g", "h") in language(out, 3)


def test_loop_tau_swaps_labels():
    a = net_dgh()
    s, t = loop_strict(a, "d"), loop_tau(a, "d")
    assert s.arcs == t.arcs
    assert t.labels["t5"] == "d" and "t3" not in t.labels
    assert sorted(t.labels.values()) == sorted(a.labels.values())
    lang = language(t, 5)
    assert ("g", "h") in lang  # zero times
    assert ("d", "g", "h") in lang and ("d", "d", "g", "h") in lang


def test_skip_loop_allows_zero_or_more():
    out = skip_loop(net_dgh(), "d")
    lang = language(out, 5)
    assert {("g", "h"), ("d", "g", "h"), ("d", "d", "g", "h")} <= lang
    assert is_sound(out)


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_patterns_preserve_structure_and_language(seed):
    nets, _ = random_rule_sequence(seed, 5)
    w = nets[-1]
    base = language(w, 5)
    for a in sorted(set(w.labels.values())):
        if len(w.transitions_labeled(a)) != 1:
            continue
        sk, ls = skip(w, a), loop_strict(w, a)
        for out in (sk, ls, loop_tau(w, a), skip_loop(w, a)):
            assert is_workflow_net(out) and is_free_choice(out) and is_sound(out)
        assert base <= language(sk, 5)
        assert base <= language(ls, 5)
        # skip adds one transition; loop adds one, or two plus a place
        assert len(sk.transitions) - len(w.transitions) in (0, 1) and sk.places == w.places
        added = (len(ls.transitions) - len(w.transitions), len(ls.places) - len(w.places))
        assert added in ((1, 0), (2, 1))
        assert len([t for t in ls.transitions if ls.is_silent(t)]) - len(
            [t for t in w.transitions if w.is_silent(t)]) == added[0]


def test_candidate_set_iteration_three_contains_pattern_nets():
    c = net_gh()
    V = {"start", "p3", "t2", "p2", "t1"}
    cands = candidate_set(c, V, "d")
    keys = {x.key for x in cands}
    a = net_dgh()
    for net in (a, skip(a, "d"), loop_strict(a, "d"), loop_tau(a, "d"), skip_loop(a, "d")):
        assert canonical_form(net) in keys
    assert {x.pattern for x in cands} == {NONE, SKIP, LOOP_STRICT, LOOP_TAU, SKIP_LOOP}
    assert len(keys) == len(cands)
    for x in cands:
        assert len(x.net.transitions_labeled("d")) == 1
        assert is_free_choice(x.net) and is_workflow_net(x.net)


def test_candidate_set_edge_cases():
    w = initial_net()
    assert candidate_set(w, w.nodes, "a")
    assert candidate_set(w, w.nodes, "a", EnumerationCaps(max_candidates=0)) == []
    assert len(candidate_set(net_gh(), net_gh().nodes, "d", EnumerationCaps(max_candidates=3))) == 3


def test_dedupe_keeps_first_of_each_class():
    a = net_dgh()
    x = CandidateNet(a, None, NONE, origin="first")
    y = CandidateNet(net_gh(), None, NONE)
    z = CandidateNet(a, None, SKIP, origin="second")
    out = dedupe([x, y, z])
    assert len(out) == 2 and x in out and all(c.origin != "second" for c in out)
