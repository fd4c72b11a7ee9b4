import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nets import L3_S, L_S, reference_net, net_gh, net_dgh
from oracles import exhaustive_cost
from randomnets import random_rule_sequence, small_random_net
from synthminer.conformance import (
    LOG,
    MODEL_SILENT,
    MODEL_VISIBLE,
    SYNC,
    empty_trace_cost,
    evaluate,
    f1,
    fitness,
    optimal_alignment,
    precision,
    trace_fitness,
)
from synthminer.event_log import EventLog
from synthminer.patterns import loop_strict, skip
from synthminer.petri_net import InconclusiveError, WorkflowNet, initial_net, language


def check_alignment(w, trace, al):
    assert tuple(m.activity for m in al.moves if m.kind in (SYNC, LOG)) == tuple(trace)
    cn = w.compiled
    m = cn.marking([w.source])
    for t in al.model_transitions:
        k = cn.tidx[t]
        assert k in cn.enabled(m)
        m = cn.fire(m, k)
    assert m == cn.marking([w.sink])
    for move in al.moves:
        if move.kind == SYNC:
            assert w.label(move.transition) == move.activity
        elif move.kind == LOG:
            assert move.transition is None
        else:
            assert move.activity is None
            assert w.is_silent(move.transition) == (move.kind == MODEL_SILENT)
    assert al.cost == sum(mv.kind in (LOG, MODEL_VISIBLE) for mv in al.moves)


def test_initial_net_alignments():
    w = initial_net()
    al = optimal_alignment(w, ())
    assert al.cost == 0
    assert [(m.kind, m.transition) for m in al.moves] == [(MODEL_SILENT, "start"), (MODEL_SILENT, "end")]
    assert optimal_alignment(w, ("x",)).cost == 1


def test_running_example_trace_is_replayed():
    assert optimal_alignment(reference_net(), tuple("abcdefgh")).cost == 0
    assert fitness(reference_net(), L_S) == 1


def test_fitness_examples():
    assert fitness(initial_net(), EventLog({("x",): 1})) == 0
    assert fitness(initial_net(), EventLog({(): 1})) == 1
    assert fitness(initial_net(), EventLog()) == 1
    # one missing and one extra event against g h
    assert trace_fitness(net_gh(), ("h", "x")) == 1 - Fraction(2, 4)


def test_empty_trace_cost():
    assert empty_trace_cost(net_gh()) == 2
    assert empty_trace_cost(skip(net_gh(), "g")) == 1


def test_unknown_activities_are_log_moves():
    al = optimal_alignment(net_gh(), ("g", "zz", "h"))
    assert al.cost == 1
    assert [m.kind for m in al.moves if m.activity == "zz"] == [LOG]


def test_alignment_is_deterministic():
    a = optimal_alignment(net_dgh(), ("h", "d"))
    b = optimal_alignment(WorkflowNet(*[getattr(net_dgh(), f) for f in ("places", "transitions", "arcs", "labels")]),
                          ("h", "d"))
    assert a == b


def test_state_cap():
    with pytest.raises(InconclusiveError):
        optimal_alignment(reference_net(), tuple("hgfedcba"), state_cap=5)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_alignment_matches_exhaustive_oracle(seed):
    rng = random.Random(seed)
    w = small_random_net(seed)
    acts = sorted(set(w.labels.values())) + ["z"]
    trace = tuple(rng.choice(acts) for _ in range(rng.randint(0, 6)))
    al = optimal_alignment(w, trace)
    check_alignment(w, trace, al)
    assert al.cost == exhaustive_cost(w, trace)
    assert (al.cost == 0) == (trace in language(w, len(trace)))


def test_precision_examples():
    seq = net_gh()
    assert precision(seq, EventLog({("g", "h"): 3})) == 1
    assert precision(seq, EventLog()) == 1
    assert precision(net_dgh(), L3_S) == 1  # language equals the log's variants
    assert evaluate(initial_net(), EventLog({(): 1})).precision == 1


def flower():
    arcs = {("ps", "start"), ("start", "p1"), ("p1", "end"), ("end", "pe")}
    for t in "abc":
        arcs |= {("p1", t), (t, "p1")}
    return WorkflowNet({"ps", "p1", "pe"}, {"start", "end", "a", "b", "c"}, arcs, {t: t for t in "abc"})


def test_flower_precision_by_hand():
    # four states (prefixes <>, <a>, <a,b>, <a,b,c>) each enable {a,b,c};
    # one activity is observed after each of the first three, none after the last
    assert precision(flower(), EventLog({("a", "b", "c"): 1})) == Fraction(1, 4)
    assert fitness(flower(), EventLog({("a", "b", "c"): 1})) == 1


def test_precision_counts_history():
    # two traces pass through the same marking with different pasts
    log = EventLog({("g", "d", "h"): 1, ("d", "g", "h"): 1})
    loose = skip(net_dgh(), "d")
    assert precision(loose, log) < 1


def test_f1():
    assert f1(Fraction(1), Fraction(1)) == 1
    assert f1(Fraction(1), Fraction(0)) == 0
    assert f1(Fraction(0), Fraction(0)) == 0
    assert round(float(f1(Fraction("0.989"), Fraction("0.935"))), 3) == 0.961


@pytest.mark.parametrize("log", [L3_S, EventLog({("d", "g", "h"): 2, ("g", "h"): 1})])
def test_patterns_do_not_lower_fitness_on_fixtures(log):
    w = net_dgh()
    base = fitness(w, log)
    assert fitness(skip(w, "d"), log) >= base
    assert fitness(loop_strict(w, "d"), log) >= base


def test_skip_can_lower_normalised_fitness():
    # skipping d makes the empty trace cheaper, which shrinks the denominator
    # while the cost of <d,d,g,h> stays 1
    w, log = net_dgh(), EventLog({("d", "d", "g", "h"): 1})
    assert fitness(w, log) == Fraction(6, 7)
    assert fitness(skip(w, "d"), log) == Fraction(5, 6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_patterns_never_raise_alignment_cost(seed):
    rng = random.Random(seed)
    w = small_random_net(seed)
    acts = sorted(set(w.labels.values()))
    if not acts:
        return
    a = rng.choice(acts)
    trace = tuple(rng.choice(acts) for _ in range(rng.randint(0, 6)))
    cost = optimal_alignment(w, trace).cost
    for pattern in (skip, loop_strict):
        assert optimal_alignment(pattern(w, a), trace).cost <= cost


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_scores_in_unit_interval(seed):
    rng = random.Random(seed)
    nets, _ = random_rule_sequence(seed, 5)
    w = nets[-1]
    acts = sorted(set(w.labels.values())) or ["a"]
    log = EventLog([tuple(rng.choice(acts) for _ in range(rng.randint(0, 5))) for _ in range(5)])
    s = evaluate(w, log)
    for v in (s.fitness, s.precision, s.f1):
        assert 0 <= v <= 1
