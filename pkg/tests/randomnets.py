"""Seeded generators of random nets and logs for property tests."""

import random

from synthminer.event_log import EventLog
from synthminer.patterns import PATTERN_FUNCTIONS
from synthminer.petri_net import LabeledNet, initial_net
from synthminer.synthesis import EnumerationCaps, RuleError, apply_place_rule, iter_rule_applications

SMALL_CAPS = EnumerationCaps(max_abstraction_set=2, max_linear_set=2)
LETTERS = "abcdefghijklmnop"


def random_step(rng: random.Random, w, label):
    """One random rule or pattern application; returns ``(net, description)``
    or None when the drawn application does not apply."""
    labeled = sorted(w.labels.values())
    kind = rng.choice(["rule", "rule", "rule", "place"] + (["pattern"] if labeled else []))
    if kind == "pattern":
        name = rng.choice(sorted(PATTERN_FUNCTIONS))
        a = rng.choice(labeled)
        try:
            return PATTERN_FUNCTIONS[name](w, a), f"{name}({a})"
        except RuleError:
            return None
    if kind == "place":
        ts = sorted(w.transitions)
        pre = rng.sample(ts, rng.randint(1, min(2, len(ts))))
        post = rng.sample(ts, rng.randint(1, min(2, len(ts))))
        try:
            return apply_place_rule(w, pre, post), f"place({pre},{post})"
        except RuleError:
            return None
    apps = list(iter_rule_applications(w, w.nodes, label, SMALL_CAPS))
    if not apps:
        return None
    app = rng.choice(apps)
    try:
        return app.apply(w), f"{app.kind}{app.to_json()}"
    except RuleError:
        return None


def random_rule_sequence(seed: int, length: int):
    """Nets visited by up to ``length`` random applications starting from the
    initial net, with the applied steps described."""
    rng = random.Random(seed)
    w = initial_net()
    nets, steps = [w], []
    fresh = iter(LETTERS)
    attempts = 0
    while len(steps) < length and attempts < 6 * length:
        attempts += 1
        label = next(fresh, None) if rng.random() < 0.8 else None
        out = random_step(rng, w, label)
        if out is None:
            continue
        w, desc = out
        nets.append(w)
        steps.append(desc)
    return nets, steps


def random_labeled_net(rng: random.Random, max_places=5, max_transitions=5, density=0.3) -> LabeledNet:
    places = [f"p{i}" for i in range(rng.randint(1, max_places))]
    transitions = [f"t{i}" for i in range(rng.randint(1, max_transitions))]
    arcs = set()
    for p in places:
        for t in transitions:
            if rng.random() < density:
                arcs.add((p, t))
            if rng.random() < density:
                arcs.add((t, p))
    labels = {t: rng.choice("abc") for t in transitions if rng.random() < 0.7}
    return LabeledNet(places, transitions, arcs, labels)


def random_log(rng: random.Random, max_activities=6, max_traces=50, max_len=6) -> EventLog:
    acts = LETTERS[: rng.randint(1, max_activities)]
    n = rng.randint(1, max_traces)
    traces = []
    for _ in range(n):
        k = rng.randint(1, max_len)
        traces.append(tuple(rng.choice(acts) for _ in range(k)))
    log = EventLog(traces)
    return log


def small_random_net(seed: int, max_nodes=10):
    """The last net of a random rule sequence that still has at most
    ``max_nodes`` nodes."""
    nets, _ = random_rule_sequence(seed, 4)
    return [n for n in nets if n.size() <= max_nodes][-1]
