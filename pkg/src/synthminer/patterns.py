"""Skip and loop patterns for a labeled transition, and assembly of the
per-iteration candidate set."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .petri_net import WorkflowNet, canonical_form
from .synthesis import (
    EnumerationCaps,
    RuleApplication,
    RuleError,
    apply_abstraction,
    apply_transition_rule,
    enumerate_applications,
)

NONE = "none"
SKIP = "skip"
LOOP_STRICT = "loop_strict"
LOOP_TAU = "loop_tau"
SKIP_LOOP = "skip+loop"
PATTERNS = (NONE, SKIP, LOOP_STRICT, LOOP_TAU, SKIP_LOOP)


@dataclass
class CandidateNet:
    net: WorkflowNet
    rule: RuleApplication | None
    pattern: str = NONE
    fitness: Fraction | None = None
    precision: Fraction | None = None
    f1: Fraction | None = None
    origin: str = field(default="", compare=False)

    @cached_property
    def key(self) -> tuple:
        return canonical_form(self.net)

    def provenance(self) -> dict:
        out = {"pattern": self.pattern}
        out.update(self.rule.to_json() if self.rule else {"rule": None})
        return out


def labeled_transition(w: WorkflowNet, a) -> str:
    ts = w.transitions_labeled(a)
    if len(ts) != 1:
        raise RuleError(f"expected exactly one transition labeled {a!r}, found {len(ts)}")
    return ts[0]


def skip(w: WorkflowNet, a) -> WorkflowNet:
    """Add a silent transition with the same preset and postset as the
    transition labeled ``a``. A no-op if such a silent twin already exists."""
    t = labeled_transition(w, a)
    pre, post = w.preset(t), w.postset(t)
    for u in w.transitions:
        if w.is_silent(u) and w.preset(u) == pre and w.postset(u) == post:
            return w
    return apply_transition_rule(w, pre, post)


def _needs_reroute(w: WorkflowNet, t) -> bool:
    # A back-transition consuming t's postset is free-choice only if every
    # consumer of those places has exactly that postset as its preset. This
    # covers the published guard (|•t*| > 1 and •t* \ t• ≠ ∅) and the
    # remaining shapes where the direct back-arc would break free choice.
    post = w.postset(t)
    return any(w.preset(x) != post for x in w.postset_of(post))


def _loop(w: WorkflowNet, a, swap_labels: bool) -> WorkflowNet:
    t = labeled_transition(w, a)
    if _needs_reroute(w, t):
        w = apply_abstraction(w, {t}, w.postset(t))
        assert not _needs_reroute(w, t)
    new = apply_transition_rule(w, w.postset(t), w.preset(t))
    if swap_labels:
        (back,) = new.transitions - w.transitions
        labels = dict(new.labels)
        del labels[t]
        labels[back] = a
        new = new.evolve(labels=labels)
    return new


def loop_strict(w: WorkflowNet, a) -> WorkflowNet:
    """Put the ``a`` transition in a loop with a silent back-transition, so
    ``a`` runs one or more times."""
    return _loop(w, a, swap_labels=False)


def loop_tau(w: WorkflowNet, a) -> WorkflowNet:
    """Same skeleton as :func:`loop_strict` but ``a`` sits on the back
    transition, so it runs zero or more times."""
    return _loop(w, a, swap_labels=True)


def skip_loop(w: WorkflowNet, a) -> WorkflowNet:
    return loop_strict(skip(w, a), a)


PATTERN_FUNCTIONS = {SKIP: skip, LOOP_STRICT: loop_strict, LOOP_TAU: loop_tau, SKIP_LOOP: skip_loop}


def expand_patterns(base: Iterable, a) -> list:
    """Apply every pattern to every base ``(RuleApplication, net)`` pair.
    Patterns that fail their structural checks are dropped."""
    out = []
    for app, net in base:
        out.append(CandidateNet(net, app, NONE))
        for name, fn in PATTERN_FUNCTIONS.items():
            try:
                out.append(CandidateNet(fn(net, a), app, name))
            except RuleError:
                continue
    return out


def dedupe(candidates: Iterable, limit: int | None = None) -> list:
    """Keep the first candidate of each isomorphism class, returned in
    canonical order (optionally truncated)."""
    seen = {}
    for c in candidates:
        seen.setdefault(c.key, c)
    keys = sorted(seen)
    if limit is not None:
        keys = keys[:limit]
    return [seen[k] for k in keys]


def candidate_set(w: WorkflowNet, V: Iterable, a, caps: EnumerationCaps = EnumerationCaps()) -> list:
    if caps.max_candidates <= 0:
        return []
    base = enumerate_applications(w, V, a, caps)
    return dedupe(expand_patterns(base, a), caps.max_candidates)
