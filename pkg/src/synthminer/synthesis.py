"""Free-choice synthesis rules and their constrained enumeration.

Every rule returns a new :class:`WorkflowNet` and re-checks the free-choice
and workflow-net conditions on the result; a violated precondition raises
:class:`RuleError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import linalg
from .petri_net import (
    IncidenceMatrix,
    NetStructureError,
    WorkflowNet,
    canonical_form,
    check_structure,
    fresh_place,
    fresh_transition,
    incidence,
    max_siphon_within,
    short_circuit,
)

ABSTRACTION = "abstraction"
DUAL_ABSTRACTION = "dual_abstraction"
PLACE = "place"
TRANSITION = "transition"
EXTENDED_PLACE = "extended_place"


class RuleError(NetStructureError):
    """A synthesis rule cannot be applied with the given arguments."""


@dataclass(frozen=True)
class RuleApplication:
    kind: str
    R: frozenset = frozenset()  # transitions (abstraction / dual abstraction)
    S: frozenset = frozenset()  # places (abstraction / dual abstraction)
    preset: frozenset = frozenset()
    postset: frozenset = frozenset()
    label: str | None = None

    def to_json(self) -> dict:
        out = {"rule": self.kind, "label": self.label}
        if self.kind in (ABSTRACTION, DUAL_ABSTRACTION):
            out["R"] = sorted(self.R)
            out["S"] = sorted(self.S)
        else:
            out["preset"] = sorted(self.preset)
            out["postset"] = sorted(self.postset)
        return out

    def apply(self, w: WorkflowNet) -> WorkflowNet:
        if self.kind == ABSTRACTION:
            return apply_abstraction(w, self.R, self.S, self.label)
        if self.kind == DUAL_ABSTRACTION:
            return apply_dual_abstraction(w, self.S, self.R, self.label)
        if self.kind == PLACE:
            return apply_place_rule(w, self.preset, self.postset)
        if self.kind == TRANSITION:
            return apply_transition_rule(w, self.preset, self.postset, self.label)
        if self.kind == EXTENDED_PLACE:
            return apply_extended_place_rule(w, self.preset, self.postset, self.label)
        raise ValueError(f"unknown rule kind {self.kind!r}")


@dataclass(frozen=True)
class EnumerationCaps:
    max_abstraction_set: int = 4  # |R|, |S| for abstraction and dual abstraction
    max_linear_set: int = 3  # preset/postset sizes for transition and extended place rules
    max_candidates: int = 5000
    allow_self_loops: bool = False


# ------------------------------------------------------------ linear dependence


def sc_incidence(w: WorkflowNet) -> IncidenceMatrix:
    return incidence(short_circuit(w))


def _as_vector(values, index: Sequence) -> list:
    if isinstance(values, Mapping):
        unknown = set(values) - set(index)
        if unknown:
            raise ValueError(f"dimension mismatch: unknown indices {sorted(unknown)}")
        return [values.get(i, 0) for i in index]
    values = list(values)
    if len(values) != len(index):
        raise ValueError(f"dimension mismatch: expected {len(index)} entries, got {len(values)}")
    return values


def is_linearly_dependent_place(inc: IncidenceMatrix, new_row) -> bool:
    """Is ``new_row`` (indexed by ``inc.transitions``, or a mapping
    transition -> value) a rational combination of the existing place rows?"""
    return linalg.in_row_space(inc.rows, _as_vector(new_row, inc.transitions))


def is_linearly_dependent_transition(inc: IncidenceMatrix, new_column) -> bool:
    return linalg.in_column_space(inc.rows, _as_vector(new_column, inc.places))


def _place_row(inc: IncidenceMatrix, preset, postset) -> list:
    return [(t in preset) - (t in postset) for t in inc.transitions]


def _transition_column(inc: IncidenceMatrix, preset, postset) -> list:
    return [(p in postset) - (p in preset) for p in inc.places]


# ------------------------------------------------------------ rules


def _checked(w: WorkflowNet) -> WorkflowNet:
    try:
        check_structure(w)
    except RuleError:
        raise
    except NetStructureError as exc:
        raise RuleError(str(exc)) from None
    return w


def _with_label(w: WorkflowNet, t, label) -> dict:
    labels = dict(w.labels)
    if label is not None:
        labels[t] = label
    return labels


def apply_abstraction(w: WorkflowNet, R: Iterable, S: Iterable, label=None) -> WorkflowNet:
    R, S = frozenset(R), frozenset(S)
    if not R or not S:
        raise RuleError("abstraction needs non-empty R and S")
    if not R <= w.transitions or not S <= w.places:
        raise RuleError("R must be transitions and S places of the net")
    rs = {(r, s) for r in R for s in S}
    if not rs <= w.arcs:
        raise RuleError(f"R x S is not contained in the arcs: missing {sorted(rs - w.arcs)}")
    p, t = fresh_place(w), fresh_transition(w)
    new = w.evolve(
        add_places={p},
        add_transitions={t},
        remove_arcs=rs,
        add_arcs={(r, p) for r in R} | {(p, t)} | {(t, s) for s in S},
        labels=_with_label(w, t, label),
    )
    return _checked(new)


def apply_dual_abstraction(w: WorkflowNet, S: Iterable, R: Iterable, label=None) -> WorkflowNet:
    S, R = frozenset(S), frozenset(R)
    if not R or not S:
        raise RuleError("dual abstraction needs non-empty S and R")
    if not R <= w.transitions or not S <= w.places:
        raise RuleError("R must be transitions and S places of the net")
    sr = {(s, r) for s in S for r in R}
    if not sr <= w.arcs:
        raise RuleError(f"S x R is not contained in the arcs: missing {sorted(sr - w.arcs)}")
    # only these two shapes keep the net free-choice
    if S != w.preset_of(R) and R != w.postset_of(S):
        raise RuleError("dual abstraction requires S = preset(R) or R = postset(S)")
    t, p = fresh_transition(w), fresh_place(w)
    new = w.evolve(
        add_places={p},
        add_transitions={t},
        remove_arcs=sr,
        add_arcs={(s, t) for s in S} | {(t, p)} | {(p, r) for r in R},
        labels=_with_label(w, t, label),
    )
    return _checked(new)


def _place_rule(w: WorkflowNet, preset, postset, allow_self_loops=False):
    preset, postset = frozenset(preset), frozenset(postset)
    if not preset | postset:
        raise RuleError("the new place needs at least one arc")
    if not (preset | postset) <= w.transitions:
        raise RuleError("place rule arcs must connect to existing transitions")
    if preset & postset and not allow_self_loops:
        raise RuleError(f"self-loop arcs with {sorted(preset & postset)}")
    inc = sc_incidence(w)
    if not is_linearly_dependent_place(inc, _place_row(inc, preset, postset)):
        raise RuleError("the new place is not linearly dependent")
    p = fresh_place(w)
    new = w.evolve(add_places={p}, add_arcs={(t, p) for t in preset} | {(p, t) for t in postset})
    sc = short_circuit(new)
    bad = max_siphon_within(sc, sc.places - {new.source})
    if bad:
        raise RuleError(f"siphon without the source place: {sorted(bad)}")
    return _checked(new), p


def apply_place_rule(w: WorkflowNet, preset: Iterable, postset: Iterable, allow_self_loops=False) -> WorkflowNet:
    return _place_rule(w, preset, postset, allow_self_loops)[0]


def apply_transition_rule(w: WorkflowNet, preset: Iterable, postset: Iterable, label=None,
                          allow_self_loops=False) -> WorkflowNet:
    preset, postset = frozenset(preset), frozenset(postset)
    if not preset | postset:
        raise RuleError("the new transition needs at least one arc")
    if not (preset | postset) <= w.places:
        raise RuleError("transition rule arcs must connect to existing places")
    if preset & postset and not allow_self_loops:
        raise RuleError(f"self-loop arcs with {sorted(preset & postset)}")
    inc = sc_incidence(w)
    if not is_linearly_dependent_transition(inc, _transition_column(inc, preset, postset)):
        raise RuleError("the new transition is not linearly dependent")
    t = fresh_transition(w)
    new = w.evolve(
        add_transitions={t},
        add_arcs={(p, t) for p in preset} | {(t, p) for p in postset},
        labels=_with_label(w, t, label),
    )
    return _checked(new)


def apply_extended_place_rule(w: WorkflowNet, preset: Iterable, postset: Iterable, label=None,
                              allow_self_loops=False) -> WorkflowNet:
    """Place rule immediately followed by an abstraction between the new
    place and its whole preset; the new transition carries ``label``."""
    preset = frozenset(preset)
    if not preset:
        raise RuleError("extended place rule needs a non-empty preset")
    mid, p = _place_rule(w, preset, postset, allow_self_loops)
    new = apply_abstraction(mid, preset, {p}, label)
    (t,) = new.transitions - w.transitions
    assert new.preset(p) == {t}
    return new


# ------------------------------------------------------------ enumeration


def _subsets(items: Sequence, max_size: int):
    for k in range(1, min(max_size, len(items)) + 1):
        yield from combinations(items, k)


def _orthogonal(basis, vec) -> bool:
    return linalg.orthogonal_to_all(basis, vec)


def iter_rule_applications(w: WorkflowNet, V: Iterable, label, caps: EnumerationCaps = EnumerationCaps()):
    """Candidate :class:`RuleApplication` objects that introduce one
    transition labeled ``label`` while touching only nodes in ``V``.

    Cheap necessary conditions (arc containment, free-choice shape, linear
    dependence via invariant orthogonality) are checked here; applying the
    rule performs the full checks.
    """
    V = frozenset(V)
    VP = sorted(V & w.places)
    VT = sorted(V & w.transitions)
    k_abs, k_lin = caps.max_abstraction_set, caps.max_linear_set

    # abstraction: S places in V, R a subset of their common preset within V
    for S in _subsets([p for p in VP if p != w.sink], k_abs):
        common = frozenset(VT).intersection(*(w.preset(s) for s in S))
        for R in _subsets(sorted(common), k_abs):
            yield RuleApplication(ABSTRACTION, R=frozenset(R), S=frozenset(S), label=label)

    inc = sc_incidence(w)
    t_invariants = linalg.null_space(inc.rows, len(inc.transitions))
    p_invariants = linalg.left_null_space(inc.rows, len(inc.transitions))

    clusters: dict = {}
    for t in sorted(w.transitions):
        clusters.setdefault(w.preset(t), []).append(t)

    # extended place rule: postset must be a whole cluster to stay free-choice
    for Y in (frozenset(ts) for pre, ts in clusters.items() if w.source not in pre):
        if not Y <= V or len(Y) > k_lin:
            continue
        for X in _subsets([t for t in VT if t != w.end], k_lin):
            X = frozenset(X)
            if X & Y and not caps.allow_self_loops:
                continue
            if _orthogonal(t_invariants, _place_row(inc, X, Y)):
                yield RuleApplication(EXTENDED_PLACE, preset=X, postset=Y, label=label)

    # transition rule: the preset must equal an existing preset to stay free-choice
    inner = [p for p in VP if p not in (w.source, w.sink)]
    for pre in sorted(clusters, key=sorted):
        if w.source in pre or not pre <= V or len(pre) > k_lin:
            continue
        for post in _subsets(inner, k_lin):
            post = frozenset(post)
            if pre & post and not caps.allow_self_loops:
                continue
            if _orthogonal(p_invariants, _transition_column(inc, pre, post)):
                yield RuleApplication(TRANSITION, preset=pre, postset=post, label=label)

    # dual abstraction: S = preset(R) or R = postset(S)
    seen = set()
    for pre, ts in sorted(clusters.items(), key=lambda kv: sorted(kv[0])):
        if w.source in pre or not pre <= V or len(pre) > k_abs:
            continue
        for R in _subsets([t for t in ts if t in V], k_abs):
            key = (pre, frozenset(R))
            if key not in seen:
                seen.add(key)
                yield RuleApplication(DUAL_ABSTRACTION, R=frozenset(R), S=pre, label=label)
    by_post: dict = {}
    for p in VP:
        if p != w.source and w.postset(p):
            by_post.setdefault(w.postset(p), []).append(p)
    for post, ps in sorted(by_post.items(), key=lambda kv: sorted(kv[0])):
        if not post <= V or len(post) > k_abs:
            continue
        for S in _subsets(ps, k_abs):
            key = (frozenset(S), post)
            if key not in seen:
                seen.add(key)
                yield RuleApplication(DUAL_ABSTRACTION, R=post, S=frozenset(S), label=label)


def enumerate_applications(w: WorkflowNet, V: Iterable, label, caps: EnumerationCaps = EnumerationCaps()) -> list:
    """All distinct nets reachable by one constrained application of the
    abstraction, extended place, transition or dual abstraction rule, as
    ``(RuleApplication, WorkflowNet)`` pairs in canonical order."""
    V = frozenset(V)
    if caps.max_candidates <= 0 or not V:
        return []
    found = {}
    for app in iter_rule_applications(w, V, label, caps):
        try:
            net = app.apply(w) if not caps.allow_self_loops else _apply_loose(app, w)
        except RuleError:
            continue
        key = canonical_form(net)
        if key not in found:
            found[key] = (app, net)
    keys = sorted(found)[: caps.max_candidates]
    return [found[k] for k in keys]


def _apply_loose(app: RuleApplication, w: WorkflowNet) -> WorkflowNet:
    if app.kind == TRANSITION:
        return apply_transition_rule(w, app.preset, app.postset, app.label, allow_self_loops=True)
    if app.kind == EXTENDED_PLACE:
        return apply_extended_place_rule(w, app.preset, app.postset, app.label, allow_self_loops=True)
    return app.apply(w)
