"""Labeled Petri nets and workflow nets.

Nets are immutable values. Node ids are plain strings; rule applications
keep every existing id and name new nodes ``p<k>`` / ``t<k>`` with the
smallest unused ``k``, so names are predictable from the sequence of
applications (``p2``, ``t1``, ...).
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 100_000


class InconclusiveError(RuntimeError):
    """A state-space exploration exceeded its cap before reaching a verdict."""


class NetStructureError(ValueError):
    """A net violates a structural requirement (bipartiteness, free choice,
    workflow-net conditions, ...)."""


@dataclass(frozen=True)
class LabeledNet:
    places: frozenset
    transitions: frozenset
    arcs: frozenset
    labels: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "places", frozenset(self.places))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))
        object.__setattr__(self, "labels", {t: l for t, l in dict(self.labels).items() if l is not None})
        if self.places & self.transitions:
            raise NetStructureError(f"ids used as both place and transition: {sorted(self.places & self.transitions)}")
        for x, y in self.arcs:
            if not ((x in self.places and y in self.transitions) or (x in self.transitions and y in self.places)):
                raise NetStructureError(f"arc ({x}, {y}) does not connect a place and a transition")
        extra = set(self.labels) - self.transitions
        if extra:
            raise NetStructureError(f"labels on unknown transitions: {sorted(extra)}")

    def __hash__(self):
        return hash((self.places, self.transitions, self.arcs, frozenset(self.labels.items())))

    @property
    def nodes(self) -> frozenset:
        return self.places | self.transitions

    @cached_property
    def _pre(self) -> dict:
        pre = {x: set() for x in self.nodes}
        for x, y in self.arcs:
            pre[y].add(x)
        return {x: frozenset(s) for x, s in pre.items()}

    @cached_property
    def _post(self) -> dict:
        post = {x: set() for x in self.nodes}
        for x, y in self.arcs:
            post[x].add(y)
        return {x: frozenset(s) for x, s in post.items()}

    def preset(self, x) -> frozenset:
        return self._pre[x]

    def postset(self, x) -> frozenset:
        return self._post[x]

    def preset_of(self, xs: Iterable) -> frozenset:
        return frozenset().union(*(self._pre[x] for x in xs))

    def postset_of(self, xs: Iterable) -> frozenset:
        return frozenset().union(*(self._post[x] for x in xs))

    def label(self, t):
        return self.labels.get(t)

    def is_silent(self, t) -> bool:
        return t not in self.labels

    def transitions_labeled(self, activity) -> list:
        return sorted(t for t, l in self.labels.items() if l == activity)

    @cached_property
    def compiled(self) -> "CompiledNet":
        return CompiledNet(self)

    @property
    def net(self) -> "LabeledNet":
        return LabeledNet(self.places, self.transitions, self.arcs, self.labels)

    def size(self) -> int:
        return len(self.places) + len(self.transitions)


@dataclass(frozen=True)
class WorkflowNet(LabeledNet):
    source: str = "ps"
    sink: str = "pe"
    start: str = "start"
    end: str = "end"

    def __hash__(self):
        return hash((LabeledNet.__hash__(self), self.source, self.sink, self.start, self.end))

    @property
    def roles(self) -> tuple:
        return (self.source, self.sink, self.start, self.end)

    def evolve(self, add_places=(), add_transitions=(), add_arcs=(), remove_arcs=(),
               labels: Mapping | None = None) -> "WorkflowNet":
        """A copy with nodes/arcs added or removed and labels replaced."""
        remove_arcs = set(remove_arcs)
        missing = remove_arcs - self.arcs
        if missing:
            raise NetStructureError(f"cannot remove absent arcs {sorted(missing)}")
        return WorkflowNet(
            self.places | set(add_places),
            self.transitions | set(add_transitions),
            (self.arcs - remove_arcs) | set(add_arcs),
            self.labels if labels is None else labels,
            *self.roles,
        )


def _fresh(prefix: str, taken: frozenset) -> str:
    k = 1
    while f"{prefix}{k}" in taken:
        k += 1
    return f"{prefix}{k}"


def fresh_place(net: LabeledNet, also_taken=()) -> str:
    return _fresh("p", net.nodes | set(also_taken))


def fresh_transition(net: LabeledNet, also_taken=()) -> str:
    return _fresh("t", net.nodes | set(also_taken))


def initial_net() -> WorkflowNet:
    return WorkflowNet(
        {"ps", "p1", "pe"},
        {"start", "end"},
        {("ps", "start"), ("start", "p1"), ("p1", "end"), ("end", "pe")},
        {},
    )


# ------------------------------------------------------------ structure


def free_choice_violations(net: LabeledNet) -> list:
    """Pairs of transitions whose presets overlap without being equal."""
    bad = []
    by_place: dict = {}
    for t in net.transitions:
        for p in net.preset(t):
            by_place.setdefault(p, []).append(t)
    seen = set()
    for p, ts in by_place.items():
        ts = sorted(ts)
        for i, t1 in enumerate(ts):
            for t2 in ts[i + 1:]:
                if (t1, t2) not in seen and net.preset(t1) != net.preset(t2):
                    seen.add((t1, t2))
                    bad.append((t1, t2))
    return sorted(bad)


def is_free_choice(net: LabeledNet) -> bool:
    return not free_choice_violations(net)


def _reach(start, step) -> set:
    seen = {start}
    todo = [start]
    while todo:
        x = todo.pop()
        for y in step(x):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def workflow_violations(net: LabeledNet, source=None, sink=None, start=None, end=None) -> list:
    """Human-readable reasons why ``net`` is not a WF-net with the given roles
    (empty list if it is one)."""
    if isinstance(net, WorkflowNet) and source is None:
        source, sink, start, end = net.roles
    problems = []
    for name, x, kind in ((("source place", source, net.places)), ("sink place", sink, net.places),
                          ("start transition", start, net.transitions), ("end transition", end, net.transitions)):
        if x not in kind:
            problems.append(f"{name} {x!r} missing")
    if problems:
        return problems
    if net.preset(source):
        problems.append(f"source {source} has input arcs from {sorted(net.preset(source))}")
    if net.postset(sink):
        problems.append(f"sink {sink} has output arcs to {sorted(net.postset(sink))}")
    if net.preset(start) != {source} or net.postset(source) != {start}:
        problems.append(f"start transition {start} must be the only output of {source} and consume only from it")
    if net.postset(end) != {sink} or net.preset(sink) != {end}:
        problems.append(f"end transition {end} must be the only input of {sink} and produce only into it")
    if net.label(start) is not None or net.label(end) is not None:
        problems.append("start and end transitions must be silent")
    fwd = _reach(source, net.postset)
    bwd = _reach(sink, net.preset)
    off = sorted(x for x in net.nodes if x not in fwd or x not in bwd)
    if off:
        problems.append(f"nodes not on a path from {source} to {sink}: {off}")
    return problems


def is_workflow_net(net: LabeledNet, source=None, sink=None, start=None, end=None) -> bool:
    return not workflow_violations(net, source, sink, start, end)


def infer_workflow_net(net: LabeledNet) -> WorkflowNet:
    """Recover source/sink/start/end from structure; raise
    :class:`NetStructureError` with a diagnosis if that is impossible."""
    sources = sorted(p for p in net.places if not net.preset(p))
    sinks = sorted(p for p in net.places if not net.postset(p))
    if len(sources) != 1 or len(sinks) != 1:
        raise NetStructureError(f"need exactly one source and one sink place, found sources={sources} sinks={sinks}")
    (ps,), (pe,) = sources, sinks
    if len(net.postset(ps)) != 1 or len(net.preset(pe)) != 1:
        raise NetStructureError(f"source {ps} and sink {pe} must each connect to exactly one transition")
    (start,), (end,) = net.postset(ps), net.preset(pe)
    w = WorkflowNet(net.places, net.transitions, net.arcs, net.labels, ps, pe, start, end)
    problems = workflow_violations(w)
    if problems:
        raise NetStructureError("; ".join(problems))
    return w


def check_structure(w: WorkflowNet) -> None:
    """Raise :class:`NetStructureError` unless ``w`` is a free-choice WF-net."""
    problems = workflow_violations(w)
    bad = free_choice_violations(w)
    if bad:
        problems.append("not free-choice: " + ", ".join(f"{a}/{b}" for a, b in bad))
    if problems:
        raise NetStructureError("; ".join(problems))


def short_circuit(w: WorkflowNet) -> LabeledNet:
    """Add a silent transition consuming from the sink and producing into the
    source. (Connecting the end and start transitions directly, as sometimes
    written, would not be a bipartite net.)"""
    t = _fresh("t_sc", w.nodes) if "t_sc" in w.nodes else "t_sc"
    return LabeledNet(
        w.places,
        w.transitions | {t},
        w.arcs | {(w.sink, t), (t, w.source)},
        w.labels,
    )


@dataclass(frozen=True)
class IncidenceMatrix:
    places: tuple
    transitions: tuple
    rows: tuple  # rows[i][j] = effect of transitions[j] on places[i]

    def row(self, p) -> tuple:
        return self.rows[self.places.index(p)]

    def column(self, t) -> tuple:
        j = self.transitions.index(t)
        return tuple(r[j] for r in self.rows)

    def entry(self, p, t) -> int:
        return self.rows[self.places.index(p)][self.transitions.index(t)]


def incidence(net: LabeledNet) -> IncidenceMatrix:
    places = tuple(sorted(net.places))
    transitions = tuple(sorted(net.transitions))
    rows = []
    for p in places:
        row = []
        for t in transitions:
            consumes = (p, t) in net.arcs
            produces = (t, p) in net.arcs
            row.append(0 if consumes == produces else (-1 if consumes else 1))
        rows.append(tuple(row))
    return IncidenceMatrix(places, transitions, tuple(rows))


# ------------------------------------------------------------ paths


def _simple_path_nodes(net: LabeledNet, s, t, max_steps: int) -> set:
    if s == t:
        return {s}
    fwd = _reach(s, net.postset)
    bwd = _reach(t, net.preset)
    region = fwd & bwd
    if s not in region or t not in region:
        return set()

    def reaches_target(v, blocked):
        seen = {v}
        todo = [v]
        while todo:
            x = todo.pop()
            for y in net.postset(x):
                if y == t:
                    return True
                if y in region and y not in seen and y not in blocked:
                    seen.add(y)
                    todo.append(y)
        return False

    marked = set()
    path = [s]
    on_path = {s}
    stack = [iter(sorted(net.postset(s) & region))]
    steps = 0
    while stack:
        steps += 1
        if steps > max_steps:
            logger.warning("elementary path search %s->%s exceeded %d steps; using reachability region", s, t, max_steps)
            return region
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        if nxt == t:
            marked.update(path)
            marked.add(t)
            if marked >= region:
                return marked
            continue
        if not reaches_target(nxt, on_path):
            continue
        path.append(nxt)
        on_path.add(nxt)
        stack.append(iter(sorted(net.postset(nxt) & region)))
    return marked


def elementary_path_nodes(net: LabeledNet, sources: Iterable, targets: Iterable, max_steps: int = 500_000) -> set:
    """All nodes lying on some elementary path from a node in ``sources`` to
    a node in ``targets``."""
    out = set()
    for s in sorted(sources):
        for t in sorted(targets):
            out |= _simple_path_nodes(net, s, t, max_steps)
    return out


# ------------------------------------------------------------ token game


class CompiledNet:
    """Index-based view of a net for fast state-space exploration.

    Markings are tuples of token counts in ``places`` order.
    """

    def __init__(self, net: LabeledNet):
        self.places = tuple(sorted(net.places))
        self.transitions = tuple(sorted(net.transitions))
        pidx = {p: i for i, p in enumerate(self.places)}
        self.pidx = pidx
        self.tidx = {t: i for i, t in enumerate(self.transitions)}
        self.pre = tuple(tuple(sorted(pidx[p] for p in net.preset(t))) for t in self.transitions)
        self.post = tuple(tuple(sorted(pidx[p] for p in net.postset(t))) for t in self.transitions)
        self.labels = tuple(net.labels.get(t) for t in self.transitions)
        self.delta = []
        for pre, post in zip(self.pre, self.post):
            d = Counter()
            for p in pre:
                d[p] -= 1
            for p in post:
                d[p] += 1
            self.delta.append(tuple((p, v) for p, v in sorted(d.items()) if v))

    def marking(self, places: Mapping | Iterable) -> tuple:
        m = [0] * len(self.places)
        items = places.items() if isinstance(places, Mapping) else ((p, 1) for p in places)
        for p, n in items:
            m[self.pidx[p]] += n
        return tuple(m)

    def enabled(self, m: tuple) -> list:
        return [i for i, pre in enumerate(self.pre) if all(m[p] for p in pre)]

    def fire(self, m: tuple, i: int) -> tuple:
        out = list(m)
        for p, v in self.delta[i]:
            out[p] += v
        return tuple(out)

    def to_counter(self, m: tuple) -> Counter:
        return Counter({self.places[i]: n for i, n in enumerate(m) if n})


def enabled(net: LabeledNet, m: Mapping) -> set:
    cn = net.compiled
    return {cn.transitions[i] for i in cn.enabled(cn.marking(m))}


def fire(net: LabeledNet, m: Mapping, t) -> Counter:
    cn = net.compiled
    mm = cn.marking(m)
    i = cn.tidx[t]
    if i not in cn.enabled(mm):
        raise ValueError(f"transition {t} is not enabled at {dict(m)}")
    return cn.to_counter(cn.fire(mm, i))


def soundness_check(w: WorkflowNet, state_cap: int = DEFAULT_STATE_CAP) -> tuple:
    """Explore the reachability graph from the source marking.

    Returns ``(True, "")`` or ``(False, reason)``; raises
    :class:`InconclusiveError` when more than ``state_cap`` markings are
    reachable.
    """
    cn = w.compiled
    start = cn.marking([w.source])
    final = cn.marking([w.sink])
    seen = {start: 0}
    order = [start]
    edges = []
    fired = set()
    head = 0
    while head < len(order):
        m = order[head]
        head += 1
        src = seen[m]
        for i in cn.enabled(m):
            m2 = cn.fire(m, i)
            fired.add(i)
            if max(m2) > 1:
                where = [cn.places[k] for k, v in enumerate(m2) if v > 1]
                return False, f"not safe: firing {cn.transitions[i]} puts several tokens on {where}"
            if m2 not in seen:
                if len(seen) >= state_cap:
                    raise InconclusiveError(f"more than {state_cap} reachable markings")
                seen[m2] = len(order)
                order.append(m2)
            edges.append((src, seen[m2]))
    dead = sorted(cn.transitions[i] for i in range(len(cn.transitions)) if i not in fired)
    if dead:
        return False, f"dead transitions: {dead}"
    if final not in seen:
        return False, "the final marking is unreachable"
    back = [[] for _ in order]
    for a, b in edges:
        back[b].append(a)
    ok = _reach(seen[final], lambda x: back[x])
    stuck = [k for k in range(len(order)) if k not in ok]
    if stuck:
        m = cn.to_counter(order[stuck[0]])
        return False, f"no option to complete from marking {dict(sorted(m.items()))}"
    return True, ""


def is_sound(w: WorkflowNet, state_cap: int = DEFAULT_STATE_CAP) -> bool:
    return soundness_check(w, state_cap)[0]


def reachable_markings(w: WorkflowNet, state_cap: int = DEFAULT_STATE_CAP) -> set:
    cn = w.compiled
    start = cn.marking([w.source])
    seen = {start}
    todo = deque([start])
    while todo:
        m = todo.popleft()
        for i in cn.enabled(m):
            m2 = cn.fire(m, i)
            if m2 not in seen:
                if len(seen) >= state_cap:
                    raise InconclusiveError(f"more than {state_cap} reachable markings")
                seen.add(m2)
                todo.append(m2)
    return seen


def language(w: WorkflowNet, max_len: int, state_cap: int = DEFAULT_STATE_CAP) -> set:
    """Visible traces of length <= ``max_len`` of complete firing sequences.

    Silent steps are unbounded in number but each (marking, trace) pair is
    visited once, so silent cycles terminate.
    """
    cn = w.compiled
    start = cn.marking([w.source])
    final = cn.marking([w.sink])
    seen = {(start, ())}
    todo = [(start, ())]
    out = set()
    while todo:
        m, tr = todo.pop()
        if m == final:
            out.add(tr)
        for i in cn.enabled(m):
            lab = cn.labels[i]
            tr2 = tr if lab is None else tr + (lab,)
            if len(tr2) > max_len:
                continue
            key = (cn.fire(m, i), tr2)
            if key not in seen:
                if len(seen) >= state_cap:
                    raise InconclusiveError(f"more than {state_cap} states while enumerating the language")
                seen.add(key)
                todo.append(key)
    return out


# ------------------------------------------------------------ siphons


def max_siphon_within(net: LabeledNet, allowed: Iterable) -> set:
    """Largest siphon (``•Q ⊆ Q•``) contained in ``allowed``; empty set if
    there is none."""
    q = set(allowed) & net.places
    changed = True
    while changed:
        changed = False
        for p in sorted(q):
            if any(not (net.preset(t) & q) for t in net.preset(p)):
                q.discard(p)
                changed = True
    return q


def is_siphon(net: LabeledNet, places: Iterable) -> bool:
    q = set(places)
    return bool(q) and net.preset_of(q) <= net.postset_of(q)


# ------------------------------------------------------------ canonical form


def _descriptor(net: LabeledNet, x) -> tuple:
    roles = net.roles if isinstance(net, WorkflowNet) else (None, None, None, None)
    role = {roles[0]: "source", roles[1]: "sink", roles[2]: "start", roles[3]: "end"}.get(x, "")
    if x in net.places:
        return ("P", role, "")
    return ("T", role, net.labels.get(x, ""))


def canonical_form(net: LabeledNet, max_leaves: int = 256) -> tuple:
    """Label- and role-preserving isomorphism invariant: the minimal
    serialization over orderings produced by colour refinement with
    individualization. Two nets get the same key iff they are isomorphic
    (exact unless more than ``max_leaves`` tie-breaking branches are needed).
    """
    nodes = sorted(net.nodes)
    idx = {x: i for i, x in enumerate(nodes)}
    succ = [[idx[y] for y in net.postset(x)] for x in nodes]
    pred = [[idx[y] for y in net.preset(x)] for x in nodes]
    desc = [_descriptor(net, x) for x in nodes]
    rank = {d: i for i, d in enumerate(sorted(set(desc)))}
    color0 = [rank[d] for d in desc]
    n = len(nodes)

    def refine(color):
        k = len(set(color))
        while True:
            sigs = [(color[i], tuple(sorted(color[j] for j in pred[i])), tuple(sorted(color[j] for j in succ[i])))
                    for i in range(n)]
            r = {s: i for i, s in enumerate(sorted(set(sigs)))}
            color = [r[s] for s in sigs]
            if len(r) == k:
                return color
            k = len(r)

    best = [None]
    leaves = [0]

    def serialize(color):
        pos = color
        order = sorted(range(n), key=lambda i: pos[i])
        ds = tuple(desc[i] for i in order)
        arcs = tuple(sorted((pos[i], pos[j]) for i in range(n) for j in succ[i]))
        return (ds, arcs)

    def search(color):
        if leaves[0] >= max_leaves and best[0] is not None:
            return
        color = refine(color)
        cells: dict = {}
        for i, c in enumerate(color):
            cells.setdefault(c, []).append(i)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            leaves[0] += 1
            key = serialize(color)
            if best[0] is None or key < best[0]:
                best[0] = key
            return
        for v in target:
            c2 = [2 * c for c in color]
            c2[v] -= 1
            search(c2)

    search(color0)
    return best[0]
