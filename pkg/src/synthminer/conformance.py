"""Alignment-based fitness, escaping-edges precision and F1.

Alignments are found by uniform-cost search over the synchronous product
(marking x trace position). Costs: synchronous and silent model moves 0,
visible model moves and log moves 1.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .event_log import EventLog
from .petri_net import DEFAULT_STATE_CAP, InconclusiveError, WorkflowNet

SYNC = "synchronous"
LOG = "log_move"
MODEL_VISIBLE = "model_move_visible"
MODEL_SILENT = "model_move_silent"

# successor generation order; with FIFO tie-breaking in the queue this makes
# the chosen alignment reproducible
_KIND_RANK = {SYNC: 0, MODEL_SILENT: 1, MODEL_VISIBLE: 2, LOG: 3}


@dataclass(frozen=True)
class Move:
    kind: str
    activity: str | None = None
    transition: str | None = None


@dataclass(frozen=True)
class Alignment:
    moves: tuple
    cost: int

    @property
    def model_transitions(self) -> list:
        return [m.transition for m in self.moves if m.transition is not None]


@dataclass(frozen=True)
class Score:
    fitness: Fraction
    precision: Fraction
    f1: Fraction

    def to_json(self) -> dict:
        return {k: {"exact": str(v), "value": round(float(v), 6)} for k, v in
                (("fitness", self.fitness), ("precision", self.precision), ("f1", self.f1))}


def _cache(w: WorkflowNet, name: str) -> dict:
    # nets are immutable, so per-instance memo tables are safe
    return w.__dict__.setdefault(name, {})


def optimal_alignment(w: WorkflowNet, trace, state_cap: int = DEFAULT_STATE_CAP) -> Alignment:
    trace = tuple(trace)
    memo = _cache(w, "_alignments")
    if trace in memo:
        return memo[trace]

    cn = w.compiled
    m0 = cn.marking([w.source])
    final = cn.marking([w.sink])
    n = len(trace)
    enabled_at: dict = {}

    start = (m0, 0)
    dist = {start: 0}
    parent = {}
    heap = [(0, 0, start)]
    counter = 1
    done = set()
    while heap:
        cost, _, state = heapq.heappop(heap)
        if state in done:
            continue
        done.add(state)
        m, i = state
        if i == n and m == final:
            moves = []
            while state in parent:
                state, move = parent[state]
                moves.append(move)
            result = Alignment(tuple(reversed(moves)), cost)
            memo[trace] = result
            return result

        en = enabled_at.get(m)
        if en is None:
            en = enabled_at[m] = cn.enabled(m)
        succ = []
        nxt = trace[i] if i < n else None
        for k in en:
            lab = cn.labels[k]
            t = cn.transitions[k]
            m2 = cn.fire(m, k)
            if lab is None:
                succ.append((0, 1, (m2, i), Move(MODEL_SILENT, None, t)))
            else:
                if lab == nxt:
                    succ.append((0, 0, (m2, i + 1), Move(SYNC, lab, t)))
                succ.append((1, 2, (m2, i), Move(MODEL_VISIBLE, None, t)))
        if nxt is not None:
            succ.append((1, 3, (m, i + 1), Move(LOG, nxt, None)))
        succ.sort(key=lambda s: s[1])
        for c, _, s2, move in succ:
            c2 = cost + c
            if s2 not in done and c2 < dist.get(s2, c2 + 1):
                dist[s2] = c2
                parent[s2] = (state, move)
                heapq.heappush(heap, (c2, counter, s2))
                counter += 1
        if len(dist) > state_cap:
            raise InconclusiveError(f"alignment search exceeded {state_cap} states")
    raise InconclusiveError("the final marking is unreachable; no alignment exists")


def empty_trace_cost(w: WorkflowNet, state_cap: int = DEFAULT_STATE_CAP) -> int:
    return optimal_alignment(w, (), state_cap).cost


def trace_fitness(w: WorkflowNet, trace, state_cap: int = DEFAULT_STATE_CAP) -> Fraction:
    denom = len(trace) + empty_trace_cost(w, state_cap)
    if denom == 0:
        return Fraction(1)
    return 1 - Fraction(optimal_alignment(w, trace, state_cap).cost, denom)


def fitness(w: WorkflowNet, log: EventLog, state_cap: int = DEFAULT_STATE_CAP) -> Fraction:
    total = log.total
    if total == 0:
        return Fraction(1)
    return sum((n * trace_fitness(w, trace, state_cap) for trace, n in log.items()), Fraction(0)) / total


def _visible_closure(w: WorkflowNet, m: tuple, state_cap: int) -> frozenset:
    """Visible activities enabled in some marking reachable from ``m`` by
    silent firings only."""
    memo = _cache(w, "_closure")
    if m in memo:
        return memo[m]
    cn = w.compiled
    seen = {m}
    todo = [m]
    out = set()
    while todo:
        x = todo.pop()
        for k in cn.enabled(x):
            lab = cn.labels[k]
            if lab is not None:
                out.add(lab)
                continue
            y = cn.fire(x, k)
            if y not in seen:
                if len(seen) >= state_cap:
                    raise InconclusiveError(f"silent closure exceeded {state_cap} markings")
                seen.add(y)
                todo.append(y)
    memo[m] = frozenset(out)
    return memo[m]


def precision(w: WorkflowNet, log: EventLog, state_cap: int = DEFAULT_STATE_CAP) -> Fraction:
    """Escaping-edges precision over the states visited by the model part of
    each trace's optimal alignment.

    A state is the visible prefix replayed so far together with the marking
    it leads to: the start, and the point after every visible model step.
    Keying on the prefix keeps traces that merely pass through the same
    marking from pooling their continuations. Activities enabled at a state
    (through silent steps) but never taken next from it anywhere in the log
    count as escaping.
    """
    cn = w.compiled
    weight: dict = {}
    observed: dict = {}
    for trace, n in log.items():
        al = optimal_alignment(w, trace, state_cap)
        m = cn.marking([w.source])
        prefix = ()
        state = (prefix, m)
        for t in al.model_transitions:
            k = cn.tidx[t]
            m = cn.fire(m, k)
            lab = cn.labels[k]
            if lab is None:
                continue
            weight[state] = weight.get(state, 0) + n
            observed.setdefault(state, set()).add(lab)
            prefix += (lab,)
            state = (prefix, m)
        weight[state] = weight.get(state, 0) + n
        observed.setdefault(state, set())

    num = den = 0
    for state, n in weight.items():
        en = _visible_closure(w, state[1], state_cap)
        den += n * len(en)
        num += n * len(en - observed[state])
    if den == 0:
        return Fraction(1)
    return 1 - Fraction(num, den)


def f1(fit, prec):
    if fit + prec == 0:
        return fit * 0
    return 2 * fit * prec / (fit + prec)


def evaluate(w: WorkflowNet, log: EventLog, state_cap: int = DEFAULT_STATE_CAP) -> Score:
    fit = fitness(w, log, state_cap)
    prec = precision(w, log, state_cap)
    return Score(fit, prec, f1(fit, prec))
