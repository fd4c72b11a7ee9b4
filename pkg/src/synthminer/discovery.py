"""Incremental discovery: add one activity per iteration, choosing among
rule/pattern candidates restricted to a log-derived region of the net."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import conformance
from .event_log import (
    EventLog,
    count_activity,
    count_directly_follows,
    end_activities,
    following_set,
    preceding_set,
    project,
)
from .patterns import CandidateNet, candidate_set, labeled_transition, loop_strict, skip
from .petri_net import DEFAULT_STATE_CAP, InconclusiveError, WorkflowNet, elementary_path_nodes, initial_net
from .synthesis import EnumerationCaps, RuleApplication, apply_dual_abstraction, apply_extended_place_rule, EXTENDED_PLACE

logger = logging.getLogger(__name__)

FREQUENCY = "frequency"
BFS = "bfs"


@dataclass(frozen=True)
class DiscoveryConfig:
    theta: Fraction = Fraction(95, 100)
    c: Fraction = Fraction(9, 10)
    ordering: str = BFS
    caps: EnumerationCaps = EnumerationCaps()
    state_cap: int = DEFAULT_STATE_CAP
    jobs: int = 1
    record_candidates: bool = False

    def __post_init__(self):
        object.__setattr__(self, "theta", Fraction(self.theta))
        object.__setattr__(self, "c", Fraction(self.c))
        if not 0 <= self.theta <= 1 or not 0 <= self.c <= 1:
            raise ValueError("theta and c must lie in [0, 1]")
        if self.ordering not in (FREQUENCY, BFS):
            raise ValueError(f"unknown ordering {self.ordering!r}")

    def to_json(self) -> dict:
        out = asdict(self)
        out["theta"] = str(self.theta)
        out["c"] = str(self.c)
        return out


class DiscoveryError(InconclusiveError):
    def __init__(self, iteration: int, activity, cause: Exception):
        super().__init__(f"iteration {iteration} ({activity}): {cause}")
        self.iteration = iteration
        self.activity = activity


@dataclass
class IterationRecord:
    index: int
    activity: str
    variants: int
    v_size: int
    net_size: int
    candidates: int
    selected: dict
    score: conformance.Score
    fall_through: bool
    wall_time: float
    candidate_scores: list = field(default_factory=list)
    net: WorkflowNet | None = field(default=None, repr=False, compare=False)

    @property
    def pruning_ratio(self) -> Fraction:
        return Fraction(self.v_size, self.net_size)

    def to_json(self, with_candidates=False) -> dict:
        out = {
            "iteration": self.index,
            "activity": self.activity,
            "projected_variants": self.variants,
            "v_size": self.v_size,
            "net_size": self.net_size,
            "pruning_ratio": {"exact": str(self.pruning_ratio), "value": round(float(self.pruning_ratio), 6)},
            "candidates": self.candidates,
            "selected": self.selected,
            "scores": self.score.to_json(),
            "fall_through": self.fall_through,
            "wall_time": round(self.wall_time, 3),
        }
        if with_candidates:
            out["candidate_scores"] = self.candidate_scores
        return out


@dataclass
class DiscoveryResult:
    net: WorkflowNet
    order: tuple
    records: list


# ------------------------------------------------------------ ordering


def order_frequency(log: EventLog) -> tuple:
    """Activities by descending occurrence count; ties by name."""
    if not log.activities:
        raise ValueError("cannot order the activities of an empty log")
    return tuple(sorted(log.activities, key=lambda a: (-count_activity(a, log), a)))


def sort_preceded(a, log: EventLog) -> tuple:
    pre = [b for b in log.activities if count_directly_follows(b, a, log) > 0]
    return tuple(sorted(pre, key=lambda b: (-count_directly_follows(b, a, log), b)))


def order_bfs_blocks(log: EventLog) -> list:
    """The blocks whose concatenation is the BFS-based order.

    Block 1 orders the end activities by frequency; block j lists the
    direct predecessors of the (j-1)-th activity of the order so far that
    have not been added yet. If the frontier runs dry before all
    activities are covered, the rest follow in frequency order as one
    final block.
    """
    activities = log.activities
    if not activities:
        raise ValueError("cannot order the activities of an empty log")
    blocks = [order_frequency(project(log, end_activities(log)))]
    gamma = list(blocks[0])
    for j in range(2, len(activities) + 1):
        if len(gamma) < j - 1:
            break
        block = tuple(b for b in sort_preceded(gamma[j - 2], log) if b not in gamma)
        blocks.append(block)
        gamma.extend(block)
    rest = [a for a in order_frequency(log) if a not in gamma]
    if rest:
        blocks.append(tuple(rest))
    return blocks


def order_bfs(log: EventLog) -> tuple:
    return tuple(a for block in order_bfs_blocks(log) for a in block)


def activity_order(log: EventLog, ordering: str) -> tuple:
    return order_bfs(log) if ordering == BFS else order_frequency(log)


def projected_log(log: EventLog, gamma, i: int) -> EventLog:
    if not 1 <= i <= len(gamma):
        raise IndexError(f"iteration {i} outside 1..{len(gamma)}")
    return project(log, gamma[:i])


# ------------------------------------------------------------ pruning


def _transitions_for(w: WorkflowNet, activities) -> set:
    return {t for a in activities for t in w.transitions_labeled(a)}


def causal_neighbourhood(w: WorkflowNet, log_i: EventLog, a, c) -> tuple:
    """Transitions of ``a``'s causal predecessors and successors (start/end
    when there are none)."""
    pre = _transitions_for(w, preceding_set(a, log_i, c) - {a}) or {w.start}
    fol = _transitions_for(w, following_set(a, log_i, c) - {a}) or {w.end}
    return pre, fol


def pruning_set(w: WorkflowNet, log_i: EventLog, a, c=Fraction(9, 10)) -> set:
    pre, fol = causal_neighbourhood(w, log_i, a, c)
    nodes = elementary_path_nodes(w, pre, fol)
    return nodes or set(w.nodes)


# ------------------------------------------------------------ selection


def _score_one(args):
    net, log_i, theta, state_cap = args
    fit = conformance.fitness(net, log_i, state_cap)
    if fit < theta:
        return fit, None
    return fit, conformance.precision(net, log_i, state_cap)


def score_candidates(cands: list, log_i: EventLog, theta, state_cap=DEFAULT_STATE_CAP, jobs=1) -> None:
    """Fill in fitness for every candidate; precision and F1 only for those
    reaching ``theta``."""
    todo = [c for c in cands if c.fitness is None]
    jobs_args = [(c.net, log_i, theta, state_cap) for c in todo]
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_score_one, jobs_args, chunksize=8))
    else:
        results = [_score_one(a) for a in jobs_args]
    for cand, (fit, prec) in zip(todo, results):
        cand.fitness = fit
        if prec is not None:
            cand.precision = prec
            cand.f1 = conformance.f1(fit, prec)


def select_best(cands: list, log_i: EventLog, theta=Fraction(95, 100), state_cap=DEFAULT_STATE_CAP,
                jobs=1) -> CandidateNet | None:
    """Highest F1 among candidates with fitness >= theta; ties go to the
    smaller net, then to canonical order."""
    score_candidates(cands, log_i, theta, state_cap, jobs)
    passing = [c for c in cands if c.fitness >= theta]
    if not passing:
        return None
    return min(passing, key=lambda c: (-c.f1, c.net.size(), c.key))


def guaranteed_net(w: WorkflowNet, a) -> WorkflowNet:
    """``a`` on a new parallel branch between start and end, skippable and
    repeatable."""
    end_cluster = w.postset_of(w.preset(w.end))
    if end_cluster != {w.end}:
        # another transition shares an input place of the end transition; a
        # silent step in front of it keeps the new place's arc free-choice
        w = apply_dual_abstraction(w, w.preset(w.end), {w.end})
    w = apply_extended_place_rule(w, {w.start}, {w.end}, a)
    return loop_strict(skip(w, a), a)


def fall_through(w: WorkflowNet, a, log_i: EventLog, theta=Fraction(95, 100),
                 caps: EnumerationCaps = EnumerationCaps(), state_cap=DEFAULT_STATE_CAP, jobs=1):
    """Retry without the region constraint; if that still fails, use the
    guaranteed parallel construction. Returns ``(candidate, candidates)``."""
    cands = candidate_set(w, w.nodes, a, caps)
    best = select_best(cands, log_i, theta, state_cap, jobs)
    if best is not None:
        return best, cands
    app = RuleApplication(EXTENDED_PLACE, preset=frozenset({w.start}), postset=frozenset({w.end}), label=a)
    best = CandidateNet(guaranteed_net(w, a), app, "skip+loop", origin="guaranteed")
    score_candidates([best], log_i, Fraction(0), state_cap)
    return best, cands + [best]


def _candidate_json(c: CandidateNet) -> dict:
    out = c.provenance()
    out["fitness"] = str(c.fitness)
    out["precision"] = None if c.precision is None else str(c.precision)
    out["f1"] = None if c.f1 is None else str(c.f1)
    return out


def discover(log: EventLog, config: DiscoveryConfig = DiscoveryConfig(), order=None) -> DiscoveryResult:
    if log.total == 0 or not log.activities:
        raise ValueError("discovery needs a log with at least one activity")
    gamma = tuple(order) if order is not None else activity_order(log, config.ordering)
    w = initial_net()
    records = []
    for i, a in enumerate(gamma, start=1):
        t0 = time.perf_counter()
        try:
            log_i = projected_log(log, gamma, i)
            V = set(w.nodes) if i == 1 else pruning_set(w, log_i, a, config.c)
            cands = candidate_set(w, V, a, config.caps)
            best = select_best(cands, log_i, config.theta, config.state_cap, config.jobs)
            fell = best is None
            if fell:
                best, extra = fall_through(w, a, log_i, config.theta, config.caps, config.state_cap, config.jobs)
                cands = cands + extra
        except InconclusiveError as exc:
            raise DiscoveryError(i, a, exc) from exc
        labeled_transition(best.net, a)
        rec = IterationRecord(
            index=i,
            activity=a,
            variants=len(log_i),
            v_size=len(V),
            net_size=w.size(),
            candidates=len(cands),
            selected=best.provenance(),
            score=conformance.Score(best.fitness, best.precision, best.f1),
            fall_through=fell,
            wall_time=time.perf_counter() - t0,
            candidate_scores=[_candidate_json(c) for c in cands] if config.record_candidates else [],
            net=best.net,
        )
        logger.info("iteration %d (%s): |V|=%d/%d, %d candidates, fitness=%.4f f1=%.4f%s", i, a, rec.v_size,
                    rec.net_size, rec.candidates, best.fitness, best.f1, " [fall-through]" if fell else "")
        records.append(rec)
        w = best.net
    return DiscoveryResult(w, gamma, records)
