"""Small built-in logs: the 13-variant running example and a seeded
synthetic order-handling process."""

from __future__ import annotations

import random

from .event_log import EventLog

_RUNNING_EXAMPLE = {
    "abcdfgh": 22, "abcfdgh": 14, "aebcdfgh": 13, "aebcfdgh": 13, "aebcfgdh": 10, "abcfgdh": 10,
    "abecdfgh": 6, "abecfgdh": 3, "abecfdgh": 3, "abcdefgh": 2, "abcedfgh": 2, "abcefgdh": 1,
    "abcefdgh": 1,
}

SYNTHETIC_ACTIVITIES = ("register", "check_credit", "check_stock", "decide", "approve", "reject", "notify",
                        "archive")


def running_example_log() -> EventLog:
    return EventLog({tuple(k): n for k, n in _RUNNING_EXAMPLE.items()})


def _interleave(rng: random.Random, xs: list, ys: list) -> list:
    out, i, j = [], 0, 0
    while i < len(xs) or j < len(ys):
        if j == len(ys) or (i < len(xs) and rng.random() < 0.5):
            out.append(xs[i])
            i += 1
        else:
            out.append(ys[j])
            j += 1
    return out


def synthetic_trace(rng: random.Random, noise: float = 0.0) -> tuple:
    """register, two concurrent checks, a decision, approve or reject, zero
    or more notifications, archive. With probability ``noise`` one event is
    dropped or two neighbours are swapped."""
    trace = ["register"] + _interleave(rng, ["check_credit"], ["check_stock"]) + ["decide"]
    trace.append("approve" if rng.random() < 0.7 else "reject")
    while rng.random() < 0.35:
        trace.append("notify")
    trace.append("archive")
    if rng.random() < noise:
        k = rng.randrange(len(trace) - 1)
        if rng.random() < 0.5:
            del trace[k]
        else:
            trace[k], trace[k + 1] = trace[k + 1], trace[k]
    return tuple(trace)


def synthetic_log(n_traces: int = 1000, seed: int = 7, noise: float = 0.02) -> EventLog:
    rng = random.Random(seed)
    return EventLog([synthetic_trace(rng, noise) for _ in range(n_traces)])
