"""Process discovery by incremental application of free-choice synthesis
rules."""

from .conformance import Score, evaluate, fitness, optimal_alignment, precision
from .discovery import DiscoveryConfig, DiscoveryResult, discover
from .event_log import EventLog, parse_csv, parse_xes, read_log
from .petri_net import InconclusiveError, NetStructureError, WorkflowNet, initial_net, is_free_choice, is_sound
from .pnml import read_pnml, to_dot, write_pnml

__all__ = [
    "DiscoveryConfig", "DiscoveryResult", "EventLog", "InconclusiveError", "NetStructureError", "Score",
    "WorkflowNet", "discover", "evaluate", "fitness", "initial_net", "is_free_choice", "is_sound",
    "optimal_alignment", "parse_csv", "parse_xes", "precision", "read_log", "read_pnml", "to_dot", "write_pnml",
]
