"""Dynamic spectrum access with belief tracking, greedy sensing and online
learning of the primary signal amplitude."""

from .belief import AckEvent
from .markov import REFERENCE_TRANSITION, ChannelSetModel, TransitionMatrix
from .observation import ObservationModel, db_to_amplitude, uniform_prior
from .policy import PolicyKind
from .sim import SimConfig, SimResult, run_episode, run_monte_carlo

__all__ = [
    "AckEvent",
    "ChannelSetModel",
    "ObservationModel",
    "REFERENCE_TRANSITION",
    "PolicyKind",
    "SimConfig",
    "SimResult",
    "TransitionMatrix",
    "db_to_amplitude",
    "run_episode",
    "run_monte_carlo",
    "uniform_prior",
]

__version__ = "0.1.0"
