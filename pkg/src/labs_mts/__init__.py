"""Parallel memetic-tabu search for low-autocorrelation binary sequences."""

from .deltastate import CorrelationState, apply_flip, build_state, neighbor_energy, scan_neighborhood
from .memetic import MemeticParams, RunResult, combine, memetic_tabu, mutate, select_parents
from .parallel import ParallelConfig, SharedState, run_replicas
from .seqcore import (
    Sequence,
    autocorrelation,
    canonical,
    complement,
    decode_hex,
    encode_hex,
    energy,
    merit_factor,
    reverse,
)
from .tabu import TabuParams, tabu_search

__version__ = "0.1.0"
