"""Quantum alternating operator ansatz toolkit: encodings, mixers, phase separators, simulation."""
from __future__ import annotations

from ._kernels import BACKEND
from .catalog import ConfigError, Pipeline, build_pipeline, catalog_entries, example_instance
from .circuit import Circuit, assemble_qaoa, dump, resource_report
from .engine import (
    ObjectiveTable,
    QaoaSchedule,
    RunResult,
    approximation_ratio,
    expectation,
    optimize,
    run,
    sample,
    simulate,
)
from .mixers import (
    MixerSpec,
    OrderedPartition,
    PartialMixer,
    binary_parity_mixer,
    build_partial_mixers,
    edge_coloring_complete_graph,
    make_partition,
    realize_partitioned,
    realize_simultaneous,
)
from .phase import Affine, PhaseSeparator, build_phase_separator

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConfigError", "Pipeline", "build_pipeline", "catalog_entries", "example_instance",
    "Circuit", "assemble_qaoa", "dump", "resource_report",
    "ObjectiveTable", "QaoaSchedule", "RunResult", "approximation_ratio", "expectation", "optimize", "run",
    "sample", "simulate",
    "MixerSpec", "OrderedPartition", "PartialMixer", "binary_parity_mixer", "build_partial_mixers",
    "edge_coloring_complete_graph", "make_partition", "realize_partitioned", "realize_simultaneous",
    "Affine", "PhaseSeparator", "build_phase_separator",
]
