"""Exact monitoring-depth allocation for heterogeneous networks.

Assigns one monitoring layer to each device, maximizing expected weighted
attack detection under a global resource budget, minimum layers for critical
devices, and per-device feasibility caps. The problem is a bounded
multiple-choice knapsack and is solved exactly by three interchangeable
engines (brute force, dynamic programming, branch-and-bound).
"""

from .formulation import ChoiceSet, admissible_layers, build_profit_matrix, export_lp
from .instancefile import (
    BUILTIN_PRESETS,
    InstanceFileError,
    load_instance_file,
    parse_instance_document,
    serialize_instance,
)
from .model import (
    Allocation,
    CriticalCapConflict,
    DetectionRatesNotIncreasing,
    Device,
    DuplicateDeviceId,
    EmptyDeviceList,
    Instance,
    InstanceValidationError,
    Layer,
    LayerSchedule,
    NegativeCostOrWeight,
    ProbabilityOutOfRange,
    device_profit,
    min_feasible_budget,
    validate_instance,
)
from .montecarlo import SimulationResult, estimate_detection
from .solver import (
    DEFAULT_ENGINE,
    ENGINES,
    EnumerationTooLarge,
    NonIntegerCosts,
    SolveOutcome,
    SolveStats,
    SolveStatus,
    TIE_TOL,
    fractional_upper_bound,
    solve,
    solve_bnb,
    solve_bruteforce,
    solve_dp,
    verify_allocation,
)
from .sweep import (
    DeviceContribution,
    EntryStatus,
    SweepEntry,
    SweepReport,
    UnknownDevice,
    contribution_breakdown,
    run_sweep,
)

__all__ = [
    "Allocation",
    "BUILTIN_PRESETS",
    "ChoiceSet",
    "CriticalCapConflict",
    "DEFAULT_ENGINE",
    "DetectionRatesNotIncreasing",
    "Device",
    "DeviceContribution",
    "DuplicateDeviceId",
    "EmptyDeviceList",
    "ENGINES",
    "EntryStatus",
    "EnumerationTooLarge",
    "Instance",
    "InstanceFileError",
    "InstanceValidationError",
    "Layer",
    "LayerSchedule",
    "NegativeCostOrWeight",
    "NonIntegerCosts",
    "ProbabilityOutOfRange",
    "SimulationResult",
    "SolveOutcome",
    "SolveStats",
    "SolveStatus",
    "SweepEntry",
    "SweepReport",
    "TIE_TOL",
    "UnknownDevice",
    "admissible_layers",
    "build_profit_matrix",
    "contribution_breakdown",
    "device_profit",
    "estimate_detection",
    "export_lp",
    "fractional_upper_bound",
    "load_instance_file",
    "min_feasible_budget",
    "parse_instance_document",
    "run_sweep",
    "serialize_instance",
    "solve",
    "solve_bnb",
    "solve_bruteforce",
    "solve_dp",
    "validate_instance",
    "verify_allocation",
]

__version__ = "0.1.0"
