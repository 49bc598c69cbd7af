"""Online Hamilton cycle packing in the random graph process.

Random edges of K_n arrive one at a time; each is colored irrevocably with
one of sigma colors so that, at the moment the minimum degree reaches
2*sigma, every color class contains a Hamilton cycle.  The package provides
the process simulator, the online coloring, the rotation/booster cycle
builder, structural validators, and a reproducible Monte Carlo harness.
"""

from .coloring import (ColoringState, MergedColoring, color_edge, freeze_full,
                       init_coloring, merge_colors)
from .harness import (ExperimentSummary, TrialConfig, TrialReport,
                      run_experiment, run_trial, summarize)
from .oracle import brute_force_hamilton
from .posa import (ColorClassGraph, CycleResult, HamiltonEngine, RotationTree,
                   compute_end_set, extend_path, find_hamilton_cycle, rotate,
                   try_boosters)
from .process import (EdgeStream, ProcessState, apply_edge, hitting_time,
                      new_stream)

__all__ = [
    "ColoringState", "MergedColoring", "color_edge", "freeze_full",
    "init_coloring", "merge_colors",
    "ExperimentSummary", "TrialConfig", "TrialReport", "run_experiment",
    "run_trial", "summarize",
    "brute_force_hamilton",
    "ColorClassGraph", "CycleResult", "HamiltonEngine", "RotationTree",
    "compute_end_set", "extend_path", "find_hamilton_cycle", "rotate",
    "try_boosters",
    "EdgeStream", "ProcessState", "apply_edge", "hitting_time", "new_stream",
]

__version__ = "0.1.0"
