"""Adaptive peer-to-peer computing overlay simulator.

Peers discover consumable resources (CPU/RAM/disk) through an epidemic
lookup whose parameters are genes of a per-peer model evolved by a
distributed genetic algorithm, and the population is instrumented with
information-theoretic measures of emergence, self-organization,
complexity and homeostasis.
"""

from .engine import MetricsSample, RunTrace, ScenarioConfig, run, write_trace
from .genome import FitnessParams, Phenotype, avg_qhr, fitness, phenotype_of
from .metrics import (MetricsConfig, homeostasis, measures_from_information,
                      normalized_information)
from .overlay import OverlayGraph, TopologyParams, generate
from .stats import ci95_mean, i95, settling_time, summary, wilcoxon_rank_sum

__version__ = "0.1.0"

__all__ = [
    "MetricsConfig", "normalized_information", "measures_from_information",
    "homeostasis",
    "FitnessParams", "Phenotype", "phenotype_of", "avg_qhr", "fitness",
    "TopologyParams", "OverlayGraph", "generate",
    "ScenarioConfig", "MetricsSample", "RunTrace", "run", "write_trace",
    "summary", "i95", "ci95_mean", "wilcoxon_rank_sum", "settling_time",
    "__version__",
]
