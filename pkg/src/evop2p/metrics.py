"""Information-theoretic measures over sliding windows of peer models.

A peer's model is a short vector of integer genes drawn from the alphabet
[1..n].  The measures summarize how much the gene values of the last W
models vary (emergence), how ordered they are (self-organization), the
balance of the two (complexity), and how far the current model has drifted
from the model the peer started with (homeostasis).
"""

import math
from dataclasses import dataclass

__all__ = [
    "MetricsConfig",
    "normalized_information",
    "measures_from_information",
    "homeostasis",
]


@dataclass(frozen=True)
class MetricsConfig:
    """Alphabet size n, genes per model q, window length W."""

    n: int = 6
    q: int = 3
    w: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("alphabet size n must be >= 2")
        if self.q < 1:
            raise ValueError("genes per model q must be >= 1")
        if self.w < 1:
            raise ValueError("window length W must be >= 1")


def normalized_information(window, cfg: MetricsConfig) -> float:
    """Shannon entropy of the pooled gene values, normalized to [0, 1].

    The gene-value frequencies are taken over every slot of every model in
    the window (len(window) * q slots) and the entropy is divided by
    log2(n), so 0 means a single repeated value and 1 means all n values
    equally frequent.  Windows shorter than W are measured over whatever
    entries exist.
    """
    if not window:
        raise ValueError("no data")
    n = cfg.n
    counts = {}
    total = 0
    for genotype in window:
        for gene in genotype:
            if not 1 <= gene <= n:
                raise ValueError(f"alphabet violation: gene {gene} not in [1..{n}]")
            counts[gene] = counts.get(gene, 0) + 1
            total += 1
    entropy = 0.0
    for c in counts.values():
        p = c / total
        entropy -= p * math.log2(p)
    return entropy / math.log2(n)


def measures_from_information(info: float):
    """Emergence, self-organization and complexity for a given information.

    E = I, S = 1 - I, C = 4*E*S (the 4 normalizes C to [0, 1], maximal at
    I = 0.5).
    """
    if not 0.0 <= info <= 1.0:
        raise ValueError(f"information {info} outside [0, 1]")
    e = info
    s = 1.0 - info
    return e, s, 4.0 * e * s


def homeostasis(current, initial) -> float:
    """One minus the normalized Hamming distance between two models.

    1.0 means the model never changed; around 1/n means the two models are
    uncorrelated.
    """
    if len(current) != len(initial):
        raise ValueError(
            f"model length mismatch: {len(current)} vs {len(initial)}"
        )
    differing = sum(1 for a, b in zip(current, initial) if a != b)
    return 1.0 - differing / len(current)
