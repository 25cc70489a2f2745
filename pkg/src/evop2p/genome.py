"""Genotype representation, phenotype mapping and fitness functions.

A genotype is a tuple of three integer genes (M0, M1, M2), each in [1..n].
The phenotype derives the lookup parameters from it:

    f_k   = M0 / n      fraction of neighbors targeted per forward
    T_max = M1          propagation depth (hops)
    D_max = 2 * M2      descriptor cache capacity

and summarizes them as the weighted scalar

    phi = phi0 * f_k + phi1 * T_max + phi2 * D_max.

Fitness is minimized.  All four variants trade the cost of an aggressive
phenotype against the observed neighborhood query hit ratio: when the hit
ratio is low a large phi must become attractive, when it is high a small
one must.
"""

import math
from dataclasses import dataclass

__all__ = [
    "FitnessParams",
    "Phenotype",
    "FITNESS_KINDS",
    "phenotype_of",
    "phi_of",
    "avg_qhr",
    "fitness",
    "make_model_fitness",
    "random_genotype",
    "all_genotypes",
]

FITNESS_KINDS = ("F1", "F2", "F3", "F4")


@dataclass(frozen=True)
class FitnessParams:
    """Phenotype weights plus the fitness threshold/guard constants.

    phi_max is derived from the all-max genotype (n, n, n) so that weight
    changes propagate instead of going stale in a hard-coded constant.
    """

    phi0: float = 100.0
    phi1: float = 10.0
    phi2: float = 5.0
    beta: float = 0.8
    delta: float = 0.01
    n: int = 6

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        if self.delta <= 0.0:
            raise ValueError("delta must be > 0")
        if self.n < 2:
            raise ValueError("gene alphabet size n must be >= 2")

    @property
    def phi_max(self) -> float:
        return self.phi0 + self.phi1 * self.n + self.phi2 * 2 * self.n

    @property
    def phi_min(self) -> float:
        return self.phi0 / self.n + self.phi1 + self.phi2 * 2


@dataclass(frozen=True)
class Phenotype:
    f_k: float
    t_max: int
    d_max: int
    phi: float


def _check_genotype(genotype, n: int):
    if len(genotype) != 3:
        raise ValueError(f"genotype must have 3 genes, got {len(genotype)}")
    for gene in genotype:
        if not 1 <= gene <= n:
            raise ValueError(f"gene {gene} outside [1..{n}]")


def phi_of(genotype, params: FitnessParams) -> float:
    """Scalar phenotype of a genotype."""
    _check_genotype(genotype, params.n)
    m0, m1, m2 = genotype
    return params.phi0 * m0 / params.n + params.phi1 * m1 + params.phi2 * 2 * m2


def phenotype_of(genotype, params: FitnessParams) -> Phenotype:
    """Full phenotype (f_k, T_max, D_max, phi) of a genotype."""
    _check_genotype(genotype, params.n)
    m0, m1, m2 = genotype
    return Phenotype(
        f_k=m0 / params.n,
        t_max=m1,
        d_max=2 * m2,
        phi=params.phi0 * m0 / params.n + params.phi1 * m1 + params.phi2 * 2 * m2,
    )


def avg_qhr(own: float, neighbors) -> float:
    """Mean of the peer's own hit ratio and its neighbors' (k+1 terms)."""
    total = own
    count = 1
    for value in neighbors:
        total += value
        count += 1
    return total / count


def fitness(kind: str, phi: float, qhr: float, params: FitnessParams) -> float:
    """Fitness of a model with scalar phenotype phi at hit ratio qhr.

    Lower is better.  F1 and F4 switch behavior at the threshold beta; F2
    and F3 are threshold-free.  F2 and F3 are evaluated on phi/phi_max:
    with raw phi the qhr*phi term outweighs (1-qhr)/phi for any observable
    qhr and selection would degenerate to always favoring the minimal
    genotype, never letting the genes grow under load.  F4 normalizes phi
    by construction.
    """
    if phi <= 0.0:
        raise ValueError("phi must be > 0")
    if not 0.0 <= qhr <= 1.0:
        raise ValueError("qhr must be in [0, 1]")
    if kind == "F1":
        return 1.0 / phi if qhr <= params.beta else phi
    if kind == "F2":
        p = phi / params.phi_max
        return (1.0 - qhr) / p + qhr * p
    if kind == "F3":
        p = phi / params.phi_max
        return (1.0 / (qhr + params.delta) - 1.0) / p + qhr * p
    if kind == "F4":
        return (qhr / params.beta - 1.0) * (phi / params.phi_max) + (1.0 - qhr)
    raise ValueError(f"unknown fitness kind {kind!r}")


def all_genotypes(n: int = 6):
    """All n**3 genotypes in lexicographic order."""
    return [
        (m0, m1, m2)
        for m0 in range(1, n + 1)
        for m1 in range(1, n + 1)
        for m2 in range(1, n + 1)
    ]


def make_model_fitness(kind: str, params: FitnessParams):
    """Return fit(genotype, qhr) with the phi of every genotype precomputed.

    The adaptation loop evaluates fitness millions of times per run; the
    per-genotype lookup table keeps that path to a few float operations.
    """
    if kind not in FITNESS_KINDS:
        raise ValueError(f"unknown fitness kind {kind!r}")
    phis = {g: phi_of(g, params) for g in all_genotypes(params.n)}
    if kind == "F1":
        beta = params.beta

        def fit(genotype, qhr, _phis=phis, _beta=beta):
            phi = _phis[genotype]
            return 1.0 / phi if qhr <= _beta else phi

        return fit
    if kind in ("F2", "F3"):
        phi_max = params.phi_max
        norm = {g: p / phi_max for g, p in phis.items()}
        if kind == "F2":

            def fit(genotype, qhr, _norm=norm):
                p = _norm[genotype]
                return (1.0 - qhr) / p + qhr * p

            return fit
        delta = params.delta

        def fit(genotype, qhr, _norm=norm, _delta=delta):
            p = _norm[genotype]
            return (1.0 / (qhr + _delta) - 1.0) / p + qhr * p

        return fit
    beta = params.beta
    norm = {g: p / params.phi_max for g, p in phis.items()}

    def fit(genotype, qhr, _norm=norm, _beta=beta):
        return (qhr / _beta - 1.0) * _norm[genotype] + (1.0 - qhr)

    return fit


def random_genotype(rng, n: int = 6):
    """Uniform random genotype; peers start with one of these."""
    return (rng.randint(1, n), rng.randint(1, n), rng.randint(1, n))
