"""Per-peer genetic adaptation: selection, crossover, mutation, survival.

Every adaptation period the peer averages its own query hit ratio with its
neighbors', rates every model it can see with the configured fitness
function at that shared ratio, recombines its own model with a partner
model picked inversely proportional to fitness, mutates the offspring with
probability 1 - <QHR>, and finally keeps one of {own, offspring1,
offspring2}, again by inverse-fitness selection.  There is no convergence
test: the loop is an unbounded periodic tick.
"""

__all__ = [
    "select_inverse_proportionate",
    "crossover",
    "mutate",
    "adaptation_tick",
]

FITNESS_FLOOR = 1e-9  # at or below this a candidate is already optimal


def select_inverse_proportionate(candidates, rng):
    """Pick (item, fitness) with probability proportional to 1/fitness.

    A candidate with fitness <= FITNESS_FLOOR is returned outright (it
    cannot be beaten and its inverse weight would overflow the draw).
    """
    if not candidates:
        raise ValueError("no candidates")
    best = None
    best_fit = None
    for item, fit in candidates:
        if fit <= FITNESS_FLOOR:
            if best is None or fit < best_fit:
                best, best_fit = item, fit
    if best is not None:
        return best
    total = 0.0
    weights = []
    for _, fit in candidates:
        w = 1.0 / fit
        total += w
        weights.append(w)
    pick = rng.random() * total
    acc = 0.0
    for (item, _), w in zip(candidates, weights):
        acc += w
        if pick < acc:
            return item
    return candidates[-1][0]


def crossover(a, b, rng):
    """One-point crossover at a uniform crosspoint in {1, 2}."""
    c = rng.randint(1, 2)
    return a[:c] + b[c:], b[:c] + a[c:]


def mutate(g, p_mut: float, n: int, rng):
    """With probability p_mut resample one uniformly chosen gene from [1..n]."""
    if p_mut > 0.0 and rng.random() < p_mut:
        pos = rng.randrange(len(g))
        gene = rng.randint(1, n)
        return g[:pos] + (gene,) + g[pos + 1:]
    return g


def adaptation_tick(own_genotype, own_qhr, neighbor_snapshots, fitness_fn,
                    n: int, rng):
    """One adaptation step; returns the surviving genotype.

    neighbor_snapshots is a sequence of (genotype, qhr) pairs read
    atomically at tick time.  Fitness of every candidate model, own or
    neighbor, is evaluated at the shared neighborhood-average hit ratio.
    An isolated peer keeps its genotype.

    This runs about a million times per simulated network-hour, so the
    selection/crossover/mutation steps are inlined rather than composed
    from the operator functions above; the operators stay the behavioral
    reference and the test suite checks the two paths against each other.
    """
    if not neighbor_snapshots:
        return own_genotype
    total_q = own_qhr
    for _, q in neighbor_snapshots:
        total_q += q
    mean_q = total_q / (len(neighbor_snapshots) + 1)
    random = rng.random

    # partner: inverse-fitness draw over the neighbor models
    min_f = 1e300
    min_g = None
    total_w = 0.0
    weighted = []
    for g, _ in neighbor_snapshots:
        f = fitness_fn(g, mean_q)
        if f < min_f:
            min_f = f
            min_g = g
        if f > FITNESS_FLOOR:
            w = 1.0 / f
            total_w += w
            weighted.append((g, w))
    if min_f <= FITNESS_FLOOR:
        partner = min_g
    else:
        pick = random() * total_w
        acc = 0.0
        partner = weighted[-1][0]
        for g, w in weighted:
            acc += w
            if pick < acc:
                partner = g
                break

    # one-point crossover, crosspoint uniform in {1, 2}
    c = 1 if random() < 0.5 else 2
    child1 = own_genotype[:c] + partner[c:]
    child2 = partner[:c] + own_genotype[c:]

    # mutate each offspring with probability 1 - <QHR>
    p_mut = 1.0 - mean_q
    if p_mut > 0.0:
        if random() < p_mut:
            pos = int(random() * 3)
            gene = 1 + int(random() * n)
            child1 = child1[:pos] + (gene,) + child1[pos + 1:]
        if random() < p_mut:
            pos = int(random() * 3)
            gene = 1 + int(random() * n)
            child2 = child2[:pos] + (gene,) + child2[pos + 1:]

    # survivor: inverse-fitness draw over {own, child1, child2}
    f0 = fitness_fn(own_genotype, mean_q)
    f1 = fitness_fn(child1, mean_q)
    f2 = fitness_fn(child2, mean_q)
    if f0 <= FITNESS_FLOOR or f1 <= FITNESS_FLOOR or f2 <= FITNESS_FLOOR:
        best, best_f = own_genotype, f0
        if f1 < best_f:
            best, best_f = child1, f1
        if f2 < best_f:
            best, best_f = child2, f2
        return best
    w0 = 1.0 / f0
    w1 = 1.0 / f1
    w2 = 1.0 / f2
    pick = random() * (w0 + w1 + w2)
    if pick < w0:
        return own_genotype
    if pick < w0 + w1:
        return child1
    return child2
