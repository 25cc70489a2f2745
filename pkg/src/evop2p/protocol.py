"""Epidemic resource lookup: peer state and the query/offer/confirm logic.

A query carries a requested resource triple and a remaining hop budget.
Each peer that sees it either offers (free capacity covers the request),
redirects it to a single cached provider whose last-known free capacity
covers it, or forwards it to ceil(f_k * degree) random neighbors while the
hop budget lasts.  Duplicate arrivals of the same query id are dropped.

Offers race back to the origin; the first one is confirmed and the
provider re-checks its capacity at confirm time, so a provider that spent
its capacity in the meantime declines.  Offers that arrive while a
confirm is in flight are kept as alternates (providers hold no offer
state, so an unused alternate costs nothing); a declined confirm falls
back to the next alternate and only then to pending, where the query can
still be rescued by a late offer or time out as a miss.  Without the
alternates, simultaneous queries that picked the same provider would die
together even when plenty of other providers had offered.

All functions mutate only the peer they are given and talk to the rest of
the world through the scheduling helpers of the simulation object, which
keeps them drivable from a stub in tests.
"""

from collections import deque

__all__ = ["Peer", "originate_query", "handle_query", "resolve_offer",
           "handle_confirm", "handle_verdict", "handle_timeout",
           "record_outcome", "current_qhr", "release", "note_seen"]

PENDING = 0
CONFIRMING = 1

_SEEN_PRUNE_SIZE = 256
_MAX_ALTERNATES = 4


class Peer:
    """Overlay node state; mutated only by the event loop of one run."""

    __slots__ = (
        "pid", "genotype", "initial_genotype", "f_k", "t_max", "d_max",
        "cap_cpu", "cap_ram", "cap_disk", "free_cpu", "free_ram", "free_disk",
        "cache", "seen", "pending", "outcomes", "hits", "qhr", "qhr_window",
        "window", "reservations", "next_rid", "generation",
    )

    def __init__(self, pid, genotype, capacities, alphabet, qhr_window,
                 model_window):
        self.pid = pid
        self.genotype = genotype
        self.initial_genotype = genotype
        self.f_k = genotype[0] / alphabet
        self.t_max = genotype[1]
        self.d_max = 2 * genotype[2]
        self.cap_cpu, self.cap_ram, self.cap_disk = capacities
        self.free_cpu, self.free_ram, self.free_disk = capacities
        self.cache = {}        # provider id -> last-known free triple, LRU order
        self.seen = {}         # query id -> expiry time
        self.pending = {}      # query id -> [cpu, ram, disk, state]
        self.outcomes = deque()
        self.hits = 0
        self.qhr = 0.5         # unbiased prior before any outcome
        self.qhr_window = qhr_window
        self.window = deque([genotype], maxlen=model_window)
        self.reservations = {}
        self.next_rid = 0
        self.generation = 0

    def install_genotype(self, genotype, alphabet):
        """Adopt a new model, recompute the phenotype, log it in the window."""
        self.genotype = genotype
        self.f_k = genotype[0] / alphabet
        self.t_max = genotype[1]
        d_max = 2 * genotype[2]
        self.d_max = d_max
        cache = self.cache
        while len(cache) > d_max:
            del cache[next(iter(cache))]
        self.window.append(genotype)
        self.generation += 1


def record_outcome(peer, hit):
    """Push a query outcome into the peer's sliding hit-ratio window."""
    outcomes = peer.outcomes
    if len(outcomes) == peer.qhr_window:
        peer.hits -= outcomes.popleft()
    flag = 1 if hit else 0
    outcomes.append(flag)
    peer.hits += flag
    peer.qhr = (peer.hits + 1.0) / (len(outcomes) + 2.0)


def current_qhr(peer) -> float:
    """Laplace-smoothed hit ratio over the last outcomes; 0.5 before any."""
    return peer.qhr


def originate_query(peer, query, sim):
    """Start a lookup at this peer (Algorithm entry).

    query is (qid, origin_pid, cpu, ram, disk).  A locally satisfiable
    request is served on the spot with zero messages; otherwise the query
    is registered as pending with a timeout and handled with the peer's
    own hop budget.
    """
    sim.submitted += 1
    _, _, cpu, ram, disk = query
    if peer.free_cpu >= cpu and peer.free_ram >= ram and peer.free_disk >= disk:
        _reserve(peer, cpu, ram, disk, sim)
        record_outcome(peer, True)
        sim.hits += 1
        return
    peer.pending[query[0]] = [cpu, ram, disk, PENDING, []]
    note_seen(peer, query[0], sim.now, sim.dup_expiry)
    sim.schedule_timeout(peer.pid, query[0])
    handle_query(peer, query, peer.t_max, sim)


def handle_query(peer, query, ttl, sim):
    """One peer's step of the epidemic lookup.

    Offer if the request fits in free capacity; else spend one hop and
    either redirect to the most recently used cached provider that looks
    capable, or forward to ceil(f_k * degree) distinct random neighbors
    while hops remain.  Failures are silent drops.
    """
    qid, origin, cpu, ram, disk = query
    if peer.free_cpu >= cpu and peer.free_ram >= ram and peer.free_disk >= disk:
        sim.send_offer(origin, query, peer.pid,
                       (peer.free_cpu, peer.free_ram, peer.free_disk))
        return
    ttl -= 1
    cache = peer.cache
    if cache:
        for provider in reversed(cache):
            free = cache[provider]
            if free[0] >= cpu and free[1] >= ram and free[2] >= disk:
                sim.send_query(provider, query, ttl if ttl > 0 else 0)
                return
    if ttl > 0:
        neighbors = sim.graph.adjacency.get(peer.pid)
        if not neighbors:
            return
        deg = len(neighbors)
        fan = (deg * peer.genotype[0] + sim.alphabet - 1) // sim.alphabet
        targets = list(neighbors)
        if fan < deg:
            # partial Fisher-Yates: distinct uniform picks, cheaper than
            # rng.sample on these tiny neighbor lists
            random = sim.rng.random
            for i in range(fan):
                j = i + int(random() * (deg - i))
                targets[i], targets[j] = targets[j], targets[i]
            del targets[fan:]
        sim.send_query_batch(tuple(targets), query, ttl)


def resolve_offer(peer, qid, provider, free, sim):
    """Origin-side handling of an offer.

    Every offer refreshes the origin's descriptor cache (it is the
    freshest capacity information available).  The first offer for a still
    pending query is confirmed; offers during an in-flight confirm are
    remembered as alternates; offers for satisfied or unknown queries are
    declined by simply not answering, which leaves no provider state to
    undo.
    """
    cache = peer.cache
    if provider in cache:
        del cache[provider]
    elif len(cache) >= peer.d_max:
        del cache[next(iter(cache))]
    cache[provider] = free
    entry = peer.pending.get(qid)
    if entry is None:
        return
    if entry[3] == PENDING:
        entry[3] = CONFIRMING
        sim.send_confirm(provider, qid, peer.pid, entry[0], entry[1], entry[2])
    elif len(entry[4]) < _MAX_ALTERNATES:
        entry[4].append(provider)


def handle_confirm(peer, qid, origin, cpu, ram, disk, sim):
    """Provider-side confirm: re-check capacity, reserve or decline."""
    if peer.free_cpu >= cpu and peer.free_ram >= ram and peer.free_disk >= disk:
        _reserve(peer, cpu, ram, disk, sim)
        sim.send_verdict(origin, qid, True)
    else:
        sim.send_verdict(origin, qid, False)


def handle_verdict(peer, qid, ok, sim):
    """Origin-side verdict: record the hit, retry an alternate, or fall
    back to pending."""
    entry = peer.pending.get(qid)
    if entry is None:
        return
    if ok:
        del peer.pending[qid]
        record_outcome(peer, True)
        sim.hits += 1
    elif entry[4]:
        provider = entry[4].pop(0)
        sim.send_confirm(provider, qid, peer.pid, entry[0], entry[1], entry[2])
    else:
        entry[3] = PENDING


def handle_timeout(peer, qid, sim):
    """A query that is still unresolved at its deadline counts as a miss."""
    if peer.pending.pop(qid, None) is not None:
        record_outcome(peer, False)
        sim.misses += 1


def _reserve(peer, cpu, ram, disk, sim):
    peer.free_cpu -= cpu
    peer.free_ram -= ram
    peer.free_disk -= disk
    rid = peer.next_rid
    peer.next_rid = rid + 1
    peer.reservations[rid] = (cpu, ram, disk)
    sim.reserve_count += 1
    sim.schedule_release(peer.pid, rid)


def release(peer, rid, sim):
    """Return a reservation's resources; idempotent for already-gone ids."""
    triple = peer.reservations.pop(rid, None)
    if triple is not None:
        peer.free_cpu += triple[0]
        peer.free_ram += triple[1]
        peer.free_disk += triple[2]
        sim.release_count += 1


def note_seen(peer, qid, now, dup_expiry) -> bool:
    """Record a query id; True if it is a duplicate.

    Query ids are unique, so expiry only bounds memory: expired entries
    are swept out whenever the cache grows past a fixed size.
    """
    seen = peer.seen
    if qid in seen:
        return True
    if len(seen) >= _SEEN_PRUNE_SIZE:
        expired = [k for k, exp in seen.items() if exp <= now]
        for k in expired:
            del seen[k]
    seen[qid] = now + dup_expiry
    return False
