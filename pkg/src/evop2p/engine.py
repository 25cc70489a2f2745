"""Discrete-event simulation core.

One run owns a virtual clock, a (time, seq)-ordered event heap and a
single seeded random stream, so a given configuration always produces a
bit-identical trace.  Events cover query workload (Poisson), churn
(independent Poisson join and leave processes), per-peer adaptation ticks,
resource releases, periodic metrics samples, and the optional load switch
of the changing-load scenario.

Independent runs share nothing; run several of them in separate processes
and merge the traces afterwards.
"""

import heapq
import math
import random
from collections import namedtuple
from dataclasses import dataclass, field, replace

from . import adaptation, genome, metrics, protocol
from .overlay import TopologyParams, generate

__all__ = [
    "ScenarioConfig", "MetricsSample", "RunTrace",
    "run", "write_trace", "read_trace",
    "draw_capacities", "draw_request",
    "CPU_GRID", "RAM_GRID", "DISK_GRID", "LIGHT_REQUEST",
    "TRACE_COLUMNS", "PAPER_SCALE_N",
]

# capacity grid: uniform multiples of (512 MHz, 256 MB, 10 GB) up to
# (2048 MHz, 1024 MB, 100 GB)
CPU_GRID = (512, 1024, 1536, 2048)
RAM_GRID = (256, 512, 768, 1024)
DISK_GRID = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100)
LIGHT_REQUEST = (256, 128, 1)

# reference network size at which the default workload/churn rates give
# utilization ~= 1; ScenarioConfig.scaled() keeps that ratio at other sizes
PAPER_SCALE_N = 10000

# event kinds, ordered roughly by frequency
EV_MSG = 0
EV_ADAPT = 1
EV_OFFER = 2
EV_CONFIRM = 3
EV_VERDICT = 4
EV_TIMEOUT = 5
EV_RELEASE = 6
EV_QUERYGEN = 7
EV_JOIN = 8
EV_LEAVE = 9
EV_SAMPLE = 10
EV_SWITCH = 11

TRACE_COLUMNS = (
    "t", "qhr_mean", "qhr_std", "m0_mean", "m0_std", "m1_mean", "m1_std",
    "m2_mean", "m2_std", "e_mean", "s_mean", "c_mean", "c_std", "h_mean",
    "alive",
)

MetricsSample = namedtuple("MetricsSample", TRACE_COLUMNS)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one run needs; defaults are the reference scenario."""

    n_nodes: int = 10000
    n0: int = 5
    m: int = 3
    duration: float = 9000.0          # 150 minutes
    churn_rate: float = 0.14          # joins/s and leaves/s, independent
    query_rate: float = 36.0          # queries/s over the whole network
    load_profile: str = "static"      # "static" | "changing"
    load_switch_time: float = 3000.0  # minute 50
    mix: float = 0.9                  # share of the phase-dominant profile
    sample_period: float = 60.0
    adapt_period: float = 7.0         # Ta
    fitness_kind: str = "F2"
    phi0: float = 100.0
    phi1: float = 10.0
    phi2: float = 5.0
    beta: float = 0.8
    delta: float = 0.01
    alphabet: int = 6                 # n
    model_window: int = 1             # W
    qhr_window: int = 50              # K outcomes feeding the hit ratio
    hop_latency: float = 0.1          # seconds per overlay hop
    query_timeout: float = 5.0
    release_mean: float = 280.0       # mean resource holding time
    dup_expiry: float = 60.0
    seed: int = 1

    def validate(self):
        if self.duration < 0:
            raise ValueError("duration must be >= 0")
        if self.churn_rate < 0 or self.query_rate < 0:
            raise ValueError("rates must be >= 0")
        if not 0.0 <= self.mix <= 1.0:
            raise ValueError("mix must be in [0, 1]")
        if self.load_profile not in ("static", "changing"):
            raise ValueError(f"unknown load profile {self.load_profile!r}")
        if self.fitness_kind not in genome.FITNESS_KINDS:
            raise ValueError(f"unknown fitness kind {self.fitness_kind!r}")
        if self.sample_period <= 0 or self.adapt_period <= 0:
            raise ValueError("periods must be > 0")
        if self.model_window < 1 or self.qhr_window < 1:
            raise ValueError("windows must be >= 1")
        if self.hop_latency <= 0 or self.query_timeout <= 0:
            raise ValueError("latency and timeout must be > 0")
        if self.release_mean <= 0:
            raise ValueError("release_mean must be > 0")
        TopologyParams(n=self.n_nodes, n0=self.n0, m=self.m)
        self.fitness_params()  # bounds of beta/delta/alphabet

    def fitness_params(self) -> genome.FitnessParams:
        return genome.FitnessParams(
            phi0=self.phi0, phi1=self.phi1, phi2=self.phi2,
            beta=self.beta, delta=self.delta, n=self.alphabet)

    def scaled(self, n_nodes: int) -> "ScenarioConfig":
        """Same scenario at another network size, load kept proportional.

        The reference rates give utilization ~1 at PAPER_SCALE_N nodes
        (query_rate * release_mean ~ N); running a smaller network at the
        unscaled rates would just drown it (10x the offered load at
        N/10), so desk-scale experiments scale both workload and churn by
        n_nodes / PAPER_SCALE_N.
        """
        factor = n_nodes / PAPER_SCALE_N
        return replace(self, n_nodes=n_nodes,
                       query_rate=self.query_rate * factor,
                       churn_rate=self.churn_rate * factor)


@dataclass
class RunTrace:
    cfg: ScenarioConfig
    samples: list = field(default_factory=list)
    audit: dict = field(default_factory=dict)

    def series(self, column: str):
        """(t, value) pairs for one trace column."""
        idx = TRACE_COLUMNS.index(column)
        return [(s[0], s[idx]) for s in self.samples]


def draw_capacities(rng):
    """Uniform capacities on the grid; max (2048 MHz, 1024 MB, 100 GB)."""
    return (CPU_GRID[rng.randrange(4)], RAM_GRID[rng.randrange(4)],
            DISK_GRID[rng.randrange(10)])


def draw_request(profile: str, rng):
    """One resource request: "heavy" is uniform on the capacity grid (the
    offered load then matches total capacity at the reference rates),
    "light" is the fixed small request."""
    if profile == "light":
        return LIGHT_REQUEST
    return (CPU_GRID[rng.randrange(4)], RAM_GRID[rng.randrange(4)],
            DISK_GRID[rng.randrange(10)])


class Simulation:
    """Single seeded run; use run() unless you need to poke at internals."""

    def __init__(self, cfg: ScenarioConfig):
        cfg.validate()
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.now = 0.0
        self.heap = []
        self._seq = 0
        self.alphabet = cfg.alphabet
        self.dup_expiry = cfg.dup_expiry
        self.hop_latency = cfg.hop_latency
        self.query_timeout = cfg.query_timeout
        self.release_mean = cfg.release_mean
        self.fitness_fn = genome.make_model_fitness(
            cfg.fitness_kind, cfg.fitness_params())
        self.graph = generate(
            TopologyParams(n=cfg.n_nodes, n0=cfg.n0, m=cfg.m), self.rng)
        self.peers = {}
        for pid in self.graph.alive:
            self.peers[pid] = self._new_peer(pid)
        self.heavy_phase = True  # changing-load scenarios start heavy
        self.next_qid = 0
        # audit counters
        self.submitted = 0
        self.hits = 0
        self.misses = 0
        self.reserve_count = 0
        self.release_count = 0
        self.dead_pending = 0
        self._escm_memo = {}
        self._log2n = math.log2(cfg.alphabet)

    # -- scheduling helpers (protocol calls these) --------------------

    def push(self, time, kind, *payload):
        self._seq += 1
        heapq.heappush(self.heap, (time, self._seq, kind) + payload)

    def send_query(self, target, query, ttl):
        self._seq += 1
        heapq.heappush(self.heap, (self.now + self.hop_latency, self._seq,
                                   EV_MSG, (target,), query, ttl))

    def send_query_batch(self, targets, query, ttl):
        """One delivery event for a whole forwarding step; all copies of a
        hop arrive together, so batching changes no observable ordering."""
        self._seq += 1
        heapq.heappush(self.heap, (self.now + self.hop_latency, self._seq,
                                   EV_MSG, targets, query, ttl))

    def send_offer(self, origin, query, provider, free):
        self.push(self.now + self.hop_latency, EV_OFFER,
                  origin, query[0], provider, free)

    def send_confirm(self, provider, qid, origin, cpu, ram, disk):
        self.push(self.now + self.hop_latency, EV_CONFIRM,
                  provider, qid, origin, cpu, ram, disk)

    def send_verdict(self, origin, qid, ok):
        self.push(self.now + self.hop_latency, EV_VERDICT, origin, qid, ok)

    def schedule_timeout(self, origin, qid):
        self.push(self.now + self.query_timeout, EV_TIMEOUT, origin, qid)

    def schedule_release(self, pid, rid):
        self.push(self.now + self.rng.expovariate(1.0 / self.release_mean),
                  EV_RELEASE, pid, rid)

    # -- run ------------------------------------------------------------

    def _new_peer(self, pid):
        cfg = self.cfg
        return protocol.Peer(
            pid,
            genome.random_genotype(self.rng, cfg.alphabet),
            draw_capacities(self.rng),
            cfg.alphabet, cfg.qhr_window, cfg.model_window)

    def _schedule_initial(self):
        cfg = self.cfg
        rng = self.rng
        self.push(0.0, EV_SAMPLE)
        for pid in self.peers:
            self.push(rng.uniform(0.0, cfg.adapt_period), EV_ADAPT, pid)
        if cfg.query_rate > 0.0:
            self.push(rng.expovariate(cfg.query_rate), EV_QUERYGEN)
        if cfg.churn_rate > 0.0:
            self.push(rng.expovariate(cfg.churn_rate), EV_JOIN)
            self.push(rng.expovariate(cfg.churn_rate), EV_LEAVE)
        if cfg.load_profile == "changing":
            self.push(cfg.load_switch_time, EV_SWITCH)

    def run(self) -> RunTrace:
        self._schedule_initial()
        trace = RunTrace(cfg=self.cfg)
        samples = trace.samples
        cfg = self.cfg
        duration = cfg.duration
        heap = self.heap
        pop = heapq.heappop
        peers = self.peers
        peers_get = peers.get
        rng = self.rng
        handle_query = protocol.handle_query
        dup_expiry = self.dup_expiry
        seen_prune = protocol._SEEN_PRUNE_SIZE
        while heap:
            event = heap[0]
            time = event[0]
            if time > duration:
                break
            pop(heap)
            self.now = time
            kind = event[2]
            if kind == EV_MSG:
                query = event[4]
                qid = query[0]
                ttl = event[5]
                expiry = time + dup_expiry
                for target in event[3]:
                    peer = peers_get(target)
                    if peer is None:
                        continue
                    seen = peer.seen
                    if qid in seen:
                        continue
                    if len(seen) >= seen_prune:
                        for k in [k for k, e in seen.items() if e <= time]:
                            del seen[k]
                    seen[qid] = expiry
                    handle_query(peer, query, ttl, self)
            elif kind == EV_ADAPT:
                pid = event[3]
                peer = peers.get(pid)
                if peer is not None:
                    self._adapt(peer)
                    self.push(time + cfg.adapt_period, EV_ADAPT, pid)
            elif kind == EV_OFFER:
                peer = peers.get(event[3])
                if peer is not None:
                    protocol.resolve_offer(peer, event[4], event[5],
                                           event[6], self)
            elif kind == EV_CONFIRM:
                peer = peers.get(event[3])
                if peer is not None:
                    protocol.handle_confirm(peer, event[4], event[5],
                                            event[6], event[7], event[8],
                                            self)
                else:
                    # provider left while the confirm was in flight
                    self.send_verdict(event[5], event[4], False)
            elif kind == EV_VERDICT:
                peer = peers.get(event[3])
                if peer is not None:
                    protocol.handle_verdict(peer, event[4], event[5], self)
            elif kind == EV_TIMEOUT:
                peer = peers.get(event[3])
                if peer is not None:
                    protocol.handle_timeout(peer, event[4], self)
            elif kind == EV_RELEASE:
                peer = peers.get(event[3])
                if peer is not None:
                    protocol.release(peer, event[4], self)
            elif kind == EV_QUERYGEN:
                self._originate_random_query()
                self.push(time + rng.expovariate(cfg.query_rate), EV_QUERYGEN)
            elif kind == EV_JOIN:
                self._join()
                self.push(time + rng.expovariate(cfg.churn_rate), EV_JOIN)
            elif kind == EV_LEAVE:
                self._leave()
                self.push(time + rng.expovariate(cfg.churn_rate), EV_LEAVE)
            elif kind == EV_SAMPLE:
                samples.append(self._sample())
                if time + cfg.sample_period <= duration:
                    self.push(time + cfg.sample_period, EV_SAMPLE)
            elif kind == EV_SWITCH:
                self.heavy_phase = False
        self.now = duration
        trace.audit = self._audit()
        return trace

    # -- event bodies -----------------------------------------------------

    def _originate_random_query(self):
        alive = self.graph.alive_list()
        if not alive:
            return
        rng = self.rng
        origin = alive[rng.randrange(len(alive))]
        if self.cfg.load_profile == "static":
            request = draw_request("heavy", rng)
        else:
            dominant = "heavy" if self.heavy_phase else "light"
            other = "light" if self.heavy_phase else "heavy"
            profile = dominant if rng.random() < self.cfg.mix else other
            request = draw_request(profile, rng)
        qid = self.next_qid
        self.next_qid = qid + 1
        query = (qid, origin, request[0], request[1], request[2])
        protocol.originate_query(self.peers[origin], query, self)

    def _join(self):
        if len(self.graph) < self.cfg.m:
            return
        pid = self.graph.join(self.cfg.m, self.rng)
        peer = self._new_peer(pid)
        self.peers[pid] = peer
        self.push(self.now + self.rng.uniform(0.0, self.cfg.adapt_period),
                  EV_ADAPT, pid)

    def _leave(self):
        graph = self.graph
        if len(graph) <= self.cfg.m:
            return
        alive = graph.alive_list()
        victim = alive[self.rng.randrange(len(alive))]
        peer = self.peers.pop(victim)
        # departing resources vanish; their reservations count as released
        self.release_count += len(peer.reservations)
        self.dead_pending += len(peer.pending)
        graph.leave(victim)

    def _adapt(self, peer):
        adjacency = self.graph.adjacency[peer.pid]
        peers = self.peers
        snapshots = [(peers[nb].genotype, peers[nb].qhr) for nb in adjacency]
        if snapshots:
            survivor = adaptation.adaptation_tick(
                peer.genotype, peer.qhr, snapshots, self.fitness_fn,
                self.alphabet, self.rng)
        else:
            survivor = peer.genotype
        peer.install_genotype(survivor, self.alphabet)

    def _escm(self, window):
        """(E, S, C) of a model window, memoized on the value-count profile."""
        counts = {}
        total = 0
        for g in window:
            for gene in g:
                counts[gene] = counts.get(gene, 0) + 1
                total += 1
        key = tuple(sorted(counts.values()))
        hit = self._escm_memo.get(key)
        if hit is None:
            entropy = 0.0
            for c in counts.values():
                p = c / total
                entropy -= p * math.log2(p)
            info = entropy / self._log2n
            if info > 1.0:
                info = 1.0
            hit = metrics.measures_from_information(info)
            self._escm_memo[key] = hit
        return hit

    def _sample(self) -> MetricsSample:
        peers = self.peers.values()
        count = len(self.peers)
        if count == 0:
            return MetricsSample(self.now, *([0.0] * 13), 0)
        s_qhr = ss_qhr = 0.0
        s_m0 = ss_m0 = s_m1 = ss_m1 = s_m2 = ss_m2 = 0.0
        s_e = s_s = s_c = ss_c = s_h = 0.0
        escm = self._escm
        for peer in peers:
            q = peer.qhr
            s_qhr += q
            ss_qhr += q * q
            m0, m1, m2 = peer.genotype
            s_m0 += m0
            ss_m0 += m0 * m0
            s_m1 += m1
            ss_m1 += m1 * m1
            s_m2 += m2
            ss_m2 += m2 * m2
            e, s, c = escm(peer.window)
            s_e += e
            s_s += s
            s_c += c
            ss_c += c * c
            init = peer.initial_genotype
            g = peer.genotype
            if g is init or g == init:
                s_h += 1.0
            else:
                s_h += ((g[0] == init[0]) + (g[1] == init[1])
                        + (g[2] == init[2])) / 3.0

        def std(total, total_sq):
            mean = total / count
            var = total_sq / count - mean * mean
            return math.sqrt(var) if var > 0.0 else 0.0

        return MetricsSample(
            self.now,
            s_qhr / count, std(s_qhr, ss_qhr),
            s_m0 / count, std(s_m0, ss_m0),
            s_m1 / count, std(s_m1, ss_m1),
            s_m2 / count, std(s_m2, ss_m2),
            s_e / count, s_s / count,
            s_c / count, std(s_c, ss_c),
            s_h / count, count)

    def _audit(self) -> dict:
        end_pending = sum(len(p.pending) for p in self.peers.values())
        active = sum(len(p.reservations) for p in self.peers.values())
        negative_free = any(
            p.free_cpu < 0 or p.free_ram < 0 or p.free_disk < 0
            for p in self.peers.values())
        over_capacity = any(
            p.free_cpu > p.cap_cpu or p.free_ram > p.cap_ram
            or p.free_disk > p.cap_disk
            for p in self.peers.values())
        return {
            "submitted": self.submitted,
            "hits": self.hits,
            "misses": self.misses,
            "pending_at_end": end_pending,
            "pending_lost_to_churn": self.dead_pending,
            "reservations_made": self.reserve_count,
            "reservations_released": self.release_count,
            "reservations_active_at_end": active,
            "alive_at_end": len(self.peers),
            "negative_free_capacity": negative_free,
            "free_above_capacity": over_capacity,
            "conserved": (not negative_free and not over_capacity
                          and self.reserve_count
                          == self.release_count + active
                          and self.submitted
                          == self.hits + self.misses + end_pending
                          + self.dead_pending),
        }


def run(cfg: ScenarioConfig) -> RunTrace:
    """Execute one seeded run and return its trace."""
    return Simulation(cfg).run()


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return format(value, ".6g")


def write_trace(trace: RunTrace, path):
    """Trace as CSV, one row per sample, mandatory header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for sample in trace.samples:
            fh.write(",".join(_fmt(v) for v in sample) + "\n")


def read_trace(path):
    """Rows of a trace CSV as MetricsSample tuples."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace header in {path}")
        for line in fh:
            parts = line.strip().split(",")
            rows.append(MetricsSample(*[float(x) for x in parts[:-1]],
                                      int(parts[-1])))
    return rows
