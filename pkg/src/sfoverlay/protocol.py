"""Discrete-event simulation of the distributed rewiring protocol.

Every node wakes at exponentially distributed intervals. On waking it picks
a random unrewired edge and, if it is the designated initiator for that
edge, launches a biased random walk of ``2*l`` hops. The node reached at hop
``2*l`` replaces the initiating edge with an edge to the node recorded at
hop ``l`` and marks it. Messages between distinct nodes take a fixed
latency; self-loops of the walk and sends to oneself are handled locally
and cost nothing.
"""

from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import asdict, dataclass, field, fields

from .analysis import FitError, fit_power_law
from .graph import Graph
from .stationary import alpha_from_gamma

log = logging.getLogger(__name__)

WAKE, WALK, DISCONNECT, CONNECT, SNAPSHOT = range(5)

# exponent bounded like the usual grid search of discrete power-law fitters
DEFAULT_FIT = {"method": "exact", "exponent_range": (1.5, 3.5)}


@dataclass
class WalkMessage:
    a: int
    b: int
    gamma: float
    l: int
    hops: int = 0
    target: int | None = None
    alpha: float = field(init=False, repr=False)

    def __post_init__(self):
        self.alpha = alpha_from_gamma(self.gamma, strict=True)


@dataclass
class SimConfig:
    """Parameters of one adaptation cycle.

    ``delay`` defaults to ``n / 2``, which gives roughly one rewiring per
    time unit when about half of all wakes initiate a walk. ``max_time``
    bounds the cycle length (relative to its start) and defaults to ten
    times the expected ``m`` time units.
    """

    gamma: float
    l: int = 20
    delay: float | None = None
    snapshot_every: float = 200.0
    seed: int = 0
    max_time: float | None = None
    latency: float = 1e-3
    fit: dict | None = field(default_factory=lambda: dict(DEFAULT_FIT))

    def __post_init__(self):
        alpha_from_gamma(self.gamma, strict=True)
        if self.l < 1:
            raise ValueError(f"walk half-length must be >= 1, got {self.l}")
        if self.delay is not None and self.delay <= 0:
            raise ValueError("delay must be positive")
        if self.snapshot_every <= 0 or self.latency <= 0:
            raise ValueError("snapshot_every and latency must be positive")


@dataclass
class Counters:
    messages: int = 0
    walk_messages: int = 0
    self_loops: int = 0
    walks_started: int = 0
    rewirings: int = 0
    aborted_target_self: int = 0
    aborted_duplicate: int = 0
    aborted_isolated: int = 0
    stale_disconnects: int = 0
    duplicate_connects: int = 0
    isolation_events: int = 0

    @property
    def walks_aborted(self) -> int:
        return self.aborted_target_self + self.aborted_duplicate + self.aborted_isolated

    def copy(self) -> "Counters":
        return Counters(**asdict(self))

    def since(self, earlier: "Counters") -> "Counters":
        return Counters(**{f.name: getattr(self, f.name) - getattr(earlier, f.name) for f in fields(self)})


@dataclass
class TraceRecord:
    time: float
    gamma_f: float
    ks_D: float
    d_min_fit: float
    max_degree: int
    component_count: int
    rewired_fraction: float
    messages: int
    cycle: int = 0


TRACE_HEADER = "time,gamma_f,ks_D,dmin,max_degree,components,rewired_frac,messages"


@dataclass
class CycleResult:
    trace: list[TraceRecord]
    completed: bool
    start_time: float
    end_time: float
    counters: Counters
    m_start: int
    stuck_edges: int


@dataclass
class MessageCost:
    messages: int
    self_loop_hops: int
    bits_per_message: int
    bits: int


def message_cost(counters: Counters, n: int, l: int) -> MessageCost:
    """Message count and a bit estimate: three node ids, the exponent slot and a hop counter."""
    id_bits = max(1, math.ceil(math.log2(n)))
    per_msg = 4 * id_bits + max(1, math.ceil(math.log2(2 * l + 1)))
    return MessageCost(counters.messages, counters.self_loops, per_msg, counters.messages * per_msg)


def initiates(d_self: int, d_other: int, i_self: int, i_other: int) -> bool:
    """Whether ``self`` starts the rewiring of edge (self, other).

    Both endpoints need degree above one; the higher degree wins, ties go
    to the smaller id.
    """
    return d_other > 1 and d_self > 1 and (d_self > d_other or (d_self == d_other and i_self < i_other))


class Simulator:
    """Event loop plus per-node handlers over a shared :class:`Graph`."""

    def __init__(self, graph: Graph, seed: int = 0):
        self.graph = graph
        self.rng = random.Random(seed)
        self.clock = 0.0
        self.queue: list = []
        self._seq = 0
        self.counters = Counters()
        self.walks_in_flight = 0
        self._pending_disconnects = 0
        # rewiring op -> disconnect notices still expected
        self._open_ops: dict[int, int] = {}
        self._next_op = 0
        # local guard: (initiator, neighbour) -> time the walk surely finished
        self._walk_guard: dict[tuple[int, int], float] = {}
        self._wakes_scheduled = False
        self._dormant: set[int] = set()
        self._config: SimConfig | None = None
        self.m_reference = graph.m

    # ------------------------------------------------------------------
    # scheduling

    def _push(self, time: float, kind: int, node: int, payload=None) -> None:
        self._seq += 1
        heapq.heappush(self.queue, (time, self._seq, kind, node, payload))

    def _delay(self) -> float:
        d = self._config.delay
        return d if d is not None else self.graph.n / 2

    def _schedule_wake(self, v: int) -> None:
        self._push(self.clock + self.rng.expovariate(1.0 / self._delay()), WAKE, v)

    def _send(self, src: int, dst: int, kind: int, payload) -> None:
        self.counters.messages += 1
        self._push(self.clock + self._config.latency, kind, dst, payload)

    # ------------------------------------------------------------------
    # handlers

    def on_wake(self, v: int) -> None:
        g = self.graph
        u = g.random_unmarked_neighbor(v, self.rng)
        if u is None:
            # new edges are always marked, so v stays idle until marks are cleared
            self._dormant.add(v)
            return
        if initiates(g.degree(v), g.degree(u), v, u):
            cfg = self._config
            key = (v, u)
            if self._walk_guard.get(key, -1.0) < self.clock:
                self._walk_guard[key] = self.clock + (2 * cfg.l + 2) * cfg.latency
                msg = WalkMessage(a=v, b=u, gamma=cfg.gamma, l=cfg.l)
                self.counters.walks_started += 1
                self.walks_in_flight += 1
                self.counters.walk_messages += 1
                self._send(v, u, WALK, msg)
        self._schedule_wake(v)

    def on_walk(self, at: int, msg: WalkMessage) -> None:
        g = self.graph
        c = self.counters
        rng = self.rng
        nbrs = g._nbrs
        while True:
            msg.hops += 1
            if msg.hops == 2 * msg.l:
                self._finish_walk(at, msg)
                return
            if msg.hops == msg.l:
                msg.target = at
            here = nbrs[at]
            d = len(here)
            if d == 0:
                c.aborted_isolated += 1
                self.walks_in_flight -= 1
                return
            v = here[int(rng.random() * d)]
            if rng.random() <= (at / v) ** msg.alpha * d / len(nbrs[v]):
                c.walk_messages += 1
                self._send(at, v, WALK, msg)
                return
            c.self_loops += 1

    def _finish_walk(self, at: int, msg: WalkMessage) -> None:
        g = self.graph
        self.walks_in_flight -= 1
        if msg.target == at:
            self.counters.aborted_target_self += 1
            return
        if g.has_edge(at, msg.target):
            self.counters.aborted_duplicate += 1
            return
        op = self._next_op
        self._next_op += 1
        self._open_ops[op] = 2
        self.counters.rewirings += 1
        for dst, other in ((msg.b, msg.a), (msg.a, msg.b)):
            if dst == at:
                self.on_disconnect(dst, other, op)
            else:
                self._pending_disconnects += 1
                self._send(at, dst, DISCONNECT, (other, op))
        self._send(at, msg.target, CONNECT, at)
        self.on_connect(at, msg.target)

    def on_connect(self, at: int, y: int) -> None:
        g = self.graph
        if g.has_edge(at, y):
            # existing edge: only mark it
            if g.mark(at, y):
                self.counters.duplicate_connects += 1
            return
        g.add_edge(at, y, marked=True)

    def on_disconnect(self, at: int, b: int, op: int | None = None) -> None:
        g = self.graph
        removed = g.remove_edge(at, b)
        if removed:
            for v in (at, b):
                if g.degree(v) == 0:
                    self.counters.isolation_events += 1
        if op is None:
            return
        left = self._open_ops.pop(op)
        if left == 2:
            if not removed:
                # the edge vanished before this rewiring got to it
                self.counters.stale_disconnects += 1
            self._open_ops[op] = 1

    # ------------------------------------------------------------------
    # cycle driver

    def eligible_unmarked_edges(self) -> int:
        """Unmarked edges whose endpoints both have degree above one."""
        g = self.graph
        count = 0
        for v in g.nodes():
            dv = len(g._nbrs[v])
            if dv < 2 or len(g._marked[v]) == dv:
                continue
            marked = g._marked[v]
            for u in g._nbrs[v]:
                if v < u and u not in marked and len(g._nbrs[u]) > 1:
                    count += 1
        return count

    def _quiescent(self) -> bool:
        return self.walks_in_flight == 0 and self._pending_disconnects == 0

    def snapshot(self, cycle: int = 0) -> TraceRecord:
        g = self.graph
        deg = g.degrees()
        gamma_f = ks = dmin = math.nan
        fit_cfg = self._config.fit if self._config else None
        if fit_cfg is not None:
            try:
                fr = fit_power_law(deg, **fit_cfg)
                gamma_f, ks, dmin = fr.gamma_f, fr.ks_D, fr.d_min_fit
            except FitError:
                pass
        return TraceRecord(
            time=self.clock, gamma_f=gamma_f, ks_D=ks, d_min_fit=dmin,
            max_degree=int(deg.max()), component_count=len(g.connected_components()),
            rewired_fraction=g.n_marked / g.m if g.m else 1.0,
            messages=self.counters.messages, cycle=cycle,
        )

    def run_cycle(self, config: SimConfig, cycle: int = 0, clear_marks: bool = True) -> CycleResult:
        """Run the event loop until no rewirable edge is left, or ``max_time`` passes.

        The cycle ends when every edge is marked, or when no walk or
        disconnect is in flight and every unmarked edge touches a node of
        degree one (the initiation guard then blocks all further activity).
        """
        g = self.graph
        if not g.is_connected():
            log.warning("starting a cycle on a disconnected graph")
        if clear_marks:
            g.clear_marks()
        self._config = config
        start = self.clock
        before = self.counters.copy()
        m_start = g.m
        self.m_reference = m_start
        if config.max_time is not None:
            max_time = config.max_time
        else:
            # the busiest initiator handles one edge per wake
            max_time = 10.0 * self._delay() * max(2.0 * g.m / g.n, float(g.degrees().max()))
        deadline = start + max_time
        if not self._wakes_scheduled:
            for v in g.nodes():
                self._schedule_wake(v)
            self._wakes_scheduled = True
        else:
            for v in sorted(self._dormant):
                self._schedule_wake(v)
        self._dormant.clear()
        self._check_at = g.m
        trace = [self.snapshot(cycle)]
        self._push(start + config.snapshot_every, SNAPSHOT, 0)
        completed = self._done()
        queue = self.queue
        while not completed and queue:
            t, _, kind, node, payload = heapq.heappop(queue)
            if t > deadline:
                heapq.heappush(queue, (t, _, kind, node, payload))
                self.clock = deadline
                break
            self.clock = t
            if kind == WALK:
                self.on_walk(node, payload)
            elif kind == WAKE:
                self.on_wake(node)
            elif kind == DISCONNECT:
                self._pending_disconnects -= 1
                self.on_disconnect(node, payload[0], payload[1])
            elif kind == CONNECT:
                self.on_connect(node, payload)
            elif kind == SNAPSHOT:
                trace.append(self.snapshot(cycle))
                completed = self._done()
                if not completed:
                    self._push(t + config.snapshot_every, SNAPSHOT, 0)
                continue
            if g.m - g.n_marked <= self._check_at and self._quiescent():
                completed = self._done()
        # drop the pending snapshot tick of this cycle
        self.queue = [e for e in self.queue if e[2] != SNAPSHOT]
        heapq.heapify(self.queue)
        if trace[-1].time != self.clock or len(trace) == 1:
            trace.append(self.snapshot(cycle))
        self._walk_guard.clear()
        stuck = g.m - g.n_marked
        if not completed:
            log.warning("cycle %d stopped at t=%.1f with %d unmarked edges", cycle, self.clock, stuck)
        return CycleResult(trace, completed, start, self.clock, self.counters.since(before), m_start, stuck)

    def _done(self) -> bool:
        g = self.graph
        if not self._quiescent():
            return False
        unmarked = g.m - g.n_marked
        if unmarked == 0:
            return True
        eligible = self.eligible_unmarked_edges()
        # a rewiring disables at most three eligible edges, so rescanning
        # after eligible // 3 further rewirings cannot miss the end
        self._check_at = unmarked - max(1, eligible // 3)
        return eligible == 0

    def run_multi_cycle(self, configs: list[SimConfig]) -> list[CycleResult]:
        """Run consecutive cycles, clearing all marks before each one."""
        if not configs:
            log.warning("no cycles requested")
        return [self.run_cycle(cfg, cycle=k) for k, cfg in enumerate(configs)]


def run_cycle(graph: Graph, config: SimConfig) -> tuple[Simulator, CycleResult]:
    sim = Simulator(graph, config.seed)
    return sim, sim.run_cycle(config)


def run_multi_cycle(graph: Graph, configs: list[SimConfig], seed: int | None = None) -> tuple[Simulator, list[CycleResult]]:
    sim = Simulator(graph, configs[0].seed if seed is None and configs else (seed or 0))
    return sim, sim.run_multi_cycle(configs)
