"""Randomized 2-ruling set of a spanning subgraph of the clique.

The algorithm repeatedly peels off a random test set whose induced subgraph
is linear-size in expectation, processes it with the deterministic sparse
MIS scheme, and removes the test set together with its neighborhood:

* every node broadcasts its degree, so all nodes know the remaining edge
  count m;
* while m > 2n: each remaining node joins the test set T independently with
  probability q = sqrt(n/m) and broadcasts its choice; members broadcast
  their degree inside T so everyone can compute e[T];
* if e[T] <= 4n (expected value is exactly n, so this holds with constant
  probability), all nodes compute an MIS of the induced subgraph via
  load-balanced dissemination, add it to the output, and T plus its
  neighborhood leaves the graph; otherwise the iteration is a no-op;
* the loop exit leaves at most 2n edges, which one final MIS call absorbs.

The output is independent, and every node was in some T or adjacent to one,
hence within two hops of the output.

Execution is expressed as a per-node phase object (so a host program can
embed it) plus a shared scratch holding the aggregates that every node
derives from the same broadcast ledger.  Computing those aggregates once
instead of n times changes nothing observable; any node could reproduce
them from its own inbox.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graphs import induced_edge_count
from .simulator import NodeProgram, Payload, RoundRng, Trace, run
from .sparse_mis import greedy_mis

ACCEPT_EDGE_FACTOR = 4  # accept a test set when e[T] <= 4n


def default_max_rounds(n: int) -> int:
    """Far beyond the expected round count; reaching it signals a bug."""
    return 64 * max(1, math.ceil(math.log2(max(2, n)))) * (ACCEPT_EDGE_FACTOR + 6)


@dataclass(frozen=True)
class IterationRecord:
    m: int
    q: float
    test_edges: int
    accepted: bool

    def to_dict(self) -> dict:
        return {"m": self.m, "q": self.q, "test_edges": self.test_edges,
                "accepted": self.accepted}


@dataclass(frozen=True, eq=False)
class RulingSetRun:
    """Result and progress instrumentation of one run."""

    result: tuple[int, ...]
    iterations: int
    per_iteration: tuple[IterationRecord, ...]
    thresholds_crossed: tuple[tuple[int, int], ...]  # (k, first iteration with m <= L_k)
    rounds: int
    final_m: int
    # Accepted-iteration internals (test set, removed set), kept out of the
    # JSON form; used by verification.
    detail: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "result": list(self.result),
            "iterations": self.iterations,
            "per_iteration": [rec.to_dict() for rec in self.per_iteration],
            "thresholds_crossed": [list(tc) for tc in self.thresholds_crossed],
            "rounds": self.rounds,
            "final_m": self.final_m,
        }


def threshold_count(n: int) -> int:
    """Number of edge-count milestones: ceil(log2 log2 n)."""
    if n < 3:
        return 0
    return max(0, math.ceil(math.log2(math.log2(n))))


def threshold_schedule(n: int) -> list[float]:
    """Milestones L_k = n^(1 + 1/2^k) for k = 1..K, with the terminal one
    pinned to 2n (the loop's exit condition)."""
    K = threshold_count(n)
    levels = [float(n) ** (1.0 + 0.5 ** k) for k in range(1, K + 1)]
    if levels:
        levels[-1] = 2.0 * n
    return levels


def crossing_schedule(per_iteration, final_m: int, n: int) -> tuple[tuple[int, int], ...]:
    """First iteration index (1-based) at whose start m <= L_k, per milestone.

    The edge count after the last iteration counts as the start of iteration
    len + 1, so the terminal milestone is always crossed.
    """
    m_series = [rec.m for rec in per_iteration] + [final_m]
    crossings = []
    for k, level in enumerate(threshold_schedule(n), start=1):
        s_k = next(i for i, m in enumerate(m_series, start=1) if m <= level)
        crossings.append((k, s_k))
    return tuple(crossings)


def measure_thresholds(run_result: RulingSetRun, n: int) -> list[int]:
    """Iterations spent between consecutive milestone crossings."""
    counts = []
    prev = 1  # every run starts below the trivial n^2 milestone
    for _, s_k in run_result.thresholds_crossed:
        counts.append(s_k - prev)
        prev = s_k
    return counts


@dataclass(frozen=True)
class RulingCheck:
    accepted: bool
    witness: tuple | None = None


def verify_ruling_set(adjacency, ruling, beta: int) -> RulingCheck:
    """Accept iff the set is independent and every node is within beta hops.

    On rejection the witness is ("adjacent", u, v) for an edge inside the
    set, or ("too_far", node, hops) with hops = -1 for unreachable nodes.
    """
    n = len(adjacency)
    members = sorted(set(int(u) for u in ruling))
    in_set = np.zeros(n, dtype=bool)
    in_set[members] = True
    for u in members:
        hit = adjacency[u][in_set[adjacency[u]]]
        if hit.size:
            return RulingCheck(False, ("adjacent", u, int(hit[0])))

    dist = np.full(n, -1, dtype=np.int64)
    queue = deque(members)
    dist[members] = 0
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(int(v))
    unreachable = np.nonzero(dist < 0)[0]
    if unreachable.size:
        return RulingCheck(False, ("too_far", int(unreachable[0]), -1))
    if int(dist.max()) > beta:
        v = int(np.argmax(dist))
        return RulingCheck(False, ("too_far", v, int(dist[v])))
    return RulingCheck(True, None)


def sample_test_set_edges(adjacency, trials: int, seed: int) -> np.ndarray:
    """Draw the per-iteration test set repeatedly on a fixed graph and log
    the induced edge count each time.

    Mirrors one loop iteration at fixed m (membership probability
    sqrt(n/m) with the same per-node coin streams), so the sample mean
    estimates the expected test-set edge count, which equals n.
    """
    n = len(adjacency)
    m = sum(len(a) for a in adjacency) // 2
    if m == 0:
        raise ValueError("sampling needs at least one edge")
    q = math.sqrt(n / m)
    counts = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        mask = np.array([RoundRng(seed, node, t).random() < q for node in range(n)])
        counts[t] = induced_edge_count(adjacency, mask)
    return counts


class _RulingScratch:
    """Aggregates every node derives from the shared broadcast ledger.

    Holds no topology: per-node adjacency stays in the per-node phase
    objects, and everything here is reconstructed from broadcasts alone.
    """

    def __init__(self, n: int):
        self.n = n
        self.state = "deg"
        self.directive = None
        self.alive = np.ones(n, dtype=bool)
        self.in_t = np.zeros(n, dtype=bool)
        self.members = np.zeros(n, dtype=bool)
        self.prefix = np.zeros(n, dtype=np.int64)
        self.m = 0
        self.q = 0.0
        self.after_mis = None
        self.edge_total = 0
        self.relay_rounds = 0
        self.arrivals_left = 0
        self.gathered: set[tuple[int, int]] = set()
        self.result: set[int] = set()
        self.records: list[IterationRecord] = []
        self.detail: list[tuple[tuple, tuple]] = []
        self._pending_test: tuple = ()
        self.begin_round: int | None = None
        self.done_round: int | None = None
        self._last_round = -1

    # -- global transition, computed once per round ------------------------

    def ensure(self, round_no: int, broadcasts) -> None:
        if round_no == self._last_round:
            return
        self._last_round = round_no
        state = self.state

        if state == "deg":
            deg = np.zeros(self.n, dtype=np.int64)
            for src, p in broadcasts:
                if p.tag == "deg":
                    deg[src] = p.fields[0]
            self.m = int(deg.sum()) // 2
            if self.m <= 2 * self.n:
                self.members = self.alive.copy()
                self.after_mis = "final"
                self.state = "odeg"
                self.directive = "odeg_bcast"
            else:
                self.q = math.sqrt(self.n / self.m)
                self.state = "flags"
                self.directive = "flags_bcast"

        elif state == "flags":
            self.in_t = np.zeros(self.n, dtype=bool)
            for src, p in broadcasts:
                if p.tag == "t" and p.fields[0]:
                    self.in_t[src] = True
            self.state = "tdeg"
            self.directive = "tdeg_bcast"

        elif state == "tdeg":
            total = 0
            for src, p in broadcasts:
                if p.tag == "tdeg":
                    total += p.fields[0]
            test_edges = total // 2
            accepted = test_edges <= ACCEPT_EDGE_FACTOR * self.n
            self.records.append(IterationRecord(self.m, self.q, test_edges, accepted))
            if accepted:
                self.members = self.in_t.copy()
                self._pending_test = tuple(int(v) for v in np.nonzero(self.in_t)[0])
                self.after_mis = "removal"
                self.state = "odeg"
                self.directive = "odeg_bcast"
            else:
                self.state = "flags"
                self.directive = "flags_bcast"

        elif state == "odeg":
            outdeg = np.zeros(self.n, dtype=np.int64)
            for src, p in broadcasts:
                if p.tag == "odeg":
                    outdeg[src] = p.fields[0]
            self.prefix = np.concatenate(([0], np.cumsum(outdeg)[:-1]))
            self.edge_total = int(outdeg.sum())
            self.gathered = set()
            if self.edge_total == 0:
                self._complete_mis()
            else:
                self.relay_rounds = math.ceil(self.edge_total / self.n)
                self.state = "relay_build"
                self.directive = "send_edges"

        elif state == "relay_build":
            # Edges are in flight as point-to-point messages; queues form now.
            self.arrivals_left = self.relay_rounds
            self.state = "relay_gather"
            self.directive = "relay_first"

        elif state == "relay_gather":
            for src, p in broadcasts:
                if p.tag == "edge":
                    self.gathered.add((p.fields[0], p.fields[1]))
            self.arrivals_left -= 1
            if self.arrivals_left == 0:
                assert len(self.gathered) == self.edge_total
                self._complete_mis()
            else:
                self.directive = "relay_next"

        elif state == "gone":
            removed = []
            for src, p in broadcasts:
                if p.tag == "gone":
                    self.alive[src] = False
                    removed.append(src)
            self.detail.append((self._pending_test, tuple(sorted(removed))))
            self.state = "deg"
            self.directive = "deg_bcast"

        elif state == "done":
            self.directive = None

    def _complete_mis(self) -> None:
        member_ids = [int(v) for v in np.nonzero(self.members)[0]]
        nbr_map: dict[int, set[int]] = {u: set() for u in member_ids}
        for u, v in self.gathered:
            nbr_map[u].add(v)
            nbr_map[v].add(u)
        self.result |= greedy_mis(nbr_map, member_ids)
        if self.after_mis == "final":
            self.state = "done"
            self.directive = None
            self.done_round = self._last_round
        else:
            self.state = "gone"
            self.directive = "gone_bcast"

    @property
    def iterations(self) -> int:
        return len(self.records)


class RulingSetPhase:
    """Per-node view of the algorithm, drivable from any host program."""

    def __init__(self, node: int, n: int, neighbors: np.ndarray, scratch: _RulingScratch):
        self.node = node
        self.n = n
        self.nbrs = np.asarray(neighbors, dtype=np.int64)
        self.scratch = scratch
        self._queue: list[tuple[int, int]] = []
        self._kept: list[tuple[int, int]] = []
        self._queue_pos = 0
        self.receipt_count = 0

    def begin(self, ctx) -> None:
        """Kick off with the degree broadcast that establishes m."""
        if self.scratch.begin_round is None:
            self.scratch.begin_round = ctx.round
        ctx.broadcast(Payload("deg", (len(self.nbrs),)))

    def step(self, ctx, inbox) -> bool:
        """Advance one round; returns True once the result set is complete."""
        st = self.scratch
        st.ensure(ctx.round, inbox.broadcasts)
        directive = st.directive
        me = self.node

        if directive == "flags_bcast":
            if st.alive[me]:
                joined = 1 if ctx.rng.random() < st.q else 0
                ctx.broadcast(Payload("t", (joined,)))

        elif directive == "tdeg_bcast":
            if st.in_t[me]:
                d = int(np.count_nonzero(st.in_t[self.nbrs]))
                ctx.broadcast(Payload("tdeg", (d,)))

        elif directive == "odeg_bcast":
            if st.members[me]:
                mask = st.members[self.nbrs] & (self.nbrs > me)
                ctx.broadcast(Payload("odeg", (int(np.count_nonzero(mask)),)))

        elif directive == "send_edges":
            self._queue = []
            self._kept = []
            self._queue_pos = 0
            if st.members[me]:
                higher = np.sort(self.nbrs[st.members[self.nbrs] & (self.nbrs > me)])
                base = int(st.prefix[me])
                for idx, v in enumerate(higher):
                    relay = (base + idx) % self.n
                    edge = (me, int(v))
                    if relay == me:
                        self._kept.append(edge)
                    else:
                        ctx.send(relay, Payload("edge", edge))

        elif directive == "relay_first":
            received = [(m.payload.fields[0], m.payload.fields[1])
                        for m in inbox.direct if m.payload.tag == "edge"]
            self._queue = sorted(received + self._kept)
            self.receipt_count = len(self._queue)
            if self._queue:
                ctx.broadcast(Payload("edge", self._queue[0]))
                self._queue_pos = 1

        elif directive == "relay_next":
            if self._queue_pos < len(self._queue):
                ctx.broadcast(Payload("edge", self._queue[self._queue_pos]))
                self._queue_pos += 1

        elif directive == "gone_bcast":
            if st.alive[me] and (st.in_t[me] or bool(st.in_t[self.nbrs].any())):
                ctx.broadcast(Payload("gone"))

        elif directive == "deg_bcast":
            if st.alive[me]:
                d = int(np.count_nonzero(st.alive[self.nbrs]))
                ctx.broadcast(Payload("deg", (d,)))

        return st.state == "done"


class TwoRulingSetProgram(NodeProgram):
    """Standalone host: run the phase, halt with this node's membership flag."""

    def __init__(self, node: int, n: int, neighbors: np.ndarray, scratch: _RulingScratch):
        self.phase = RulingSetPhase(node, n, neighbors, scratch)

    def on_round(self, ctx, inbox) -> None:
        if ctx.round == 1:
            self.phase.begin(ctx)
            return
        if self.phase.step(ctx, inbox):
            ctx.halt(1 if self.phase.node in self.phase.scratch.result else 0)


def two_ruling_set_programs(adjacency):
    n = len(adjacency)
    scratch = _RulingScratch(n)
    programs = [TwoRulingSetProgram(node, n, adjacency[node], scratch) for node in range(n)]
    return programs, scratch


def run_two_ruling_set(adjacency, seed: int = 0,
                       max_rounds: int | None = None) -> tuple[RulingSetRun, Trace]:
    """Simulate one run and assemble the instrumented result."""
    n = len(adjacency)
    programs, scratch = two_ruling_set_programs(adjacency)
    trace = run(programs, seed=seed, max_rounds=max_rounds or default_max_rounds(n))
    result = tuple(node for node in range(n) if trace.outputs[node])
    assert result == tuple(sorted(scratch.result))
    records = tuple(scratch.records)
    span = scratch.done_round - scratch.begin_round + 1
    ruling_run = RulingSetRun(
        result=result,
        iterations=len(records),
        per_iteration=records,
        thresholds_crossed=crossing_schedule(records, scratch.m, n),
        rounds=span,
        final_m=scratch.m,
        detail=tuple(scratch.detail),
    )
    return ruling_run, trace
