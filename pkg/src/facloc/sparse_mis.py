"""Deterministic MIS of a sparse induced subgraph by load-balanced dissemination.

Given a node subset M whose induced subgraph has e edges, the whole subgraph
is shipped to every node in ceil(e/n) + O(1) rounds:

1. members announce themselves (one broadcast);
2. members broadcast their outdegree, counting edges oriented from lower to
   higher rank (ranks are the node ids, which are already a total order);
3. from the outdegrees everyone derives disjoint label ranges
   {D_i, ..., D_i + d_i - 1}, where D_i is the outdegree prefix sum, so the
   e edges get distinct labels covering 0..e-1;
4. the edge labeled l is sent to the node of rank l mod n, which caps every
   node's receipt count at ceil(e/n);
5. each node rebroadcasts its received edges, one per round;
6. everyone now holds the full subgraph and applies the same deterministic
   local rule: greedy MIS in ascending id order.

Every node gathers its own copy of the subgraph and computes the MIS
independently; the driver checks that all outputs agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import Inbox, NodeProgram, Payload, Trace, run

# Additive round slack of the dissemination scheme, asserted by the tests:
# announce + degrees + send + final compute, on top of ceil(e/n) relay rounds.
DETERMINISTIC_SLACK = 6


def greedy_mis(neighbors, order) -> set[int]:
    """Greedy independent dominating set over an explicit total order.

    ``neighbors`` maps each node to an iterable of its neighbors; the graph
    must be symmetric and loop-free.  Every node in ``order`` is either
    chosen or adjacent to an earlier chosen node.
    """
    chosen: set[int] = set()
    blocked: set[int] = set()
    for u in order:
        if u in blocked:
            continue
        chosen.add(u)
        blocked.add(u)
        blocked.update(neighbors[u])
    return chosen


@dataclass(frozen=True, eq=False)
class EdgeLabeling:
    """Rank-based labeling giving every edge a distinct label in 0..e-1."""

    rank: np.ndarray     # rank of every node; node ids are already 0..n-1
    outdeg: np.ndarray   # edges oriented low rank -> high rank, 0 outside M
    prefix: np.ndarray   # outdegree sum of lower-ranked nodes
    labels: dict         # (u, v) with u < v  ->  label


def edge_labeling(n: int, members, member_adjacency) -> EdgeLabeling:
    """Reference construction of the labeling (pure, used as a test oracle)."""
    outdeg = np.zeros(n, dtype=np.int64)
    for u in members:
        outdeg[u] = int(np.count_nonzero(member_adjacency[u] > u))
    prefix = np.concatenate(([0], np.cumsum(outdeg)[:-1]))
    labels = {}
    for u in members:
        higher = np.sort(member_adjacency[u][member_adjacency[u] > u])
        for idx, v in enumerate(higher):
            labels[(int(u), int(v))] = int(prefix[u]) + idx
    return EdgeLabeling(rank=np.arange(n), outdeg=outdeg, prefix=prefix, labels=labels)


class SparseMisProgram(NodeProgram):
    """Per-node state machine for the dissemination scheme above.

    ``member_neighbors`` are the node's neighbors inside the induced
    subgraph (empty for non-members).  All n nodes participate as relays.
    """

    def __init__(self, node: int, n: int, in_member: bool, member_neighbors: np.ndarray):
        self.node = node
        self.n = n
        self.in_member = bool(in_member)
        self.nbrs = np.asarray(member_neighbors, dtype=np.int64)
        self.members: list[int] = []
        self.edge_total = 0
        self.relay_rounds = 0
        self.queue: list[tuple[int, int]] = []
        self._self_kept: list[tuple[int, int]] = []
        self._queue_pos = 0
        self.gathered: set[tuple[int, int]] = set()
        self.receipt_count = 0

    def on_round(self, ctx, inbox: Inbox) -> None:
        t = ctx.round
        if t == 1:
            if self.in_member:
                ctx.broadcast(Payload("id"))
            return

        if t == 2:
            ids = [src for src, p in inbox if p.tag == "id"]
            if self.in_member:
                ids.append(self.node)
            self.members = sorted(ids)
            if self.in_member:
                d = int(np.count_nonzero(self.nbrs > self.node))
                ctx.broadcast(Payload("deg", (d,)))
            return

        if t == 3:
            outdeg = np.zeros(self.n, dtype=np.int64)
            for src, p in inbox:
                if p.tag == "deg":
                    outdeg[src] = p.fields[0]
            if self.in_member:
                outdeg[self.node] = int(np.count_nonzero(self.nbrs > self.node))
            prefix = np.concatenate(([0], np.cumsum(outdeg)[:-1]))
            self.edge_total = int(outdeg.sum())
            if self.edge_total == 0:
                ctx.halt(tuple(self.members))
                return
            self.relay_rounds = math.ceil(self.edge_total / self.n)
            if self.in_member:
                base = int(prefix[self.node])
                higher = np.sort(self.nbrs[self.nbrs > self.node])
                for idx, v in enumerate(higher):
                    relay = (base + idx) % self.n
                    edge = (self.node, int(v))
                    if relay == self.node:
                        self._self_kept.append(edge)  # no network hop needed
                    else:
                        ctx.send(relay, Payload("edge", edge))
            return

        first_relay = 4
        finish = first_relay + self.relay_rounds
        if t == first_relay:
            received = [
                (p.fields[0], p.fields[1]) for _, p in inbox if p.tag == "edge"
            ]
            self.queue = sorted(received + self._self_kept)
            self.receipt_count = len(self.queue)
            self.gathered.update(self.queue)
        else:
            for _, p in inbox:
                if p.tag == "edge":
                    self.gathered.add((p.fields[0], p.fields[1]))

        if t < finish:
            if self._queue_pos < len(self.queue):
                ctx.broadcast(Payload("edge", self.queue[self._queue_pos]))
                self._queue_pos += 1
            return

        # Final round: the whole subgraph has arrived.
        assert len(self.gathered) == self.edge_total
        nbr_map: dict[int, set[int]] = {u: set() for u in self.members}
        for u, v in self.gathered:
            nbr_map[u].add(v)
            nbr_map[v].add(u)
        mis = greedy_mis(nbr_map, self.members)
        ctx.halt(tuple(sorted(mis)))


def sparse_mis_programs(n: int, members, adjacency) -> list[SparseMisProgram]:
    """Build one program per clique node.

    ``adjacency`` is the spanning subgraph; each member's local input is its
    incident edges restricted to the member set, which is all a node knows.
    """
    member_set = set(int(m) for m in members)
    mask = np.zeros(n, dtype=bool)
    mask[list(member_set)] = True
    empty = np.empty(0, dtype=np.int64)
    programs = []
    for node in range(n):
        if node in member_set:
            nbrs = adjacency[node]
            programs.append(SparseMisProgram(node, n, True, nbrs[mask[nbrs]]))
        else:
            programs.append(SparseMisProgram(node, n, False, empty))
    return programs


@dataclass(frozen=True, eq=False)
class SparseMisRun:
    mis: tuple[int, ...]
    rounds: int
    edge_total: int
    relay_rounds: int
    receipts: np.ndarray  # edges received per node in the assignment round
    trace: Trace


def run_sparse_mis(n: int, members, adjacency, seed: int = 0,
                   max_rounds: int | None = None) -> SparseMisRun:
    """Simulate the scheme and cross-check that every node computed the same set."""
    programs = sparse_mis_programs(n, members, adjacency)
    if max_rounds is None:
        max_rounds = DETERMINISTIC_SLACK + 2 * math.ceil(
            max(1, sum(len(p.nbrs) for p in programs)) / n
        ) + 8
    trace = run(programs, seed=seed, max_rounds=max_rounds)
    outputs = set(trace.outputs)
    if len(outputs) != 1:
        raise AssertionError(f"nodes disagree on the MIS: {sorted(outputs)}")
    return SparseMisRun(
        mis=trace.outputs[0],
        rounds=trace.rounds,
        edge_total=programs[0].edge_total,
        relay_rounds=programs[0].relay_rounds,
        receipts=np.array([p.receipt_count for p in programs]),
        trace=trace,
    )
