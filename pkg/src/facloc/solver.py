"""Distributed facility location on the clique, reduced to a 2-ruling set.

Pipeline per node:

1. compute the own characteristic radius from the local distance row and
   opening cost, broadcast it;
2. partition all nodes into classes whose radii agree within a factor of
   c0 = 1 + 1/sqrt(2), anchored at the global minimum radius;
3. link two same-class nodes whenever their distance is at most the sum of
   their radii (each node derives its incident links from its own row);
4. run the randomized 2-ruling set on the union of the class graphs;
5. broadcast ruling-set membership;
6. open a ruling-set node unless some node of a strictly lower class sits
   within twice its radius (checked against all nodes, not only ruling-set
   members, using purely local knowledge);
7. broadcast open status; everyone connects to the nearest open facility.

The per-node audit checks the two slack bounds that make the output an
O(1) approximation: distance to the nearest facility at most
(s + 1) * 4 * c0^2 times the smoothed radius (s = 2 here), and the total
overlap contribution of open facilities at most c0 times the smoothed
radius.  Both are hard invariants of the construction, so the audit treats
any violation as a bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric import (
    Configuration,
    MetricInstance,
    RadiiProfile,
    _radius_from_row,
    characteristic_radii,
    nearest_open,
    smoothed_radii,
    total_cost,
)
from .ruling_set import (
    RulingSetPhase,
    RulingSetRun,
    _RulingScratch,
    crossing_schedule,
    default_max_rounds,
)
from .simulator import NodeProgram, Payload, Trace, run

# Class growth base and the ruling-set reach used by the pipeline.
C0 = 1.0 + 1.0 / math.sqrt(2.0)
RULING_REACH = 2

_LOG_C0 = math.log(C0)


class NonPositiveMinimumRadius(ValueError):
    pass


def connection_bound(reach: int = RULING_REACH) -> float:
    """Per-node cap on D(x_i, F*) / rbar_i."""
    return (reach + 1) * 4.0 * C0 * C0


def contribution_bound() -> float:
    """Per-node cap on the facilities' overlap contribution over rbar_i."""
    return C0


def cost_bound_coefficient(reach: int = RULING_REACH) -> float:
    """Aggregate cap on cost / sum(rbar)."""
    return 4.0 * C0 * C0 * reach + 4.0 * C0 * C0 + C0


def approximation_bound(reach: int = RULING_REACH) -> float:
    """End-to-end cap on cost / OPT."""
    return 6.0 * cost_bound_coefficient(reach)


def radius_classes(radii: np.ndarray, r0: float) -> np.ndarray:
    """Class index k of each radius: c0^k * r0 <= r < c0^(k+1) * r0.

    Computed by logarithm, then nudged so the defining inequality holds
    exactly in the implemented arithmetic even on class boundaries.
    """
    if r0 <= 0.0:
        raise NonPositiveMinimumRadius(f"minimum radius must be positive, got {r0:g}")
    out = np.floor(np.log(np.asarray(radii) / r0) / _LOG_C0).astype(np.int64)
    for i, r in enumerate(radii):
        k = int(out[i])
        while r < C0**k * r0:
            k -= 1
        while r >= C0 ** (k + 1) * r0:
            k += 1
        out[i] = k
    return out


def radii_profile(inst: MetricInstance) -> RadiiProfile:
    r = characteristic_radii(inst)
    rbar = smoothed_radii(inst, r)
    r0 = float(r.min())
    return RadiiProfile(r=r, rbar=rbar, r0=r0, class_of=radius_classes(r, r0))


def is_class_neighbor(inst: MetricInstance, radii: np.ndarray, class_of: np.ndarray,
                      i: int, j: int) -> bool:
    """Link rule of the class graphs: same class and distance <= r_i + r_j."""
    return (
        i != j
        and class_of[i] == class_of[j]
        and inst.dist[i, j] <= radii[i] + radii[j]
    )


def class_overlap_adjacency(inst: MetricInstance, radii: np.ndarray,
                            class_of: np.ndarray) -> list[np.ndarray]:
    """Union of the per-class graphs as an adjacency list."""
    rows = []
    for i in range(inst.n):
        mask = (class_of == class_of[i]) & (inst.dist[i] <= radii[i] + radii)
        mask[i] = False
        rows.append(np.nonzero(mask)[0].astype(np.int64))
    return rows


def _open_decision(row: np.ndarray, r_i: float, k_i: int, class_of: np.ndarray,
                   is_member: bool) -> bool:
    if not is_member:
        return False
    return not bool(np.any((class_of < k_i) & (row <= 2.0 * r_i)))


def should_open(i: int, class_of: np.ndarray, in_ruling, inst: MetricInstance,
                radii: np.ndarray) -> bool:
    """Opening rule: ruling-set member with no lower-class node within 2 r_i."""
    return _open_decision(inst.dist[i], float(radii[i]), int(class_of[i]),
                          class_of, bool(in_ruling[i]))


@dataclass(frozen=True, eq=False)
class SolutionAudit:
    """Per-node slack report for one solve run."""

    connection_slack: np.ndarray    # D(x_i, F*) / rbar_i
    contribution_slack: np.ndarray  # sum_j max(0, r_j - d_ji) / rbar_i
    connection_bound: float
    contribution_bound: float
    max_own_ball_facilities: int    # facilities covering a node within their own radius
    independent: bool               # F* independent in the class-overlap union
    lower_bound_ok: bool
    ok: bool

    def summary(self) -> dict:
        return {
            "max_connection_slack": float(self.connection_slack.max()),
            "connection_bound": self.connection_bound,
            "max_contribution_slack": float(self.contribution_slack.max()),
            "contribution_bound": self.contribution_bound,
            "ok": self.ok,
        }


def audit_solution(inst: MetricInstance, profile: RadiiProfile,
                   config: Configuration) -> SolutionAudit:
    r, rbar = profile.r, profile.rbar
    opened = np.array(config.open, dtype=int)
    conn = inst.dist[:, opened].min(axis=1)
    overlap = np.maximum(0.0, r[opened][:, None] - inst.dist[opened, :]).sum(axis=0)
    conn_slack = conn / rbar
    contrib_slack = overlap / rbar

    covering = (inst.dist[opened, :] <= r[opened][:, None]).sum(axis=0)

    independent = True
    for a_pos, j in enumerate(opened):
        for l in opened[a_pos + 1 :]:
            if is_class_neighbor(inst, r, profile.class_of, int(j), int(l)):
                independent = False

    cb, ob = connection_bound(), contribution_bound()
    slack = 1.0 + 1e-12
    cost = total_cost(inst, config)
    lower_ok = bool(rbar.sum() / 6.0 <= cost * slack)
    ok = (
        bool((conn_slack <= cb * slack).all())
        and bool((contrib_slack <= ob * slack).all())
        and int(covering.max()) <= 1
        and independent
        and lower_ok
    )
    return SolutionAudit(
        connection_slack=conn_slack,
        contribution_slack=contrib_slack,
        connection_bound=cb,
        contribution_bound=ob,
        max_own_ball_facilities=int(covering.max()),
        independent=independent,
        lower_bound_ok=lower_ok,
        ok=ok,
    )


class FacLocProgram(NodeProgram):
    """One node of the pipeline; local input is the distance row and cost."""

    def __init__(self, node: int, n: int, row: np.ndarray, open_cost: float,
                 scratch: _RulingScratch):
        self.node = node
        self.n = n
        self.row = row
        self.my_r = _radius_from_row(row, float(open_cost))
        self.scratch = scratch
        self.phase: RulingSetPhase | None = None
        self.r = np.empty(n)
        self.class_of: np.ndarray | None = None
        self.stage = "radii"
        self.in_ruling = False

    def on_round(self, ctx, inbox) -> None:
        if ctx.round == 1:
            ctx.broadcast(Payload("r", (self.my_r,)))
            return

        if ctx.round == 2:
            for src, p in inbox:
                if p.tag == "r":
                    self.r[src] = p.fields[0]
            self.r[self.node] = self.my_r
            self.class_of = radius_classes(self.r, float(self.r.min()))
            k_i = self.class_of[self.node]
            mask = (self.class_of == k_i) & (self.row <= self.my_r + self.r)
            mask[self.node] = False
            self.phase = RulingSetPhase(self.node, self.n, np.nonzero(mask)[0], self.scratch)
            self.phase.begin(ctx)
            self.stage = "ruling"
            return

        if self.stage == "ruling":
            if self.phase.step(ctx, inbox):
                self.in_ruling = self.node in self.scratch.result
                ctx.broadcast(Payload("member", (1 if self.in_ruling else 0,)))
                self.stage = "members"
            return

        if self.stage == "members":
            # The broadcast confirms membership network-wide; the opening
            # decision itself needs only local data.
            opens = _open_decision(
                self.row, self.my_r, int(self.class_of[self.node]),
                self.class_of, self.in_ruling,
            )
            self.opens = opens
            ctx.broadcast(Payload("open", (1 if opens else 0,)))
            self.stage = "open"
            return

        if self.stage == "open":
            facilities = [src for src, p in inbox if p.tag == "open" and p.fields[0]]
            if self.opens:
                facilities.append(self.node)
            facilities.sort()
            ctx.halt((1 if self.opens else 0, nearest_open(self.row, facilities)))


@dataclass(frozen=True, eq=False)
class SolveResult:
    """End-to-end outcome of one distributed run."""

    config: Configuration
    cost: float
    rounds: int
    messages: int
    radii: RadiiProfile
    ruling: RulingSetRun
    audit: SolutionAudit
    trace: Trace
    seed: int

    def to_dict(self) -> dict:
        return {
            "open": list(self.config.open),
            "cost": self.cost,
            "rounds": self.rounds,
            "messages": self.messages,
            "audit": self.audit.summary(),
        }


def solve(inst: MetricInstance, seed: int = 0, max_rounds: int | None = None) -> SolveResult:
    """Run the full pipeline inside the simulator and audit the outcome."""
    n = inst.n
    scratch = _RulingScratch(n)
    programs = [
        FacLocProgram(i, n, inst.dist[i], float(inst.open_cost[i]), scratch)
        for i in range(n)
    ]
    trace = run(programs, seed=seed, max_rounds=max_rounds or (default_max_rounds(n) + 8))

    opened = tuple(i for i in range(n) if trace.outputs[i][0])
    config = Configuration.from_open(inst, opened)
    assert config.assign == tuple(out[1] for out in trace.outputs)

    profile = radii_profile(inst)
    records = tuple(scratch.records)
    ruling = RulingSetRun(
        result=tuple(sorted(scratch.result)),
        iterations=len(records),
        per_iteration=records,
        thresholds_crossed=crossing_schedule(records, scratch.m, n),
        rounds=scratch.done_round - scratch.begin_round + 1,
        final_m=scratch.m,
        detail=tuple(scratch.detail),
    )
    return SolveResult(
        config=config,
        cost=total_cost(inst, config),
        rounds=trace.rounds,
        messages=trace.messages_total,
        radii=profile,
        ruling=ruling,
        audit=audit_solution(inst, profile, config),
        trace=trace,
        seed=seed,
    )
