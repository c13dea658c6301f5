"""Metric facility-location instances and the exact sequential cost machinery.

An instance is a finite metric space (n points, symmetric distance matrix)
together with a positive opening cost per point.  Opening a subset F of
points costs the sum of their opening costs plus, for every point, the
distance to its nearest open point.

Two per-point quantities drive both the distributed algorithm and the
analysis oracles:

* the characteristic radius ``r_i``: the unique radius at which the total
  overlap ``sum(r_i - d)`` over the closed ball around point i equals the
  opening cost ``f_i``;
* its smoothed companion ``rbar_i = min_j (D(i, j) + r_j)``, an idempotent
  transform whose sum, divided by 6, lower-bounds the optimal cost.

All functions here are pure; instances are immutable once validated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

# Relative tolerance for floating-point equality checks (fixed-point residual,
# triangle slack, cost identities).
REL_TOL = 1e-9


class InstanceError(ValueError):
    """A candidate instance violates one of the metric-space invariants."""


class NonZeroDiagonal(InstanceError):
    pass


class AsymmetricDistance(InstanceError):
    pass


class ZeroDistanceBetweenDistinctPoints(InstanceError):
    pass


class TriangleViolation(InstanceError):
    """Triangle inequality fails; carries a witness triple (i, via, k)."""

    def __init__(self, i: int, via: int, k: int, slack: float):
        self.witness = (i, via, k)
        self.slack = slack
        super().__init__(
            f"triangle inequality violated: d({i},{k}) > d({i},{via}) + d({via},{k})"
            f" by {slack:g}"
        )


class NonPositiveOpeningCost(InstanceError):
    pass


class EmptyConfiguration(ValueError):
    """A configuration must open at least one point."""


@dataclass(frozen=True, eq=False)
class MetricInstance:
    """A validated problem input: n points, distances, opening costs.

    Construct through :func:`validate_instance` (or the file loaders); the
    arrays are treated as read-only after construction.
    """

    n: int
    dist: np.ndarray       # (n, n) symmetric, zero diagonal, positive off-diagonal
    open_cost: np.ndarray  # (n,) strictly positive

    def to_dict(self) -> dict:
        return {"n": self.n, "f": self.open_cost.tolist(), "d": self.dist.tolist()}

    @staticmethod
    def from_dict(data: dict) -> "MetricInstance":
        return validate_instance(int(data["n"]), data["d"], data["f"])


def read_instance(path: str) -> MetricInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return MetricInstance.from_dict(json.load(fh))


def write_instance(inst: MetricInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(inst.to_dict(), fh)
        fh.write("\n")


def validate_instance(n: int, dist, open_cost) -> MetricInstance:
    """Check every metric-space invariant and return the validated instance.

    Rejects with the first violated invariant, in order: shape, finiteness,
    zero diagonal, symmetry, positive off-diagonal distances, triangle
    inequality (with a witness triple), positive opening costs.

    The triangle check is the full cubic scan; instances are desk-scale by
    design.  Comparisons use a relative tolerance so that distances assembled
    from floating-point arithmetic (square roots, shortest-path sums) are not
    rejected for last-ulp noise.
    """
    d = np.asarray(dist, dtype=float)
    f = np.asarray(open_cost, dtype=float)
    if d.shape != (n, n):
        raise InstanceError(f"distance matrix must be {n}x{n}, got {d.shape}")
    if f.shape != (n,):
        raise InstanceError(f"opening-cost vector must have length {n}, got {f.shape}")
    if not (np.isfinite(d).all() and np.isfinite(f).all()):
        raise InstanceError("distances and opening costs must be finite")

    diag = np.diagonal(d)
    if (diag != 0.0).any():
        i = int(np.argmax(diag != 0.0))
        raise NonZeroDiagonal(f"dist[{i}][{i}] = {diag[i]:g}, expected 0")

    if not np.array_equal(d, d.T):
        i, j = map(int, np.argwhere(d != d.T)[0])
        raise AsymmetricDistance(f"dist[{i}][{j}] = {d[i, j]:g} != dist[{j}][{i}] = {d[j, i]:g}")

    off = d + np.eye(n)  # mask the diagonal out of the positivity check
    if (off <= 0.0).any():
        i, j = map(int, np.argwhere(off <= 0.0)[0])
        if d[i, j] == 0.0:
            raise ZeroDistanceBetweenDistinctPoints(f"dist[{i}][{j}] = 0 for distinct points")
        raise InstanceError(f"dist[{i}][{j}] = {d[i, j]:g} is negative")

    tol = REL_TOL * max(1.0, float(d.max(initial=0.0)))
    for via in range(n):
        detour = d[:, via : via + 1] + d[via : via + 1, :]
        bad = d > detour + tol
        if bad.any():
            i, k = map(int, np.argwhere(bad)[0])
            raise TriangleViolation(i, via, k, float(d[i, k] - detour[i, k]))

    if (f <= 0.0).any():
        i = int(np.argmax(f <= 0.0))
        raise NonPositiveOpeningCost(f"open_cost[{i}] = {f[i]:g}, must be > 0")

    return MetricInstance(n=n, dist=d, open_cost=f)


def _radius_from_row(row: np.ndarray, cost: float) -> float:
    """Solve sum_{d_j <= r} (r - d_j) = cost for one point's distance row.

    The left side is piecewise linear and strictly increasing (the self
    distance 0 is always inside the ball), so the root is unique.  Scanning
    the sorted distances, the segment containing m ball members gives the
    closed-form candidate r = (cost + sum of the m nearest distances) / m;
    the first candidate not exceeding the next distance is the root.
    """
    d = np.sort(row)
    prefix = np.cumsum(d)
    cand = (cost + prefix) / np.arange(1, d.size + 1)
    ok = np.empty(d.size, dtype=bool)
    np.less_equal(cand[:-1], d[1:], out=ok[:-1])
    ok[-1] = True
    return float(cand[int(np.argmax(ok))])


def characteristic_radii(inst: MetricInstance) -> np.ndarray:
    """Exact characteristic radius of every point (closed-form per segment)."""
    return np.array(
        [_radius_from_row(inst.dist[i], float(inst.open_cost[i])) for i in range(inst.n)]
    )


def smoothed_radii(inst: MetricInstance, radii: np.ndarray) -> np.ndarray:
    """Apply rbar_i = min_j (D(i, j) + r_j).

    The result never exceeds ``radii`` (the j = i term contributes r_i) and
    is a fixed point: applying the transform again returns it unchanged.
    """
    return (inst.dist + radii[None, :]).min(axis=1)


@dataclass(frozen=True, eq=False)
class RadiiProfile:
    """Per-point radii with the global minimum and geometric class indices."""

    r: np.ndarray
    rbar: np.ndarray
    r0: float
    class_of: np.ndarray


@dataclass(frozen=True)
class Configuration:
    """An opened subset together with the induced nearest-facility assignment.

    ``open`` is sorted; ties in the assignment go to the lowest open index so
    that results are reproducible.
    """

    open: tuple[int, ...]
    assign: tuple[int, ...]

    @classmethod
    def from_open(cls, inst: MetricInstance, open_nodes) -> "Configuration":
        opened = tuple(sorted({int(i) for i in open_nodes}))
        if not opened:
            raise EmptyConfiguration("configuration must open at least one point")
        if opened[0] < 0 or opened[-1] >= inst.n:
            raise ValueError(f"open set {opened} out of range for n={inst.n}")
        cols = inst.dist[:, opened]
        assign = tuple(opened[a] for a in np.argmin(cols, axis=1))
        return cls(open=opened, assign=assign)


def nearest_open(row: np.ndarray, open_sorted) -> int:
    """Index of the closest open facility for one distance row (lowest-index ties)."""
    opened = list(open_sorted)
    return int(opened[int(np.argmin(row[opened]))])


def charge(inst: MetricInstance, radii: np.ndarray, i: int, config: Configuration) -> float:
    """Per-point cost share: distance to the nearest open facility plus the
    overlap ``max(0, r_j - D(j, i))`` contributed by every open facility j.

    Summed over all points, charges reproduce :func:`total_cost` exactly.
    """
    opened = np.array(config.open, dtype=int)
    if opened.size == 0:
        raise EmptyConfiguration("charge needs a nonempty configuration")
    connection = float(inst.dist[i, opened].min())
    overlap = float(np.maximum(0.0, radii[opened] - inst.dist[opened, i]).sum())
    return connection + overlap


def total_cost(inst: MetricInstance, config: Configuration) -> float:
    """Opening costs of the configuration plus every point's connection cost."""
    opened = np.array(config.open, dtype=int)
    if opened.size == 0:
        raise EmptyConfiguration("cost needs a nonempty configuration")
    assign = np.array(config.assign, dtype=int)
    return float(inst.open_cost[opened].sum() + inst.dist[np.arange(inst.n), assign].sum())


def cost_lower_bound(inst: MetricInstance) -> float:
    """sum(rbar) / 6: a cost floor valid for every configuration."""
    r = characteristic_radii(inst)
    return float(smoothed_radii(inst, r).sum() / 6.0)
