"""Sequential oracles: the classic greedy 3-approximation and the exact optimum.

Both exist to validate everything else at desk scale.  The greedy opens
points in nondecreasing radius order unless an already-open point sits
within twice the candidate's radius; the exact solver enumerates every
nonempty subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import Configuration, MetricInstance, characteristic_radii

BRUTE_FORCE_LIMIT = 16


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OptResult:
    config: Configuration
    cost: float
    enumerated: int


def mettu_plaxton(inst: MetricInstance, radii: np.ndarray | None = None) -> Configuration:
    """Greedy by ascending characteristic radius; ties broken by point index.

    The output satisfies the separation property: no two opened points i, j
    with dist(i, j) <= r_i + r_j.
    """
    r = characteristic_radii(inst) if radii is None else radii
    order = np.lexsort((np.arange(inst.n), r))
    opened: list[int] = []
    for i in order:
        if not opened or (inst.dist[i, opened] > 2.0 * r[i]).all():
            opened.append(int(i))
    return Configuration.from_open(inst, opened)


def brute_force_opt(inst: MetricInstance, limit: int = BRUTE_FORCE_LIMIT) -> OptResult:
    """Exhaustive minimum over all 2^n - 1 nonempty configurations.

    Cost ties are broken by the lexicographically smallest open set, so the
    result is deterministic.  Subsets are evaluated in vectorized chunks.
    """
    n = inst.n
    if n < 1 or n > limit:
        raise InstanceTooLarge(f"brute force requires 1 <= n <= {limit}, got n={n}")

    total = (1 << n) - 1
    masks = np.arange(1, total + 1, dtype=np.int64)
    costs = np.empty(total, dtype=float)
    chunk = 4096
    f = inst.open_cost
    d = inst.dist
    for start in range(0, total, chunk):
        mk = masks[start : start + chunk]
        bits = ((mk[:, None] >> np.arange(n)) & 1).astype(bool)  # (B, n) open flags
        conn = np.where(bits[:, None, :], d[None, :, :], np.inf).min(axis=2).sum(axis=1)
        costs[start : start + chunk] = bits @ f + conn

    best_cost = float(costs.min())
    tied = masks[costs == best_cost]
    candidates = [tuple(j for j in range(n) if (int(m) >> j) & 1) for m in tied]
    best_open = min(candidates)
    config = Configuration.from_open(inst, best_open)
    return OptResult(config=config, cost=best_cost, enumerated=total)
