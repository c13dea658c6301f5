"""Instance generators for experiments and tests.

Every generated instance is passed through the validator before it is
returned, so a generator bug surfaces as a validation error, not as a
corrupt experiment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import MetricInstance, validate_instance

KINDS = ("euclidean", "graph-metric", "figure2", "uniform-f")


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    dim: int = 2
    cost_range: tuple[float, float] = (0.5, 2.0)
    seed: int = 0


def _euclidean_points(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    # Duplicate points would violate the distinct-points invariant; resample
    # the (measure-zero) collisions.
    pts = rng.random((n, dim))
    for _ in range(16):
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        np.fill_diagonal(d2, 1.0)
        if (d2 > 0.0).all():
            return pts
        dup = np.unique(np.argwhere(d2 == 0.0)[:, 0])
        pts[dup] = rng.random((dup.size, dim))
    raise InvalidSpec("could not sample distinct points")


def _euclidean_matrix(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(d, 0.0)
    return d


def _graph_metric_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    """Shortest-path completion of a random connected weighted graph.

    Shortest-path distances satisfy the triangle inequality by construction.
    """
    w = np.full((n, n), np.inf)
    np.fill_diagonal(w, 0.0)
    for v in range(1, n):  # random spanning tree keeps the graph connected
        u = int(rng.integers(0, v))
        w[u, v] = w[v, u] = rng.uniform(0.5, 1.5)
    for _ in range(n):
        u, v = int(rng.integers(0, n)), int(rng.integers(0, n))
        if u != v and not np.isfinite(w[u, v]):
            w[u, v] = w[v, u] = rng.uniform(0.5, 1.5)
    for mid in range(n):
        w = np.minimum(w, np.add.outer(w[:, mid], w[mid, :]))
    return w


def generate(spec: GeneratorSpec) -> MetricInstance:
    if spec.kind not in KINDS:
        raise InvalidSpec(f"unknown kind {spec.kind!r}, expected one of {KINDS}")
    if spec.n < 1:
        raise InvalidSpec("n must be >= 1")
    low, high = spec.cost_range
    if low <= 0 or high < low:
        raise InvalidSpec(f"cost range must satisfy 0 < low <= high, got {spec.cost_range}")

    if spec.kind == "figure2":
        if spec.n != 2:
            raise InvalidSpec("the two-point reference instance has n = 2")
        return figure2_instance()

    rng = np.random.default_rng(spec.seed)
    if spec.kind == "graph-metric":
        dist = _graph_metric_matrix(rng, spec.n) if spec.n > 1 else np.zeros((1, 1))
    else:
        if spec.dim < 1:
            raise InvalidSpec("dim must be >= 1")
        dist = _euclidean_matrix(_euclidean_points(rng, spec.n, spec.dim))

    if spec.kind == "uniform-f":
        costs = np.full(spec.n, (low + high) / 2.0)
    else:
        costs = rng.uniform(low, high, size=spec.n)
    return validate_instance(spec.n, dist, costs)


def figure2_instance() -> MetricInstance:
    """Two points at distance 1 with opening costs 1 and 99."""
    return validate_instance(2, [[0.0, 1.0], [1.0, 0.0]], [1.0, 99.0])


def random_instance(n: int, seed: int, kind: str = "euclidean",
                    cost_range: tuple[float, float] = (0.5, 2.0),
                    dim: int = 2) -> MetricInstance:
    return generate(GeneratorSpec(kind=kind, n=n, dim=dim, cost_range=cost_range, seed=seed))
