"""Capacity-constrained K-means: every cluster ends with exactly
`capacity` members.

The assignment step is a greedy sequential fold over a shuffled point
order: each point goes to the nearest centroid (squared Euclidean) that
still has room, ties breaking to the lowest cluster index.  Under the
capacity constraint the loop can oscillate, so besides the usual
"assignments unchanged" stop we detect assignment-state cycles and cap
iterations; `converged` is True only for the unchanged case.

`assign_capacity` is vectorized in committed chunks but is exactly
equivalent to the one-point-at-a-time reference fold (the tests hold it
to that).  `brute_force_balanced` is the exact small-instance oracle.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import rng

BRUTE_FORCE_MAX_POINTS = 12


class ClusterError(ValueError):
    """Raised for infeasible clustering configurations."""


@dataclass(frozen=True)
class ClusterConfig:
    """Shape of one balanced clustering run.

    `n_clusters * capacity` must equal the number of points; apply
    `drop_remainder` first if it does not divide evenly.
    """

    n_clusters: int
    capacity: int
    seed: int
    max_iters: int = 100

    def __post_init__(self) -> None:
        if self.n_clusters < 1:
            raise ClusterError(f"n_clusters must be >= 1 (got {self.n_clusters})")
        if self.capacity < 1:
            raise ClusterError(f"capacity must be >= 1 (got {self.capacity})")
        if self.max_iters < 1:
            raise ClusterError(f"max_iters must be >= 1 (got {self.max_iters})")


@dataclass
class ClusterModel:
    """Fitted centroids plus capacity-exact assignments."""

    config: ClusterConfig
    centroids: np.ndarray
    assignments: np.ndarray
    iterations_run: int
    converged: bool
    inertia: float
    ids: tuple[str, ...] | None = None
    inertia_log: list[float] = field(default_factory=list)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cluster)


def init_centroids(points: np.ndarray, n_clusters: int, seed: int) -> np.ndarray:
    """Pick n_clusters distinct point rows uniformly at random."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < n_clusters:
        raise ClusterError(f"need at least {n_clusters} points, got {n}")
    chosen = rng.stream(seed, "init").choice(n, size=n_clusters, replace=False)
    return points[chosen].copy()


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x - mu||^2 expanded; clip tiny negatives from cancellation
    d2 = (
        (points * points).sum(axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + (centroids * centroids).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0, out=d2)


def assign_capacity(
    points: np.ndarray,
    centroids: np.ndarray,
    capacity: int,
    order: Sequence[int] | np.ndarray,
) -> np.ndarray:
    """Greedy capacity-constrained assignment along `order`.

    Equivalent to: walk `order`; send each point to the nearest cluster
    whose occupancy is still below `capacity`, ties to the lowest
    cluster index.  Feasibility is guaranteed because the caller ensures
    n == n_clusters * capacity, so the result has exactly `capacity`
    members everywhere.
    """
    points = np.asarray(points, dtype=np.float64)
    centroids = np.asarray(centroids, dtype=np.float64)
    order = np.asarray(order, dtype=np.intp)
    n = points.shape[0]
    n_clusters = centroids.shape[0]
    if order.shape[0] != n or np.unique(order).shape[0] != n:
        raise ClusterError("order must be a permutation of all point indices")
    if n != n_clusters * capacity:
        raise ClusterError(
            f"point count {n} != n_clusters * capacity "
            f"({n_clusters} * {capacity})"
        )

    assignments = np.full(n, -1, dtype=np.intp)
    occupancy = np.zeros(n_clusters, dtype=np.intp)
    pending = order

    while pending.size:
        d2 = _squared_distances(points[pending], centroids)
        d2[:, occupancy >= capacity] = np.inf
        targets = np.argmin(d2, axis=1)  # lowest index wins ties

        # Longest prefix of `pending` that commits without overflowing a
        # cluster mid-pass.  Rank each point within its target group (in
        # processing order); the first point whose rank exhausts its
        # cluster's remaining space is where the sequential fold would
        # have seen a full cluster and re-chosen.
        by_target = np.argsort(targets, kind="stable")
        sorted_targets = targets[by_target]
        new_group = np.empty(pending.size, dtype=bool)
        new_group[0] = True
        new_group[1:] = sorted_targets[1:] != sorted_targets[:-1]
        group_start = np.flatnonzero(new_group)
        group_sizes = np.diff(np.append(group_start, pending.size))
        ranks = np.arange(pending.size) - np.repeat(group_start, group_sizes)
        space = capacity - occupancy[sorted_targets]
        blocked = by_target[ranks >= space]
        cut = int(blocked.min()) if blocked.size else pending.size

        committed = targets[:cut]
        assignments[pending[:cut]] = committed
        np.add.at(occupancy, committed, 1)
        pending = pending[cut:]

    return assignments


def update_centroids(
    points: np.ndarray, assignments: np.ndarray, n_clusters: int
) -> np.ndarray:
    """Arithmetic mean of each cluster's members (float64)."""
    points = np.asarray(points, dtype=np.float64)
    counts = np.bincount(assignments, minlength=n_clusters)
    if (counts == 0).any():
        empty = int(np.flatnonzero(counts == 0)[0])
        raise ClusterError(
            f"cluster {empty} is empty; capacity exactness should make "
            "this unreachable"
        )
    sums = np.zeros((n_clusters, points.shape[1]), dtype=np.float64)
    np.add.at(sums, assignments, points)
    return sums / counts[:, None]


def inertia_of(
    points: np.ndarray, assignments: np.ndarray, centroids: np.ndarray
) -> float:
    """Total within-cluster sum of squared distances."""
    points = np.asarray(points, dtype=np.float64)
    diff = points - centroids[assignments]
    return float((diff * diff).sum())


def _fingerprint(assignments: np.ndarray) -> bytes:
    return hashlib.blake2b(assignments.tobytes(), digest_size=16).digest()


def fit_balanced_kmeans(
    points: np.ndarray,
    config: ClusterConfig,
    ids: Sequence[str] | None = None,
    on_iteration: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> ClusterModel:
    """Alternate capacity-constrained assignment and centroid updates.

    An initial assignment pass follows centroid initialization; each
    subsequent iteration re-estimates centroids and reassigns with a
    fresh seeded point order, stopping when assignments repeat the
    previous iteration's (converged), when any earlier assignment state
    recurs (cycle, not converged), or at max_iters.  `on_iteration` is
    called after every assignment pass, the initial one included.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ClusterError(f"points must be 2-D (got ndim={points.ndim})")
    n = points.shape[0]
    if n != config.n_clusters * config.capacity:
        raise ClusterError(
            f"point count {n} != n_clusters * capacity "
            f"({config.n_clusters} * {config.capacity}); use drop_remainder "
            "or adjust the configuration"
        )
    if ids is not None and len(ids) != n:
        raise ClusterError(f"got {len(ids)} ids for {n} points")

    centroids = init_centroids(points, config.n_clusters, config.seed)
    order = rng.stream(config.seed, "order", 0).permutation(n)
    assignments = assign_capacity(points, centroids, config.capacity, order)
    if on_iteration is not None:
        on_iteration(0, assignments, centroids)

    seen = {_fingerprint(assignments)}
    inertia_log = [inertia_of(points, assignments, centroids)]
    converged = False
    iterations_run = 0

    for iteration in range(1, config.max_iters + 1):
        centroids = update_centroids(points, assignments, config.n_clusters)
        order = rng.stream(config.seed, "order", iteration).permutation(n)
        new_assignments = assign_capacity(
            points, centroids, config.capacity, order
        )
        if on_iteration is not None:
            on_iteration(iteration, new_assignments, centroids)
        iterations_run = iteration
        inertia_log.append(inertia_of(points, new_assignments, centroids))

        if np.array_equal(new_assignments, assignments):
            converged = True
            break
        assignments = new_assignments
        fp = _fingerprint(assignments)
        if fp in seen:
            break  # revisited an earlier state: oscillation, stop honestly
        seen.add(fp)

    # Final model is always self-consistent: centroids are the means of
    # the final assignments (a no-op in the converged case).
    centroids = update_centroids(points, assignments, config.n_clusters)
    return ClusterModel(
        config=config,
        centroids=centroids,
        assignments=assignments,
        iterations_run=iterations_run,
        converged=converged,
        inertia=inertia_of(points, assignments, centroids),
        ids=tuple(ids) if ids is not None else None,
        inertia_log=inertia_log,
    )


def drop_remainder(
    points: np.ndarray, capacity: int
) -> tuple[np.ndarray, np.ndarray]:
    """Indices to keep/drop so the point count divides by `capacity`.

    Drops the n mod capacity points farthest from the global mean;
    ties keep the earlier point (stable order). Returns (kept, dropped)
    index arrays into the original rows.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    extra = n % capacity
    if extra == 0:
        return np.arange(n), np.empty(0, dtype=np.intp)
    d2 = ((points - points.mean(axis=0)) ** 2).sum(axis=1)
    by_distance = np.argsort(-d2, kind="stable")
    dropped = np.sort(by_distance[:extra])
    kept = np.setdiff1d(np.arange(n), dropped)
    return kept, dropped


def brute_force_balanced(
    points: np.ndarray, n_clusters: int, capacity: int
) -> tuple[np.ndarray, float]:
    """Exact minimum-SSE balanced partition by exhaustive enumeration.

    Enumerates every unordered partition into n_clusters groups of
    `capacity` (anchoring each new group on the lowest unused index, so
    assignment vectors come out in lexicographic order) and keeps the
    strict minimum, which makes the tie-break lexicographic for free.
    Only for test-scale instances: refuses n > 12.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n != n_clusters * capacity:
        raise ClusterError(
            f"point count {n} != n_clusters * capacity "
            f"({n_clusters} * {capacity})"
        )
    if n > BRUTE_FORCE_MAX_POINTS:
        raise ClusterError(
            f"brute force enumeration refuses n={n} > "
            f"{BRUTE_FORCE_MAX_POINTS}; use fit_balanced_kmeans for "
            "larger instances"
        )

    best_sse = np.inf
    best = None
    assignment = np.full(n, -1, dtype=np.intp)

    def recurse(cluster: int, remaining: frozenset[int], sse_so_far: float) -> None:
        nonlocal best_sse, best
        if sse_so_far >= best_sse:
            return
        if not remaining:
            best_sse = sse_so_far
            best = assignment.copy()
            return
        anchor = min(remaining)
        rest = sorted(remaining - {anchor})
        for companions in itertools.combinations(rest, capacity - 1):
            members = (anchor, *companions)
            pts = points[list(members)]
            mu = pts.mean(axis=0)
            sse = float(((pts - mu) ** 2).sum())
            for m in members:
                assignment[m] = cluster
            recurse(cluster + 1, remaining - set(members), sse_so_far + sse)
            for m in members:
                assignment[m] = -1

    recurse(0, frozenset(range(n)), 0.0)
    assert best is not None
    return best, float(best_sse)


def save_cluster_model(model: ClusterModel, path: str | Path) -> None:
    """Write the cluster output JSON (config echo, centroids, assignments)."""
    if model.ids is not None:
        assignments: dict | list = {
            video_id: int(c) for video_id, c in zip(model.ids, model.assignments)
        }
    else:
        assignments = [int(c) for c in model.assignments]
    obj = {
        "config": {
            "n_clusters": model.config.n_clusters,
            "capacity": model.config.capacity,
            "seed": model.config.seed,
            "max_iters": model.config.max_iters,
        },
        "centroids": [[float(v) for v in row] for row in model.centroids],
        "assignments": assignments,
        "converged": model.converged,
        "iterations_run": model.iterations_run,
        "inertia": model.inertia,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def load_cluster_model(path: str | Path) -> ClusterModel:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    cfg = ClusterConfig(
        n_clusters=int(obj["config"]["n_clusters"]),
        capacity=int(obj["config"]["capacity"]),
        seed=int(obj["config"]["seed"]),
        max_iters=int(obj["config"]["max_iters"]),
    )
    raw = obj["assignments"]
    if isinstance(raw, dict):
        ids = tuple(raw)
        assignments = np.asarray([raw[i] for i in ids], dtype=np.intp)
    else:
        ids = None
        assignments = np.asarray(raw, dtype=np.intp)
    return ClusterModel(
        config=cfg,
        centroids=np.asarray(obj["centroids"], dtype=np.float64),
        assignments=assignments,
        iterations_run=int(obj["iterations_run"]),
        converged=bool(obj["converged"]),
        inertia=float(obj["inertia"]),
        ids=ids,
    )
