"""Density-based clustering of the learned map into chunk assignments.

DBSCAN is used because it does not need the number of clusters up front.
The scan is fully deterministic: points are visited in index order and
cluster expansion proceeds through neighbor lists in index order, so a
border point reachable from two clusters always joins the one seeded
first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError

NOISE = -1


@dataclass(frozen=True)
class ClusteringConfig:
    eps: float = 3.0
    min_cluster_size: int = 2  # used directly as DBSCAN's min_pts

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError(f"eps must be > 0, got {self.eps}")
        if self.min_cluster_size < 1:
            raise ConfigError(
                f"min_cluster_size must be >= 1, got {self.min_cluster_size}"
            )


@dataclass
class ChunkAssignment:
    """Per-state cluster ids plus which states were density noise.

    ``labels`` is total: noise points are promoted to their own singleton
    clusters (grouping all noise into one pseudo-cluster would fabricate
    correlation in downstream scoring).  Ids are contiguous from 0 in
    first-seen order.
    """

    labels: np.ndarray
    noise: np.ndarray

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


def dbscan_labels(points: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """Raw DBSCAN labels over rows of ``points``; noise is -1."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise InputError(f"points must be a nonempty 2-d array, got shape {points.shape}")
    if not np.isfinite(points).all():
        raise InputError("points must be finite")

    n = points.shape[0]
    # Neighborhoods include the point itself; n is small enough for the
    # dense pairwise matrix.
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    within = d2 <= eps * eps
    neighbor_lists = [np.flatnonzero(within[i]) for i in range(n)]
    core = np.array([len(nb) >= min_pts for nb in neighbor_lists])

    labels = np.full(n, NOISE, dtype=int)
    visited = np.zeros(n, dtype=bool)
    cluster = 0
    for seed in range(n):
        if visited[seed] or not core[seed]:
            continue
        # Breadth-first expansion; only core points extend the frontier.
        labels[seed] = cluster
        visited[seed] = True
        queue = list(neighbor_lists[seed])
        qi = 0
        while qi < len(queue):
            q = queue[qi]
            qi += 1
            if labels[q] == NOISE:
                labels[q] = cluster
            if not visited[q]:
                visited[q] = True
                if core[q]:
                    queue.extend(neighbor_lists[q])
        cluster += 1
    return labels


def _resolve_noise(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Promote noise to singleton clusters and relabel contiguously."""
    noise = raw == NOISE
    labels = np.empty_like(raw)
    seen: dict[int, int] = {}
    next_id = 0
    for i, lab in enumerate(raw):
        if lab == NOISE:
            labels[i] = next_id
            next_id += 1
        else:
            if lab not in seen:
                seen[lab] = next_id
                next_id += 1
            labels[i] = seen[lab]
    return labels, noise


def dbscan(points: np.ndarray, config: ClusteringConfig) -> ChunkAssignment:
    """Cluster rows of ``points``; noise resolved to singleton clusters."""
    raw = dbscan_labels(points, config.eps, config.min_cluster_size)
    labels, noise = _resolve_noise(raw)
    return ChunkAssignment(labels=labels, noise=noise)


def assign_chunks(map_state, config: ClusteringConfig | None = None) -> ChunkAssignment:
    """Cluster a fitted map's weight rows into chunk assignments."""
    if config is None:
        config = ClusteringConfig()
    return dbscan(map_state.weights, config)
