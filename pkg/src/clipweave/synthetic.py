"""Seeded synthetic corpora for demos and tests.

Nothing here touches real video.  Catalogs, frame embeddings and blob
geometries are all derived from named substreams of one master seed, so
every helper is reproducible byte-for-byte.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from . import rng
from .catalog import Catalog, VideoRecord
from .embeddings import EmbeddingSet, FrameEmbeddingMatrix

_SUBJECTS = (
    "a dog", "two children", "the chef", "a cyclist", "an old tram",
    "the violinist", "a fishing boat", "three climbers", "the barista",
    "a street artist",
)
_ACTIONS = (
    "runs across", "glides past", "pauses near", "circles around",
    "leaps over", "drifts along", "balances on", "waves at",
    "assembles", "inspects",
)
_SCENES = (
    "a rainy plaza", "the harbor wall", "a sunlit kitchen",
    "the mountain trail", "a crowded market", "an empty gymnasium",
    "the canal bridge", "a neon arcade", "the orchard rows",
    "a frozen lake",
)


def make_catalog(
    count: int,
    seed: int,
    min_frames: int = 48,
    max_frames: int = 480,
) -> Catalog:
    """Build a catalog of ``count`` synthetic clips with seeded captions
    and frame counts."""
    gen = rng.stream(seed, "catalog")
    frame_counts = gen.integers(min_frames, max_frames + 1, size=count)
    picks = gen.integers(
        0, (len(_SUBJECTS), len(_ACTIONS), len(_SCENES)), size=(count, 3)
    )
    records = []
    for i in range(count):
        s, a, c = picks[i]
        records.append(
            VideoRecord(
                video_id=f"vid-{i:06d}",
                source_uri=f"synthetic://corpus/{seed}/{i:06d}",
                caption=f"{_SUBJECTS[s]} {_ACTIONS[a]} {_SCENES[c]}.",
                frame_count=int(frame_counts[i]),
            )
        )
    return Catalog(records)


def make_embedding_set(
    catalog: Catalog,
    seed: int,
    dim: int = 32,
    rows_per_video: int = 4,
) -> EmbeddingSet:
    """Per-video Gaussian frame matrices; each video gets its own
    substream so subsets are stable."""
    matrices = []
    for record in catalog:
        gen = rng.stream(seed, "frame-emb", record.video_id)
        rows = gen.normal(size=(rows_per_video, dim)).astype(np.float32)
        matrices.append(FrameEmbeddingMatrix(video_id=record.video_id, rows=rows))
    return EmbeddingSet(matrices)


def blob_points(
    n_clusters: int,
    capacity: int,
    dim: int,
    seed: int,
    spread: float = 0.05,
    separation: float = 10.0,
) -> tuple[NDArray[np.float64], NDArray[np.intp]]:
    """Exactly ``capacity`` points per blob, blobs ``separation`` apart
    along random directions, jitter ``spread``.

    Returns (points, true_labels) with points grouped then shuffled by
    a seeded permutation so cluster order carries no signal.
    """
    gen = rng.stream(seed, "blobs")
    centers = gen.normal(size=(n_clusters, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    centers *= separation * np.arange(1, n_clusters + 1)[:, None]
    points = np.repeat(centers, capacity, axis=0)
    points = points + gen.normal(scale=spread, size=points.shape)
    labels = np.repeat(np.arange(n_clusters, dtype=np.intp), capacity)
    order = gen.permutation(len(points))
    return points[order], labels[order]
