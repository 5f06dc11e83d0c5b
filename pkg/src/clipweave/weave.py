"""Splice groups of short clips into long-context training samples.

Each sample fuses `videos_per_sample` clips: a fixed total frame budget
is divided evenly across the group, frame indices are drawn uniformly at
random per clip from derived per-(sample, clip) streams, and the clip
captions are joined with single spaces.  Within one epoch every clip
appears in exactly one sample, so each training step sees novel data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng
from .catalog import Catalog
from .cluster import ClusterModel

DEFAULT_TOTAL_FRAMES = 16
DEFAULT_SAMPLES_PER_EPOCH = 10_000
DEFAULT_PROMPT = "Describe what is happening in the video."

MODES = ("random", "clustered")


class WeaveError(ValueError):
    """Raised for infeasible weave configurations or planner mismatches."""


@dataclass(frozen=True)
class WeaveConfig:
    """The (frame budget, group size, mode, seed) contract for one epoch."""

    videos_per_sample: int
    seed: int
    mode: str = "random"
    total_frames: int = DEFAULT_TOTAL_FRAMES
    samples_per_epoch: int = DEFAULT_SAMPLES_PER_EPOCH
    prompt: str = DEFAULT_PROMPT

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise WeaveError(f"mode must be one of {MODES} (got {self.mode!r})")
        if self.videos_per_sample < 1:
            raise WeaveError(
                f"videos_per_sample must be >= 1 (got {self.videos_per_sample})"
            )
        if self.total_frames < 1:
            raise WeaveError(
                f"total_frames must be >= 1 (got {self.total_frames})"
            )
        if self.total_frames % self.videos_per_sample != 0:
            raise WeaveError(
                f"total_frames ({self.total_frames}) must divide evenly by "
                f"videos_per_sample ({self.videos_per_sample})"
            )
        if self.samples_per_epoch < 1:
            raise WeaveError(
                f"samples_per_epoch must be >= 1 (got {self.samples_per_epoch})"
            )

    @property
    def frames_per_video(self) -> int:
        return self.total_frames // self.videos_per_sample


@dataclass(frozen=True)
class ClipSlice:
    """One clip's contribution to a sample: sorted frame indices.

    Indices are strictly increasing except when the clip had fewer
    frames than requested; then sampling falls back to with-replacement
    (non-decreasing) and `replacement` is flagged.
    """

    video_id: str
    frame_indices: tuple[int, ...]
    replacement: bool = False


@dataclass(frozen=True)
class WovenSample:
    sample_id: str
    clips: tuple[ClipSlice, ...]
    caption: str
    prompt: str


def plan_random_groups(
    ids: Sequence[str], videos_per_sample: int, count: int, seed: int
) -> list[tuple[str, ...]]:
    """Disjoint groups of `videos_per_sample` ids from a seeded shuffle."""
    needed = videos_per_sample * count
    if len(ids) < needed:
        raise WeaveError(
            f"need {needed} ids for {count} groups of {videos_per_sample}, "
            f"got {len(ids)}"
        )
    order = rng.stream(seed, "groups").permutation(len(ids))
    shuffled = [ids[i] for i in order[:needed]]
    return [
        tuple(shuffled[i : i + videos_per_sample])
        for i in range(0, needed, videos_per_sample)
    ]


def plan_clustered_groups(
    model: ClusterModel, seed: int
) -> list[tuple[str, ...]]:
    """One group per cluster, member and group order seeded shuffles.

    Member lists are canonicalized (sorted by video_id) before
    shuffling, so a model loaded from disk plans the same groups as the
    freshly fitted one.
    """
    if model.ids is None:
        raise WeaveError("cluster model carries no video ids; refit with ids")
    members: dict[int, list[str]] = {}
    for video_id, cluster in zip(model.ids, model.assignments):
        members.setdefault(int(cluster), []).append(video_id)
    groups = []
    for cluster in sorted(members):
        ordered = sorted(members[cluster])
        order = rng.stream(seed, "group-members", cluster).permutation(len(ordered))
        groups.append(tuple(ordered[i] for i in order))
    group_order = rng.stream(seed, "group-order").permutation(len(groups))
    return [groups[i] for i in group_order]


def sample_frame_indices(
    frame_count: int, frames_per_video: int, stream_seed: int
) -> list[int]:
    """Uniform random frame indices, sorted ascending.

    Draws without replacement; if the clip is shorter than the request,
    draws with replacement instead (the caller flags the clip).
    """
    if frame_count < 1:
        raise WeaveError(f"frame_count must be >= 1 (got {frame_count})")
    if frames_per_video < 1:
        raise WeaveError(
            f"frames_per_video must be >= 1 (got {frames_per_video})"
        )
    gen = rng.generator_from_key(stream_seed)
    if frame_count >= frames_per_video:
        picked = gen.choice(frame_count, size=frames_per_video, replace=False)
    else:
        picked = gen.integers(0, frame_count, size=frames_per_video)
    return sorted(int(i) for i in picked)


def compose_caption(captions: Sequence[str]) -> str:
    """Join captions with a single space, order preserved, nothing else."""
    if not captions:
        raise WeaveError("cannot compose an empty caption list")
    for i, caption in enumerate(captions):
        if not caption:
            raise WeaveError(f"empty caption at position {i}")
    return " ".join(captions)


def build_epoch(
    catalog: Catalog,
    split: Sequence[str],
    groups: Sequence[tuple[str, ...]],
    config: WeaveConfig,
) -> list[WovenSample]:
    """Materialize one epoch of woven samples from planned groups.

    Per-clip frame streams are derived as (seed, "frames", sample_index,
    clip_index), so the epoch is reproducible under any execution order.
    """
    if len(groups) != config.samples_per_epoch:
        raise WeaveError(
            f"planner produced {len(groups)} groups but the configuration "
            f"wants {config.samples_per_epoch} samples per epoch"
        )
    if config.samples_per_epoch * config.videos_per_sample > len(split):
        raise WeaveError(
            f"epoch needs {config.samples_per_epoch * config.videos_per_sample} "
            f"videos but the split holds {len(split)}"
        )
    split_set = set(split)
    seen: set[str] = set()
    frames_per_video = config.frames_per_video

    samples = []
    for sample_index, group in enumerate(groups):
        if len(group) != config.videos_per_sample:
            raise WeaveError(
                f"group {sample_index} has {len(group)} videos, expected "
                f"{config.videos_per_sample}"
            )
        clips = []
        captions = []
        for clip_index, video_id in enumerate(group):
            if video_id not in split_set:
                raise WeaveError(
                    f"group {sample_index} references {video_id!r} outside "
                    "the chosen split"
                )
            if video_id in seen:
                raise WeaveError(
                    f"{video_id!r} appears in more than one group; epochs "
                    "must use each video once"
                )
            seen.add(video_id)
            record = catalog[video_id]
            key = rng.derive_key(config.seed, "frames", sample_index, clip_index)
            indices = sample_frame_indices(
                record.frame_count, frames_per_video, key
            )
            clips.append(
                ClipSlice(
                    video_id=video_id,
                    frame_indices=tuple(indices),
                    replacement=record.frame_count < frames_per_video,
                )
            )
            captions.append(record.caption)
        samples.append(
            WovenSample(
                sample_id=f"s{sample_index:06d}",
                clips=tuple(clips),
                caption=compose_caption(captions),
                prompt=config.prompt,
            )
        )
    return samples
