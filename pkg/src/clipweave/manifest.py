"""Epoch manifest: the JSONL contract with any downstream trainer.

Line 1 is a header object carrying full provenance (config echo, seeds,
split size, mode, optional cluster-file hash and enrichment template)
plus a SHA-256 over the sample payload.  Every following line is one
sample.  Emission is byte-deterministic for fixed inputs; validation
re-derives every structural invariant and reports each violation with
its sample_id.
"""

from __future__ import annotations

import hashlib
import json
import statistics
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import Catalog
from .cluster import ClusterModel
from .weave import ClipSlice, WeaveConfig, WovenSample

FORMAT_VERSION = 1


class ManifestError(ValueError):
    """Raised for unreadable or structurally broken manifests."""


@dataclass(frozen=True)
class ManifestHeader:
    config: WeaveConfig
    split_size: int
    split_seed: int
    cluster_file_sha256: str | None = None
    enrichment_template_id: str | None = None
    created_at: str | None = None

    def as_dict(self, payload_sha256: str) -> dict:
        obj = {
            "kind": "header",
            "format_version": FORMAT_VERSION,
            "config": {
                "mode": self.config.mode,
                "seed": self.config.seed,
                "total_frames": self.config.total_frames,
                "videos_per_sample": self.config.videos_per_sample,
                "frames_per_video": self.config.frames_per_video,
                "samples_per_epoch": self.config.samples_per_epoch,
                "prompt": self.config.prompt,
            },
            "split_size": self.split_size,
            "split_seed": self.split_seed,
            "payload_sha256": payload_sha256,
        }
        if self.cluster_file_sha256 is not None:
            obj["cluster_file_sha256"] = self.cluster_file_sha256
        if self.enrichment_template_id is not None:
            obj["enrichment_template_id"] = self.enrichment_template_id
        if self.created_at is not None:
            obj["created_at"] = self.created_at
        return obj


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sample_line(sample: WovenSample) -> str:
    return _dumps(
        {
            "sample_id": sample.sample_id,
            "clips": [
                {
                    "video_id": clip.video_id,
                    "frame_indices": list(clip.frame_indices),
                    "replacement": clip.replacement,
                }
                for clip in sample.clips
            ],
            "caption": sample.caption,
            "prompt": sample.prompt,
        }
    )


def _check_samples(samples: list[WovenSample], header: ManifestHeader) -> None:
    config = header.config
    if len(samples) != config.samples_per_epoch:
        raise ManifestError(
            f"{len(samples)} samples but header declares "
            f"{config.samples_per_epoch} per epoch"
        )
    seen: dict[str, str] = {}
    for sample in samples:
        if len(sample.clips) != config.videos_per_sample:
            raise ManifestError(
                f"{sample.sample_id}: {len(sample.clips)} clips, expected "
                f"{config.videos_per_sample}"
            )
        total = 0
        for clip in sample.clips:
            total += len(clip.frame_indices)
            if len(clip.frame_indices) != config.frames_per_video:
                raise ManifestError(
                    f"{sample.sample_id}: clip {clip.video_id} carries "
                    f"{len(clip.frame_indices)} frame indices, expected "
                    f"{config.frames_per_video}"
                )
            if any(i < 0 for i in clip.frame_indices):
                raise ManifestError(
                    f"{sample.sample_id}: negative frame index in "
                    f"{clip.video_id}"
                )
            if not _ordered(clip.frame_indices, clip.replacement):
                raise ManifestError(
                    f"{sample.sample_id}: frame indices of {clip.video_id} "
                    "are out of order"
                )
            if clip.video_id in seen:
                raise ManifestError(
                    f"{clip.video_id} appears in both {seen[clip.video_id]} "
                    f"and {sample.sample_id}"
                )
            seen[clip.video_id] = sample.sample_id
        if total != config.total_frames:
            raise ManifestError(
                f"{sample.sample_id}: {total} frame references, expected "
                f"{config.total_frames}"
            )


def _ordered(indices: tuple[int, ...], replacement: bool) -> bool:
    if replacement:
        return all(a <= b for a, b in zip(indices, indices[1:]))
    return all(a < b for a, b in zip(indices, indices[1:]))


def emit_manifest(
    samples: list[WovenSample], header: ManifestHeader, path: str | Path
) -> None:
    """Write header + one sample per line; aborts before any write on
    invariant violations."""
    _check_samples(samples, header)
    lines = [sample_line(s) for s in samples]
    payload = "".join(line + "\n" for line in lines).encode("utf-8")
    digest = hashlib.sha256(payload).hexdigest()
    header_line = _dumps(header.as_dict(payload_sha256=digest))
    with open(path, "wb") as fh:
        fh.write(header_line.encode("utf-8") + b"\n")
        fh.write(payload)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    sample_id: str | None = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> Counter:
        return Counter(v.kind for v in self.violations)

    def add(self, kind: str, message: str, sample_id: str | None = None) -> None:
        self.violations.append(Violation(kind=kind, message=message,
                                         sample_id=sample_id))


def _read_manifest(path: str | Path) -> tuple[dict, bytes, list[dict]]:
    with open(path, "rb") as fh:
        raw = fh.read()
    newline = raw.find(b"\n")
    if newline < 0:
        raise ManifestError("manifest has no header line")
    try:
        header = json.loads(raw[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ManifestError(f"unparseable header line: {exc}") from exc
    if not isinstance(header, dict) or header.get("kind") != "header":
        raise ManifestError('first line is not a {"kind":"header"} object')
    payload = raw[newline + 1 :]
    samples = []
    for lineno, line in enumerate(payload.splitlines(), start=2):
        if not line.strip():
            continue
        try:
            samples.append(json.loads(line.decode("utf-8")))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ManifestError(f"line {lineno}: unparseable sample: {exc}") from exc
    return header, payload, samples


def validate_manifest(path: str | Path, catalog: Catalog) -> ValidationReport:
    """Check checksum, frame budget, clip counts, index bounds, epoch
    novelty and (for unenriched manifests) caption joins."""
    header, payload, samples = _read_manifest(path)
    report = ValidationReport()

    declared = header.get("payload_sha256")
    actual = hashlib.sha256(payload).hexdigest()
    if declared != actual:
        report.add(
            "checksum",
            f"payload sha256 {actual} does not match declared {declared}",
        )

    config = header.get("config", {})
    total_frames = int(config.get("total_frames", 0))
    videos_per_sample = int(config.get("videos_per_sample", 0))
    frames_per_video = int(config.get("frames_per_video", 0))
    enriched = "enrichment_template_id" in header

    first_owner: dict[str, str] = {}
    for obj in samples:
        sample_id = str(obj.get("sample_id", "<missing sample_id>"))
        clips = obj.get("clips", [])
        if len(clips) != videos_per_sample:
            report.add(
                "clip_count",
                f"{len(clips)} clips, expected {videos_per_sample}",
                sample_id,
            )
        total = 0
        captions = []
        join_checkable = not enriched
        for clip in clips:
            video_id = str(clip.get("video_id", ""))
            indices = clip.get("frame_indices", [])
            replacement = bool(clip.get("replacement", False))
            total += len(indices)
            if len(indices) != frames_per_video:
                report.add(
                    "frame_total",
                    f"clip {video_id} carries {len(indices)} frame indices, "
                    f"expected {frames_per_video}",
                    sample_id,
                )
            if not _ordered(tuple(indices), replacement):
                report.add(
                    "frame_order",
                    f"clip {video_id} indices not sorted "
                    f"({'non-decreasing' if replacement else 'strictly increasing'} "
                    "required)",
                    sample_id,
                )
            if video_id not in catalog:
                report.add("unknown_video", f"{video_id} not in catalog", sample_id)
                join_checkable = False
            else:
                record = catalog[video_id]
                bad = [i for i in indices if i < 0 or i >= record.frame_count]
                if bad:
                    report.add(
                        "index_bounds",
                        f"clip {video_id}: indices {bad} outside "
                        f"[0, {record.frame_count})",
                        sample_id,
                    )
                captions.append(record.caption)
            if video_id in first_owner:
                prior = first_owner[video_id]
                where = (
                    f"twice in {sample_id}"
                    if prior == sample_id
                    else f"in both {prior} and {sample_id}"
                )
                report.add("novelty", f"{video_id} appears {where}", sample_id)
            else:
                first_owner[video_id] = sample_id
        if total != total_frames:
            report.add(
                "frame_total",
                f"{total} frame references, expected {total_frames}",
                sample_id,
            )
        if join_checkable and captions:
            expected = " ".join(captions)
            if obj.get("caption") != expected:
                report.add(
                    "caption_join",
                    "caption is not the single-space join of the clip "
                    "captions in clip order",
                    sample_id,
                )
    return report


@dataclass
class ManifestStats:
    samples: int
    videos: int
    total_frame_refs: int
    frames_per_video_hist: dict[int, int]
    caption_length: dict[str, float]
    replacement_clips: int
    cluster_counts: dict[int, int] | None = None

    def to_csv(self) -> str:
        rows = [
            ("samples", "", self.samples),
            ("videos", "", self.videos),
            ("total_frame_refs", "", self.total_frame_refs),
        ]
        for k in sorted(self.frames_per_video_hist):
            rows.append(("frames_per_video", k, self.frames_per_video_hist[k]))
        for k in ("min", "p25", "p50", "p75", "max", "mean"):
            rows.append(("caption_length", k, self.caption_length[k]))
        rows.append(("replacement_clips", "", self.replacement_clips))
        if self.cluster_counts is not None:
            for k in sorted(self.cluster_counts):
                rows.append(("cluster_samples", k, self.cluster_counts[k]))
        out = ["metric,key,value"]
        out.extend(f"{m},{k},{v}" for m, k, v in rows)
        return "\n".join(out) + "\n"


def stats(
    path: str | Path, cluster_model: ClusterModel | None = None
) -> ManifestStats:
    """Summarize a manifest; refuses one whose structure is invalid.

    Catalog-independent checks (checksum, frame budget, novelty) gate
    the summary.  Per-cluster sample counts need the cluster model that
    produced the groups.
    """
    header, payload, samples = _read_manifest(path)
    declared = header.get("payload_sha256")
    if hashlib.sha256(payload).hexdigest() != declared:
        raise ManifestError("refusing stats: payload checksum mismatch")

    config = header.get("config", {})
    total_frames = int(config.get("total_frames", 0))
    seen: set[str] = set()
    hist: Counter = Counter()
    caption_lengths = []
    total_refs = 0
    replacement_clips = 0
    video_to_cluster = {}
    if cluster_model is not None and cluster_model.ids is not None:
        video_to_cluster = {
            vid: int(c)
            for vid, c in zip(cluster_model.ids, cluster_model.assignments)
        }
    cluster_counts: Counter = Counter()

    for obj in samples:
        sample_total = 0
        sample_clusters = set()
        for clip in obj.get("clips", []):
            video_id = clip["video_id"]
            if video_id in seen:
                raise ManifestError(
                    f"refusing stats: {video_id} appears in two samples"
                )
            seen.add(video_id)
            n = len(clip["frame_indices"])
            hist[n] += 1
            sample_total += n
            if clip.get("replacement"):
                replacement_clips += 1
            if video_id in video_to_cluster:
                sample_clusters.add(video_to_cluster[video_id])
        if sample_total != total_frames:
            raise ManifestError(
                f"refusing stats: {obj.get('sample_id')} has {sample_total} "
                f"frame references, expected {total_frames}"
            )
        total_refs += sample_total
        caption_lengths.append(len(obj.get("caption", "")))
        for c in sample_clusters:
            cluster_counts[c] += 1

    if caption_lengths:
        ordered = sorted(caption_lengths)
        q = statistics.quantiles(ordered, n=4) if len(ordered) > 1 else [
            ordered[0]
        ] * 3
        caption_length = {
            "min": float(ordered[0]),
            "p25": float(q[0]),
            "p50": float(q[1]),
            "p75": float(q[2]),
            "max": float(ordered[-1]),
            "mean": float(statistics.fmean(ordered)),
        }
    else:
        caption_length = {k: 0.0 for k in ("min", "p25", "p50", "p75", "max", "mean")}

    return ManifestStats(
        samples=len(samples),
        videos=len(seen),
        total_frame_refs=total_refs,
        frames_per_video_hist=dict(hist),
        caption_length=caption_length,
        replacement_clips=replacement_clips,
        cluster_counts=dict(cluster_counts) if video_to_cluster else None,
    )


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
