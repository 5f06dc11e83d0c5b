"""Clip catalog ingestion and nested dataset splits.

The catalog is a JSONL file, one clip per line, with keys ``video_id``,
``source_uri``, ``caption``, ``frame_count`` and optional ``duration_s``.
Splits simulate growing data collection: every larger split strictly
contains every smaller one, implemented as prefixes of a single seeded
permutation of the catalog.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import rng

DEFAULT_SPLIT_SIZES = (10_000, 20_000, 40_000, 80_000, 160_000)


class CatalogError(ValueError):
    """Raised for malformed catalog files or invalid records."""


class SplitError(ValueError):
    """Raised for invalid split requests."""


@dataclass(frozen=True)
class VideoRecord:
    """One catalog entry: clip identity, caption, frame count."""

    video_id: str
    source_uri: str
    caption: str
    frame_count: int
    duration_s: float | None = None

    def __post_init__(self) -> None:
        if not self.video_id:
            raise CatalogError("empty video_id")
        if not self.caption.strip():
            raise CatalogError(f"empty caption for video_id: {self.video_id}")
        if self.frame_count < 1:
            raise CatalogError(
                f"frame_count must be >= 1 for video_id: {self.video_id} "
                f"(got {self.frame_count})"
            )
        if self.duration_s is not None and self.duration_s < 0:
            raise CatalogError(
                f"negative duration_s for video_id: {self.video_id}"
            )


class Catalog:
    """Immutable, ordered collection of VideoRecords, unique by video_id."""

    def __init__(self, records: Iterable[VideoRecord]):
        self._records: list[VideoRecord] = []
        self._by_id: dict[str, VideoRecord] = {}
        for record in records:
            if record.video_id in self._by_id:
                raise CatalogError(f"duplicate video_id: {record.video_id}")
            self._by_id[record.video_id] = record
            self._records.append(record)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[VideoRecord]:
        return iter(self._records)

    def __contains__(self, video_id: str) -> bool:
        return video_id in self._by_id

    def __getitem__(self, video_id: str) -> VideoRecord:
        try:
            return self._by_id[video_id]
        except KeyError:
            raise KeyError(f"unknown video_id: {video_id}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.video_id for r in self._records)


_REQUIRED_KEYS = ("video_id", "source_uri", "caption", "frame_count")


def ingest_catalog(path: str | Path) -> Catalog:
    """Parse a JSONL catalog file, enforcing all record invariants."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CatalogError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise CatalogError(f"line {lineno}: expected an object")
            for key in _REQUIRED_KEYS:
                if key not in obj:
                    raise CatalogError(f"line {lineno}: missing key: {key}")
            try:
                records.append(
                    VideoRecord(
                        video_id=str(obj["video_id"]),
                        source_uri=str(obj["source_uri"]),
                        caption=str(obj["caption"]),
                        frame_count=int(obj["frame_count"]),
                        duration_s=(
                            float(obj["duration_s"])
                            if obj.get("duration_s") is not None
                            else None
                        ),
                    )
                )
            except CatalogError as exc:
                raise CatalogError(f"line {lineno}: {exc}") from exc
    return Catalog(records)


def write_catalog(catalog: Catalog, path: str | Path) -> None:
    """Write a catalog back to JSONL (one record per line, stable keys)."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in catalog:
            obj = {
                "video_id": r.video_id,
                "source_uri": r.source_uri,
                "caption": r.caption,
                "frame_count": r.frame_count,
            }
            if r.duration_s is not None:
                obj["duration_s"] = r.duration_s
            fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


@dataclass(frozen=True)
class SplitChain:
    """Nested dataset splits as prefixes of one seeded permutation.

    split(size_i) is the first size_i ids of the permutation, so
    split(size_i) is a strict subset of split(size_j) whenever i < j.
    """

    master_seed: int
    permutation: tuple[str, ...]
    sizes: tuple[int, ...]

    def split(self, size: int) -> tuple[str, ...]:
        if size < 1 or size > len(self.permutation):
            raise SplitError(
                f"split size {size} out of range (1..{len(self.permutation)})"
            )
        return self.permutation[:size]


def build_split_chain(
    catalog: Catalog, sizes: Sequence[int], seed: int
) -> SplitChain:
    """Seeded permutation of the catalog plus the declared split sizes."""
    sizes = tuple(int(s) for s in sizes)
    if not sizes:
        raise SplitError("sizes must be non-empty")
    if any(s < 1 for s in sizes):
        raise SplitError("split sizes must be positive")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise SplitError(f"sizes must be strictly increasing: {list(sizes)}")
    if sizes[-1] > len(catalog):
        raise SplitError(
            f"largest split needs {sizes[-1]} videos but the catalog "
            f"has only {len(catalog)}"
        )
    ids = list(catalog.ids)
    order = rng.stream(seed, "split").permutation(len(ids))
    permutation = tuple(ids[i] for i in order)
    return SplitChain(master_seed=seed, permutation=permutation, sizes=sizes)


def save_split_chain(chain: SplitChain, path: str | Path) -> None:
    obj = {
        "master_seed": chain.master_seed,
        "sizes": list(chain.sizes),
        "permutation": list(chain.permutation),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def load_split_chain(path: str | Path) -> SplitChain:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return SplitChain(
        master_seed=int(obj["master_seed"]),
        permutation=tuple(obj["permutation"]),
        sizes=tuple(int(s) for s in obj["sizes"]),
    )
