"""Per-clip frame embeddings: binary IO, mean pooling, normalization.

The pipeline never runs an encoder; it consumes a precomputed binary
embedding file and reduces each clip's frame matrix to a single pooled
vector used as the clustering feature.

Binary layout (little-endian, bit-exact):

    magic   4 bytes  b"VWEB"
    version u32      currently 1
    dim     u32      embedding dimension D
    count   u32      number of records
    record  ... repeated `count` times:
        id_len    u16
        id        id_len bytes, UTF-8
        row_count u16
        rows      row_count * dim float32
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

MAGIC = b"VWEB"
FORMAT_VERSION = 1
DEFAULT_DIM = 768
DEFAULT_FRAMES_PER_CLIP = 16


class EmbeddingFormatError(ValueError):
    """Raised for malformed or truncated embedding files."""


class DegenerateEmbeddingError(ValueError):
    """Raised when a zero vector cannot be normalized."""


@dataclass
class FrameEmbeddingMatrix:
    """One clip's per-frame embedding rows, shape (frames, dim) float32."""

    video_id: str
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.float32)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise EmbeddingFormatError(
                f"embedding matrix for {self.video_id!r} must be 2-D with at "
                f"least one row and one column (got shape {rows.shape})"
            )
        if not np.isfinite(rows).all():
            raise EmbeddingFormatError(
                f"non-finite value in embedding matrix for {self.video_id!r}"
            )
        self.rows = rows

    @property
    def frame_count(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


@dataclass
class PooledEmbedding:
    """Mean of a clip's frame embeddings, optionally L2-normalized."""

    video_id: str
    vector: np.ndarray
    normalized: bool = False


class EmbeddingSet:
    """Immutable map video_id -> FrameEmbeddingMatrix with a common dim."""

    def __init__(self, matrices: Iterable[FrameEmbeddingMatrix]):
        self._by_id: dict[str, FrameEmbeddingMatrix] = {}
        self._dim: int | None = None
        for m in matrices:
            if m.video_id in self._by_id:
                raise EmbeddingFormatError(f"duplicate video_id: {m.video_id}")
            if self._dim is None:
                self._dim = m.dim
            elif m.dim != self._dim:
                raise EmbeddingFormatError(
                    f"dimension mismatch for {m.video_id!r}: "
                    f"{m.dim} != {self._dim}"
                )
            self._by_id[m.video_id] = m

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self) -> Iterator[FrameEmbeddingMatrix]:
        return iter(self._by_id.values())

    def __contains__(self, video_id: str) -> bool:
        return video_id in self._by_id

    def __getitem__(self, video_id: str) -> FrameEmbeddingMatrix:
        try:
            return self._by_id[video_id]
        except KeyError:
            raise KeyError(f"no embeddings for video_id: {video_id}") from None

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise EmbeddingFormatError("empty embedding set has no dimension")
        return self._dim

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self._by_id)


def export_embeddings(embeddings: EmbeddingSet, path: str | Path) -> None:
    """Write the bit-exact binary embedding format."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", FORMAT_VERSION, embeddings.dim, len(embeddings)))
        for m in embeddings:
            id_bytes = m.video_id.encode("utf-8")
            if len(id_bytes) > 0xFFFF:
                raise EmbeddingFormatError(f"video_id too long: {m.video_id!r}")
            if m.frame_count > 0xFFFF:
                raise EmbeddingFormatError(
                    f"too many rows for {m.video_id!r}: {m.frame_count}"
                )
            fh.write(struct.pack("<H", len(id_bytes)))
            fh.write(id_bytes)
            fh.write(struct.pack("<H", m.frame_count))
            fh.write(np.ascontiguousarray(m.rows, dtype="<f4").tobytes())


def import_embeddings(path: str | Path) -> EmbeddingSet:
    """Read a binary embedding file, failing loudly on any corruption."""
    with open(path, "rb") as fh:
        data = fh.read()

    def take(offset: int, n: int, what: str) -> tuple[bytes, int]:
        if offset + n > len(data):
            raise EmbeddingFormatError(
                f"truncated embedding file: needed {n} bytes for {what} "
                f"at byte offset {offset}, file has {len(data)}"
            )
        return data[offset : offset + n], offset + n

    raw, pos = take(0, 4, "magic")
    if raw != MAGIC:
        raise EmbeddingFormatError(f"bad magic: {raw!r} (expected {MAGIC!r})")
    raw, pos = take(pos, 12, "header")
    version, dim, count = struct.unpack("<III", raw)
    if version != FORMAT_VERSION:
        raise EmbeddingFormatError(
            f"unsupported format version {version} (expected {FORMAT_VERSION})"
        )
    if dim < 1:
        raise EmbeddingFormatError(f"invalid dimension in header: {dim}")

    matrices = []
    seen: set[str] = set()
    for _ in range(count):
        raw, pos = take(pos, 2, "id length")
        (id_len,) = struct.unpack("<H", raw)
        raw, pos = take(pos, id_len, "id")
        video_id = raw.decode("utf-8")
        if video_id in seen:
            raise EmbeddingFormatError(f"duplicate video_id: {video_id}")
        seen.add(video_id)
        raw, pos = take(pos, 2, "row count")
        (row_count,) = struct.unpack("<H", raw)
        if row_count < 1:
            raise EmbeddingFormatError(
                f"record for {video_id!r} has zero rows at byte offset {pos}"
            )
        raw, pos = take(pos, row_count * dim * 4, f"rows of {video_id!r}")
        rows = np.frombuffer(raw, dtype="<f4").reshape(row_count, dim).copy()
        matrices.append(FrameEmbeddingMatrix(video_id=video_id, rows=rows))
    if pos != len(data):
        raise EmbeddingFormatError(
            f"{len(data) - pos} trailing bytes after last record "
            f"at byte offset {pos}"
        )
    return EmbeddingSet(matrices)


def mean_pool(matrix: FrameEmbeddingMatrix) -> PooledEmbedding:
    """Average the frame rows into one vector (float64 accumulation)."""
    vector = matrix.rows.mean(axis=0, dtype=np.float64)
    return PooledEmbedding(video_id=matrix.video_id, vector=vector, normalized=False)


def l2_normalize(pooled: PooledEmbedding) -> PooledEmbedding:
    """Scale to unit L2 norm, preserving direction."""
    norm = float(np.linalg.norm(pooled.vector))
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateEmbeddingError(
            f"degenerate embedding for video_id: {pooled.video_id}"
        )
    return PooledEmbedding(
        video_id=pooled.video_id,
        vector=pooled.vector / norm,
        normalized=True,
    )


def pooled_matrix(
    embeddings: EmbeddingSet, ids: Sequence[str], normalize: bool = True
) -> np.ndarray:
    """Stack pooled (and by default unit-normalized) vectors for `ids`.

    Row order follows `ids`; this is the feature matrix handed to the
    clustering stage.
    """
    out = np.empty((len(ids), embeddings.dim), dtype=np.float64)
    for i, video_id in enumerate(ids):
        pooled = mean_pool(embeddings[video_id])
        if normalize:
            pooled = l2_normalize(pooled)
        out[i] = pooled.vector
    return out
