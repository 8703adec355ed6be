"""Embedding and label containers plus their on-disk formats.

Binary layouts (little-endian throughout):

* EMB1: magic ``45 4D 42 31`` ("EMB1"), u8 version=1, u8 dtype=1 (float32),
  u16 reserved=0, u64 n, u64 d, then n*d float32 values row-major.
* LAB1: magic ``4C 41 42 31`` ("LAB1"), u8 version=1, u8 reserved x3 (zero),
  u64 n, then n u32 labels.

Any structural deviation raises MalformedHeader. The CSV alternatives carry
no header row: embeddings are one comma-separated point per line, labels one
non-negative integer per line. ``load_embeddings``/``load_labels``
auto-detect binary vs CSV by the magic bytes.

Values are stored as float32 (both on disk and in memory); all distance
arithmetic upcasts to float64 (see :mod:`coarseset.metrics`). Instances are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import (
    EmptyFile,
    EmptyMatrix,
    IoFailure,
    MalformedHeader,
    MalformedLabel,
    NonFiniteValue,
    SizeMismatch,
)

EMB1_MAGIC = b"EMB1"
LAB1_MAGIC = b"LAB1"
_EMB1_HEADER = struct.Struct("<4sBBHQQ")
_LAB1_HEADER = struct.Struct("<4sBBBBQ")

PathLike = Union[str, Path]


@dataclass(frozen=True)
class EmbeddingMatrix:
    """n x d row-major feature matrix; row i is the feature vector of point i."""

    data: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.data)
        if src.ndim != 2:
            raise EmptyMatrix(f"embedding data must be 2-D, got shape {src.shape}")
        if src.shape[0] == 0 or src.shape[1] == 0:
            raise EmptyMatrix(f"empty embedding matrix (shape {src.shape})")
        arr = np.ascontiguousarray(src, dtype=np.float32)
        bad = ~np.isfinite(arr)
        if bad.any():
            row = int(np.nonzero(bad.any(axis=1))[0][0])
            raise NonFiniteValue(f"non-finite embedding value in row {row}")
        if arr is src and arr.flags.writeable:
            arr = arr.copy()  # never freeze the caller's array
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Per-point class ids; num_classes defaults to 1 + max(labels)."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        src = np.asarray(self.labels, dtype=np.int64)
        if src.ndim != 1 or src.shape[0] == 0:
            raise EmptyFile("label vector must be a non-empty 1-D sequence")
        if (src < 0).any():
            raise MalformedLabel("labels must be non-negative")
        if int(src.max()) >= self.num_classes:
            raise MalformedLabel(
                f"label {int(src.max())} exceeds num_classes={self.num_classes}"
            )
        arr = src.copy() if src.flags.writeable else src
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @classmethod
    def from_labels(cls, labels, num_classes: Optional[int] = None) -> "LabelVector":
        arr = np.asarray(labels, dtype=np.int64)
        if num_classes is None:
            if arr.size == 0:
                raise EmptyFile("cannot infer num_classes from an empty label list")
            num_classes = int(arr.max()) + 1
        return cls(arr, num_classes)

    def __len__(self) -> int:
        return int(self.labels.shape[0])


# --- embeddings ---------------------------------------------------------------

def save_embeddings(m: EmbeddingMatrix, path: PathLike) -> None:
    """Write EMB1; round-trips bit-exactly through load_embeddings."""
    header = _EMB1_HEADER.pack(EMB1_MAGIC, 1, 1, 0, m.n, m.d)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(m.data.astype("<f4", copy=False).tobytes(order="C"))
    except OSError as exc:
        raise IoFailure(f"cannot write embeddings to {path}: {exc}") from exc


def load_embeddings(path: PathLike) -> EmbeddingMatrix:
    """Load EMB1 (detected by magic bytes) or headerless CSV."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read embeddings from {path}: {exc}") from exc
    if raw[:4] == EMB1_MAGIC:
        return _parse_emb1(raw, path)
    return _parse_embedding_csv(raw, path)


def _parse_emb1(raw: bytes, path: PathLike) -> EmbeddingMatrix:
    if len(raw) < _EMB1_HEADER.size:
        raise MalformedHeader(f"{path}: truncated EMB1 header")
    magic, version, dtype, reserved, n, d = _EMB1_HEADER.unpack_from(raw)
    if magic != EMB1_MAGIC or version != 1 or dtype != 1 or reserved != 0:
        raise MalformedHeader(
            f"{path}: bad EMB1 header (version={version}, dtype={dtype}, reserved={reserved})"
        )
    if n == 0 or d == 0:
        raise EmptyMatrix(f"{path}: EMB1 declares n={n}, d={d}")
    payload = len(raw) - _EMB1_HEADER.size
    if payload != 4 * n * d:
        raise SizeMismatch(
            f"{path}: EMB1 payload holds {payload // 4} float32 values, expected {n * d}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=_EMB1_HEADER.size).reshape(n, d)
    return EmbeddingMatrix(data)


def _parse_embedding_csv(raw: bytes, path: PathLike) -> EmbeddingMatrix:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise MalformedHeader(f"{path}: neither EMB1 binary nor UTF-8 CSV") from None
    rows: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise MalformedHeader(
                f"{path}: line {lineno} is not comma-separated numbers"
            ) from None
    if not rows:
        raise EmptyMatrix(f"{path}: no data rows")
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise SizeMismatch(
                f"{path}: row {lineno} has {len(row)} values, expected {width}"
            )
    return EmbeddingMatrix(np.asarray(rows, dtype=np.float64).astype(np.float32))


# --- labels ---------------------------------------------------------------------

def save_labels(v: LabelVector, path: PathLike) -> None:
    """Write LAB1; labels must fit in u32."""
    if int(v.labels.max()) > 0xFFFFFFFF:
        raise MalformedLabel("LAB1 stores u32 labels")
    header = _LAB1_HEADER.pack(LAB1_MAGIC, 1, 0, 0, 0, len(v))
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(v.labels.astype("<u4").tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write labels to {path}: {exc}") from exc


def load_labels(path: PathLike, num_classes: Optional[int] = None) -> LabelVector:
    """Load LAB1 (by magic) or one-integer-per-line CSV.

    num_classes defaults to 1 + max label; pass it explicitly for datasets
    where some class is absent.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read labels from {path}: {exc}") from exc
    if raw[:4] == LAB1_MAGIC:
        labels = _parse_lab1(raw, path)
    else:
        labels = _parse_label_csv(raw, path)
    return LabelVector.from_labels(labels, num_classes)


def _parse_lab1(raw: bytes, path: PathLike) -> np.ndarray:
    if len(raw) < _LAB1_HEADER.size:
        raise MalformedHeader(f"{path}: truncated LAB1 header")
    magic, version, r0, r1, r2, n = _LAB1_HEADER.unpack_from(raw)
    if magic != LAB1_MAGIC or version != 1 or (r0, r1, r2) != (0, 0, 0):
        raise MalformedHeader(f"{path}: bad LAB1 header (version={version})")
    if n == 0:
        raise EmptyFile(f"{path}: LAB1 declares n=0")
    payload = len(raw) - _LAB1_HEADER.size
    if payload != 4 * n:
        raise MalformedHeader(
            f"{path}: LAB1 payload holds {payload // 4} labels, expected {n}"
        )
    return np.frombuffer(raw, dtype="<u4", offset=_LAB1_HEADER.size).astype(np.int64)


def _parse_label_csv(raw: bytes, path: PathLike) -> np.ndarray:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise MalformedHeader(f"{path}: neither LAB1 binary nor UTF-8 CSV") from None
    values: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tok = line.strip()
        if not tok:
            continue
        try:
            label = int(tok)
        except ValueError:
            raise MalformedLabel(f"{path}: line {lineno}: {tok!r} is not an integer") from None
        if label < 0:
            raise MalformedLabel(f"{path}: line {lineno}: negative label {label}")
        values.append(label)
    if not values:
        raise EmptyFile(f"{path}: no labels")
    return np.asarray(values, dtype=np.int64)
