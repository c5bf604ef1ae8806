"""Loading matrix sequences and the histogram/feature reduction."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FEATURES = ("mean", "sd", "skewness")


class FormatError(ValueError):
    """Raised for malformed input files."""


@dataclass(frozen=True)
class MatrixSequence:
    """Ordered sequence of ``n`` real ``s x d`` frames, stored as an ``(n, s, d)`` array."""

    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim == 2:
            frames = frames[:, None, :]
        if frames.ndim != 3:
            raise ValueError("frames must be a 3-D (n, s, d) array")
        if frames.shape[0] == 0:
            raise ValueError("no frames")
        if not np.all(np.isfinite(frames)):
            raise ValueError("frames contain non-finite entries")
        object.__setattr__(self, "frames", frames)

    @property
    def n(self) -> int:
        return self.frames.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        """``(s, d)`` of each frame."""
        return self.frames.shape[1], self.frames.shape[2]

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.frames[i]


@dataclass(frozen=True)
class BinningConfig:
    """Bin count ``p``, value range and per-bin feature selectors.

    ``range`` is ``"global"`` (pooled min/max over all frames) or an explicit
    ``(lo, hi)`` pair.
    """

    p: int = 100
    range: str | tuple[float, float] = "global"
    features: tuple[str, ...] = ("mean", "sd")

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2:
            raise ValueError(f"bin count must be an integer >= 2, got {self.p!r}")
        if isinstance(self.range, str):
            if self.range != "global":
                raise ValueError(f"range must be 'global' or (lo, hi), got {self.range!r}")
        else:
            lo, hi = self.range
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"range needs finite lo < hi, got {self.range!r}")
            object.__setattr__(self, "range", (float(lo), float(hi)))
        feats = tuple(self.features)
        if not feats:
            raise ValueError("at least one feature is required")
        for f in feats:
            if f not in FEATURES:
                raise ValueError(f"unknown feature {f!r}; choose from {FEATURES}")
        object.__setattr__(self, "features", feats)

    @property
    def q(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class HistogramFeatures:
    """Bin weights ``w`` (sum 1), per-bin feature matrix ``X`` (p x q) and bin edges."""

    weights: np.ndarray
    features: np.ndarray
    edges: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.weights.shape[0]

    @property
    def q(self) -> int:
        return self.features.shape[1]


def _parse_rows(rows, source):
    data = []
    width = None
    for lineno, row in rows:
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(
                f"{source}: line {lineno} has {len(row)} columns, expected {width}")
        values = []
        for col, cell in enumerate(row, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                raise FormatError(
                    f"{source}: non-numeric cell {cell!r} at row {lineno}, column {col}"
                ) from None
        data.append(values)
    return data


def _read_csv(path, skip_header=False):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [(reader.line_num, row) for row in reader if row]
    if skip_header and rows:
        rows = rows[1:]
    return _parse_rows(rows, path)


def load_vector_sequence(path: str | os.PathLike, skip_header: bool = False) -> MatrixSequence:
    """Read an ``n x d`` CSV file; each row becomes a ``1 x d`` frame."""
    data = _read_csv(path, skip_header)
    if not data:
        raise FormatError(f"{path}: no frames")
    return MatrixSequence(np.array(data)[:, None, :])


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    """Decode a P2 (ASCII) or P5 (binary) greymap into a float matrix."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic = raw[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"{path}: unsupported PGM magic number {magic!r}")

    # header: magic, width, height, maxval; '#' comments allowed between tokens
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(raw):
            raise FormatError(f"{path}: truncated PGM header")
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise FormatError(f"{path}: malformed PGM header") from None
    if width <= 0 or height <= 0 or not 0 < maxval <= 65535:
        raise FormatError(f"{path}: invalid PGM header {width}x{height} maxval {maxval}")
    count = width * height

    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(raw) - pos < count * dtype.itemsize:
            raise FormatError(f"{path}: expected {count} pixels")
        body = np.frombuffer(raw, dtype=dtype, count=count, offset=pos)
    else:
        text = b" ".join(
            line.split(b"#", 1)[0] for line in raw[pos:].splitlines())
        body = np.array(text.split(), dtype=np.int64)
        if body.size != count:
            raise FormatError(f"{path}: expected {count} pixels, found {body.size}")
    return body.astype(np.float64).reshape(height, width)


def load_frame_directory(path: str | os.PathLike, format: str = "pgm") -> MatrixSequence:
    """Load every ``*.csv`` or ``*.pgm`` file in ``path`` (lexicographic order) as one frame."""
    if format not in ("csv", "pgm"):
        raise ValueError(f"unsupported frame format {format!r}")
    names = sorted(f for f in os.listdir(path) if f.lower().endswith("." + format))
    if not names:
        raise FormatError(f"{path}: no .{format} files")
    frames = []
    for name in names:
        full = os.path.join(path, name)
        if format == "pgm":
            frame = read_pgm(full)
        else:
            data = _read_csv(full)
            if not data:
                raise FormatError(f"{full}: empty frame")
            frame = np.array(data)
        if frames and frame.shape != frames[0].shape:
            raise FormatError(
                f"{full}: frame shape {frame.shape} differs from {frames[0].shape}")
        frames.append(frame)
    return MatrixSequence(np.stack(frames))


def bin_edges(seq: MatrixSequence, cfg: BinningConfig) -> np.ndarray:
    if cfg.range == "global":
        lo = float(seq.frames.min())
        hi = float(seq.frames.max())
        pad = 1e-9 * (hi - lo) if hi > lo else 1e-9 * max(abs(lo), 1.0)
        lo, hi = lo - pad, hi + pad
    else:
        lo, hi = cfg.range
    return np.linspace(lo, hi, cfg.p + 1)


def _reduce_frame(values, edges, features):
    p = edges.shape[0] - 1
    # sorted order makes every float reduction independent of entry position
    v = np.sort(values.ravel())
    inside = (v >= edges[0]) & (v <= edges[-1])
    v = v[inside]
    if v.size == 0:
        return None
    idx = np.searchsorted(edges, v, side="right") - 1
    idx[idx == p] = p - 1  # last bin is closed on the right

    counts = np.bincount(idx, minlength=p).astype(np.float64)
    occupied = counts > 0
    safe = np.where(occupied, counts, 1.0)
    mean = np.bincount(idx, weights=v, minlength=p) / safe
    dev = v - mean[idx]
    m2 = np.bincount(idx, weights=dev * dev, minlength=p) / safe

    cols = []
    for f in features:
        if f == "mean":
            mid = 0.5 * (edges[:-1] + edges[1:])
            cols.append(np.where(occupied, mean, mid))
        elif f == "sd":
            cols.append(np.sqrt(m2))
        else:
            m3 = np.bincount(idx, weights=dev ** 3, minlength=p) / safe
            with np.errstate(divide="ignore", invalid="ignore"):
                skew = np.where(m2 > 0, m3 / m2 ** 1.5, 0.0)
            cols.append(skew)
    return HistogramFeatures(counts / v.size, np.column_stack(cols), edges)


def reduce(seq: MatrixSequence, cfg: BinningConfig | None = None) -> list[HistogramFeatures]:
    """Histogram weights and per-bin feature matrix for every frame.

    Bins are half-open ``[e_r, e_{r+1})`` except the last, which is closed.
    Empty bins get weight 0, their midpoint as ``mean`` and 0 for ``sd`` and
    ``skewness``.  Entries outside an explicit range are ignored; a frame with
    no entries inside the range is an error.
    """
    cfg = cfg or BinningConfig()
    edges = bin_edges(seq, cfg)
    out = []
    for i, frame in enumerate(seq.frames):
        hf = _reduce_frame(frame, edges, cfg.features)
        if hf is None:
            raise ValueError(
                f"frame {i}: all entries fall outside the range [{edges[0]}, {edges[-1]}]")
        out.append(hf)
    return out


def parse_range(text: str) -> str | tuple[float, float]:
    """Parse ``'global'`` or ``'lo:hi'``."""
    if text == "global":
        return text
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError:
        raise ValueError(f"range must be 'global' or 'lo:hi', got {text!r}") from None
    return lo, hi


def parse_features(text: str | Sequence[str]) -> tuple[str, ...]:
    if isinstance(text, str):
        text = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(text)
