"""Noise-batch and series file formats plus run manifests.

Batch CSV
    ``#``-prefixed header lines (format tag and a JSON manifest without the
    timestamp, so repeated runs give identical files), then one row per time
    index with the sequences as columns, each value rendered with 17
    significant digits.
Batch binary
    ``b"MLNB"``, u32 version (1), u64 N, u64 T, then ``N*T`` little-endian
    float64 values in row-major (sequence-major) order.
Series CSV
    ``#`` header lines, a column-name line, then ``grid,value`` rows.

Every output also gets a sidecar ``<path>.manifest.json`` that includes the
UTC timestamp.
"""

from __future__ import annotations

import datetime as _dt
import io as _io
import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import InputFormatError

__all__ = [
    "RunManifest",
    "MAGIC",
    "BIN_VERSION",
    "manifest_path",
    "write_manifest",
    "write_batch_csv",
    "write_batch_bin",
    "stream_batch_bin",
    "read_batch",
    "write_series_csv",
    "read_series_csv",
]

MAGIC = b"MLNB"
BIN_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")
_BATCH_TAG = "# mlnoise batch v1"
_SERIES_TAG = "# mlnoise series v1"


@dataclass
class RunManifest:
    """Provenance of one command invocation."""

    command: str
    params: dict | None = None
    N: int | None = None
    T: int | None = None
    tmax: int | None = None
    dt: int | None = None
    seed: int | None = None
    T_opt: int | None = None
    version: str = ""
    extra: dict = field(default_factory=dict)
    timestamp: str | None = None

    def stamped(self) -> "RunManifest":
        now = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0)
        d = asdict(self)
        d["timestamp"] = now.isoformat().replace("+00:00", "Z")
        return RunManifest(**d)

    def to_json(self, with_timestamp: bool = True) -> str:
        d = asdict(self)
        if not with_timestamp:
            d.pop("timestamp")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


def manifest_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".manifest.json")


def write_manifest(path, manifest: RunManifest) -> Path:
    """Write the timestamped sidecar manifest next to ``path``."""
    side = manifest_path(path)
    side.write_text(json.dumps(json.loads(manifest.stamped().to_json()), indent=2, sort_keys=True) + "\n")
    return side


def _header_lines(tag: str, manifest: RunManifest | None) -> list[str]:
    lines = [tag]
    if manifest is not None:
        lines.append("# manifest " + manifest.to_json(with_timestamp=False))
    return lines


def write_batch_csv(path, data: np.ndarray, manifest: RunManifest | None = None) -> None:
    """Write an ``N x T`` batch as a ``T``-row CSV (sequences as columns)."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("batch must be a 2-D N x T array")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(_header_lines(_BATCH_TAG, manifest)) + "\n")
        np.savetxt(fh, data.T, fmt="%.17g", delimiter=",")


def stream_batch_bin(path, N: int, T: int, blocks: Iterable[tuple[int, np.ndarray]]) -> None:
    """Write the binary format from ``(first_row, block)`` chunks in row order."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, BIN_VERSION, N, T))
        expected = 0
        for start, block in blocks:
            if start != expected or block.shape[1] != T:
                raise ValueError("blocks must arrive in row order with T columns")
            fh.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
            expected += block.shape[0]
        if expected != N:
            raise ValueError(f"wrote {expected} rows, expected {N}")


def write_batch_bin(path, data: np.ndarray) -> None:
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("batch must be a 2-D N x T array")
    stream_batch_bin(path, data.shape[0], data.shape[1], [(0, data)])


def _read_bin(raw: bytes, path) -> np.ndarray:
    if len(raw) < _HEADER.size:
        raise InputFormatError(f"{path}: truncated binary header")
    magic, version, n, t = _HEADER.unpack_from(raw)
    if version != BIN_VERSION:
        raise InputFormatError(f"{path}: unsupported binary version {version}")
    if n < 1 or t < 1:
        raise InputFormatError(f"{path}: empty batch (N={n}, T={t})")
    if len(raw) - _HEADER.size != 8 * n * t:
        raise InputFormatError(f"{path}: payload holds {len(raw) - _HEADER.size} bytes, expected {8 * n * t}")
    return np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).astype(float).reshape(n, t)


def _split_header(text: str):
    header, body = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            if body:
                raise InputFormatError("comment line inside the data block")
            header.append(line)
        elif line.strip():
            body.append(line)
    return header, body


def _manifest_from_header(header: list[str]) -> dict | None:
    for line in header:
        if line.startswith("# manifest "):
            try:
                return json.loads(line[len("# manifest "):])
            except json.JSONDecodeError as exc:
                raise InputFormatError(f"unreadable manifest line: {exc}") from None
    return None


def _parse_rows(body: list[str], path) -> np.ndarray:
    if not body:
        raise InputFormatError(f"{path}: no data rows")
    try:
        arr = np.loadtxt(_io.StringIO("\n".join(body)), delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    if not np.all(np.isfinite(arr)):
        raise InputFormatError(f"{path}: non-finite values")
    return arr


def read_batch(path) -> tuple[np.ndarray, dict | None]:
    """Load a batch file (binary or CSV, detected from the first bytes).

    Returns the ``N x T`` data and the manifest (embedded for CSV, sidecar
    for binary), or ``None`` when no manifest is found.

    Raises
    ------
    InputFormatError
        On a missing, truncated, ragged or non-numeric file.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputFormatError(f"{path}: {exc.strerror or exc}") from None
    if raw[:4] == MAGIC:
        data = _read_bin(raw, path)
        side = manifest_path(path)
        manifest = None
        if side.exists():
            try:
                manifest = json.loads(side.read_text())
            except json.JSONDecodeError:
                manifest = None
        return data, manifest
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise InputFormatError(f"{path}: neither an MLNB binary nor a text CSV") from None
    header, body = _split_header(text)
    if header and header[0] == _SERIES_TAG:
        raise InputFormatError(f"{path}: is a series file, not a noise batch")
    return _parse_rows(body, path).T.copy(), _manifest_from_header(header)


def write_series_csv(path, grid, values, columns: tuple[str, str], manifest: RunManifest | None = None) -> None:
    """Two-column CSV ``grid,value`` with a manifest header."""
    grid = np.asarray(grid)
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(_header_lines(_SERIES_TAG, manifest)) + "\n")
        fh.write(",".join(columns) + "\n")
        for g, v in zip(grid, values):
            fh.write(f"{int(g)},{v:.17g}\n")


def read_series_csv(path) -> tuple[np.ndarray, np.ndarray, dict | None]:
    text = Path(path).read_text()
    header, body = _split_header(text)
    if not body:
        raise InputFormatError(f"{path}: no data rows")
    arr = _parse_rows(body[1:], path)
    if arr.shape[1] != 2:
        raise InputFormatError(f"{path}: expected two columns")
    return arr[:, 0].astype(np.int64), arr[:, 1], _manifest_from_header(header)
