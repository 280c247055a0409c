import json
import struct

import numpy as np
import pytest

from mlnoise.errors import InputFormatError
from mlnoise.io import (
    MAGIC,
    RunManifest,
    manifest_path,
    read_batch,
    read_series_csv,
    stream_batch_bin,
    write_batch_bin,
    write_batch_csv,
    write_manifest,
    write_series_csv,
)


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    d = rng.standard_normal((3, 17))
    d[0, 0] = 1e-300
    d[1, 1] = -123456789.123456789
    return d


def test_csv_round_trip(tmp_path, data):
    m = RunManifest("generate", {"C": 1.0, "lambda": 0.6, "tau": 10.0}, 3, 17, seed=9, T_opt=32, version="x")
    write_batch_csv(tmp_path / "a.csv", data, m)
    back, meta = read_batch(tmp_path / "a.csv")
    assert np.array_equal(back, data)
    assert meta["seed"] == 9 and meta["params"]["lambda"] == 0.6
    assert "timestamp" not in meta
    # re-save gives identical bytes
    write_batch_csv(tmp_path / "b.csv", back, RunManifest.from_dict(meta))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_layout(tmp_path):
    write_batch_csv(tmp_path / "a.csv", np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0].startswith("#")
    # one row per time index, sequences as columns
    assert lines[1:] == ["1,4", "2,5", "3,6"]


def test_csv_seventeen_digits(tmp_path):
    write_batch_csv(tmp_path / "a.csv", np.array([[0.1]]))
    assert (tmp_path / "a.csv").read_text().splitlines()[-1] == "0.10000000000000001"


def test_binary_round_trip_and_layout(tmp_path, data):
    path = tmp_path / "a.bin"
    write_batch_bin(path, data)
    raw = path.read_bytes()
    magic, version, n, t = struct.unpack_from("<4sIQQ", raw)
    assert (magic, version, n, t) == (MAGIC, 1, 3, 17)
    assert len(raw) == 24 + 8 * 3 * 17
    assert np.array_equal(np.frombuffer(raw[24:], "<f8").reshape(3, 17), data)
    back, meta = read_batch(path)
    assert np.array_equal(back, data) and meta is None
    write_batch_bin(tmp_path / "b.bin", back)
    assert (tmp_path / "b.bin").read_bytes() == raw


def test_binary_streaming(tmp_path, data):
    stream_batch_bin(tmp_path / "s.bin", 3, 17, [(0, data[:2]), (2, data[2:])])
    assert np.array_equal(read_batch(tmp_path / "s.bin")[0], data)
    with pytest.raises(ValueError):
        stream_batch_bin(tmp_path / "x.bin", 3, 17, [(0, data[:2])])
    with pytest.raises(ValueError):
        stream_batch_bin(tmp_path / "x.bin", 3, 17, [(1, data[:2])])


def test_sidecar_manifest(tmp_path):
    path = tmp_path / "a.bin"
    write_batch_bin(path, np.zeros((1, 2)))
    side = write_manifest(path, RunManifest("generate", seed=3))
    assert side == manifest_path(path) and side.name == "a.bin.manifest.json"
    doc = json.loads(side.read_text())
    assert doc["seed"] == 3 and doc["timestamp"].endswith("Z")
    assert read_batch(path)[1]["seed"] == 3


@pytest.mark.parametrize(
    "content",
    [
        b"",
        b"# only a header\n",
        b"1,2\n3\n",
        b"1,abc\n",
        b"1,nan\n",
        b"\xff\xfe\x00garbage",
        b"1,2\n# late comment\n3,4\n",
    ],
)
def test_malformed_csv(tmp_path, content):
    p = tmp_path / "bad.csv"
    p.write_bytes(content)
    with pytest.raises(InputFormatError):
        read_batch(p)


def test_malformed_binary(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(MAGIC + b"\x01\x00")
    with pytest.raises(InputFormatError):
        read_batch(p)
    p.write_bytes(struct.pack("<4sIQQ", MAGIC, 1, 2, 3) + b"\x00" * 8)
    with pytest.raises(InputFormatError):
        read_batch(p)
    p.write_bytes(struct.pack("<4sIQQ", MAGIC, 2, 1, 1) + b"\x00" * 8)
    with pytest.raises(InputFormatError):
        read_batch(p)
    with pytest.raises(InputFormatError):
        read_batch(tmp_path / "missing.bin")


def test_series_round_trip(tmp_path):
    lags = np.array([0, 5, 10])
    vals = np.array([1.0, 0.5, 1.0 / 3.0])
    write_series_csv(tmp_path / "s.csv", lags, vals, ("lag", "acf"), RunManifest("acft", tmax=10, dt=5))
    g, v, meta = read_series_csv(tmp_path / "s.csv")
    assert np.array_equal(g, lags) and np.array_equal(v, vals) and meta["command"] == "acft"
    with pytest.raises(InputFormatError):
        read_batch(tmp_path / "s.csv")
