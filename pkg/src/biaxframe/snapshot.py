"""Self-describing binary snapshots: JSON header + raw float64 payload.

Layout: an 8-byte little-endian unsigned header length, the UTF-8 JSON
header, then the payload (frame components followed by the two velocity
components, row-major little-endian float64).  Write/read round-trips are
bit-exact.
"""

import json
import struct
import sys
from pathlib import Path

import numpy as np

from .simulation import SimState
from .spectral import Grid2D

FORMAT_VERSION = 1


class SnapshotError(IOError):
    pass


def write_snapshot(state: SimState, grid: Grid2D, path, params=None):
    n = grid.n
    count = 9 * n * n + 2 * n * n
    header = {
        "version": FORMAT_VERSION,
        "grid": {"n": n, "L": grid.L},
        "params": params or {},
        "t": state.t,
        "step": state.step,
        "layout": ["frame[3][3]", "vx", "vy"],
        "dtype": "<f8",
        "endianness": "little",
        "element_count": count,
    }
    blob = json.dumps(header).encode("utf-8")
    payload = np.concatenate([state.frame.reshape(-1), state.vx.reshape(-1),
                              state.vy.reshape(-1)])
    if sys.byteorder != "little":
        payload = payload.astype("<f8")
    with open(Path(path), "wb") as fh:
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(payload.tobytes())


def read_snapshot(path):
    """Returns (SimState, Grid2D, params-dict)."""
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise SnapshotError(f"{path}: truncated header length prefix")
    (hlen,) = struct.unpack("<Q", raw[:8])
    if len(raw) < 8 + hlen:
        raise SnapshotError(f"{path}: truncated header")
    try:
        header = json.loads(raw[8:8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SnapshotError(f"{path}: corrupt header ({e})")
    if header.get("version") != FORMAT_VERSION:
        raise SnapshotError(
            f"{path}: unsupported snapshot version {header.get('version')!r}")
    n = header["grid"]["n"]
    count = header["element_count"]
    expected = 8 + hlen + count * 8
    if len(raw) != expected:
        raise SnapshotError(
            f"{path}: payload length mismatch (expected {expected} bytes, "
            f"got {len(raw)})")
    data = np.frombuffer(raw[8 + hlen:], dtype="<f8").astype(float, copy=True)
    frame = data[:9 * n * n].reshape(3, 3, n, n)
    vx = data[9 * n * n:10 * n * n].reshape(n, n)
    vy = data[10 * n * n:].reshape(n, n)
    grid = Grid2D(n, header["grid"]["L"])
    state = SimState(frame=frame, vx=vx, vy=vy, t=header["t"],
                     step=header["step"])
    return state, grid, header.get("params", {})
