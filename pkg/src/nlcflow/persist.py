"""Binary checkpoints and machine-readable run artifacts.

Checkpoint layout (little-endian, C order), bit-exact by construction:

    bytes 0..3    magic "NLCL"
    u32           format version (currently 1)
    u32           grid dimension
    u32           points per axis
    f64           box period
    f64           state time
    u64           fluid-parameter hash
    f64 * 3       w0
    f64 * N^dim   density deviation
    f64 * 3 N^dim velocity
    f64 * 3 N^dim director deviation

CSV files format floats with repr(), so identical values give identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .dynamics import PerturbationState
from .propagator import FluidParams
from .spectral import GridSpec

__all__ = [
    "CheckpointError",
    "params_hash",
    "save_checkpoint",
    "load_checkpoint",
    "write_norms_csv",
    "write_decay_csv",
    "write_inequalities_json",
]

MAGIC = b"NLCL"
VERSION = 1
_HEADER = struct.Struct("<4sIIIddQ")


class CheckpointError(RuntimeError):
    pass


def params_hash(params: FluidParams) -> int:
    blob = struct.pack("<dd", params.mu, params.nu)
    blob += params.pressure_law.encode()
    blob += struct.pack("<d", params.gamma_exponent)
    digest = hashlib.sha256(blob).digest()
    return struct.unpack("<Q", digest[:8])[0]


def save_checkpoint(state: PerturbationState, path, params: FluidParams):
    path = Path(path)
    grid = state.grid
    header = _HEADER.pack(MAGIC, VERSION, grid.dim, grid.points_per_axis,
                          grid.period, state.time, params_hash(params))
    payload = b"".join(
        np.ascontiguousarray(arr, dtype="<f8").tobytes()
        for arr in (state.w0, state.rho, state.velocity, state.director)
    )
    path.write_bytes(header + payload)


def load_checkpoint(path, params: FluidParams | None = None) -> PerturbationState:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise CheckpointError(
            f"truncated checkpoint: {len(raw)} bytes, header needs {_HEADER.size}")
    magic, version, dim, npts, period, time, phash = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise CheckpointError(f"checkpoint version {version} unsupported "
                              f"(this build reads version {VERSION})")
    grid = GridSpec(dim=dim, points_per_axis=npts, period=period)
    count = grid.total_points
    expected = (3 + 7 * count) * 8
    actual = len(raw) - _HEADER.size
    if actual != expected:
        raise CheckpointError(
            f"payload length mismatch: expected {expected} bytes, got {actual}")
    if params is not None and params_hash(params) != phash:
        raise CheckpointError("checkpoint was written with different fluid parameters")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    w0 = body[:3]
    rho = body[3:3 + count].reshape(grid.shape)
    u = body[3 + count:3 + 4 * count].reshape((3,) + grid.shape)
    n = body[3 + 4 * count:].reshape((3,) + grid.shape)
    return PerturbationState(grid, rho.copy(), u.copy(), n.copy(), w0=w0.copy(),
                             time=time)


# ---------------------------------------------------------------------------
# CSV / JSON artifacts
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_norms_csv(path, trajectory):
    """Rows = diagnostic records; columns = time followed by the record keys."""
    path = Path(path)
    if not trajectory.records:
        path.write_text("time\n")
        return
    columns = list(trajectory.records[0].keys())
    lines = [",".join(["time"] + columns)]
    for t, rec in zip(trajectory.times, trajectory.records):
        lines.append(",".join([_fmt(t)] + [_fmt(rec[c]) for c in columns]))
    path.write_text("\n".join(lines) + "\n")


def read_norms_csv(path):
    """Returns (column names, dict column -> float array)."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise ValueError(f"no data rows in {path}")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    if not rows:
        raise ValueError(f"no data rows in {path}")
    data = {name: np.array([float(r[j]) for r in rows]) for j, name in enumerate(header)}
    return header, data


def write_decay_csv(path, rows):
    """rows: iterables with attributes/keys component, k, exponent, r2, window."""
    lines = ["component,k,exponent,r2,window_lo,window_hi"]
    for row in rows:
        if isinstance(row, dict):
            comp, k = row["component"], row["k"]
            exp, r2 = row["exponent"], row["r2"]
            lo, hi = row["window_lo"], row["window_hi"]
        else:
            comp, k = row.component, row.k
            exp, r2 = row.fit.exponent, row.fit.r_squared
            lo, hi = row.fit.window
        lines.append(",".join([comp, _fmt(k), _fmt(exp), _fmt(r2), _fmt(lo), _fmt(hi)]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_inequalities_json(path, checks: list):
    Path(path).write_text(json.dumps(checks, indent=2, sort_keys=True) + "\n")
