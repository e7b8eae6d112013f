"""Single-file binary containers for TT tensors, side information, and
sample sets.

All integers and floats are little-endian; arrays are contiguous C order.

TT tensor (magic ``RTTC-TT\\0``)::

    magic        8 bytes
    version      u16   (currently 1)
    orth_state   u8    (0 none, 1 left, 2 right)
    pad          u8    (zero)
    d            u32
    dims         d   * u64
    ranks        (d+1) * u64
    cores        concatenated f64, core k shaped (ranks[k], dims[k], ranks[k+1])

Side information (magic ``RTTC-SI\\0``)::

    magic        8 bytes
    version      u16
    pad          u16   (zero)
    d            u32
    trivial      u64   bitmask, bit k set when mode k is an identity basis
    shapes       d * (u64 N_k, u64 M_k)
    bases        f64 matrices (N_k x M_k) for non-trivial modes, ascending k;
                 trivial modes store nothing

Sample set (magic ``RTTC-SP\\0``)::

    magic        8 bytes
    version      u16
    pad          u16   (zero)
    d            u32
    dims         d * u64
    n            u64
    indices      n*d * u64 (row major, zero based)
    values       n * f64
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .samples import SparseSamples
from .sideinfo import SideInfo
from .tt import TTTensor

_TT_MAGIC = b"RTTC-TT\0"
_SI_MAGIC = b"RTTC-SI\0"
_SP_MAGIC = b"RTTC-SP\0"
_VERSION = 1

_ORTH_CODES = {"none": 0, "left": 1, "right": 2}
_ORTH_NAMES = {v: k for k, v in _ORTH_CODES.items()}


def _read_exact(f, n: int) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise ValueError(f"truncated file: wanted {n} bytes, got {len(data)}")
    return data


def _check_header(f, magic: bytes, label: str) -> None:
    got = _read_exact(f, 8)
    if got != magic:
        raise ValueError(f"not a {label} file (magic {got!r})")


def save_tt(X: TTTensor, path) -> None:
    d = X.d
    with open(path, "wb") as f:
        f.write(_TT_MAGIC)
        f.write(struct.pack("<HBB", _VERSION, _ORTH_CODES[X.orth_state], 0))
        f.write(struct.pack("<I", d))
        f.write(struct.pack(f"<{d}Q", *X.dims))
        f.write(struct.pack(f"<{d + 1}Q", *X.ranks))
        for core in X.cores:
            f.write(np.ascontiguousarray(core, dtype="<f8").tobytes())


def load_tt(path) -> TTTensor:
    with open(path, "rb") as f:
        _check_header(f, _TT_MAGIC, "TT tensor")
        version, orth_code, _ = struct.unpack("<HBB", _read_exact(f, 4))
        if version != _VERSION:
            raise ValueError(f"unsupported TT file version {version}")
        if orth_code not in _ORTH_NAMES:
            raise ValueError(f"unknown orthogonality code {orth_code}")
        (d,) = struct.unpack("<I", _read_exact(f, 4))
        dims = struct.unpack(f"<{d}Q", _read_exact(f, 8 * d))
        ranks = struct.unpack(f"<{d + 1}Q", _read_exact(f, 8 * (d + 1)))
        cores = []
        for k in range(d):
            shape = (ranks[k], dims[k], ranks[k + 1])
            count = shape[0] * shape[1] * shape[2]
            buf = _read_exact(f, 8 * count)
            cores.append(np.frombuffer(buf, dtype="<f8").reshape(shape))
        return TTTensor(tuple(cores), orth_state=_ORTH_NAMES[orth_code])


def save_side_info(S: SideInfo, path) -> None:
    d = S.d
    if d > 64:
        raise ValueError("side info serialization supports at most 64 modes")
    mask = sum(1 << k for k, triv in enumerate(S.trivial) if triv)
    with open(path, "wb") as f:
        f.write(_SI_MAGIC)
        f.write(struct.pack("<HH", _VERSION, 0))
        f.write(struct.pack("<I", d))
        f.write(struct.pack("<Q", mask))
        for q in S.bases:
            f.write(struct.pack("<QQ", q.shape[0], q.shape[1]))
        for k, q in enumerate(S.bases):
            if not S.trivial[k]:
                f.write(np.ascontiguousarray(q, dtype="<f8").tobytes())


def load_side_info(path) -> SideInfo:
    with open(path, "rb") as f:
        _check_header(f, _SI_MAGIC, "side info")
        version, _ = struct.unpack("<HH", _read_exact(f, 4))
        if version != _VERSION:
            raise ValueError(f"unsupported side info file version {version}")
        (d,) = struct.unpack("<I", _read_exact(f, 4))
        (mask,) = struct.unpack("<Q", _read_exact(f, 8))
        shapes = [struct.unpack("<QQ", _read_exact(f, 16)) for _ in range(d)]
        bases = []
        for k, (n, m) in enumerate(shapes):
            if mask >> k & 1:
                if n != m:
                    raise ValueError(f"mode {k}: trivial flag on a non-square basis")
                bases.append(np.eye(n))
            else:
                buf = _read_exact(f, 8 * n * m)
                bases.append(np.frombuffer(buf, dtype="<f8").reshape(n, m))
        return SideInfo(tuple(bases))


def save_samples(Z: SparseSamples, path) -> None:
    d = len(Z.dims)
    with open(path, "wb") as f:
        f.write(_SP_MAGIC)
        f.write(struct.pack("<HH", _VERSION, 0))
        f.write(struct.pack("<I", d))
        f.write(struct.pack(f"<{d}Q", *Z.dims))
        f.write(struct.pack("<Q", Z.n))
        f.write(np.ascontiguousarray(Z.indices, dtype="<u8").tobytes())
        f.write(np.ascontiguousarray(Z.values, dtype="<f8").tobytes())


def load_samples(path) -> SparseSamples:
    with open(path, "rb") as f:
        _check_header(f, _SP_MAGIC, "sample set")
        version, _ = struct.unpack("<HH", _read_exact(f, 4))
        if version != _VERSION:
            raise ValueError(f"unsupported sample file version {version}")
        (d,) = struct.unpack("<I", _read_exact(f, 4))
        dims = struct.unpack(f"<{d}Q", _read_exact(f, 8 * d))
        (n,) = struct.unpack("<Q", _read_exact(f, 8))
        idx = np.frombuffer(_read_exact(f, 8 * n * d), dtype="<u8").reshape(n, d)
        vals = np.frombuffer(_read_exact(f, 8 * n), dtype="<f8")
        return SparseSamples(tuple(int(x) for x in dims),
                             idx.astype(np.int64), vals)


def write_report_lines(reports, path) -> None:
    """Append solve reports to a line-delimited text file, one per line."""
    path = Path(path)
    with open(path, "a", encoding="utf-8") as f:
        for report in reports:
            f.write(report.to_json_line() + "\n")
