"""Sparse sample sets: the observed entries driving completion."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .rng import DeterministicRng
from .tt import _check_indices


@dataclass(frozen=True)
class SparseSamples:
    """A set of observed entries of a tensor with the given dims.

    ``indices`` is an (n, d) int64 array of distinct multi-indices within
    ``dims``; ``values`` the matching n observations.
    """

    dims: tuple[int, ...]
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.size == 0:
            idx = idx.reshape(0, len(dims))
        idx = _check_indices(dims, idx)
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if vals.shape[0] != idx.shape[0]:
            raise ValueError(f"{idx.shape[0]} indices but {vals.shape[0]} values")
        if idx.shape[0] and np.unique(idx, axis=0).shape[0] != idx.shape[0]:
            raise ValueError("sample indices must be distinct")
        idx = idx.copy()
        idx.flags.writeable = False
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.indices.shape[0]


def sample_indices(dims, size: int, seed: int) -> np.ndarray:
    """Draw ``size`` distinct multi-indices uniformly without replacement.

    Small index spaces use a random permutation of all flat indices; large
    ones use rejection sampling of fresh tuples, which is exact as long as
    duplicates are discarded.  Both paths are pure functions of the seed.
    """
    dims = tuple(int(n) for n in dims)
    total = prod(dims)
    size = int(size)
    if size < 0 or size > total:
        raise ValueError(f"cannot draw {size} distinct indices from {total} cells")
    rng = DeterministicRng(seed)
    if total <= 1_000_000:
        flat = rng.permutation(total)[:size]
        return np.stack(np.unravel_index(flat, dims), axis=1).astype(np.int64)
    seen: set[bytes] = set()
    rows = []
    while len(rows) < size:
        batch = max(2 * (size - len(rows)), 64)
        cand = np.stack([rng.integers(n, batch) for n in dims], axis=1)
        for row in cand:
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                rows.append(row)
                if len(rows) == size:
                    break
    return np.array(rows, dtype=np.int64)
