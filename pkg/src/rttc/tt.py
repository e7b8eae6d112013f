"""Tensor-train (TT) algebra.

A tensor ``X`` of order ``d`` is stored as ``d`` cores ``G_k`` with shape
``(ranks[k], dims[k], ranks[k+1])`` and boundary ranks ``ranks[0] =
ranks[d] = 1``; its entries are products of core slices,

    X[i_1, ..., i_d] = G_1[:, i_1, :] @ ... @ G_d[:, i_d, :].

Axis order inside a core is always (left rank, mode, right rank).  The left
unfolding of a core is ``G_k.reshape(ranks[k] * dims[k], ranks[k+1])`` and
the right unfolding is ``G_k.reshape(ranks[k], dims[k] * ranks[k+1])``, both
in C order.

Sign conventions are fixed so that decompositions are reproducible: QR
factors have a nonnegative diagonal of R, and each left singular vector has
its largest-magnitude entry positive.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from math import prod

import numpy as np

from .rng import DeterministicRng

DENSE_CAP_DEFAULT = 10_000_000

_ORTH_STATES = ("none", "left", "right")


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C", copy=True)
    out.flags.writeable = False
    return out


def _qr_pos(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Economy QR with the sign convention diag(R) >= 0."""
    q, r = np.linalg.qr(mat, mode="reduced")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs, r * signs[:, None]


def _svd_fix_signs(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip singular vector pairs so each u column has a positive peak entry."""
    if u.shape[1] == 0:
        return u, vt
    peaks = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[peaks, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, vt * signs[:, None]


@dataclass(frozen=True)
class TTTensor:
    """Immutable TT representation: a tuple of 3-way cores plus an
    orthogonality flag.

    ``orth_state`` is one of ``"none"``, ``"left"`` (cores 1..d-1 have
    orthonormal left-unfolding columns), or ``"right"`` (cores 2..d have
    orthonormal right-unfolding rows).  The flag is trusted bookkeeping set
    by the constructors in this module, not re-verified on construction.
    """

    cores: tuple[np.ndarray, ...]
    orth_state: str = "none"

    def __post_init__(self):
        cores = tuple(_as_readonly(c) for c in self.cores)
        if len(cores) == 0:
            raise ValueError("TTTensor needs at least one core")
        for k, core in enumerate(cores):
            if core.ndim != 3:
                raise ValueError(f"core {k}: expected 3 axes, got {core.ndim}")
            if core.shape[1] < 1:
                raise ValueError(f"core {k}: mode size must be positive, got {core.shape[1]}")
        if cores[0].shape[0] != 1:
            raise ValueError(f"core 0: leading rank must be 1, got {cores[0].shape[0]}")
        if cores[-1].shape[2] != 1:
            raise ValueError(f"core {len(cores) - 1}: trailing rank must be 1, "
                             f"got {cores[-1].shape[2]}")
        for k in range(len(cores) - 1):
            if cores[k].shape[2] != cores[k + 1].shape[0]:
                raise ValueError(
                    f"core {k}: right rank {cores[k].shape[2]} does not match "
                    f"left rank {cores[k + 1].shape[0]} of core {k + 1}")
        if self.orth_state not in _ORTH_STATES:
            raise ValueError(f"orth_state must be one of {_ORTH_STATES}, got {self.orth_state!r}")
        object.__setattr__(self, "cores", cores)

    @property
    def d(self) -> int:
        return len(self.cores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + tuple(c.shape[2] for c in self.cores)


@dataclass(frozen=True)
class DenseTensor:
    """A small dense tensor, capped in size so oracle paths stay desk scale.

    Construction refuses arrays with more than ``cap`` entries (default
    10**7); pass a larger ``cap`` explicitly to override.
    """

    array: np.ndarray
    cap: InitVar[int] = DENSE_CAP_DEFAULT

    def __post_init__(self, cap):
        arr = np.asarray(self.array, dtype=np.float64)
        if arr.size > cap:
            raise ValueError(f"dense tensor with {arr.size} entries exceeds cap {cap}")
        object.__setattr__(self, "array", _as_readonly(arr))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.array.shape


def _validate_dims_ranks(dims, ranks) -> tuple[tuple[int, ...], tuple[int, ...]]:
    dims = tuple(int(n) for n in dims)
    ranks = tuple(int(r) for r in ranks)
    d = len(dims)
    if d < 1:
        raise ValueError("need at least one mode")
    if len(ranks) != d + 1:
        raise ValueError(f"ranks must have length d + 1 = {d + 1}, got {len(ranks)}")
    for k, n in enumerate(dims):
        if n < 1:
            raise ValueError(f"mode {k}: size must be positive, got {n}")
    if ranks[0] != 1:
        raise ValueError(f"rank 0 must be 1, got {ranks[0]}")
    if ranks[d] != 1:
        raise ValueError(f"rank {d} must be 1, got {ranks[d]}")
    for k in range(1, d):
        if ranks[k] < 1:
            raise ValueError(f"rank {k} must be positive, got {ranks[k]}")
    return dims, ranks


def tt_random(dims, ranks, seed: int) -> TTTensor:
    """TT tensor with i.i.d. standard normal core entries.

    Cores are filled in order, each in C order, from a single
    :class:`DeterministicRng` stream, so the result is a pure function of
    ``(dims, ranks, seed)``.
    """
    dims, ranks = _validate_dims_ranks(dims, ranks)
    rng = DeterministicRng(seed)
    cores = []
    for k, n in enumerate(dims):
        r0, r1 = ranks[k], ranks[k + 1]
        cores.append(rng.normal(r0 * n * r1).reshape(r0, n, r1))
    return TTTensor(tuple(cores))


def orthogonalize(X: TTTensor, direction: str) -> TTTensor:
    """Return an equivalent TT with orthonormal cores.

    ``direction="left"`` makes cores 1..d-1 have orthonormal left-unfolding
    columns via a QR sweep that pushes triangular factors to the right;
    ``direction="right"`` is the mirror sweep.  The represented tensor is
    unchanged.  Bond ranks shrink only if a requested rank structurally
    exceeds what the unfolding shapes can carry.
    """
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    if X.orth_state == direction:
        return X
    cores = [np.array(c) for c in X.cores]
    d = len(cores)
    if direction == "left":
        for k in range(d - 1):
            r0, n, r1 = cores[k].shape
            q, r = _qr_pos(cores[k].reshape(r0 * n, r1))
            cores[k] = q.reshape(r0, n, q.shape[1])
            cores[k + 1] = np.einsum("ab,bic->aic", r, cores[k + 1])
    else:
        for k in range(d - 1, 0, -1):
            r0, n, r1 = cores[k].shape
            q, r = _qr_pos(cores[k].reshape(r0, n * r1).T)
            cores[k] = q.T.reshape(q.shape[1], n, r1)
            cores[k - 1] = np.einsum("aib,bc->aic", cores[k - 1], r.T)
    return TTTensor(tuple(cores), orth_state=direction)


def tt_svd(A, target_ranks, return_discarded: bool = False):
    """Compress a dense tensor to TT form by sequential truncated SVDs.

    ``A`` may be a :class:`DenseTensor` or an ndarray.  Bond ``k`` is
    truncated to ``min(target_ranks[k], attainable)``.  With
    ``return_discarded=True`` also returns the per-bond arrays of discarded
    singular values; the total truncation error is their root-sum-square.
    """
    arr = A.array if isinstance(A, DenseTensor) else DenseTensor(np.asarray(A)).array
    dims = arr.shape
    _, target = _validate_dims_ranks(dims, target_ranks)
    d = len(dims)
    cores = []
    discarded = []
    r_prev = 1
    mat = arr.reshape(r_prev * dims[0], -1)
    for k in range(d - 1):
        u, s, vt = np.linalg.svd(mat, full_matrices=False)
        t = min(target[k + 1], s.size)
        u, vt = _svd_fix_signs(u[:, :t], vt[:t])
        discarded.append(s[t:].copy())
        cores.append(u.reshape(r_prev, dims[k], t))
        mat = (s[:t, None] * vt).reshape(t * dims[k + 1], -1)
        r_prev = t
    cores.append(mat.reshape(r_prev, dims[d - 1], 1))
    out = TTTensor(tuple(cores), orth_state="left")
    return (out, discarded) if return_discarded else out


def tt_round(X: TTTensor, target_ranks, return_discarded: bool = False):
    """Truncate a TT tensor to target ranks without densifying.

    Right-orthogonalizes, then sweeps left to right truncating each bond by
    SVD.  Same contract as :func:`tt_svd` but on TT input.
    """
    _, target = _validate_dims_ranks(X.dims, target_ranks)
    cores = [np.array(c) for c in orthogonalize(X, "right").cores]
    d = len(cores)
    discarded = []
    for k in range(d - 1):
        r0, n, r1 = cores[k].shape
        u, s, vt = np.linalg.svd(cores[k].reshape(r0 * n, r1), full_matrices=False)
        t = min(target[k + 1], s.size)
        u, vt = _svd_fix_signs(u[:, :t], vt[:t])
        discarded.append(s[t:].copy())
        cores[k] = u.reshape(r0, n, t)
        cores[k + 1] = np.einsum("ab,bic->aic", s[:t, None] * vt, cores[k + 1])
    out = TTTensor(tuple(cores), orth_state="left")
    return (out, discarded) if return_discarded else out


def _check_indices(dims, idx: np.ndarray) -> np.ndarray:
    idx = np.atleast_2d(np.asarray(idx, dtype=np.int64))
    if idx.ndim != 2 or idx.shape[1] != len(dims):
        raise ValueError(f"index array must have shape (n, {len(dims)}), got {idx.shape}")
    for k, n in enumerate(dims):
        col = idx[:, k]
        if col.size and (col.min() < 0 or col.max() >= n):
            bad = col[(col < 0) | (col >= n)][0]
            raise IndexError(f"mode {k}: index {bad} out of range [0, {n})")
    return idx


def entries(X: TTTensor, idx) -> np.ndarray:
    """Evaluate the tensor at a list of multi-indices.

    ``idx`` is an (n, d) integer array (or list of index tuples); returns n
    values.  Cost is O(d n r^2) with O(n r^2) working memory.
    """
    idx = _check_indices(X.dims, idx)
    vec = np.ones((idx.shape[0], 1))
    for k, core in enumerate(X.cores):
        vec = np.einsum("sa,asb->sb", vec, core[:, idx[:, k], :])
    return vec[:, 0]


def entry(X: TTTensor, index) -> float:
    """Single-entry evaluation."""
    return float(entries(X, np.asarray(index, dtype=np.int64).reshape(1, -1))[0])


def dense(X: TTTensor, cap: int = DENSE_CAP_DEFAULT) -> DenseTensor:
    """Contract a TT tensor to a dense array (desk-scale oracle path)."""
    if prod(X.dims) > cap:
        raise ValueError(f"dense reconstruction of {prod(X.dims)} entries exceeds cap {cap}")
    out = X.cores[0][0]
    for core in X.cores[1:]:
        out = np.tensordot(out, core, axes=(out.ndim - 1, 0))
    return DenseTensor(out[..., 0], cap=cap)


def inner(X: TTTensor, Y: TTTensor) -> float:
    """Frobenius inner product of two TT tensors with matching dims."""
    if X.dims != Y.dims:
        raise ValueError(f"dims mismatch: {X.dims} vs {Y.dims}")
    w = np.ones((1, 1))
    for cx, cy in zip(X.cores, Y.cores):
        w = np.einsum("ab,aic,bid->cd", w, cx, cy)
    return float(w[0, 0])


def norm(X: TTTensor) -> float:
    """Frobenius norm, computed through orthogonalization for accuracy."""
    if X.orth_state == "right":
        return float(np.linalg.norm(X.cores[0]))
    return float(np.linalg.norm(orthogonalize(X, "left").cores[-1]))


def scale(X: TTTensor, c: float) -> TTTensor:
    """Multiply by a scalar (absorbed into the non-orthogonal core)."""
    cores = list(X.cores)
    k = 0 if X.orth_state == "right" else len(cores) - 1
    cores[k] = cores[k] * float(c)
    return TTTensor(tuple(cores), orth_state=X.orth_state)


def tt_add(X: TTTensor, Y: TTTensor) -> TTTensor:
    """Sum of two TT tensors; bond ranks add."""
    if X.dims != Y.dims:
        raise ValueError(f"dims mismatch: {X.dims} vs {Y.dims}")
    d = X.d
    if d == 1:
        return TTTensor((X.cores[0] + Y.cores[0],))
    cores = []
    for k in range(d):
        cx, cy = X.cores[k], Y.cores[k]
        if k == 0:
            cores.append(np.concatenate([cx, cy], axis=2))
        elif k == d - 1:
            cores.append(np.concatenate([cx, cy], axis=0))
        else:
            block = np.zeros((cx.shape[0] + cy.shape[0], cx.shape[1],
                              cx.shape[2] + cy.shape[2]))
            block[:cx.shape[0], :, :cx.shape[2]] = cx
            block[cx.shape[0]:, :, cx.shape[2]:] = cy
            cores.append(block)
    return TTTensor(tuple(cores))
