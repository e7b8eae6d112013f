"""Independent dense oracles used to pin the TT machinery.

Everything here favors clarity over speed: explicit loops, brute-force
basis construction, no reuse of the production contraction paths.
"""

from __future__ import annotations

import itertools

import numpy as np

from rttc.tt import TTTensor, dense


def arr(X: TTTensor) -> np.ndarray:
    return dense(X).array


def dense_loop(X: TTTensor) -> np.ndarray:
    """Entry-by-entry reconstruction with explicit matrix chains."""
    out = np.zeros(X.dims)
    for index in itertools.product(*(range(n) for n in X.dims)):
        mat = np.ones((1, 1))
        for k, i in enumerate(index):
            mat = mat @ X.cores[k][:, i, :]
        out[index] = mat[0, 0]
    return out


def sparse_to_dense(dims, idx, vals) -> np.ndarray:
    out = np.zeros(tuple(dims))
    for row, v in zip(np.atleast_2d(idx), np.asarray(vals)):
        out[tuple(int(i) for i in row)] = v
    return out


def mode_multiply(a: np.ndarray, mat: np.ndarray, mode: int) -> np.ndarray:
    """Apply ``mat`` to axis ``mode`` of ``a`` (mat rows index the new axis)."""
    moved = np.moveaxis(a, mode, 0)
    out = np.tensordot(mat, moved, axes=(1, 0))
    return np.moveaxis(out, 0, mode)


def left_interface(point, k: int) -> np.ndarray:
    """Orthonormal matrix of the first k left-orthogonal cores,
    shape (prod dims[:k], ranks[k])."""
    u_cores = point.left.cores
    out = np.ones((1, 1))
    for j in range(k):
        out = np.einsum("pa,aib->pib", out, u_cores[j])
        out = out.reshape(-1, out.shape[2])
    return out


def right_interface(point, k: int) -> np.ndarray:
    """Orthonormal matrix of the trailing right-orthogonal cores k+1..d,
    shape (prod dims[k+1:], ranks[k+1])."""
    v_cores = point.right.cores
    out = np.ones((1, 1))
    for j in range(len(v_cores) - 1, k, -1):
        out = np.einsum("aib,qb->iqa", v_cores[j], out)
        out = out.reshape(-1, out.shape[-1]) if out.ndim == 3 else out
    return out


def tangent_slot_matrix(point, k: int) -> np.ndarray:
    """Dense matrix mapping vec(delta_k) to the ambient tensor of slot k."""
    dims = point.base.dims
    lk = left_interface(point, k)
    rk = right_interface(point, k)
    return np.kron(np.kron(lk, np.eye(dims[k])), rk)


def tangent_basis(point) -> np.ndarray:
    """All slot matrices side by side: the (redundant) tangent spanning set."""
    return np.hstack([tangent_slot_matrix(point, k) for k in range(point.base.d)])


def dense_tangent_projector(point) -> np.ndarray:
    """Orthogonal projector onto the tangent space, by brute-force SVD."""
    phi = tangent_basis(point)
    u, s, _ = np.linalg.svd(phi, full_matrices=False)
    keep = s > 1e-10 * s[0]
    basis = u[:, keep]
    return basis @ basis.T


def tangent_dim(dims, ranks) -> int:
    d = len(dims)
    total = sum(ranks[k] * dims[k] * ranks[k + 1] for k in range(d))
    gauge = sum(ranks[k + 1] ** 2 for k in range(d - 1))
    return total - gauge


def ambient_of_tangent(v) -> np.ndarray:
    """Brute-force ambient tensor of a gauged tangent vector: sum of slots."""
    point = v.point
    out = np.zeros(point.base.dims)
    for k, delta in enumerate(v.deltas):
        slot = tangent_slot_matrix(point, k)
        out += (slot @ delta.reshape(-1)).reshape(point.base.dims)
    return out
