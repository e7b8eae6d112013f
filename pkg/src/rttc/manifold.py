"""Geometry of the fixed-TT-rank manifold.

A manifold point caches the left- and right-orthogonalized representations
of its tensor.  Tangent vectors are stored in the gauged parameterization

    v  =  sum_k  [U_1, ..., U_{k-1}, delta_k, V_{k+1}, ..., V_d]

where U/V are the cached orthogonal chains and, for k < d, the left
unfolding of ``delta_k`` is orthogonal to that of ``U_k``.  In this gauge
slots are mutually orthogonal and the slot maps are isometries, so the
tangent inner product is simply ``sum_k <delta_k, eps_k>`` and the
orthogonal projection onto the tangent space decomposes slot by slot:
contract the ambient tensor with the orthonormal interfaces on both sides
of slot k, then remove the component along ``U_k``.

A tangent vector also has an exact TT representation of bond rank at most
``2 r``; retraction rounds ``X + step * v`` from that structured form, and
transport re-projects it at the new point.  Nothing here densifies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .samples import SparseSamples
from .tt import TTTensor, _check_indices, orthogonalize, tt_round


@dataclass(frozen=True)
class ManifoldPoint:
    """A TT tensor together with its two orthogonalized chains."""

    base: TTTensor
    left: TTTensor
    right: TTTensor
    # lazily filled by the side-information module, keyed by basis identity
    conformance_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.base.dims

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.base.ranks


@dataclass(frozen=True)
class TangentVector:
    """Gauged tangent vector at a manifold point."""

    point: ManifoldPoint
    deltas: tuple[np.ndarray, ...]

    def __post_init__(self):
        deltas = []
        for k, (delta, core) in enumerate(zip(self.deltas, self.point.left.cores)):
            delta = np.asarray(delta, dtype=np.float64)
            if delta.shape != core.shape:
                raise ValueError(f"delta {k}: shape {delta.shape} does not match "
                                 f"core shape {core.shape}")
            delta = delta.copy()
            delta.flags.writeable = False
            deltas.append(delta)
        if len(deltas) != self.point.base.d:
            raise ValueError(f"expected {self.point.base.d} delta cores, got {len(deltas)}")
        object.__setattr__(self, "deltas", tuple(deltas))


def make_point(X: TTTensor) -> ManifoldPoint:
    """Build a manifold point; requires structurally attainable ranks."""
    dims, ranks = X.dims, X.ranks
    for k in range(1, len(dims)):
        if ranks[k] > ranks[k - 1] * dims[k - 1] or ranks[k] > dims[k] * ranks[k + 1]:
            raise ValueError(f"rank {ranks[k]} at bond {k} is not attainable for "
                             f"dims {dims}")
    return ManifoldPoint(base=X, left=orthogonalize(X, "left"),
                         right=orthogonalize(X, "right"))


def zero_tangent(P: ManifoldPoint) -> TangentVector:
    return TangentVector(P, tuple(np.zeros(c.shape) for c in P.left.cores))


def tangent_inner(v: TangentVector, w: TangentVector) -> float:
    if v.point is not w.point:
        raise ValueError("tangent vectors live at different points")
    return float(sum(np.vdot(a, b) for a, b in zip(v.deltas, w.deltas)))


def tangent_norm(v: TangentVector) -> float:
    return float(np.sqrt(sum(np.vdot(a, a) for a in v.deltas)))


def tangent_combine(coeffs, vectors) -> TangentVector:
    """Linear combination of tangent vectors at a shared point."""
    point = vectors[0].point
    for v in vectors[1:]:
        if v.point is not point:
            raise ValueError("tangent vectors live at different points")
    deltas = [np.zeros(c.shape) for c in point.left.cores]
    for c, v in zip(coeffs, vectors):
        for k, delta in enumerate(v.deltas):
            deltas[k] = deltas[k] + float(c) * delta
    return TangentVector(point, tuple(deltas))


def _gauge_project(delta: np.ndarray, u_core: np.ndarray) -> np.ndarray:
    """Remove the component of delta's left unfolding along span(U_k)."""
    r0, n, r1 = u_core.shape
    u = u_core.reshape(r0 * n, r1)
    m = delta.reshape(r0 * n, delta.shape[2])
    return (m - u @ (u.T @ m)).reshape(delta.shape)


def _sample_interfaces(P: ManifoldPoint, idx: np.ndarray):
    """Per-sample row/column interface vectors from the U and V chains.

    Returns lists ``L`` and ``R`` where ``L[k]`` has shape (n, ranks[k]) and
    ``R[k]`` has shape (n, ranks[k+1]).
    """
    u_cores, v_cores = P.left.cores, P.right.cores
    d = len(u_cores)
    n = idx.shape[0]
    L = [np.ones((n, 1))]
    for k in range(d - 1):
        L.append(np.einsum("sa,asb->sb", L[k], u_cores[k][:, idx[:, k], :]))
    R = [None] * d
    R[d - 1] = np.ones((n, 1))
    for k in range(d - 1, 0, -1):
        R[k - 1] = np.einsum("asb,sb->sa", v_cores[k][:, idx[:, k], :], R[k])
    return L, R


def project_tangent(P: ManifoldPoint, Z: SparseSamples) -> TangentVector:
    """Orthogonal projection of a sparse tensor onto the tangent space.

    Two passes accumulate, for every sample, the left interface row vector
    and right interface column vector; their value-weighted outer products
    are scattered into the slot cores, which are then gauge-projected.
    Cost O(d n r^2 + d N r^2); no dense intermediate is formed.
    """
    if Z.dims != P.dims:
        raise ValueError(f"dims mismatch: samples {Z.dims} vs point {P.dims}")
    idx = Z.indices
    vals = Z.values
    u_cores = P.left.cores
    d = len(u_cores)
    L, R = _sample_interfaces(P, idx)
    deltas = []
    for k in range(d):
        r0, nk, r1 = u_cores[k].shape
        contrib = vals[:, None, None] * L[k][:, :, None] * R[k][:, None, :]
        slot = np.zeros((nk, r0, r1))
        np.add.at(slot, idx[:, k], contrib)
        delta = slot.transpose(1, 0, 2)
        if k < d - 1:
            delta = _gauge_project(delta, u_cores[k])
        deltas.append(delta)
    return TangentVector(P, tuple(deltas))


def project_tt(P: ManifoldPoint, Z: TTTensor) -> TangentVector:
    """Orthogonal projection of a TT tensor onto the tangent space at P.

    Same decomposition as :func:`project_tangent` but the interface
    contractions run over TT cores instead of samples, so the cost scales
    with the bond ranks of ``Z`` rather than a sample count.
    """
    if Z.dims != P.dims:
        raise ValueError(f"dims mismatch: {Z.dims} vs {P.dims}")
    u_cores, v_cores = P.left.cores, P.right.cores
    z_cores = Z.cores
    d = len(u_cores)
    L = [np.ones((1, 1))]
    for k in range(d - 1):
        L.append(np.einsum("za,zix,aiy->xy", L[k], z_cores[k], u_cores[k]))
    R = [None] * d
    R[d - 1] = np.ones((1, 1))
    for k in range(d - 1, 0, -1):
        R[k - 1] = np.einsum("zix,aiy,xy->za", z_cores[k], v_cores[k], R[k])
    deltas = []
    for k in range(d):
        delta = np.einsum("za,zix,xb->aib", L[k], z_cores[k], R[k])
        if k < d - 1:
            delta = _gauge_project(delta, u_cores[k])
        deltas.append(delta)
    return TangentVector(P, tuple(deltas))


def _structured_sum_cores(v: TangentVector, step: float, with_base: bool) -> list[np.ndarray]:
    """Cores of ``step * v`` (plus the base tensor when requested) in the
    rank-2r block form: first core [step*delta_1 | U_1], middle cores
    [[V_k, 0], [step*delta_k, U_k]], last core [V_d ; step*delta_d (+ U_d)]."""
    P = v.point
    u_cores, v_cores = P.left.cores, P.right.cores
    d = len(u_cores)
    if d == 1:
        core = step * v.deltas[0] + (u_cores[0] if with_base else 0.0)
        return [np.asarray(core)]
    cores = []
    cores.append(np.concatenate([step * v.deltas[0], u_cores[0]], axis=2))
    for k in range(1, d - 1):
        r0, nk, r1 = u_cores[k].shape
        block = np.zeros((2 * r0, nk, 2 * r1))
        block[:r0, :, :r1] = v_cores[k]
        block[r0:, :, :r1] = step * v.deltas[k]
        block[r0:, :, r1:] = u_cores[k]
        cores.append(block)
    tail = step * v.deltas[d - 1] + (u_cores[d - 1] if with_base else 0.0)
    cores.append(np.concatenate([v_cores[d - 1], tail], axis=0))
    return cores


def tangent_to_tt(v: TangentVector) -> TTTensor:
    """Exact TT representation of a tangent vector (bond ranks <= 2r)."""
    return TTTensor(tuple(_structured_sum_cores(v, 1.0, with_base=False)))


def sample_tangent(v: TangentVector, idx) -> np.ndarray:
    """Evaluate a tangent vector at a list of multi-indices directly.

    Uses the per-sample interfaces, so the cost is O(d n r^2) without
    forming the rank-2r TT.
    """
    P = v.point
    idx = _check_indices(P.dims, idx)
    L, R = _sample_interfaces(P, idx)
    out = np.zeros(idx.shape[0])
    for k, delta in enumerate(v.deltas):
        out += np.einsum("sa,asb,sb->s", L[k], delta[:, idx[:, k], :], R[k])
    return out


def retract(P: ManifoldPoint, v: TangentVector, step: float, ranks) -> TTTensor:
    """Retraction: round ``X + step * v`` back to the target ranks.

    The sum is assembled in its structured rank-2r form (the tangent block
    cores with the base absorbed into the last one) and truncated with
    :func:`rttc.tt.tt_round`.
    """
    if v.point is not P:
        raise ValueError("tangent vector does not live at the given point")
    summed = TTTensor(tuple(_structured_sum_cores(v, float(step), with_base=True)))
    return tt_round(summed, ranks)


def transport(P_new: ManifoldPoint, v: TangentVector) -> TangentVector:
    """Vector transport: orthogonal projection of v onto the tangent space
    at ``P_new``, computed from v's rank-2r TT form."""
    if v.point.dims != P_new.dims:
        raise ValueError(f"dims mismatch: {v.point.dims} vs {P_new.dims}")
    return project_tt(P_new, tangent_to_tt(v))
