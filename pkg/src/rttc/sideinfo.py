"""Subspace side information.

Per mode k an orthonormal basis ``Q_k`` (shape ``N_k x M_k``, orthonormal
columns) restricts that mode's fibers to a known M_k-dimensional subspace.
Applying all bases maps a small TT tensor ``Y`` isometrically to the
constrained tensor ``X = Y x_1 Q_1 ... x_d Q_d``; the constrained set of
fixed-rank tensors is exactly the image of the small fixed-rank manifold,
and its tangent spaces are the images of the unconstrained tangent spaces
under the mode-wise projector ``Q_k Q_k^T``.  Both mappings act core by
core on the middle (mode) axis, so ranks never change.

A base point "conforms" when projecting it onto the constrained set leaves
it unchanged (relative residual below 1e-10).  At a conforming point the
constrained tangent projection is the unconstrained one followed by the
mode-wise ``Q_k Q_k^T`` product on each delta core; at a non-conforming
point that composition is not a projection, so it is refused.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .manifold import ManifoldPoint, TangentVector, project_tangent
from .rng import DeterministicRng
from .samples import SparseSamples
from .tt import TTTensor, _qr_pos, norm, scale, tt_add

CONFORMANCE_RTOL = 1e-10


@dataclass(frozen=True)
class SideInfo:
    """Per-mode orthonormal bases; identity modes are flagged trivial."""

    bases: tuple[np.ndarray, ...]
    trivial: tuple[bool, ...] = field(init=False)

    def __post_init__(self):
        bases = []
        trivial = []
        for k, q in enumerate(self.bases):
            q = np.asarray(q, dtype=np.float64)
            if q.ndim != 2:
                raise ValueError(f"mode {k}: basis must be a matrix, got {q.ndim} axes")
            n, m = q.shape
            if m > n:
                raise ValueError(f"mode {k}: {m} basis columns exceed mode size {n}")
            gram = q.T @ q
            if np.max(np.abs(gram - np.eye(m))) > 1e-12:
                raise ValueError(f"mode {k}: basis columns are not orthonormal")
            q = q.copy()
            q.flags.writeable = False
            bases.append(q)
            trivial.append(n == m and np.array_equal(q, np.eye(n)))
        object.__setattr__(self, "bases", tuple(bases))
        object.__setattr__(self, "trivial", tuple(trivial))

    @property
    def d(self) -> int:
        return len(self.bases)

    @property
    def full_dims(self) -> tuple[int, ...]:
        return tuple(q.shape[0] for q in self.bases)

    @property
    def reduced_dims(self) -> tuple[int, ...]:
        return tuple(q.shape[1] for q in self.bases)

    @classmethod
    def identity(cls, dims) -> "SideInfo":
        return cls(tuple(np.eye(int(n)) for n in dims))


def orthonormal_basis(n: int, m: int, seed: int) -> np.ndarray:
    """Orthonormal basis of a random m-dimensional subspace of R^n.

    A seeded Gaussian matrix is orthonormalized by QR with the fixed sign
    convention, so the basis is a pure function of (n, m, seed).
    """
    n, m = int(n), int(m)
    if m > n:
        raise ValueError(f"{m} basis columns exceed dimension {n}")
    if m < 1:
        raise ValueError(f"need at least one column, got {m}")
    gauss = DeterministicRng(seed).normal(n * m).reshape(n, m)
    q, _ = _qr_pos(gauss)
    return q


def _mode_multiply_core(mat: np.ndarray, core: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ajb->aib", mat, core)


def apply_Q(S: SideInfo, Y: TTTensor) -> TTTensor:
    """Map a reduced-space TT tensor into the full space, core by core.

    An isometry: norms and inner products are preserved exactly, and core
    orthogonality survives because each ``Q_k`` has orthonormal columns.
    """
    if Y.dims != S.reduced_dims:
        raise ValueError(f"dims mismatch: tensor {Y.dims} vs bases {S.reduced_dims}")
    cores = [core if triv else _mode_multiply_core(q, core)
             for q, triv, core in zip(S.bases, S.trivial, Y.cores)]
    return TTTensor(tuple(cores), orth_state=Y.orth_state)


def apply_QT(S: SideInfo, X: TTTensor) -> TTTensor:
    """Adjoint map into the reduced space (core-wise Q_k^T product)."""
    if X.dims != S.full_dims:
        raise ValueError(f"dims mismatch: tensor {X.dims} vs bases {S.full_dims}")
    cores = [core if triv else _mode_multiply_core(q.T, core)
             for q, triv, core in zip(S.bases, S.trivial, X.cores)]
    return TTTensor(tuple(cores))


def project_side(S: SideInfo, X: TTTensor) -> TTTensor:
    """Orthogonal projection onto the side-information subspace, Q Q^T
    applied to every mode.  Ranks are unchanged."""
    if all(S.trivial):
        return X
    return apply_Q(S, apply_QT(S, X))


def conformance_residual(S: SideInfo, X: TTTensor) -> float:
    """Relative distance of X from the side-information subspace.

    Computed as the norm of the difference tensor in TT form (never via the
    cancellation-prone norm identity).
    """
    if all(S.trivial):
        return 0.0
    ref = norm(X)
    if ref == 0.0:
        return 0.0
    diff = tt_add(project_side(S, X), scale(X, -1.0))
    return norm(diff) / ref


def _conformance_cached(S: SideInfo, P: ManifoldPoint) -> float:
    key = id(S)
    if key not in P.conformance_cache:
        P.conformance_cache[key] = conformance_residual(S, P.base)
    return P.conformance_cache[key]


def project_tangent_si(S: SideInfo, P: ManifoldPoint, Z: SparseSamples) -> TangentVector:
    """Projection onto the tangent space of the constrained manifold.

    Runs the unconstrained sparse projection, then applies ``Q_k Q_k^T`` to
    the middle axis of each delta core.  Valid only at conforming base
    points (cached check); raises otherwise.
    """
    residual = _conformance_cached(S, P)
    if residual > CONFORMANCE_RTOL:
        raise ValueError(
            f"base point does not conform to the side information "
            f"(relative residual {residual:.3e} > {CONFORMANCE_RTOL:.0e})")
    v = project_tangent(P, Z)
    deltas = []
    for q, triv, delta in zip(S.bases, S.trivial, v.deltas):
        if triv:
            deltas.append(delta)
        else:
            reduced = np.einsum("im,aib->amb", q, delta)
            deltas.append(np.einsum("im,amb->aib", q, reduced))
    return TangentVector(P, tuple(deltas))
