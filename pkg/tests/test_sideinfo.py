import numpy as np
import pytest

from rttc.manifold import make_point, project_tangent, retract, tangent_norm, transport
from rttc.rng import DeterministicRng
from rttc.samples import SparseSamples, sample_indices
from rttc.sideinfo import (
    SideInfo,
    apply_Q,
    apply_QT,
    conformance_residual,
    orthonormal_basis,
    project_side,
    project_tangent_si,
)
from rttc.tt import entries, inner, norm, orthogonalize, tt_random
from oracles import (
    ambient_of_tangent,
    arr,
    dense_tangent_projector,
    mode_multiply,
    sparse_to_dense,
)

DIMS = (4, 4, 4)
RANKS = (1, 2, 2, 1)


def side(seed=0, reduced=(2, 3, None)):
    """Side info on DIMS; None marks a trivial (identity) mode."""
    bases = []
    for k, m in enumerate(reduced):
        if m is None:
            bases.append(np.eye(DIMS[k]))
        else:
            bases.append(orthonormal_basis(DIMS[k], m, seed=seed * 10 + k))
    return SideInfo(tuple(bases))


def conforming_point(S, seed):
    return make_point(project_side(S, tt_random(DIMS, RANKS, seed)))


def dense_project_side(S, a):
    for k, q in enumerate(S.bases):
        a = mode_multiply(a, q @ q.T, k)
    return a


# ------------------------------------------------------ orthonormal_basis

def test_orthonormal_basis_square_is_orthogonal():
    q = orthonormal_basis(3, 3, seed=0)
    assert np.max(np.abs(q.T @ q - np.eye(3))) < 1e-12
    assert np.max(np.abs(q @ q.T - np.eye(3))) < 1e-12


def test_orthonormal_basis_single_column():
    q = orthonormal_basis(3, 1, seed=1)
    assert abs(np.linalg.norm(q) - 1.0) < 1e-12


def test_orthonormal_basis_deterministic():
    a = orthonormal_basis(20, 5, seed=7)
    b = orthonormal_basis(20, 5, seed=7)
    c = orthonormal_basis(20, 5, seed=8)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)
    assert np.max(np.abs(a.T @ a - np.eye(5))) < 1e-12


def test_orthonormal_basis_rejects_wide():
    with pytest.raises(ValueError):
        orthonormal_basis(3, 4, seed=0)


def test_sideinfo_validates_orthonormality():
    with pytest.raises(ValueError, match="mode 0"):
        SideInfo((np.ones((3, 2)),))


def test_sideinfo_trivial_detection():
    S = side()
    assert S.trivial == (False, False, True)
    assert S.reduced_dims == (2, 3, 4)
    assert SideInfo.identity((3, 5)).trivial == (True, True)


# ------------------------------------------------------- apply_Q / apply_QT

def test_apply_q_identity_side_is_noop():
    S = SideInfo.identity(DIMS)
    X = tt_random(DIMS, RANKS, seed=1)
    Y = apply_Q(S, X)
    for a, b in zip(X.cores, Y.cores):
        assert np.array_equal(a, b)


def test_apply_q_is_isometry():
    S = side(1)
    Y = tt_random(S.reduced_dims, RANKS, seed=2)
    X = apply_Q(S, Y)
    assert X.dims == DIMS
    assert X.ranks == Y.ranks
    assert norm(X) == pytest.approx(norm(Y), rel=1e-12)
    Y2 = tt_random(S.reduced_dims, RANKS, seed=3)
    assert inner(apply_Q(S, Y), apply_Q(S, Y2)) == pytest.approx(inner(Y, Y2), rel=1e-10)


def test_apply_q_round_trip():
    S = side(2)
    Y = tt_random(S.reduced_dims, RANKS, seed=4)
    back = apply_QT(S, apply_Q(S, Y))
    for a, b in zip(Y.cores, back.cores):
        assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, np.abs(a).max())


def test_apply_q_matches_dense_mode_products():
    S = side(3)
    Y = tt_random(S.reduced_dims, RANKS, seed=5)
    a = arr(Y)
    for k, q in enumerate(S.bases):
        a = mode_multiply(a, q, k)
    assert np.max(np.abs(arr(apply_Q(S, Y)) - a)) < 1e-12 * max(1.0, np.abs(a).max())


def test_apply_q_preserves_orthogonality():
    S = side(4)
    Y = orthogonalize(tt_random(S.reduced_dims, RANKS, seed=6), "left")
    X = apply_Q(S, Y)
    assert X.orth_state == "left"
    for k in range(X.d - 1):
        r0, n, r1 = X.cores[k].shape
        u = X.cores[k].reshape(r0 * n, r1)
        assert np.max(np.abs(u.T @ u - np.eye(r1))) < 1e-12


# ------------------------------------------------------------ project_side

def test_project_side_idempotent():
    S = side(5)
    X = tt_random(DIMS, RANKS, seed=7)
    P1 = project_side(S, X)
    P2 = project_side(S, P1)
    assert P1.ranks == X.ranks
    assert np.max(np.abs(arr(P2) - arr(P1))) < 1e-12 * max(1.0, norm(P1))
    assert norm(P1) <= norm(X) * (1 + 1e-12)


def test_project_side_coordinate_basis():
    # rank-one coordinate bases zero out every fiber except index 0
    bases = tuple(np.eye(n)[:, :1] for n in DIMS)
    S = SideInfo(bases)
    X = tt_random(DIMS, RANKS, seed=8)
    got = arr(project_side(S, X))
    expected = np.zeros(DIMS)
    expected[0, 0, 0] = arr(X)[0, 0, 0]
    assert np.max(np.abs(got - expected)) < 1e-12 * max(1.0, norm(X))


def test_project_side_matches_dense():
    S = side(6)
    X = tt_random(DIMS, RANKS, seed=9)
    expected = dense_project_side(S, arr(X))
    assert np.max(np.abs(arr(project_side(S, X)) - expected)) < 1e-10 * max(1.0, norm(X))


def test_conformance_residual():
    S = side(7)
    X = tt_random(DIMS, RANKS, seed=10)
    assert conformance_residual(S, X) > 0.1  # generic tensor is far from the subspace
    assert conformance_residual(S, project_side(S, X)) < 1e-13
    assert conformance_residual(SideInfo.identity(DIMS), X) == 0.0


# ------------------------------------------------------ project_tangent_si

def test_si_projection_with_trivial_side_equals_plain():
    S = SideInfo.identity(DIMS)
    P = make_point(tt_random(DIMS, RANKS, seed=11))
    idx = sample_indices(DIMS, 20, seed=0)
    Z = SparseSamples(DIMS, idx, DeterministicRng(1).normal(20))
    a = project_tangent(P, Z)
    b = project_tangent_si(S, P, Z)
    for x, y in zip(a.deltas, b.deltas):
        assert np.array_equal(x, y)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_si_projection_matches_dense_composition(seed):
    S = side(seed + 20)
    P = conforming_point(S, seed + 30)
    idx = sample_indices(DIMS, 25, seed=seed + 40)
    vals = DeterministicRng(seed + 50).normal(25)
    Z = SparseSamples(DIMS, idx, vals)
    v = project_tangent_si(S, P, Z)
    z_dense = sparse_to_dense(DIMS, idx, vals)
    composed = dense_project_side(
        S, (dense_tangent_projector(P) @ z_dense.reshape(-1)).reshape(DIMS))
    scale_ref = max(1.0, np.linalg.norm(z_dense))
    assert np.max(np.abs(ambient_of_tangent(v) - composed)) < 1e-9 * scale_ref
    # ambient identity: SI projection = side projection of the plain projection
    plain = project_tangent(P, Z)
    assert np.max(np.abs(ambient_of_tangent(v)
                         - dense_project_side(S, ambient_of_tangent(plain)))) < 1e-9 * scale_ref


def test_si_projection_preserves_gauge():
    S = side(9)
    P = conforming_point(S, 12)
    idx = sample_indices(DIMS, 25, seed=13)
    Z = SparseSamples(DIMS, idx, DeterministicRng(14).normal(25))
    v = project_tangent_si(S, P, Z)
    for k in range(len(v.deltas) - 1):
        core = P.left.cores[k]
        r0, n, r1 = core.shape
        u = core.reshape(r0 * n, r1)
        m = v.deltas[k].reshape(r0 * n, v.deltas[k].shape[2])
        assert np.max(np.abs(u.T @ m)) < 1e-10


def test_si_projection_idempotent_and_self_adjoint_densely():
    S = side(10)
    P = conforming_point(S, 15)
    proj = dense_tangent_projector(P)
    qqt = np.eye(int(np.prod(DIMS)))
    qqt = np.stack([dense_project_side(S, col.reshape(DIMS)).reshape(-1)
                    for col in qqt]).T
    op = qqt @ proj
    assert np.max(np.abs(op @ op - op)) < 1e-9
    assert np.max(np.abs(op - op.T)) < 1e-9


def test_si_projection_refuses_nonconforming_point():
    S = side(11)
    P = make_point(tt_random(DIMS, RANKS, seed=16))
    idx = sample_indices(DIMS, 10, seed=17)
    Z = SparseSamples(DIMS, idx, np.ones(10))
    with pytest.raises(ValueError, match="conform"):
        project_tangent_si(S, P, Z)
    # cache: second call hits the stored residual, still raises
    with pytest.raises(ValueError, match="conform"):
        project_tangent_si(S, P, Z)


def test_retraction_closure():
    S = side(12)
    P = conforming_point(S, 18)
    idx = sample_indices(DIMS, 30, seed=19)
    Z = SparseSamples(DIMS, idx, DeterministicRng(20).normal(30))
    v = project_tangent_si(S, P, Z)
    for step in (0.05, 0.5):
        X_new = retract(P, v, step, P.ranks)
        assert conformance_residual(S, X_new) < 1e-10


def test_transport_closure():
    S = side(13)
    P = conforming_point(S, 21)
    Q = conforming_point(S, 22)
    idx = sample_indices(DIMS, 30, seed=23)
    Z = SparseSamples(DIMS, idx, DeterministicRng(24).normal(30))
    v = project_tangent_si(S, P, Z)
    w = transport(Q, v)
    amb = ambient_of_tangent(w)
    drift = np.linalg.norm(dense_project_side(S, amb) - amb)
    assert drift < 1e-10 * max(1.0, np.linalg.norm(amb))
    assert tangent_norm(w) <= tangent_norm(v) * (1 + 1e-10)


def test_sampled_values_of_si_projection():
    S = side(14)
    P = conforming_point(S, 25)
    idx = sample_indices(DIMS, 20, seed=26)
    Z = SparseSamples(DIMS, idx, DeterministicRng(27).normal(20))
    v = project_tangent_si(S, P, Z)
    from rttc.manifold import sample_tangent, tangent_to_tt
    direct = sample_tangent(v, idx)
    via_tt = entries(tangent_to_tt(v), idx)
    assert np.max(np.abs(direct - via_tt)) < 1e-12 * max(1.0, np.abs(via_tt).max())
