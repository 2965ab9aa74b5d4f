import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from schmidtnum.errors import CapacityError, InputError
from schmidtnum.tensor_core import (
    Bipartition,
    DensityOp,
    Operator,
    PureState,
    as_bipartite,
    direct_sum,
    direct_sum_b,
    ket,
    local_ranks,
    numerical_rank,
    overlap,
    partial_trace,
    partial_transpose_matrix,
    permute_systems,
    random_mixed,
    random_pure,
    random_separable,
    random_unitary,
    schmidt_decompose,
    schmidt_rank,
    spectral,
    tensor_product,
)

dims2 = st.tuples(st.integers(1, 4), st.integers(1, 4))
seeds = st.integers(0, 2**31 - 1)


def pt_loops(mat, da, db):
    """Oracle: transpose the A indices with explicit loops."""
    out = np.empty_like(mat)
    for a, b, a2, b2 in itertools.product(range(da), range(db), range(da), range(db)):
        out[a * db + b, a2 * db + b2] = mat[a2 * db + b, a * db + b2]
    return out


def ptrace_loops(mat, da, db, keep):
    if keep == 0:
        return sum(mat[np.ix_([a * db + j for a in range(da)], [a * db + j for a in range(da)])] for j in range(db))
    return sum(mat[np.ix_([i * db + b for b in range(db)], [i * db + b for b in range(db)])] for i in range(da))


def test_ket_layout():
    v = ket((1, 2), (2, 3))
    assert v[1 * 3 + 2] == 1 and v.sum() == 1


def test_bipartition_validation():
    assert Bipartition.of(3, [0]).right == frozenset({1, 2})
    with pytest.raises(InputError):
        Bipartition(frozenset(), frozenset({0}))
    with pytest.raises(InputError):
        Bipartition(frozenset({0}), frozenset({2}))


def test_pure_state_checks():
    with pytest.raises(InputError):
        PureState(np.ones(5), (2, 2))
    psi = PureState(np.ones(4), (2, 2))
    assert not psi.normalized
    assert psi.normalize().normalized
    with pytest.raises(InputError):
        PureState(np.zeros(4), (2, 2)).normalize()
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 3


def test_operator_checks():
    with pytest.raises(InputError):
        Operator(np.array([[0, 1], [0, 0]]), (2,))
    with pytest.raises(InputError):
        DensityOp(np.diag([1.0, -0.5]), (2,))
    with pytest.raises(InputError):
        DensityOp(np.zeros((2, 2)), (2,))
    with pytest.raises(InputError):
        DensityOp(np.diag([1.0, np.nan]), (2,))
    with pytest.raises(InputError):
        DensityOp(np.eye(3), (2, 2))
    r = DensityOp(np.diag([2.0, 1, 1, 0]), (2, 2))
    assert r.trace == 4 and abs(r.normalize().trace - 1) < 1e-15


@given(dims2, seeds)
def test_partial_transpose_matches_loops(d, seed):
    rng = np.random.default_rng(seed)
    rho = random_mixed(d, 2, rng)
    got = partial_transpose_matrix(rho.matrix, d, [0])
    assert np.allclose(got, pt_loops(rho.matrix, *d), atol=1e-14)
    # transposing B is the full transpose of transposing A
    assert np.allclose(partial_transpose_matrix(rho.matrix, d, [1]), got.T, atol=1e-14)


@given(dims2, seeds)
def test_partial_trace_matches_loops(d, seed):
    rho = random_mixed(d, 3, np.random.default_rng(seed))
    assert np.allclose(partial_trace(rho, [0]).matrix, ptrace_loops(rho.matrix, *d, keep=0))
    assert np.allclose(partial_trace(rho, [1]).matrix, ptrace_loops(rho.matrix, *d, keep=1))


def test_partial_trace_product(rng):
    a, b, c = (random_mixed((d,), d, rng) for d in (2, 3, 2))
    abc = tensor_product(tensor_product(a, b), c)
    assert np.allclose(partial_trace(abc, [0, 2]).matrix, np.kron(a.matrix, c.matrix))
    assert np.allclose(partial_trace(abc, [1]).matrix, b.matrix)


def test_permute_systems_roundtrip(rng):
    psi = random_pure((2, 3, 4), rng)
    perm = (2, 0, 1)
    back = permute_systems(permute_systems(psi, perm), np.argsort(perm))
    assert np.allclose(back.amplitudes, psi.amplitudes)
    rho = psi.to_density()
    moved = permute_systems(rho, perm)
    assert np.allclose(moved.matrix, permute_systems(psi, perm).to_density().matrix)
    with pytest.raises(InputError):
        permute_systems(psi, (0, 0, 1))


@given(st.integers(1, 4), st.integers(1, 4), seeds)
def test_schmidt_rank_matches_matrix_rank(m, n, seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, min(m, n) + 1))
    a = rng.normal(size=(m, r)) + 1j * rng.normal(size=(m, r))
    b = rng.normal(size=(r, n)) + 1j * rng.normal(size=(r, n))
    v = (a @ b).ravel()
    assert schmidt_rank(v, m, n) == np.linalg.matrix_rank(a @ b) == r


def test_schmidt_decompose_reconstructs(rng):
    psi = random_pure((3, 4), rng)
    sd = schmidt_decompose(psi)
    assert sd.rank == 3
    assert np.allclose(sd.reconstruct(), psi.amplitudes)
    assert np.allclose(np.sort(sd.coefficients ** 2)[::-1], spectral(partial_trace(psi, [0]))[0])


def test_schmidt_decompose_cut():
    v = np.zeros((2, 2, 2))
    v[0, 0, 0] = v[1, 0, 1] = 1
    psi = PureState(v.ravel(), (2, 2, 2))
    assert schmidt_decompose(psi, Bipartition.of(3, [1])).rank == 1
    assert schmidt_decompose(psi, Bipartition.of(3, [0])).rank == 2


def test_as_bipartite_order():
    v = np.zeros((2, 3, 2))
    v[1, 2, 0] = 1
    psi = PureState(v.ravel(), (2, 3, 2))
    b = as_bipartite(psi, Bipartition.of(3, [0, 2]))
    assert b.dims == (4, 3)
    # left index (a, c) = (1, 0) -> 2; right index b = 2
    assert b.amplitudes[2 * 3 + 2] == 1


def test_direct_sums():
    a = DensityOp(np.eye(4) / 4, (2, 2))
    b = DensityOp(np.eye(6) / 6, (2, 3))
    s = direct_sum_b(a, b)
    assert s.dims == (2, 5) and abs(s.trace - 2) < 1e-12
    t = direct_sum(a, b)
    assert t.dims == (4, 5)
    with pytest.raises(InputError):
        direct_sum_b(a, DensityOp(np.eye(6) / 6, (3, 2)))


def test_numerical_rank_relative():
    assert numerical_rank(np.diag([1e6, 1e-2, 1e-6])) == 2
    assert numerical_rank(np.zeros((3, 3))) == 0


def test_local_ranks_pure_and_mixed(rng):
    psi = random_pure((2, 3), rng)
    assert local_ranks(psi) == (2, 2)
    rho = random_mixed((2, 3), 6, rng)
    assert local_ranks(rho) == (2, 3)


def test_overlap_and_spectral(rng):
    rho = random_mixed((2, 2), 2, rng)
    w, v = spectral(rho)
    assert len(w) == 2 and w[0] >= w[1]
    top = PureState(v[:, 0], (2, 2))
    assert abs(overlap(top, rho) - w[0]) < 1e-12


def test_random_unitary_is_unitary(rng):
    u = random_unitary(5, rng)
    assert np.allclose(u @ u.conj().T, np.eye(5))


def test_random_separable_is_ppt(rng):
    rho = random_separable((3, 3), 4, rng)
    assert np.linalg.eigvalsh(partial_transpose_matrix(rho.matrix, (3, 3), [0]))[0] > -1e-12


def test_capacity():
    big = PureState(np.ones(64), (8, 8))
    with pytest.raises(CapacityError):
        tensor_product(big, big, max_dim=1000)
