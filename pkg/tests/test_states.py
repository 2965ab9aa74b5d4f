import numpy as np
import pytest

from schmidtnum import states
from schmidtnum.errors import InputError, RegistryError
from schmidtnum.tensor_core import PureState, hermitian_rank, partial_transpose_matrix, tensor_product


def min_pt_eig(rho):
    return np.linalg.eigvalsh(partial_transpose_matrix(rho.matrix, rho.dims, [1]))[0]


def test_max_entangled_and_ghz():
    phi = states.max_entangled(3)
    assert phi.normalized and phi.amplitudes[4] == pytest.approx(1 / np.sqrt(3))
    g = states.ghz(2, 4)
    assert g.dims == (2, 2, 2, 2) and abs(g.amplitudes[-1]) == pytest.approx(1 / np.sqrt(2))


def test_w_state_support():
    w = states.w_state(3)
    assert set(np.flatnonzero(w.amplitudes)) == {1, 2, 4}


@pytest.mark.parametrize("p", [0.0, 0.2, 0.25, 0.6, 1.0])
def test_isotropic_pt_spectrum(p):
    # PT of Phi_d is SWAP/d, whose smallest eigenvalue is -1/d
    d = 3
    rho = states.isotropic(d, p)
    assert rho.trace == pytest.approx(1)
    assert min_pt_eig(rho) == pytest.approx((1 - p) / d**2 - p / d)


def test_werner_antisymmetric_matches_antisym3():
    w = states.werner(3, -1.0)
    a = states.antisym3()
    assert np.allclose(w.matrix, a.matrix / a.trace)
    assert hermitian_rank(w.matrix) == 3
    with pytest.raises(InputError):
        states.werner(3, 2.0)


def test_tiles_state_properties():
    upb = states.tiles_upb()
    rho = upb.state
    assert rho.trace == pytest.approx(1)
    assert hermitian_rank(rho.matrix) == 4
    for a, b in upb.members:
        v = np.kron(a, b)
        assert abs(np.vdot(v, rho.matrix @ v)) < 1e-14
    # members are pairwise orthogonal
    vecs = [np.kron(a, b) for a, b in upb.members]
    g = np.array([[np.vdot(x, y) for y in vecs] for x in vecs])
    assert np.allclose(g, np.eye(5))
    assert min_pt_eig(rho) > -1e-12


def test_shifts_state_properties():
    rho = states.shifts3_state()
    assert rho.dims == (2, 2, 2)
    assert hermitian_rank(rho.matrix) == 4


def test_problems_rho_blocks():
    rho = states.problems_rho()
    assert rho.dims == (7, 7) and hermitian_rank(rho.matrix) == 3
    p = states.problems_projector()
    assert np.allclose(p @ p, p) and np.trace(p) == 3


def test_expansion_vi_shape():
    rho = states.expansion_vi()
    assert rho.dims == (4, 4) and hermitian_rank(rho.matrix) == 2


def test_regroup_matches_manual():
    a = states.max_entangled(2)
    b = states.basis_state((0, 1), (2, 2))
    r = states.regroup(tensor_product(a, b))
    # |Phi>_{A1B1} |01>_{A2B2} -> amplitudes over (a1 a2, b1 b2)
    m = r.amplitudes.reshape(4, 4)
    assert m[0 * 2 + 0, 0 * 2 + 1] == pytest.approx(1 / np.sqrt(2))
    assert m[1 * 2 + 0, 1 * 2 + 1] == pytest.approx(1 / np.sqrt(2))
    assert np.count_nonzero(np.abs(m) > 1e-15) == 2


def test_tensor_power_regrouped_schmidt_rank():
    two = states.tensor_power_regrouped(states.max_entangled(2), 2)
    assert isinstance(two, PureState) and two.dims == (4, 4)
    assert np.linalg.matrix_rank(two.amplitudes.reshape(4, 4)) == 4


def test_registry():
    names = states.registry_names()
    assert "tiles_state" in names and names == sorted(names)
    assert states.construct("isotropic", d=2, p=0.3).dims == (2, 2)
    with pytest.raises(RegistryError):
        states.construct("nope")
    with pytest.raises(InputError):
        states.construct("isotropic", q=1)
    r1 = states.construct("random_mixed", dims=[2, 3], seed=5, rank=2)
    r2 = states.construct("random_mixed", dims=[2, 3], seed=5, rank=2)
    assert np.array_equal(r1.matrix, r2.matrix)
    assert states.upb_members("tiles_state") is not None and states.upb_members("bell") is None


def test_every_registry_entry_builds():
    for name in states.registry_names():
        s = states.construct(name)
        assert s.dims
