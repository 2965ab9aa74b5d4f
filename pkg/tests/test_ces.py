import numpy as np
import pytest

from schmidtnum import ces, states
from schmidtnum.tensor_core import random_mixed


def kron_all(vs):
    out = np.ones(1)
    for v in vs:
        out = np.kron(out, v)
    return out


def test_range_kernel_splits_space():
    rho = states.tiles_state()
    rng_b, ker = ces.range_kernel(rho.matrix)
    assert rng_b.shape[1] == 4 and ker.shape[1] == 5
    assert np.allclose(rng_b.conj().T @ ker, 0)


def test_tiles_members_unextendible():
    ok, part = ces.unextendible(states.tiles_members(), (3, 3))
    assert ok and part is None


def test_subset_of_tiles_is_extendible():
    ok, part = ces.unextendible(states.tiles_members()[:4], (3, 3))
    assert not ok
    # the returned partition leaves room for a product vector orthogonal to all members
    prod = ces.orthogonal_product(states.tiles_members()[:4], (3, 3), part)
    assert np.linalg.norm(prod) == pytest.approx(1)
    for m in states.tiles_members()[:4]:
        assert abs(np.vdot(kron_all(m), prod)) < 1e-10


def test_orthogonal_product_complex_members(rng):
    members = []
    for _ in range(3):
        members.append(tuple(rng.normal(size=d) + 1j * rng.normal(size=d) for d in (3, 3)))
    ok, part = ces.unextendible(members, (3, 3))
    assert not ok
    prod = ces.orthogonal_product(members, (3, 3), part)
    for m in members:
        assert abs(np.vdot(kron_all(m), prod)) < 1e-10


def test_shifts_unextendible_only_as_three_parties():
    members = states.shifts_members()
    assert ces.unextendible(members, (2, 2, 2))[0]
    grouped = ces.group_members(members, [[0], [1, 2]])
    assert not ces.unextendible(grouped, (2, 4))[0]


def test_tiles_range_search_finds_nothing():
    basis, _ = ces.range_kernel(states.tiles_state().matrix)
    res = ces.min_schmidt_in_range(basis, 3, 3, 1, restarts=200, seed=0)
    assert not res.found and res.value > 1e-3


def test_range_search_finds_product_in_separable_range():
    basis, _ = ces.range_kernel(states.sep_diag(3).matrix)
    res = ces.min_schmidt_in_range(basis, 3, 3, 1, restarts=20, seed=0)
    assert res.found
    assert np.linalg.matrix_rank(res.vector.reshape(3, 3), tol=1e-6) == 1


def test_problems_range_has_rank_two_vector():
    rho = states.problems_rho()
    basis, _ = ces.range_kernel(rho.matrix)
    assert ces.min_schmidt_in_range(basis, 7, 7, 2, restarts=50, seed=0).found
    assert not ces.min_schmidt_in_range(basis, 7, 7, 1, restarts=50, seed=0).found


def test_certificate_from_members_and_from_search():
    rho = states.tiles_state()
    c1 = ces.ces_certificate(rho.matrix, (3, 3), states.tiles_members())
    assert c1 is not None and ces.verify_ces_certificate(rho.matrix, c1)
    c2 = ces.ces_certificate(rho.matrix, (3, 3), seed=3)
    assert c2 is not None and c2.source == "search"
    assert ces.verify_ces_certificate(rho.matrix, c2)


def test_certificate_refuses_generic_state(rng):
    rho = random_mixed((3, 3), 4, rng)
    # a generic rank-4 range in 3x3 meets the product variety, so the kernel cannot be spanned
    assert ces.ces_certificate(rho.matrix, (3, 3), restarts=16) is None


def test_gamma_side_certificate():
    from schmidtnum.ppt import gamma

    rho = states.tiles_state()
    g = gamma(rho).matrix
    members = ces.conj_party(states.tiles_members(), 0)
    cert = ces.ces_certificate(g, (3, 3), members)
    assert cert is not None and ces.verify_ces_certificate(g, cert)


def test_product_vectors_in_kernel():
    _, ker = ces.range_kernel(states.tiles_state().matrix)
    found = ces.product_vectors_in(ker, (3, 3), restarts=64, seed=0)
    assert len(found) >= 5
    for vs in found:
        v = kron_all(vs)
        assert np.linalg.norm(ker @ (ker.conj().T @ v) - v) < 1e-8


@pytest.mark.parametrize("bad", [0, 1])
def test_verify_rejects_tampered_certificate(bad):
    rho = states.tiles_state()
    cert = ces.ces_certificate(rho.matrix, (3, 3), states.tiles_members())
    members = list(cert.members)
    if bad == 0:
        members = members[:-1]
    else:
        members[0] = (np.eye(3)[0], np.eye(3)[0])
    forged = ces.CesCertificate(tuple(members), cert.dims, cert.kernel_dim, "forged")
    assert not ces.verify_ces_certificate(rho.matrix, forged)
