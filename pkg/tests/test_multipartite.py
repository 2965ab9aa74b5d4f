import numpy as np
import pytest
from hypothesis import given, strategies as st

from schmidtnum import states
from schmidtnum.certify import Budget, sn_bounds
from schmidtnum.errors import InputError, PreconditionError
from schmidtnum.multipartite import (
    JsnTuple,
    bipartitions,
    coarse_grain,
    cp_fit,
    expansion_chain_check,
    expansion_from_decomposition,
    hyperdeterminant,
    jsn,
    multipartite_ppt_check,
    product_ces_lower_bound,
    purify,
    tensor_rank_bounds,
)
from schmidtnum.ces import ces_certificate
from schmidtnum.tensor_core import PureState, partial_trace, random_pure


def psi_224():
    v = np.zeros((2, 2, 4))
    v[0, 0, 0] = v[0, 1, 1] = v[1, 0, 2] = v[1, 1, 3] = 1
    return PureState(v.ravel(), (2, 2, 4))


def flattening_ranks(t):
    """Oracle: matrix_rank of each mode unfolding."""
    return tuple(np.linalg.matrix_rank(np.moveaxis(t, p, 0).reshape(t.shape[p], -1), tol=1e-9)
                 for p in range(t.ndim))


def test_jsn_reference():
    assert jsn(psi_224()).ranks == (2, 2, 4)
    assert jsn(states.ghz(3, 3)).ranks == (3, 3, 3)
    v = np.zeros((2, 2, 2))
    v[0, 0, 0] = v[1, 1, 0] = 1
    assert jsn(PureState(v.ravel(), (2, 2, 2))).ranks == (2, 2, 1)


@given(st.integers(0, 10_000))
def test_jsn_matches_unfolding_oracle(seed):
    rng = np.random.default_rng(seed)
    dims = tuple(int(d) for d in rng.integers(1, 4, size=3))
    psi = random_pure(dims, rng)
    assert jsn(psi).ranks == flattening_ranks(psi.tensor())


def test_jsn_order_and_product_bound():
    assert JsnTuple((2, 2, 1)) <= JsnTuple((2, 2, 4))
    assert not JsnTuple((3, 1, 1)) <= JsnTuple((2, 2, 4))
    assert JsnTuple((2, 2, 4)).product_bound() == 4
    with pytest.raises(InputError):
        JsnTuple((1, 1)) <= JsnTuple((1, 1, 1))


def test_hyperdeterminant_values():
    ghz = states.ghz(2, 3).tensor()
    assert hyperdeterminant(ghz) == pytest.approx(0.25)
    assert abs(hyperdeterminant(states.w_state(3).tensor())) < 1e-15
    prod = np.einsum("i,j,k->ijk", [1, 2], [3, 1], [1, 1])
    assert hyperdeterminant(prod) == 0


def test_tensor_rank_reference():
    b = tensor_rank_bounds(psi_224())
    assert (b.lo, b.hi) == (4, 4)
    for n in (3, 4):
        b = tensor_rank_bounds(states.ghz(2, n))
        assert (b.lo, b.hi) == (2, 2)
    w = tensor_rank_bounds(states.w_state(3))
    assert (w.lo, w.hi) == (3, 3) and w.lo_source == "hyperdeterminant"


def test_w_border_rank_guard():
    # a rank-2 fit gets close but never certifies
    d, best = cp_fit(states.w_state(3), 2, restarts=6)
    assert d is None and best > 1e-8


def test_cp_fit_reconstructs_ghz():
    d, res = cp_fit(states.ghz(2, 3), 2)
    assert d is not None and res < 1e-8
    assert np.allclose(d.reconstruct(), states.ghz(2, 3).amplitudes, atol=1e-7)


def test_coarse_grain():
    cg = coarse_grain(states.ghz(2, 3), [[0], [1, 2]])
    assert cg.dims == (2, 4)
    assert set(np.flatnonzero(np.abs(cg.amplitudes) > 1e-12)) == {0, 7}
    with pytest.raises(InputError):
        coarse_grain(states.ghz(2, 3), [[0], [1]])
    rho = coarse_grain(states.tiles_state(), [[1], [0]])
    assert rho.dims == (3, 3)


def test_purify_marginal(rng):
    rho = states.tiles_state()
    p = purify(rho)
    assert p.dims == (3, 3, 4)
    assert np.allclose(partial_trace(p, [0, 1]).matrix, rho.matrix)


def test_expansion_from_decomposition():
    b = sn_bounds(states.nonconvex_alpha())
    e = expansion_from_decomposition(b.decomposition)
    assert np.allclose(partial_trace(e, [0, 1]).matrix, states.nonconvex_alpha().matrix)


def test_chain_bell_and_vi():
    bell = expansion_chain_check(states.max_entangled(2))
    assert bell.ok and bell.equalities == ("holds", "holds", "holds")
    vi = expansion_chain_check(states.expansion_vi())
    assert all(vi.inequalities_ok)
    assert vi.members["max_rank"] == (4, 4) and vi.members["sn"] == (2, 2)
    assert vi.equalities[2] == "fails"


def test_chain_separable_diag():
    rep = expansion_chain_check(states.sep_diag(3))
    assert rep.ok and rep.iv_consistent is True


def test_product_ces_bound():
    t = states.tiles_state()
    cert = ces_certificate(t.matrix, (3, 3), states.tiles_members())
    assert product_ces_lower_bound([t, t], [cert, cert]) == 3
    with pytest.raises(PreconditionError):
        product_ces_lower_bound([t, t], [cert, None])


def test_bipartitions_count():
    for n in (2, 3, 4):
        assert len(bipartitions(n)) == 2 ** (n - 1) - 1


def test_multipartite_ppt():
    _, all_ppt = multipartite_ppt_check(states.shifts3_state())
    assert all_ppt
    _, all_ppt = multipartite_ppt_check(states.ghz(2, 3))
    assert not all_ppt


def test_budget_changes_nothing_for_exact_cases():
    assert tensor_rank_bounds(psi_224(), Budget(seed=5)).hi == 4
