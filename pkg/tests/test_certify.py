import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schmidtnum import states
from schmidtnum.certify import (
    Budget,
    Decomposition,
    SnBound,
    bsn_bounds,
    decomposition_search,
    direct_sum_blocks,
    eof_bound,
    restrict_to_support,
    reverify,
    sn_bounds,
    tensor_product_bounds,
    verify_decomposition,
)
from schmidtnum.errors import InputError, PreconditionError
from schmidtnum.tensor_core import DensityOp, PureState, direct_sum, direct_sum_b, random_separable


def recon_and_ranks(d: Decomposition):
    """Oracle: rebuild the operator and Schmidt ranks with plain numpy."""
    dl, dr = d.dims
    mat = sum(w * np.outer(v.amplitudes, v.amplitudes.conj()) for w, v in d.entries)
    ranks = [np.linalg.matrix_rank(v.amplitudes.reshape(dl, dr), tol=1e-7) for v in d.vectors]
    return mat, ranks


def isotropic_sn(d, p):
    f = p + (1 - p) / d**2
    return max(1, math.ceil(f * d - 1e-12))


def test_snbound_invariant():
    with pytest.raises(AssertionError):
        SnBound(3, 2)
    b = SnBound(2, 2, "ces", "decomposition")
    assert b.exact and str(b) == "[2, 2]"
    assert b.as_dict()["lo"] == 2


def test_pure_states_are_exact():
    b = sn_bounds(states.max_entangled(3))
    assert (b.lo, b.hi) == (3, 3) and b.lo_certificate == "pure-rank"
    b = sn_bounds(states.basis_state((1, 2), (3, 3)).to_density())
    assert (b.lo, b.hi) == (1, 1)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.6, 0.9])
def test_isotropic_family(p):
    b = sn_bounds(states.isotropic(3, p))
    want = isotropic_sn(3, p)
    assert b.lo == b.hi == want
    assert reverify(states.isotropic(3, p), b)


def test_tiles_is_two():
    rho = states.tiles_state()
    b = sn_bounds(rho)
    assert (b.lo, b.hi) == (2, 2)
    assert b.lo_certificate == "ces" and b.hi_certificate == "decomposition"
    mat, ranks = recon_and_ranks(b.decomposition)
    assert np.linalg.norm(mat - rho.matrix) < 1e-10 and max(ranks) <= 2
    assert reverify(rho, b)


@settings(max_examples=8)
@given(st.integers(0, 10_000))
def test_separable_mixtures_certified_separable(seed):
    rho = random_separable((3, 3), 3, np.random.default_rng(seed))
    d = decomposition_search(rho, 1, restarts=16, seed=seed)
    assert d is not None
    mat, ranks = recon_and_ranks(d)
    assert np.linalg.norm(mat - rho.matrix) < 1e-8 and max(ranks) == 1


def test_decomposition_search_input_checks():
    rho = states.tiles_state()
    with pytest.raises(InputError):
        decomposition_search(rho, 4)
    with pytest.raises(InputError):
        decomposition_search(rho, 2, m=2)


def test_verify_decomposition_rejects_forgeries():
    rho = states.tiles_state()
    d = decomposition_search(rho, 2, seed=0)
    assert verify_decomposition(rho, d)
    assert not verify_decomposition(rho, d, k=1)
    bad = Decomposition(d.weights * 1.01, d.vectors, 2, 0.0)
    assert not verify_decomposition(rho, bad)


def test_blocks_and_support():
    t = states.tiles_state()
    s = direct_sum(t, DensityOp(np.eye(4) / 4, (2, 2)))
    blocks = direct_sum_blocks(s)
    assert sorted(b.dims for b in blocks) == [(1, 1), (1, 1), (1, 1), (1, 1), (3, 3)]
    b = sn_bounds(s)
    assert (b.lo, b.hi) == (2, 2) and b.lo_certificate == "blocks"
    sub, a_idx, b_idx = restrict_to_support(states.proj_example())
    assert sub.dims == (3, 4) and list(a_idx) == [0, 1, 2]
    padded = direct_sum_b(states.max_entangled(2).to_density(), DensityOp(np.zeros((4, 4)) + np.diag([1, 0, 0, 0]), (2, 2)))
    assert sn_bounds(padded).hi == 2


def test_nonconvex_examples():
    a = sn_bounds(states.nonconvex_alpha())
    assert (a.lo, a.hi) == (2, 2)
    # the mixture is separable: its support splits into product blocks
    m = sn_bounds(states.nonconvex_mix())
    assert (m.lo, m.hi) == (1, 1)


def test_problems_rho_interval():
    b = sn_bounds(states.problems_rho())
    assert (b.lo, b.hi) == (2, 3)


def test_werner_and_antisym():
    assert (sn_bounds(states.werner(3, -1.0)).lo, sn_bounds(states.werner(3, -1.0)).hi) == (2, 2)
    b = sn_bounds(states.antisym3())
    assert b.lo == b.hi == 2


def test_multipartite_cut():
    from schmidtnum.tensor_core import Bipartition

    g = states.ghz(2, 3).to_density()
    b = sn_bounds(g, Bipartition.of(3, [0, 1]))
    assert (b.lo, b.hi) == (2, 2)


def test_bsn():
    b = bsn_bounds(states.tiles_state(), members=states.tiles_members())
    assert b.consistent
    assert (b.sn_rho.lo, b.sn_rho.hi) == (2, 2) == (b.sn_gamma.lo, b.sn_gamma.hi)
    with pytest.raises(PreconditionError):
        bsn_bounds(states.max_entangled(2).to_density())


def test_tensor_product_bounds_rules():
    a = SnBound(2, 2, "ces", "decomposition")
    out = tensor_product_bounds([a, a], local_rank_hi=9, all_ces=True)
    assert (out.lo, out.hi) == (3, 4)
    out = tensor_product_bounds([a, SnBound(1, 3)], local_rank_hi=4)
    assert (out.lo, out.hi) == (2, 4)


def test_eof_bound():
    assert eof_bound(SnBound(1, 4)) == 2.0
    assert eof_bound(SnBound(1, 1)) == 0.0


def test_budget_is_deterministic():
    rho = states.nonconvex_alpha()
    b1 = sn_bounds(rho, budget=Budget(seed=3))
    b2 = sn_bounds(rho, budget=Budget(seed=3))
    assert np.array_equal(b1.decomposition.weights, b2.decomposition.weights)


def test_pure_state_input_is_density_equivalent():
    psi = PureState(np.array([1, 0, 0, 0, 1, 0, 0, 0, 1.0]), (3, 3))
    assert sn_bounds(psi).hi == sn_bounds(psi.to_density()).hi == 3
