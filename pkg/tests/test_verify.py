import math

import numpy as np
import pytest

from schmidtnum import states, verify
from schmidtnum.errors import InputError
from schmidtnum.projections import LocalProjector
from schmidtnum.tensor_core import random_mixed
from schmidtnum.witness import pairing, reduction_choi


def test_quantum_classical_matches_loop(rng):
    parts = [random_mixed((2, 2), 2, rng), random_mixed((2, 2), 3, rng)]
    w = [0.3, 0.7]
    got = verify.quantum_classical(parts, w)
    assert got.dims == (2, 4)
    want = np.zeros((8, 8), dtype=complex)
    for i, (wi, r) in enumerate(zip(w, parts)):
        proj = np.zeros((2, 2))
        proj[i, i] = 1
        # A (x) B (x) C ordering is already A : (B C)
        want += wi * np.kron(r.matrix / r.trace, proj)
    assert np.allclose(got.matrix, want, atol=1e-12)


def test_bisect_margin_matches_linear_root(rng):
    # the pairing is linear, so the root is -pairing(rho) / pairing(sigma)
    c = reduction_choi(2)
    bell = states.max_entangled(2).to_density()
    sigma = states.maximally_mixed((2, 2))
    root = -pairing(bell, c) / pairing(sigma, c)
    assert abs(verify.bisect_margin(bell, sigma, c) - root) < 1e-10
    assert abs(root - 2.0) < 1e-12


def test_bisect_margin_infinite_when_sigma_does_not_help():
    c = reduction_choi(2)
    bell = states.max_entangled(2).to_density()
    assert math.isinf(verify.bisect_margin(bell, bell, c))


def test_partial_transpose_commutes_with_projection_on_a(rng):
    rho = random_mixed((3, 3), 4, rng)
    p = LocalProjector.haar(3, 1, rng)
    assert verify.partial_transpose_commutes(rho, p) < 1e-12


def test_stability_triples_are_violating_and_deterministic():
    a = verify.stability_triples(3, 6)
    b = verify.stability_triples(3, 6)
    assert len(a) == 6
    for (r1, s1, c), (r2, s2, _) in zip(a, b):
        assert pairing(r1, c) < 0
        assert np.array_equal(r1.matrix, r2.matrix) and np.array_equal(s1.matrix, s2.matrix)


def test_corpora_sizes():
    assert len(verify.chain_corpus(0)) >= 20
    assert len(verify.mixed_corpus()) == 9
    assert verify.paper_224().dims == (2, 2, 4)


@pytest.mark.parametrize("name", ["dsum", "th00", "sn-stb", "tensorof2", "snrho-n", "rank4", "sym-sweep",
                                  "jsn-sandwich"])
def test_quick_suites_pass(name):
    (res,) = verify.run_suite(name, seed=0)
    assert res.suite == name
    failed = [c.name for c in res.checks if not c.passed and not c.informational]
    assert not failed


def test_small_proj_bounds_passes():
    res = verify.suite_proj_bounds(seed=1, n_pure=10)
    assert res.passed


def test_check_serializes_informational_flag():
    c = verify.Check("x", False, {"a": 1}, informational=True)
    r = verify.SuiteResult("s", [c])
    assert r.passed
    assert r.as_dict()["checks"][0]["informational"] is True


def test_unknown_suite_rejected():
    with pytest.raises(InputError):
        verify.run_suite("nope")
