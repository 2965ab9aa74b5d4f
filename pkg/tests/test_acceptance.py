"""Acceptance criteria, each at its stated tolerance and time budget.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists one
PASS/FAIL line per criterion.
"""

import time

import numpy as np

from schmidtnum import ces, states, verify
from schmidtnum.certify import Budget, decomposition_search, restrict_to_support, sn_bounds
from schmidtnum.cli import run_command
from schmidtnum.multipartite import jsn, tensor_rank_bounds
from schmidtnum.ppt import birank, ppt_check
from schmidtnum.projections import LocalProjector, apply_local
from schmidtnum.tensor_core import PureState


def _checks(result):
    return {c.name: c for c in result.checks}


def test_criterion_01_tiles_certification(criterion):
    t0 = time.perf_counter()
    rho = states.tiles_state()
    v = ppt_check(rho)
    br = birank(rho)
    cert = ces.ces_certificate(rho.matrix, (3, 3), states.tiles_members())
    algebraic = cert is not None and ces.verify_ces_certificate(rho.matrix, cert)
    basis, _ = ces.range_kernel(rho.matrix)
    search = ces.min_schmidt_in_range(basis, 3, 3, 1, restarts=200, seed=0)
    d = decomposition_search(rho, 2, seed=0)
    resid = np.linalg.norm(d.reconstruct() - rho.matrix) if d is not None else np.inf
    b = sn_bounds(rho, members=states.tiles_members())
    dt = time.perf_counter() - t0
    criterion("1 Tiles certification", f"min_eig={v.min_eig_gamma:.2e} birank=({br.rank_rho},{br.rank_gamma}) "
              f"resid={resid:.1e} bound={b} t={dt:.1f}s")
    assert v.min_eig_gamma >= -1e-9
    assert (br.rank_rho, br.rank_gamma) == (4, 4)
    assert algebraic and not search.found
    assert d is not None and resid < 1e-10
    assert (b.lo, b.hi) == (2, 2)
    assert dt < 10


def test_criterion_02_projection_bounds(criterion):
    t0 = time.perf_counter()
    res = verify.suite_proj_bounds(seed=0, n_pure=300)
    dt = time.perf_counter() - t0
    c = _checks(res)
    pure = c["pure projections keep Schmidt rank M-k"]
    mixed = c["mixed corpus satisfies the projection sandwich"]
    criterion("2 Projection bounds", f"pure={pure.detail['projections']} violations={len(pure.detail['violations'])} "
              f"mixed reports={mixed.detail['reports']} violations={len(mixed.detail['violations'])} t={dt:.1f}s")
    assert pure.detail["states"] == 300 and pure.passed
    assert mixed.passed
    assert dt < 30


def test_criterion_03_th00_witness(criterion):
    t0 = time.perf_counter()
    res = verify.suite_th00(seed=0)
    dt = time.perf_counter() - t0
    c = _checks(res)
    iso = c["isotropic(3, 0.9) overlap reaches p+(1-p)/d^2"]
    criterion("3 th00 witness", f"iso overlap={iso.detail['value']:.7f} bound={iso.detail['sn_lower']} t={dt:.1f}s")
    assert iso.detail["value"] >= 0.9 + 0.1 / 9 - 1e-6 and iso.detail["sn_lower"] == 3
    assert c["maximally entangled states give overlap 1 and bound M"].passed
    assert c["maximally mixed 3x3 gives bound 1"].passed
    assert res.passed
    assert dt < 20


def test_criterion_04_jsn_tensor_rank(criterion):
    t0 = time.perf_counter()
    psi = verify.paper_224()
    j = jsn(psi)
    b = tensor_rank_bounds(psi)
    ghz = [tensor_rank_bounds(states.ghz(2, n)) for n in (3, 4)]
    w = tensor_rank_bounds(states.w_state(3))
    dt = time.perf_counter() - t0
    criterion("4 JSN and tensor rank", f"jsn={j.ranks} TR={b} ghz={[str(g) for g in ghz]} W={w} "
              f"(r=2 rejected by {w.lo_source}) t={dt:.1f}s")
    assert j.ranks == (2, 2, 4) and (b.lo, b.hi) == (4, 4)
    assert all((g.lo, g.hi) == (2, 2) for g in ghz)
    assert (w.lo, w.hi) == (3, 3)
    assert dt < 30


def test_criterion_05_problems_counterexample(criterion):
    t0 = time.perf_counter()
    rho = states.problems_rho()
    p = states.problems_projector()
    blocks_sep = []
    for proj in (p, np.eye(7) - p):
        blk = apply_local(rho, LocalProjector(proj), "A")
        sub, _, _ = restrict_to_support(blk)
        d = decomposition_search(sub, 1, seed=0)
        blocks_sep.append(d is not None and d.max_schmidt_rank() == 1)
    sub, _, _ = restrict_to_support(rho)
    k2 = decomposition_search(sub, 2, restarts=64, seed=0)
    k3 = decomposition_search(sub, 3, restarts=64, seed=0)
    b = sn_bounds(rho)
    dt = time.perf_counter() - t0
    criterion("5 Problems counterexample", f"blocks separable={blocks_sep} k2 found={k2 is not None} "
              f"k3 found={k3 is not None} bound={b} claimed exact=3 t={dt:.1f}s")
    assert all(blocks_sep)
    assert k2 is None and k3 is not None
    assert (b.lo, b.hi) == (2, 3)
    assert dt < 60


def test_criterion_06_expansion_chain(criterion):
    t0 = time.perf_counter()
    res = verify.suite_expansion_chain(seed=0)
    dt = time.perf_counter() - t0
    c = _checks(res)
    chain = c["expansion chain holds on the corpus"]
    vi = c["expansion_vi: last inequality of the chain is an equality"]
    names = [r[0] for r in chain.detail["reports"]]
    m = vi.detail["members"]
    criterion("6 Expansion chain", f"corpus={len(names)} failures={chain.detail['failures']} "
              f"vi: max_rank={m['max_rank']} sn={m['sn']} last equality {vi.detail['equalities'][2]} t={dt:.1f}s")
    assert {"bell", "expansion_vi", "sep_diag_3", "tiles_state"} <= set(names)
    assert chain.passed and len(names) >= 20
    assert dt < 30
    # tightness claim on expansion_vi: max{rank, rA, rB} = sn
    assert vi.passed


def test_criterion_07_tiles_pair_deep(criterion):
    t0 = time.perf_counter()
    res = verify.deep_tiles_pair(seed=0, budget=Budget(seed=0))
    dt = time.perf_counter() - t0
    c = _checks(res)
    iv = c["two Tiles copies: sound interval [3, 4]"].detail
    criterion("7 Two Tiles copies (deep)", f"ppt={c['two Tiles copies regrouped are PPT'].passed} "
              f"rank={c['two Tiles copies have rank 16'].detail['rank']} interval=[{iv['lo']}, {iv['hi']}] "
              f"claimed exact={iv['claimed_exact']} t={dt:.1f}s")
    assert res.passed
    assert dt < 600


def test_criterion_08_perturbation_stability(criterion):
    t0 = time.perf_counter()
    res = verify.suite_sn_stb(seed=0, count=50)
    dt = time.perf_counter() - t0
    c = _checks(res)["perturbation margin matches bisection"]
    criterion("8 Perturbation stability", f"triples={c.detail['triples']} max_rel_error={c.detail['max_rel_error']:.1e} "
              f"t={dt:.1f}s")
    assert c.detail["triples"] == 50 and c.detail["max_rel_error"] <= 1e-10
    assert dt < 10


def test_criterion_09_rank4_harness(criterion):
    t0 = time.perf_counter()
    res = verify.suite_rank4(seed=0)
    dt = time.perf_counter() - t0
    c = _checks(res)
    cuts = c["Shifts bipartite Schmidt number at most 2 across every cut"].detail
    criterion("9 Multipartite PPT harness", f"all checks={res.passed} rank={c['Shifts state has rank 4'].detail['rank']} "
              f"cuts={cuts} t={dt:.1f}s")
    assert c["Shifts state is PPT across every bipartition"].passed
    assert c["Shifts state has rank 4"].passed
    assert c["Shifts range holds no fully product vector"].passed
    assert c["no all-PPT state with bipartite Schmidt number >= 3 has rank below 5"].passed
    assert res.passed
    assert dt < 20


def test_criterion_10_determinism(criterion):
    t0 = time.perf_counter()
    a, code_a = run_command(["verify", "all", "--seed", "7"])
    t1 = time.perf_counter()
    b, code_b = run_command(["verify", "all", "--seed", "7"])
    t2 = time.perf_counter()
    criterion("10 Determinism", f"identical={a == b} exit=({code_a},{code_b}) bytes={len(a)} "
              f"runs={t1 - t0:.1f}s,{t2 - t1:.1f}s")
    assert a == b and code_a == code_b == 0


def test_pure_input_matches_registry():
    # a guard that the acceptance inputs are the registered objects
    assert isinstance(states.construct("max_entangled", d=3), PureState)
