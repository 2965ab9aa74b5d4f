"""Named verification suites.

Each suite returns a :class:`SuiteResult` holding individual checks.  Checks
are deterministic for a given seed.  ``informational`` checks record a claim
that is evaluated but does not gate the suite's verdict.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import ces, states
from .certify import Budget, sn_bounds, tensor_product_bounds
from .multipartite import (
    bipartitions,
    coarse_grain,
    expansion_chain_check,
    jsn,
    multipartite_ppt_check,
    product_ces_lower_bound,
    tensor_rank_bounds,
)
from .ppt import ppt_check, tensor_npt_check
from .projections import (
    LocalProjector,
    apply_local,
    check_proj_bounds,
    rank_sweep,
    snminmax_estimate,
    two_copy_bound_check,
)
from .tensor_core import (
    DensityOp,
    PureState,
    direct_sum,
    direct_sum_b,
    hermitian_rank,
    local_ranks,
    overlap,
    partial_trace,
    random_mixed,
    random_pure,
    random_separable,
    random_unitary,
    schmidt_rank,
)
from .witness import (
    maximally_entangled_state,
    max_entangled_overlap,
    overlap_of_unitary,
    pairing,
    perturbation_margin,
    reduction_choi,
    sn_lower_from_overlap,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    informational: bool = False

    def as_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail,
                "informational": self.informational}


@dataclass
class SuiteResult:
    suite: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def as_dict(self):
        return {"suite": self.suite, "passed": self.passed, "checks": [c.as_dict() for c in self.checks]}


def _rng(seed, *tags):
    return np.random.default_rng([seed, *tags])


def _full_rank_pure(m: int, rng) -> PureState:
    while True:
        psi = random_pure((m, m), rng)
        if schmidt_rank(psi.amplitudes, m, m) == m:
            return psi


# ---------------------------------------------------------------------------
# proj-bounds


def mixed_corpus():
    """Named bipartite mixed states used by the projection and chain suites."""
    t = states.tiles_state()
    return [
        ("tiles_state", t),
        ("antisym3", states.antisym3()),
        ("werner_3_-1", states.werner(3, -1.0)),
        ("isotropic_3_0.5", states.isotropic(3, 0.5)),
        ("nonconvex_alpha", states.nonconvex_alpha()),
        ("proj_example", states.proj_example()),
        ("p_mix_bell_0.8", states.p_mix_bell(0.8)),
        ("expansion_vi", states.expansion_vi()),
        ("tiles_dsum_tiles", direct_sum(t, t)),
    ]


def suite_proj_bounds(seed=0, deep=False, budget: Budget | None = None, n_pure: int | None = None):
    budget = budget or Budget(seed=seed)
    checks = []
    n_pure = n_pure if n_pure is not None else (300 if deep else 60)
    rng = _rng(seed, 11)
    bad = []
    count = 0
    for i in range(n_pure):
        m = (2, 3, 4)[i % 3]
        psi = _full_rank_pure(m, rng)
        for k in range(m):
            p = LocalProjector.haar(m, k, rng)
            sigma = apply_local(psi, p, "A")
            got = schmidt_rank(sigma.amplitudes, m, m)
            count += 1
            if got != m - k:
                bad.append([i, m, k, got])
    checks.append(Check("pure projections keep Schmidt rank M-k", not bad,
                        {"states": n_pure, "projections": count, "violations": bad}))

    viol = []
    reports = 0
    for name, rho in mixed_corpus():
        rb = sn_bounds(rho, budget=budget)
        if max(rho.dims) > 4 and not deep:
            # one generic rank-5 projector; the full sweep here is slow
            p = LocalProjector.haar(rho.dims[0], 1, _rng(seed, 15))
            rep = check_proj_bounds(rho, p, "A", budget, rho_bounds=rb)
            reports += 1
            if not (rep.lower_ok and rep.upper_ok):
                viol.append([name, "A", 1, rep.as_dict()])
            continue
        for side in ("A", "B"):
            m = rho.dims[0 if side == "A" else 1]
            for k in range(1, m):
                for j in range(2):
                    p = LocalProjector.haar(m, k, _rng(seed, 12, reports))
                    rep = check_proj_bounds(rho, p, side, budget, rho_bounds=rb)
                    reports += 1
                    if not (rep.lower_ok and rep.upper_ok):
                        viol.append([name, side, k, rep.as_dict()])
    checks.append(Check("mixed corpus satisfies the projection sandwich", not viol,
                        {"reports": reports, "violations": viol}))

    t = states.tiles_state()
    ex = direct_sum(t, t)
    rep = check_proj_bounds(ex, LocalProjector(np.diag([1.0, 1, 1, 1, 1, 0])), "A", budget)
    checks.append(Check("direct sum of two Tiles states under a rank-5 block projector keeps sn 2",
                        rep.sn_sigma is not None and (rep.sn_sigma.lo, rep.sn_sigma.hi) == (2, 2) and rep.ok,
                        rep.as_dict()))

    rep = check_proj_bounds(states.max_entangled(3), LocalProjector.basis(3, [0, 1]), "A", budget)
    checks.append(Check("maximally entangled 3x3 with rank-2 projector gives exactly 2",
                        rep.exact_iii is True, rep.as_dict()))

    cut2 = LocalProjector(np.eye(3)[:2])
    two = apply_local(apply_local(states.antisym3(), cut2, "A"), cut2, "B")
    v2 = ppt_check(two)
    checks.append(Check("antisymmetric state compressed to two qubits is NPT", not v2.is_ppt,
                        {"min_eig": v2.min_eig_gamma}))

    est = []
    ok = True
    for name, rho, k, want_max_lo in [("max_entangled_3", states.max_entangled(3).to_density(), 2, 1),
                                      ("max_entangled_3", states.max_entangled(3).to_density(), 1, 2),
                                      ("antisym3", states.antisym3(), 1, 2),
                                      ("tiles_state", states.tiles_state(), 2, 1)]:
        e = snminmax_estimate(rho, k, samples=10, seed=seed, budget=budget)
        est.append([name, k, e.as_dict()["max_est"], e.as_dict()["min_est"], e.sandwich_ok])
        ok &= e.sandwich_ok and e.max_est.lo == want_max_lo
        if k == rho.dims[0] - 1:
            ok &= (e.max_est.lo, e.max_est.hi, e.min_est.lo, e.min_est.hi) == (1, 1, 1, 1)
    checks.append(Check("sn_max / sn_min estimates", bool(ok), {"estimates": est}))

    chain_ok = True
    chain = []
    for name, rho in [("tiles_state", states.tiles_state()), ("antisym3", states.antisym3())]:
        rb = sn_bounds(rho, budget=budget)
        prev = rb.hi
        row = [name, rb.hi]
        for k in (1, 2):
            e = snminmax_estimate(rho, k, samples=6, seed=seed, budget=budget, rho_bounds=rb)
            chain_ok &= e.max_est.lo <= prev
            prev = e.max_est.hi
            row.append([e.max_est.lo, e.max_est.hi])
        chain.append(row)
    checks.append(Check("max-estimates are non-increasing in k", bool(chain_ok), {"chain": chain}))

    tc_reports = []
    tc_ok = True
    for name, rho, p in [("max_entangled_2", states.max_entangled(2), LocalProjector.basis(2, [0])),
                         ("max_entangled_3", states.max_entangled(3), LocalProjector.basis(3, [0, 1])),
                         ("tiles_state", states.tiles_state(), LocalProjector.haar(3, 1, _rng(seed, 13)))]:
        r = two_copy_bound_check(rho, p, "A", budget)
        tc_reports.append([name, r.as_dict()])
        tc_ok &= r.ok
    checks.append(Check("two-copy projection bounds", bool(tc_ok), {"reports": tc_reports}))

    rho = states.tiles_state()
    gb = partial_transpose_commutes(rho, LocalProjector.haar(3, 1, _rng(seed, 14)))
    checks.append(Check("projection on A commutes with partial transpose on B", gb < 1e-10, {"error": gb}))
    return SuiteResult("proj-bounds", checks)


def partial_transpose_commutes(rho, p: LocalProjector) -> float:
    from .ppt import partial_transpose

    # formed directly since rho^Gamma need not be PSD
    op = np.kron(p.matrix, np.eye(rho.dims[1]))
    lhs = op @ partial_transpose(rho, [1]).matrix @ op.conj().T
    rhs = partial_transpose(apply_local(rho, p, "A"), [1]).matrix
    return float(np.linalg.norm(lhs - rhs))


# ---------------------------------------------------------------------------
# dsum


def suite_dsum(seed=0, deep=False, budget: Budget | None = None, pairs: int = 50):
    budget = budget or Budget(seed=seed)
    rng = _rng(seed, 21)
    bad = []
    for i in range(pairs):
        m = int(rng.integers(2, 4))
        na, nb = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        a = random_pure((m, na), rng).to_density()
        b = random_pure((m, nb), rng).to_density()
        sa = sn_bounds(a, budget=budget)
        sb = sn_bounds(b, budget=budget)
        s = sn_bounds(direct_sum_b(a, b), budget=budget)
        if s.hi != max(sa.hi, sb.hi) or s.lo != max(sa.lo, sb.lo):
            bad.append([i, [sa.lo, sa.hi], [sb.lo, sb.hi], [s.lo, s.hi]])
    checks = [Check("B-direct sum of pure states takes the max", not bad, {"pairs": pairs, "violations": bad})]

    t = states.tiles_state()
    bell = states.max_entangled(2).to_density()
    pieces = [
        ("tiles + product", t, states.basis_state((0, 0), (3, 3)).to_density(), (2, 2)),
        ("tiles + max_entangled_3", t, states.max_entangled(3).to_density(), (3, 3)),
        ("antisym3 + tiles", states.antisym3(), t, (2, 2)),
    ]
    rows = []
    ok = True
    for name, x, y, want in pieces:
        s = sn_bounds(direct_sum_b(x, y), budget=budget)
        rows.append([name, [s.lo, s.hi], list(want)])
        ok &= (s.lo, s.hi) == want
    checks.append(Check("B-direct sums of mixed states", bool(ok), {"cases": rows}))

    # quantum-classical: sum_i p_i rho_i (x) |i><i| on B = B' (x) C
    qc_rows = []
    ok = True
    for name, parts, want in [
        ("bell, product", [bell, states.basis_state((0, 1), (2, 2)).to_density()], 2),
        ("separable, separable", [states.maximally_mixed((2, 2)), states.p_mix_bell(0.5)], 1),
        ("tiles, max_entangled_3", [t, states.max_entangled(3).to_density()], 3),
    ]:
        rho = quantum_classical(parts, [0.5] * len(parts))
        s = sn_bounds(rho, budget=budget)
        qc_rows.append([name, [s.lo, s.hi], want])
        ok &= s.lo == s.hi == want
    checks.append(Check("quantum-classical states take the max over blocks", bool(ok), {"cases": qc_rows}))
    return SuiteResult("dsum", checks)


def quantum_classical(parts, weights) -> DensityOp:
    """``sum_i w_i rho_i (x) |i><i|_C`` regrouped as ``A : B C``."""
    m, n = parts[0].dims
    c = len(parts)
    out = np.zeros((m, n, c, m, n, c), dtype=np.complex128)
    for i, (w, r) in enumerate(zip(weights, parts)):
        out[:, :, i, :, :, i] = w * r.matrix.reshape(m, n, m, n) / r.trace
    return DensityOp(out.reshape(m * n * c, -1), (m, n * c))


# ---------------------------------------------------------------------------
# th00


def suite_th00(seed=0, deep=False, budget: Budget | None = None):
    checks = []
    iso = states.isotropic(3, 0.9)
    target = 0.9 + 0.1 / 9
    res = max_entangled_overlap(iso, restarts=32, max_iters=500, seed=seed)
    lb = sn_lower_from_overlap(res.value, 3)
    checks.append(Check("isotropic(3, 0.9) overlap reaches p+(1-p)/d^2", res.value >= target - 1e-6 and lb == 3,
                        {"value": res.value, "target": target, "sn_lower": lb}))
    rows = []
    ok = True
    for m in (2, 3, 4):
        r = max_entangled_overlap(states.max_entangled(m).to_density(), restarts=8, seed=seed)
        s = sn_lower_from_overlap(r.value, m)
        rows.append([m, r.value, s])
        ok &= abs(r.value - 1) < 1e-9 and s == m
    checks.append(Check("maximally entangled states give overlap 1 and bound M", bool(ok), {"cases": rows}))
    r = max_entangled_overlap(states.maximally_mixed((3, 3)), restarts=8, seed=seed)
    s = sn_lower_from_overlap(r.value, 3)
    checks.append(Check("maximally mixed 3x3 gives bound 1", abs(r.value - 1 / 9) < 1e-12 and s == 1,
                        {"value": r.value, "sn_lower": s}))

    rng = _rng(seed, 31)
    mono, repro = True, True
    lower_ok = True
    for i in range(10):
        d = (2, 3)[i % 2]
        rho = random_mixed((d, d), int(rng.integers(1, d * d + 1)), rng)
        r = max_entangled_overlap(rho, restarts=4, max_iters=200, seed=seed + i)
        mono &= all(b >= a - 1e-13 for a, b in zip(r.history, r.history[1:]))
        rho_n = rho.matrix / rho.trace
        again = overlap_of_unitary(rho_n, r.optimizer_unitary)
        psi = maximally_entangled_state(r.optimizer_unitary)
        repro &= abs(again - r.value) < 1e-10 and abs(overlap(psi, rho) / rho.trace - r.value) < 1e-10
        u = r.optimizer_unitary
        repro &= np.linalg.norm(u @ u.conj().T - np.eye(d)) < 1e-10
        lower_ok &= sn_lower_from_overlap(r.value, d) <= min(local_ranks(rho))
    checks.append(Check("see-saw objective is non-decreasing", bool(mono)))
    checks.append(Check("reported overlap recomputes from the returned unitary", bool(repro)))
    checks.append(Check("overlap bound never exceeds the local ranks", bool(lower_ok)))

    c2 = reduction_choi(2)
    c3 = reduction_choi(3)
    lin = 0.0
    for i in range(20):
        r1 = random_mixed((3, 3), 3, rng)
        r2 = random_mixed((3, 3), 2, rng)
        a, b = rng.normal(size=2)
        lin = max(lin, abs(pairing(a * r1.matrix + b * r2.matrix, c3) - a * pairing(r1, c3) - b * pairing(r2, c3)))
    checks.append(Check("pairing is linear", lin < 1e-10, {"max_error": lin}))
    worst = math.inf
    for i in range(200):
        d = (2, 3)[i % 2]
        sep = random_separable((d, d), int(rng.integers(1, 6)), rng)
        worst = min(worst, pairing(sep, c2 if d == 2 else c3))
    checks.append(Check("reduction witness is non-negative on 200 separable states", worst >= -1e-10,
                        {"min_pairing": worst}))
    return SuiteResult("th00", checks)


# ---------------------------------------------------------------------------
# sn-stb


def bisect_margin(rho, sigma, c, hi_cap: float = 1e8, tol: float = 1e-13):
    """Root of ``eps -> pairing(rho + eps sigma)`` by bisection on directly formed matrices."""
    f = lambda e: pairing(rho.matrix + e * sigma.matrix, c)  # noqa: E731
    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        lo, hi = hi, hi * 2
        if hi > hi_cap:
            return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def stability_triples(seed: int, count: int = 50):
    rng = _rng(seed, 41)
    out = []
    while len(out) < count:
        d = int(rng.integers(2, 4))
        c = reduction_choi(d)
        p = rng.uniform(0.6, 1.0)
        noise = random_mixed((d, d), int(rng.integers(1, d * d + 1)), rng)
        phi = states.max_entangled(d)
        u = random_unitary(d, rng)
        v = np.kron(u, np.eye(d)) @ phi.amplitudes
        rho = DensityOp(p * np.outer(v, v.conj()) + (1 - p) * noise.matrix / noise.trace, (d, d))
        if pairing(rho, c) >= -1e-9:
            continue
        kind = len(out) % 3
        if kind == 0:
            sigma = random_mixed((d, d), int(rng.integers(1, d * d + 1)), rng)
        elif kind == 1:
            sigma = random_separable((d, d), 3, rng)
        else:
            w = random_pure((d, d), rng)
            sigma = w.to_density()
        out.append((rho, sigma, c))
    return out


def suite_sn_stb(seed=0, deep=False, budget: Budget | None = None, count: int = 50):
    worst = 0.0
    rows = []
    for i, (rho, sigma, c) in enumerate(stability_triples(seed, count)):
        eps = perturbation_margin(rho, sigma, c)
        root = bisect_margin(rho, sigma, c)
        if math.isinf(eps) or math.isinf(root):
            err = 0.0 if math.isinf(eps) and math.isinf(root) else math.inf
        else:
            err = abs(eps - root) / max(1.0, eps)
        worst = max(worst, err)
        rows.append([i, eps, root])
    checks = [Check("perturbation margin matches bisection", worst <= 1e-10,
                    {"triples": len(rows), "max_rel_error": worst})]
    bell = states.max_entangled(2).to_density()
    c = reduction_choi(2)
    vals = {
        "bell": perturbation_margin(bell, bell, c),
        "identity": perturbation_margin(bell, states.maximally_mixed((2, 2)), c),
        "product": perturbation_margin(bell, states.basis_state((0, 0)).to_density(), c),
    }
    ok = math.isinf(vals["bell"]) and abs(vals["identity"] - 2.0) < 1e-12 and math.isinf(vals["product"])
    checks.append(Check("reference margins against the reduction witness", ok, vals))
    return SuiteResult("sn-stb", checks)


# ---------------------------------------------------------------------------
# tensorof2


def suite_tensorof2(seed=0, deep=False, budget: Budget | None = None, pairs: int = 40):
    budget = budget or Budget(seed=seed)
    rng = _rng(seed, 51)
    shapes = [(2, 2), (2, 3), (3, 2)]
    bad = []
    entangled_seen = 0
    for i in range(pairs):
        s1, s2 = shapes[int(rng.integers(3))], shapes[int(rng.integers(3))]
        r1 = random_mixed(s1, int(rng.integers(1, 5)), rng) if i % 2 else random_separable(s1, 3, rng)
        r2 = random_mixed(s2, int(rng.integers(1, 5)), rng) if i % 3 else random_separable(s2, 3, rng)
        ent = (not ppt_check(r1).is_ppt) or (not ppt_check(r2).is_ppt)
        entangled_seen += ent
        npt = tensor_npt_check(r1, r2)
        if ent and not npt:
            bad.append(i)
        if not ent and npt:
            bad.append(i)
    checks = [Check("product of 2x2 / 2x3 states is NPT iff a factor is entangled", not bad,
                    {"pairs": pairs, "entangled_pairs": entangled_seen, "violations": bad})]
    if deep:
        t = states.tiles_state()
        two = states.tensor_power_regrouped(t, 2)
        checks.append(Check("two copies of the Tiles state stay PPT", ppt_check(two).is_ppt,
                            {"min_eig": ppt_check(two).min_eig_gamma, "rank": hermitian_rank(two.matrix)}))
    return SuiteResult("tensorof2", checks)


# ---------------------------------------------------------------------------
# expansion-chain


def chain_corpus(seed: int):
    rng = _rng(seed, 61)
    out = [
        ("bell", states.max_entangled(2)),
        ("max_entangled_3", states.max_entangled(3)),
        ("expansion_vi", states.expansion_vi()),
        ("sep_diag_3", states.sep_diag(3)),
        ("tiles_state", states.tiles_state()),
        ("antisym3", states.antisym3()),
        ("werner_3_-1", states.werner(3, -1.0)),
        ("isotropic_2_0.8", states.isotropic(2, 0.8)),
        ("isotropic_3_0.3", states.isotropic(3, 0.3)),
        ("nonconvex_alpha", states.nonconvex_alpha()),
        ("nonconvex_mix", states.nonconvex_mix()),
        ("p_mix_bell_0.7", states.p_mix_bell(0.7)),
        ("p_mix_bell_0.5", states.p_mix_bell(0.5)),
        ("proj_example", states.proj_example()),
        ("maximally_mixed_2x2", states.maximally_mixed((2, 2))),
    ]
    for i in range(6):
        dims = [(2, 2), (2, 3), (3, 3)][i % 3]
        out.append((f"random_mixed_{i}", random_mixed(dims, 2 + i % 2, rng)))
    for i in range(2):
        out.append((f"random_separable_{i}", random_separable((2, 3), 2 + i, rng)))
    return out


def suite_expansion_chain(seed=0, deep=False, budget: Budget | None = None):
    budget = budget or Budget(seed=seed)
    bad = []
    rows = []
    for name, s in chain_corpus(seed):
        rep = expansion_chain_check(s, budget)
        rows.append([name, rep.as_dict()])
        if not rep.ok:
            bad.append(name)
    corpus_size = len(rows)
    checks = [Check("expansion chain holds on the corpus", not bad and corpus_size >= 20,
                    {"states": corpus_size, "failures": bad, "reports": rows})]
    vi = expansion_chain_check(states.expansion_vi(), budget)
    checks.append(Check("expansion_vi: last inequality of the chain is an equality",
                        vi.equalities[2] == "holds", vi.as_dict(), informational=True))
    return SuiteResult("expansion-chain", checks)


# ---------------------------------------------------------------------------
# jsn-sandwich


def paper_224() -> PureState:
    v = np.zeros((2, 2, 4))
    v[0, 0, 0] = v[0, 1, 1] = v[1, 0, 2] = v[1, 1, 3] = 1
    return PureState(v.ravel(), (2, 2, 4))


def pure_corpus(seed: int):
    rng = _rng(seed, 71)
    x = np.zeros((2, 2, 2))
    x[0, 0, 0] = x[1, 1, 0] = 1
    out = [
        ("psi_224", paper_224()),
        ("ghz_2_3", states.ghz(2, 3)),
        ("ghz_2_4", states.ghz(2, 4)),
        ("ghz_3_3", states.ghz(3, 3)),
        ("w_3", states.w_state(3)),
        ("biproduct_000_110", PureState(x.ravel(), (2, 2, 2))),
        ("max_entangled_3", states.max_entangled(3)),
    ]
    for i in range(5):
        dims = [(2, 2, 2), (2, 2, 3), (2, 3, 2), (2, 2, 2, 2), (3, 2, 2)][i]
        out.append((f"random_pure_{i}", random_pure(dims, rng)))
    return out


def suite_jsn_sandwich(seed=0, deep=False, budget: Budget | None = None):
    budget = budget or Budget(seed=seed)
    checks = []
    rows = []
    ok = True
    for name, psi in pure_corpus(seed):
        j = jsn(psi)
        tr = tensor_rank_bounds(psi, budget)
        good = max(j.ranks) <= tr.lo and tr.hi <= j.product_bound()
        ok &= good
        rows.append([name, list(j.ranks), [tr.lo, tr.hi], tr.hi_source])
    checks.append(Check("flattening ranks sandwich the tensor rank", bool(ok), {"cases": rows}))

    exp = {"psi_224": ((2, 2, 4), (4, 4)), "ghz_2_3": ((2, 2, 2), (2, 2)), "ghz_2_4": ((2, 2, 2, 2), (2, 2)),
           "w_3": ((2, 2, 2), (3, 3)), "biproduct_000_110": ((2, 2, 1), None)}
    got = {r[0]: (tuple(r[1]), tuple(r[2])) for r in rows}
    ok = all(got[k][0] == v[0] and (v[1] is None or got[k][1] == v[1]) for k, v in exp.items())
    checks.append(Check("reference joint Schmidt numbers and tensor ranks", ok,
                        {k: [list(got[k][0]), list(got[k][1])] for k in exp}))

    rng = _rng(seed, 72)
    bad = 0
    for i in range(100):
        name, psi = pure_corpus(seed)[i % 6]
        ops = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for d in psi.dims]
        big = ops[0]
        for o in ops[1:]:
            big = np.kron(big, o)
        if jsn(PureState(big @ psi.amplitudes, psi.dims)) != jsn(psi):
            bad += 1
    checks.append(Check("joint Schmidt number is invariant under invertible local operators", bad == 0,
                        {"trials": 100, "violations": bad}))

    premise, found = 0, 0
    for i in range(400):
        n = 3 + i % 2
        dims = tuple(int(d) for d in rng.integers(2, 4, size=n))
        # sparse supports make partially product states common
        v = np.zeros(int(np.prod(dims)), dtype=np.complex128)
        idx = rng.choice(v.size, size=int(rng.integers(1, 4)), replace=False)
        v[idx] = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
        ranks = jsn(PureState(v, dims)).ranks
        if sum(r == 1 for r in ranks) >= n - 1:
            premise += 1
            found += any(r != 1 for r in ranks)
    checks.append(Check("product on n-1 single-party cuts implies fully product", found == 0 and premise > 0,
                        {"trials": 400, "premise_met": premise, "counterexamples": found}))

    ok = True
    rows = []
    for name, psi in pure_corpus(seed):
        n = len(psi.dims)
        if n < 3:
            continue
        full = tensor_rank_bounds(psi, budget)
        for part in ([[0], list(range(1, n))], [list(range(n - 1)), [n - 1]]):
            cg = coarse_grain(psi, part)
            cgb = tensor_rank_bounds(cg, budget)
            ok &= cgb.lo <= full.hi
            rows.append([name, part, [cgb.lo, cgb.hi], [full.lo, full.hi]])
    checks.append(Check("coarse graining never exceeds the original tensor rank", bool(ok), {"cases": rows}))

    cg = coarse_grain(states.ghz(2, 3), [[0], [1, 2]])
    cg4 = coarse_grain(states.ghz(2, 4), [[0, 1], [2, 3]])
    cg224 = coarse_grain(paper_224(), [[0, 1], [2]])
    vals = [jsn(cg).ranks[0], jsn(cg4).ranks[0], jsn(cg224).ranks[0]]
    checks.append(Check("coarse-grained reference ranks", vals == [2, 2, 4], {"ranks": vals}))

    g = states.ghz(8, 3)
    full_lo = jsn(coarse_grain(g, [[0], [1, 2]])).ranks[0]
    marg = []
    rho = g.to_density()
    for keep in ([0, 1], [0, 2], [1, 2]):
        m = partial_trace(rho, keep)
        marg.append(sn_bounds(m, budget=budget).hi)
    checks.append(Check("GHZ(8, 3) exceeds the sum of its two-party marginals' Schmidt numbers",
                        full_lo > sum(marg), {"full_lower": full_lo, "marginals": marg}))

    w2 = tensor_rank_bounds(states.w_state(3), budget)
    checks.append(Check("W state: rank 2 rejected, rank 3 certified", (w2.lo, w2.hi) == (3, 3),
                        w2.as_dict()))
    return SuiteResult("jsn-sandwich", checks)


# ---------------------------------------------------------------------------
# snrho-n


def suite_snrho_n(seed=0, deep=False, budget: Budget | None = None):
    budget = budget or Budget(seed=seed)
    t = states.tiles_state()
    cert = ces.ces_certificate(t.matrix, (3, 3), states.tiles_members())
    checks = [Check("Tiles range certified free of product vectors", cert is not None)]
    vals = {n: product_ces_lower_bound([t] * n, [cert] * n) for n in (1, 2, 3)}
    checks.append(Check("product CES bounds n+1", vals == {1: 2, 2: 3, 3: 4}, {str(k): v for k, v in vals.items()}))
    tb = sn_bounds(t, budget=budget, members=states.tiles_members())
    prod_b = tensor_product_bounds([tb, tb], 9, all_ces=True)
    checks.append(Check("two Tiles copies: bounds [3, 4] from factor certificates",
                        (prod_b.lo, prod_b.hi) == (3, 4),
                        {"bounds": [prod_b.lo, prod_b.hi], "claimed_exact": 4}))
    if deep:
        checks.extend(deep_tiles_pair(seed, budget).checks)
    return SuiteResult("snrho-n", checks)


def deep_tiles_pair(seed=0, budget: Budget | None = None, range_restarts: int = 64):
    """The two-copy Tiles pipeline: PPT, rank 16, bounds [3, 4]."""
    budget = budget or Budget(seed=seed)
    t = states.tiles_state()
    two = states.tensor_power_regrouped(t, 2)
    v = ppt_check(two)
    rank = hermitian_rank(two.matrix)
    cert = ces.ces_certificate(t.matrix, (3, 3), states.tiles_members())
    lo = product_ces_lower_bound([t, t], [cert, cert])
    tb = sn_bounds(t, budget=budget, members=states.tiles_members())
    d = tb.decomposition
    hi = tb.hi ** 2
    # explicit product decomposition from the single-copy certificate
    recon_err = None
    if d is not None:
        vecs = [np.kron(a.amplitudes.reshape(3, 3), b.amplitudes.reshape(3, 3)) for a in d.vectors for b in d.vectors]
        w = np.outer(d.weights, d.weights).ravel()
        # kron of 3x3 amplitude matrices is the regrouped A1A2 : B1B2 amplitude matrix
        mat = sum(wi * np.outer(x.ravel(), x.ravel().conj()) for wi, x in zip(w, vecs))
        recon_err = float(np.linalg.norm(mat - two.matrix))
        ranks = max(np.linalg.matrix_rank(x, tol=1e-9) for x in vecs)
        hi = min(hi, int(ranks))
    basis, _ = ces.range_kernel(two.matrix)
    search = ces.min_schmidt_in_range(basis, 9, 9, 2, range_restarts, 400, seed)
    checks = [
        Check("two Tiles copies regrouped are PPT", v.is_ppt, {"min_eig": v.min_eig_gamma}),
        Check("two Tiles copies have rank 16", rank == 16, {"rank": rank}),
        Check("two Tiles copies: sound interval [3, 4]", lo == 3 and hi == 4 and recon_err is not None
              and recon_err < 1e-8, {"lo": lo, "hi": hi, "reconstruction_error": recon_err, "claimed_exact": 4}),
        Check("no Schmidt-rank-2 vector found in the two-copy range", not search.found,
              {"best_tail": search.value, "restarts": range_restarts}, informational=True),
    ]
    return SuiteResult("tiles-pair", checks)


# ---------------------------------------------------------------------------
# rank4


def suite_rank4(seed=0, deep=False, budget: Budget | None = None):
    budget = budget or Budget(seed=seed)
    checks = []
    sh = states.shifts_upb()
    verdicts, all_ppt = multipartite_ppt_check(sh.state)
    rank = hermitian_rank(sh.state.matrix)
    cert = ces.ces_certificate(sh.state.matrix, (2, 2, 2), sh.members)
    cut_bounds = {}
    for cut in bipartitions(3):
        b = sn_bounds(sh.state, cut, budget)
        cut_bounds[str(cut)] = [b.lo, b.hi]
    checks.append(Check("Shifts state is PPT across every bipartition", all_ppt,
                        {str(k): v.min_eig_gamma for k, v in verdicts.items()}))
    checks.append(Check("Shifts state has rank 4", rank == 4, {"rank": rank}))
    checks.append(Check("Shifts range holds no fully product vector", cert is not None,
                        {"members": None if cert is None else len(cert.members)}))
    checks.append(Check("Shifts bipartite Schmidt number at most 2 across every cut",
                        all(v[1] <= 2 for v in cut_bounds.values()), cut_bounds))

    corpus = [("shifts3_state", sh.state), ("tiles_state", states.tiles_state()),
              ("sep_diag_3", states.sep_diag(3)), ("ghz_2_3", states.ghz(2, 3).to_density()),
              ("isotropic_3_0.9", states.isotropic(3, 0.9))]
    viol = []
    rows = []
    for name, rho in corpus:
        n = len(rho.dims)
        _, allp = multipartite_ppt_check(rho)
        r = hermitian_rank(rho.matrix)
        lo = max(sn_bounds(rho, cut, budget).lo for cut in bipartitions(n))
        rows.append([name, allp, r, lo])
        if allp and lo >= 3 and r < 5:
            viol.append(name)
    checks.append(Check("no all-PPT state with bipartite Schmidt number >= 3 has rank below 5", not viol,
                        {"states": rows, "violations": viol}))
    return SuiteResult("rank4", checks)


# ---------------------------------------------------------------------------
# sym-sweep


def suite_sym_sweep(seed=0, deep=False, budget: Budget | None = None):
    budget = budget or Budget(seed=seed)
    checks = []
    expect = {"max_entangled_3": [[3], [2], [1]], "tiles_state": [[2], [1], [1]]}
    for name, rho in [("max_entangled_3", states.max_entangled(3).to_density()),
                      ("tiles_state", states.tiles_state()), ("proj_example", states.proj_example())]:
        sw = rank_sweep(rho, samples=3, seed=seed, budget=budget)
        ok = sw.covers and sw.sets_agree
        if name in expect:
            ok &= sw.achieved["A"] == expect[name]
        if name == "proj_example":
            ok &= max(sw.achieved["A"][1]) <= 2 and 3 in sw.achieved["B"][1]
        checks.append(Check(f"projection sweep: {name}", bool(ok), sw.as_dict()))
    return SuiteResult("sym-sweep", checks)


SUITES = {
    "proj-bounds": suite_proj_bounds,
    "dsum": suite_dsum,
    "th00": suite_th00,
    "sn-stb": suite_sn_stb,
    "tensorof2": suite_tensorof2,
    "expansion-chain": suite_expansion_chain,
    "jsn-sandwich": suite_jsn_sandwich,
    "snrho-n": suite_snrho_n,
    "rank4": suite_rank4,
    "sym-sweep": suite_sym_sweep,
}


def run_suite(name: str, seed: int = 0, deep: bool = False, budget: Budget | None = None):
    """Run one suite, or every suite for ``name == 'all'``."""
    from .errors import InputError

    if name == "all":
        return [SUITES[k](seed=seed, deep=deep, budget=budget) for k in SUITES]
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return [SUITES[name](seed=seed, deep=deep, budget=budget)]
