"""Multipartite tools: flattening ranks, tensor-rank bounds, coarse graining,
purification and the expansion chain."""

from dataclasses import dataclass, field
from itertools import combinations
from math import prod

import numpy as np

from . import ces
from .certify import Budget, Decomposition, SnBound, sn_bounds
from .errors import InputError, PreconditionError
from .ppt import PptVerdict, ppt_check
from .tensor_core import (
    TOL_RANK,
    TOL_RECON,
    Bipartition,
    DensityOp,
    PureState,
    hermitian_rank,
    local_ranks,
    numerical_rank,
    partial_trace,
    permute_systems,
    spectral,
)

TOL_CP = 1e-8
TOL_HYPERDET = 1e-10


@dataclass(frozen=True)
class JsnTuple:
    ranks: tuple

    def __le__(self, other: "JsnTuple") -> bool:
        if len(self.ranks) != len(other.ranks):
            raise InputError("tuples of different length are not comparable")
        return all(a <= b for a, b in zip(self.ranks, other.ranks))

    def product_bound(self) -> int:
        """``min_l prod_{i != l} s_i``."""
        p = prod(self.ranks)
        return min(p // s for s in self.ranks)


@dataclass(frozen=True, eq=False)
class CPDecomposition:
    """``psi ~ sum_r a^1_r (x) ... (x) a^n_r`` with factor matrices ``d_p x r``."""

    factors: tuple
    residual: float

    @property
    def rank(self) -> int:
        return self.factors[0].shape[1]

    def reconstruct(self) -> np.ndarray:
        return _khatri_rao(self.factors).sum(axis=1)


@dataclass(frozen=True, eq=False)
class TensorRankBound:
    lo: int
    hi: int
    lo_source: str = "flattening"
    hi_source: str = "jsn product bound"
    decomposition: CPDecomposition | None = field(default=None, repr=False)
    rejected: tuple = ()

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise AssertionError(f"unsound tensor-rank interval [{self.lo}, {self.hi}]")

    def as_dict(self):
        return {"lo": self.lo, "hi": self.hi, "lo_source": self.lo_source,
                "hi_source": self.hi_source, "rejected_ranks": list(self.rejected)}


def _flattening(t: np.ndarray, p: int) -> np.ndarray:
    return np.moveaxis(t, p, 0).reshape(t.shape[p], -1)


def jsn(psi: PureState, tol_rank: float = TOL_RANK) -> JsnTuple:
    """Schmidt rank across each single-party cut."""
    if len(psi.dims) < 2:
        raise InputError("need at least two parties")
    t = psi.tensor()
    return JsnTuple(tuple(numerical_rank(_flattening(t, p), tol_rank) for p in range(len(psi.dims))))


# ---------------------------------------------------------------------------
# CP fitting


def _khatri_rao(mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = (out[:, None, :] * m[None, :, :]).reshape(-1, out.shape[1])
    return out


def _als_sweeps(t, factors, sweeps, lam):
    n = t.ndim
    r = factors[0].shape[1]
    eye = np.eye(r)
    for _ in range(sweeps):
        for p in range(n):
            others = [factors[q] for q in range(n) if q != p]
            g = np.ones((r, r), dtype=np.complex128)
            for o in others:
                g = g * (o.T @ o.conj())
            rhs = _flattening(t, p) @ _khatri_rao(others).conj()
            if lam > 0:
                factors[p] = np.linalg.solve((g + lam * eye).T, rhs.T).T
            else:
                factors[p] = rhs @ np.linalg.pinv(g, rcond=1e-13)
    return factors


def cp_fit(psi: PureState, r: int, restarts: int = 8, iters: int = 300, refine: int = 50,
           seed: int = 0, tol_cp: float = TOL_CP, max_term_ratio: float = 1e3):
    """Try to write ``psi`` as a sum of ``r`` product vectors.

    Regularized ALS (``lambda = 1e-6 ||psi||^2``) first, then an unregularized
    refinement.  A fit is accepted only if the relative residual is below
    ``tol_cp`` and no term norm exceeds ``max_term_ratio * ||psi||``, which
    rejects border-rank sequences whose terms blow up.
    Returns ``(CPDecomposition or None, best residual)``.
    """
    t = psi.tensor()
    dims = psi.dims
    nrm = float(np.linalg.norm(t))
    lam = 1e-6 * nrm ** 2
    best = np.inf
    for s in range(restarts):
        rng = np.random.default_rng([seed, r, s])
        f = [(rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))) * (nrm ** (1 / len(dims)) / np.sqrt(2 * d))
             for d in dims]
        f = _als_sweeps(t, f, iters, lam)
        f = _als_sweeps(t, f, refine, 0.0)
        res = float(np.linalg.norm(_khatri_rao(f).sum(axis=1) - t.ravel()) / nrm)
        terms = np.prod([np.linalg.norm(x, axis=0) for x in f], axis=0)
        best = min(best, res)
        if res < tol_cp and terms.max() <= max_term_ratio * nrm:
            return CPDecomposition(tuple(f), res), res
    return None, best


def hyperdeterminant(a: np.ndarray) -> complex:
    """Cayley hyperdeterminant of a ``2 x 2 x 2`` array."""
    a = np.asarray(a).reshape(2, 2, 2)
    g = lambda i, j, k: a[i, j, k]  # noqa: E731
    return (
        g(0, 0, 0) ** 2 * g(1, 1, 1) ** 2 + g(0, 0, 1) ** 2 * g(1, 1, 0) ** 2
        + g(0, 1, 0) ** 2 * g(1, 0, 1) ** 2 + g(1, 0, 0) ** 2 * g(0, 1, 1) ** 2
        - 2 * (g(0, 0, 0) * g(0, 0, 1) * g(1, 1, 0) * g(1, 1, 1)
               + g(0, 0, 0) * g(0, 1, 0) * g(1, 0, 1) * g(1, 1, 1)
               + g(0, 0, 0) * g(1, 0, 0) * g(0, 1, 1) * g(1, 1, 1)
               + g(0, 0, 1) * g(0, 1, 0) * g(1, 0, 1) * g(1, 1, 0)
               + g(0, 0, 1) * g(1, 0, 0) * g(0, 1, 1) * g(1, 1, 0)
               + g(0, 1, 0) * g(1, 0, 0) * g(0, 1, 1) * g(1, 0, 1))
        + 4 * (g(0, 0, 0) * g(0, 1, 1) * g(1, 0, 1) * g(1, 1, 0)
               + g(0, 0, 1) * g(0, 1, 0) * g(1, 0, 0) * g(1, 1, 1))
    )


def _core_222(t: np.ndarray):
    """Compress a 3-party tensor with all flattening ranks 2 to its 2x2x2 core."""
    core = t
    for p in range(3):
        u, _, _ = np.linalg.svd(_flattening(t, p), full_matrices=False)
        core = np.moveaxis(np.tensordot(u[:, :2].conj().T, np.moveaxis(core, p, 0), axes=1), 0, p)
    return core


def tensor_rank_bounds(psi: PureState, budget: Budget | None = None, tol_cp: float = TOL_CP) -> TensorRankBound:
    """Certified interval for the tensor rank of a pure state.

    ``lo`` is the largest flattening rank, raised to 3 for three-party states
    of format 2x2x2 with vanishing hyperdeterminant and no product cut.  ``hi``
    starts at the product bound and descends while a CP fit is certified.
    """
    budget = budget or Budget()
    if len(psi.dims) < 2:
        raise InputError("need at least two parties")
    j = jsn(psi)
    lo, lo_src = max(j.ranks), "flattening"
    if len(psi.dims) == 2:
        return TensorRankBound(lo, lo, "flattening", "schmidt rank")
    hi, hi_src = j.product_bound(), "jsn product bound"
    t = psi.tensor() / psi.norm
    if len(psi.dims) == 3 and j.ranks == (2, 2, 2):
        det = hyperdeterminant(_core_222(t))
        if abs(det) < TOL_HYPERDET:
            lo, lo_src = 3, "hyperdeterminant"
    decomp = None
    rejected = []
    r = hi - 1
    while r >= lo:
        d, _ = cp_fit(psi, r, restarts=max(4, budget.restarts // 4), iters=300,
                      seed=budget.seed, tol_cp=tol_cp)
        if d is None:
            rejected.append(r)
            break
        err = np.linalg.norm(d.reconstruct() - psi.tensor().ravel())
        if err > TOL_RECON * psi.norm:
            rejected.append(r)
            break
        hi, hi_src, decomp = r, "explicit CP decomposition", d
        r -= 1
    if lo > hi:
        raise AssertionError(f"contradictory tensor-rank certificates: {lo} > {hi}")
    return TensorRankBound(lo, hi, lo_src, hi_src, decomp, tuple(rejected))


# ---------------------------------------------------------------------------
# coarse graining and expansions


def coarse_grain(s, partition):
    """Merge parties into groups (0-based indices); groups must cover every party once."""
    n = len(s.dims)
    flat = [i for g in partition for i in g]
    if sorted(flat) != list(range(n)) or any(len(g) == 0 for g in partition):
        raise InputError(f"{partition} is not a partition of {n} parties")
    out = permute_systems(s, tuple(flat))
    dims = tuple(prod(s.dims[i] for i in g) for g in partition)
    if isinstance(out, PureState):
        return PureState(out.amplitudes, dims)
    return DensityOp(out.matrix, dims)


def purify(rho) -> PureState:
    """``sum_i sqrt(p_i) |a_i>|i>`` with an ancilla of dimension ``rank(rho)``."""
    if isinstance(rho, PureState):
        return PureState(rho.amplitudes, tuple(rho.dims) + (1,))
    w, v = spectral(rho)
    amps = (v * np.sqrt(w)).reshape(-1)
    return PureState(amps, tuple(rho.dims) + (len(w),))


def expansion_from_decomposition(d: Decomposition) -> DensityOp:
    """``sum_j w_j |b_j><b_j| (x) |j><j|`` on ``A B C`` with ``dim C`` = number of terms."""
    if not d.vectors:
        raise InputError("empty decomposition")
    m = len(d.vectors)
    dim = d.vectors[0].dim
    out = np.zeros((dim * m, dim * m), dtype=np.complex128)
    big = out.reshape(dim, m, dim, m)
    for j, (w, v) in enumerate(zip(d.weights, d.vectors)):
        big[:, j, :, j] = w * np.outer(v.amplitudes, v.amplitudes.conj())
    return DensityOp(out, tuple(d.dims) + (m,))


# ---------------------------------------------------------------------------
# expansion chain


def _interval(lo, hi):
    return (int(lo), int(hi))


def _ge(x, y) -> bool:
    """``x >= y`` is not refuted (some values in the intervals satisfy it)."""
    return x[1] >= y[0]


def _equal_status(x, y) -> str:
    if x[0] == x[1] == y[0] == y[1]:
        return "holds"
    if x[1] < y[0] or y[1] < x[0]:
        return "fails"
    return "undecided"


@dataclass(frozen=True, eq=False)
class ExpansionChainReport:
    members: dict
    inequalities_ok: tuple
    equalities: tuple
    ppt: bool
    iv_consistent: bool | None

    @property
    def ok(self) -> bool:
        return all(self.inequalities_ok) and self.iv_consistent is not False

    def as_dict(self):
        return {
            "members": {k: list(v) for k, v in self.members.items()},
            "inequalities_ok": list(self.inequalities_ok),
            "equalities": list(self.equalities),
            "ppt": self.ppt,
            "iv_consistent": self.iv_consistent,
        }


def expansion_chain_check(rho, budget: Budget | None = None, sn: SnBound | None = None) -> ExpansionChainReport:
    """Evaluate ``min{sn*rank, rA*rB} >= TR(purification) >= max{rank, rA, rB} >= sn``."""
    budget = budget or Budget()
    if isinstance(rho, PureState):
        rho = rho.to_density()
    if len(rho.dims) != 2:
        raise InputError("expansion chain needs a bipartite state")
    sn = sn or sn_bounds(rho, budget=budget)
    r = hermitian_rank(rho.matrix)
    ra, rb = local_ranks(rho)
    c1 = _interval(min(sn.lo * r, ra * rb), min(sn.hi * r, ra * rb))
    tr = tensor_rank_bounds(purify(rho), budget)
    c2 = _interval(tr.lo, tr.hi)
    c3 = _interval(max(r, ra, rb), max(r, ra, rb))
    c4 = _interval(sn.lo, sn.hi)
    ineq = (_ge(c1, c2), _ge(c2, c3), _ge(c3, c4))
    eqs = (_equal_status(c1, c2), _equal_status(c2, c3), _equal_status(c3, c4))
    is_ppt = ppt_check(rho).is_ppt
    iv = None
    if is_ppt:
        first_two = "holds" if eqs[0] == eqs[1] == "holds" else ("fails" if "fails" in eqs[:2] else "undecided")
        if sn.hi == 1:
            cond = "holds"
        elif ra * rb == r:
            cond = "holds"
        elif sn.lo > 1:
            cond = "fails"
        else:
            cond = "undecided"
        if "undecided" not in (first_two, cond):
            iv = first_two == cond
    members = {"sn_times_rank_vs_local": c1, "tensor_rank_purification": c2, "max_rank": c3, "sn": c4}
    return ExpansionChainReport(members, ineq, eqs, is_ppt, iv)


# ---------------------------------------------------------------------------
# product of CES factors, multipartite PPT


def product_ces_lower_bound(factors, certificates) -> int:
    """``n + 1`` for the regrouped product of ``n`` states whose ranges hold no product vector.

    Every factor needs a CES certificate that re-verifies against it.
    """
    factors = list(factors)
    certificates = list(certificates)
    if len(factors) != len(certificates) or not factors:
        raise PreconditionError("one certificate per factor is required")
    for f, c in zip(factors, certificates):
        if c is None or not ces.verify_ces_certificate(f.matrix, c):
            raise PreconditionError("factor lacks a verified CES certificate")
    return len(factors) + 1


def bipartitions(n: int):
    """All ``2^(n-1) - 1`` cuts, each with party 0 on the left."""
    out = []
    for size in range(1, n):
        for left in combinations(range(n), size):
            if 0 in left:
                out.append(Bipartition.of(n, left))
    return out


def multipartite_ppt_check(rho):
    """PPT verdict for every bipartition; returns ``(verdicts, all_ppt)``."""
    if isinstance(rho, PureState):
        rho = rho.to_density()
    n = len(rho.dims)
    if n < 2:
        raise InputError("need at least two parties")
    verdicts: dict[Bipartition, PptVerdict] = {cut: ppt_check(rho, cut) for cut in bipartitions(n)}
    return verdicts, all(v.is_ppt for v in verdicts.values())


def marginal(rho, keep):
    return partial_trace(rho, keep)
