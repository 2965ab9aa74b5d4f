"""Certified Schmidt-number intervals.

Upper bounds come from explicit decompositions.  Every decomposition of
``rho = sum_i p_i |a_i><a_i|`` has the form ``sqrt(q_j)|b_j> = sum_i V_ij
sqrt(p_i)|a_i>`` for a row-orthonormal ``V``, so searching over ``V`` for
members of Schmidt rank <= k is a search over all decompositions.  The search
alternates between truncating each member to rank k and re-fitting ``V`` as
the polar factor of ``A^dag T``; the squared distance to the rank-k set never
increases.

Lower bounds come only from checkable certificates: a fired witness, the
see-saw overlap bound, or a range with no product vector (certified by a
product basis of the kernel).
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from . import _accel, ces
from .errors import InputError, PreconditionError
from .ppt import gamma, ppt_check, reduction_check
from .tensor_core import (
    TOL_ORTH,
    TOL_PSD,
    TOL_RANK,
    TOL_RECON,
    Bipartition,
    DensityOp,
    PureState,
    as_bipartite,
    hermitian_rank,
    local_ranks,
    numerical_rank,
    schmidt_rank,
    spectral,
)
from .witness import max_entangled_overlap, sn_lower_from_overlap

LO_CERTS = ("none", "witness", "ces", "ppt-corollary", "construction", "pure-rank", "blocks")
HI_CERTS = ("decomposition", "pure-rank", "local-rank", "ppt-corollary", "blocks", "product")


@dataclass(frozen=True)
class Budget:
    restarts: int = 32
    iters: int = 500
    seed: int = 0
    ces_restarts: int = 200
    kernel_restarts: int = 64
    seesaw_restarts: int = 8
    max_search_dim: int = 64
    max_m_factor: int = 8
    tol_cert: float = 1e-12


@dataclass(frozen=True, eq=False)
class MixingIsometry:
    matrix: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.matrix)
        if v.ndim != 2 or v.shape[0] > v.shape[1]:
            raise InputError(f"mixing matrix must be r x m with r <= m, got {v.shape}")
        err = np.linalg.norm(v @ v.conj().T - np.eye(v.shape[0]))
        if err > TOL_ORTH * max(1, v.shape[0]) ** 0.5 * 1e2:
            raise InputError(f"rows are not orthonormal (error {err:.2e})")


@dataclass(frozen=True, eq=False)
class Decomposition:
    """``rho ~ sum_j w_j |b_j><b_j|`` with unit ``b_j`` of Schmidt rank <= k."""

    weights: np.ndarray
    vectors: tuple  # of PureState
    k: int
    target_residual: float
    mixing: MixingIsometry | None = field(default=None, repr=False)

    @property
    def entries(self):
        return list(zip(self.weights.tolist(), self.vectors))

    @property
    def dims(self):
        return self.vectors[0].dims

    def reconstruct(self) -> np.ndarray:
        mat = np.array([v.amplitudes for v in self.vectors])
        return (mat.T * self.weights) @ mat.conj()

    def max_schmidt_rank(self, tol_rank: float = TOL_RANK) -> int:
        dl, dr = self.dims
        return max(schmidt_rank(v.amplitudes, dl, dr, tol_rank) for v in self.vectors)

    def as_dict(self):
        return {
            "k": self.k,
            "residual": self.target_residual,
            "terms": [
                {"weight": float(w), "amplitudes": [[float(z.real), float(z.imag)] for z in v.amplitudes]}
                for w, v in zip(self.weights, self.vectors)
            ],
        }


@dataclass(frozen=True, eq=False)
class SnBound:
    lo: int
    hi: int
    lo_certificate: str = "none"
    hi_certificate: str = "local-rank"
    exhausted: bool = False
    decomposition: Decomposition | None = field(default=None, repr=False)
    ces: object = field(default=None, repr=False)
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise AssertionError(f"unsound interval [{self.lo}, {self.hi}]")

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def as_dict(self):
        out = {
            "lo": self.lo,
            "hi": self.hi,
            "lo_certificate": self.lo_certificate,
            "hi_certificate": self.hi_certificate,
            "exhausted": self.exhausted,
            "evidence": self.evidence,
        }
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.as_dict()
        if self.ces is not None:
            out["ces"] = self.ces.as_dict()
        return out

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True, eq=False)
class BsnBound:
    sn_rho: SnBound
    sn_gamma: SnBound
    consistent: bool = True

    def as_dict(self):
        return {"sn_rho": self.sn_rho.as_dict(), "sn_gamma": self.sn_gamma.as_dict(),
                "consistent": self.consistent}


# ---------------------------------------------------------------------------
# decomposition search


def _polar(g: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(g, full_matrices=False)
    return u @ vh


def _spectral_factor(rho: DensityOp):
    w, v = spectral(rho)
    return v * np.sqrt(w)


def _alternate(a, v, k, dl, dr, iters, tol, polish_tol, stall=60):
    """Alternating projection from ``v``; returns ``(v, members, tail)``.

    Once the tail drops below ``tol`` the iteration keeps going (up to four
    times the budget) until it reaches ``polish_tol`` so the truncated members
    reconstruct the target tightly.
    """
    m = v.shape[1]
    best = math.inf
    since = 0
    t = None
    f = math.inf
    it = 0
    cap = iters
    while it < cap:
        it += 1
        b = np.ascontiguousarray((a @ v).T.reshape(m, dl, dr))
        t, tails = _accel.truncate_batch(b, k)
        f = float(tails.sum())
        if f < polish_tol:
            break
        if f < tol:
            cap = 5 * iters
        if f < best * (1 - 1e-6):
            best, since = f, 0
        else:
            since += 1
            if since >= stall:
                break
        v = _polar(a.conj().T @ t.reshape(m, -1).T)
    return v, t, f


def _to_decomposition(rho, t, k, v, tol_rank=TOL_RANK):
    dl, dr = rho.dims
    vecs = t.reshape(t.shape[0], -1)
    norms = np.linalg.norm(vecs, axis=1)
    keep = norms > 1e-14 * max(norms.max(), 1e-300)
    vecs, norms = vecs[keep], norms[keep]
    states = tuple(PureState(x / n, (dl, dr)) for x, n in zip(vecs, norms))
    weights = norms ** 2
    rec = (vecs.T) @ vecs.conj()
    resid = float(np.linalg.norm(rec - rho.matrix))
    return Decomposition(weights, states, k, resid, MixingIsometry(v))


def verify_decomposition(rho: DensityOp, d: Decomposition, k: int | None = None,
                         tol_recon: float = TOL_RECON) -> bool:
    """Independent check: reconstruction within tolerance and member ranks <= k."""
    k = d.k if k is None else k
    if np.any(d.weights <= 0):
        return False
    err = np.linalg.norm(d.reconstruct() - rho.matrix)
    if err > tol_recon * rho.trace:
        return False
    return d.max_schmidt_rank() <= k


def decomposition_search(rho: DensityOp, k: int, m: int | None = None, restarts: int = 32,
                         iters: int = 500, seed: int = 0, tol_cert: float = 1e-12,
                         max_m_factor: int = 8) -> Decomposition | None:
    """Search for a decomposition of ``rho`` into pure states of Schmidt rank <= k.

    Returns a verified :class:`Decomposition` or ``None``.  ``None`` carries
    no information about lower bounds.
    """
    if isinstance(rho, PureState):
        rho = rho.to_density()
    if len(rho.dims) != 2:
        raise InputError("decomposition_search needs a bipartite state; regroup it first")
    dl, dr = rho.dims
    if not 1 <= k <= min(dl, dr):
        raise InputError(f"k={k} outside [1, {min(dl, dr)}]")
    a = _spectral_factor(rho)
    r = a.shape[1]
    tol = tol_cert * rho.trace ** 2
    m0 = m if m is not None else r * (k + 1)
    if m0 < r:
        raise InputError(f"m={m0} is smaller than rank {r}")
    sizes = [m0]
    if m is None:
        while sizes[-1] * 2 <= max_m_factor * r:
            sizes.append(sizes[-1] * 2)
    for level, mm in enumerate(sizes):
        for idx in range(restarts):
            rng = np.random.default_rng([seed, level, idx])
            g = rng.normal(size=(r, mm)) + 1j * rng.normal(size=(r, mm))
            v, t, f = _alternate(a, _polar(g), k, dl, dr, iters, tol, 1e-26 * rho.trace ** 2)
            if f < tol:
                d = _to_decomposition(rho, t, k, v)
                if verify_decomposition(rho, d, k):
                    return d
    return None


def min_schmidt_in_range(rho, l: int = 1, restarts: int = 200, iters: int = 500, seed: int = 0,
                         dims=None, tol_cert: float = 1e-12):
    """Unit vector of Schmidt rank <= l in the range of ``rho`` (or in a given basis).

    ``rho`` may be a density operator or an orthonormal basis matrix with
    ``dims`` given.
    """
    if isinstance(rho, PureState):
        rho = rho.to_density()
    if isinstance(rho, DensityOp):
        if len(rho.dims) != 2:
            raise InputError("needs a bipartite state")
        basis, _ = ces.range_kernel(rho.matrix)
        dl, dr = rho.dims
    else:
        basis = np.asarray(rho)
        dl, dr = dims
    return ces.min_schmidt_in_range(basis, dl, dr, l, restarts, iters, seed, tol_cert)


# ---------------------------------------------------------------------------
# structure: support restriction and direct-sum blocks


def restrict_to_support(rho: DensityOp, tol: float = TOL_RANK):
    """Drop computational-basis indices on either side that carry no weight."""
    dl, dr = rho.dims
    t = rho.matrix.reshape(dl, dr, dl, dr)
    diag = np.real(np.einsum("abab->ab", t))
    scale = diag.max()
    a_idx = np.flatnonzero(diag.sum(axis=1) > tol * scale)
    b_idx = np.flatnonzero(diag.sum(axis=0) > tol * scale)
    sub = t[np.ix_(a_idx, b_idx, a_idx, b_idx)].reshape(len(a_idx) * len(b_idx), -1)
    return DensityOp(sub, (len(a_idx), len(b_idx))), a_idx, b_idx


def _components(adj: np.ndarray):
    n = adj.shape[0]
    seen = np.zeros(n, bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(adj[i] & ~seen):
                seen[j] = True
                stack.append(j)
        comps.append(sorted(comp))
    return comps


def direct_sum_blocks(rho: DensityOp, tol: float = 1e-12):
    """Split ``rho`` into blocks with orthogonal supports in the computational basis.

    Returns a list of bipartite :class:`DensityOp`.  Splitting on B uses the
    connectivity of B indices through nonzero matrix entries (and likewise
    for A); the split is applied recursively.  The Schmidt number of the whole
    is the maximum over blocks.
    """
    rho, _, _ = restrict_to_support(rho)
    dl, dr = rho.dims
    t = np.abs(rho.matrix.reshape(dl, dr, dl, dr)) > tol * np.abs(rho.matrix).max()
    for side in (1, 0):
        adj = t.any(axis=(0, 2)) if side == 1 else t.any(axis=(1, 3))
        comps = _components(adj)
        if len(comps) > 1:
            blocks = []
            for c in comps:
                if side == 1:
                    sub = rho.matrix.reshape(dl, dr, dl, dr)[:, c][:, :, :, c]
                    sub = DensityOp(sub.reshape(dl * len(c), -1), (dl, len(c)))
                else:
                    sub = rho.matrix.reshape(dl, dr, dl, dr)[c][:, :, c]
                    sub = DensityOp(sub.reshape(len(c) * dr, -1), (len(c), dr))
                blocks.extend(direct_sum_blocks(sub, tol))
            return blocks
    return [rho]


# ---------------------------------------------------------------------------
# bounds


def _embed_square(rho: DensityOp) -> DensityOp:
    dl, dr = rho.dims
    n = max(dl, dr)
    if dl == dr:
        return rho
    t = np.zeros((n, n, n, n), dtype=np.complex128)
    t[:dl, :dr, :dl, :dr] = rho.matrix.reshape(dl, dr, dl, dr)
    return DensityOp(t.reshape(n * n, n * n), (n, n))


def _pure_bound(rho: DensityOp) -> SnBound:
    w, v = spectral(rho)
    dl, dr = rho.dims
    s = schmidt_rank(v[:, 0], dl, dr)
    d = Decomposition(np.array([w[0]]), (PureState(v[:, 0], (dl, dr)),), s, 0.0)
    return SnBound(s, s, "pure-rank", "pure-rank", decomposition=d, evidence={"pure": True})


def _block_bound(rho: DensityOp, budget: Budget, members=None) -> SnBound:
    dl, dr = rho.dims
    ev = {"dims": [dl, dr]}
    if hermitian_rank(rho.matrix) == 1:
        return _pure_bound(rho)
    ra, rb = local_ranks(rho)
    ev["local_ranks"] = [ra, rb]
    hi, hi_cert = min(ra, rb), "local-rank"
    lo, lo_cert = 1, "none"
    verdict = ppt_check(rho)
    ev["min_eig_gamma"] = verdict.min_eig_gamma
    tr = rho.trace
    if not verdict.is_ppt:
        lo, lo_cert = 2, "witness"
        ev["witness"] = "transpose"
    red = reduction_check(rho)
    ev["reduction_min_eig"] = list(red)
    if min(red) < -TOL_PSD * tr and lo < 2:
        lo, lo_cert = 2, "witness"
        ev["witness"] = "reduction"
    if hi > 2 and budget.seesaw_restarts > 0:
        sq = _embed_square(rho)
        res = max_entangled_overlap(sq, budget.seesaw_restarts, budget.iters, budget.seed)
        s = sn_lower_from_overlap(res.value, sq.dims[1])
        ev["max_entangled_overlap"] = res.value
        if s > lo:
            lo, lo_cert = s, "witness"
            ev["witness"] = "max-entangled-overlap"
    cert = None
    if lo < 2 and verdict.is_ppt:
        rng_basis, _ = ces.range_kernel(rho.matrix)
        search = ces.min_schmidt_in_range(rng_basis, dl, dr, 1, budget.ces_restarts, budget.iters,
                                          budget.seed, budget.tol_cert)
        ev["range_product_search"] = {"found": search.found, "best_tail": search.value}
        if not search.found and dl * dr <= budget.max_search_dim:
            cert = ces.ces_certificate(rho.matrix, (dl, dr), members, budget.kernel_restarts, budget.seed)
            if cert is not None:
                lo, lo_cert = 2, "ces"
    if verdict.is_ppt and ra * rb in (4, 6):
        # Peres-Horodecki regime: PPT decides separability
        hi, hi_cert = 1, "ppt-corollary"
    decomp = None
    exhausted = False
    if dl * dr <= budget.max_search_dim:
        for k in range(lo, hi):
            d = decomposition_search(rho, k, restarts=budget.restarts, iters=budget.iters,
                                     seed=budget.seed, tol_cert=budget.tol_cert,
                                     max_m_factor=budget.max_m_factor)
            if d is not None:
                hi, hi_cert, decomp = k, "decomposition", d
                break
    else:
        exhausted = lo < hi
        ev["search_skipped"] = True
    if verdict.is_ppt and ra == 3 and rb == 3 and hi > 2:
        hi, hi_cert = 2, "ppt-corollary"
    if lo > hi:
        raise AssertionError(f"contradictory certificates: lo={lo} ({lo_cert}) > hi={hi} ({hi_cert})")
    return SnBound(lo, hi, lo_cert, hi_cert, exhausted or lo < hi, decomp, cert, ev)


def sn_bounds(rho, cut: Bipartition | None = None, budget: Budget | None = None,
              members=None) -> SnBound:
    """Certified interval for the Schmidt number across ``cut``.

    ``members``: product vectors known to lie in the kernel (for example the
    members of a UPB), already grouped to the two sides of the cut.
    """
    budget = budget or Budget()
    if isinstance(rho, PureState):
        psi = as_bipartite(rho, cut)
        s = numerical_rank(psi.amplitudes.reshape(psi.dims))
        d = Decomposition(np.array([psi.norm ** 2]), (psi.normalize(),), s, 0.0)
        return SnBound(s, s, "pure-rank", "pure-rank", decomposition=d, evidence={"pure": True})
    rho = as_bipartite(rho, cut)
    blocks = direct_sum_blocks(rho)
    if len(blocks) == 1:
        full, a_idx, b_idx = restrict_to_support(rho)
        mem = None
        if members is not None and len(a_idx) == rho.dims[0] and len(b_idx) == rho.dims[1]:
            mem = members
        return _block_bound(full, budget, mem)
    parts = [_block_bound(b, budget) for b in blocks]
    lo = max(p.lo for p in parts)
    hi = max(p.hi for p in parts)
    ev = {"blocks": [p.as_dict() for p in parts]}
    return SnBound(lo, hi, "blocks", "blocks", any(p.exhausted for p in parts), None, None, ev)


def bsn_bounds(rho: DensityOp, cut: Bipartition | None = None, budget: Budget | None = None,
               members=None) -> BsnBound:
    """Bounds for ``(sn(rho), sn(rho^Gamma))`` of a PPT state.

    If both intervals lie in {1, 2} the two values must agree, so the
    intervals are intersected; an empty intersection is reported as
    inconsistent.
    """
    if isinstance(rho, PureState):
        rho = rho.to_density()
    verdict = ppt_check(rho, cut)
    if not verdict.is_ppt:
        raise PreconditionError(f"bi-Schmidt number needs a PPT state (min eig {verdict.min_eig_gamma:.3e})")
    rb = as_bipartite(rho, cut)
    g = gamma(rb)
    g = DensityOp(g.matrix, g.dims, tol_psd=1e-7)
    a = sn_bounds(rb, budget=budget, members=members)
    gm = ces.conj_party(members, 0) if members is not None else None
    b = sn_bounds(g, budget=budget, members=gm)
    consistent = True
    if a.hi <= 2 and b.hi <= 2:
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        if lo > hi:
            consistent = False
        else:
            a = replace(a, lo=lo, hi=hi)
            b = replace(b, lo=lo, hi=hi)
    return BsnBound(a, b, consistent)


def eof_bound(snb: SnBound) -> float:
    """Entanglement-of-formation upper bound ``log2(hi)`` in ebits."""
    return float(math.log2(snb.hi))


def tensor_product_bounds(bounds, local_rank_hi: int | None = None, all_ces: bool = False) -> SnBound:
    """Bounds for a regrouped tensor product from per-factor bounds.

    ``hi`` multiplies (products of the factor decompositions); ``lo`` is the
    largest factor lower bound, raised to ``n + 1`` when every factor's range
    is certified free of product vectors.
    """
    bounds = list(bounds)
    n = len(bounds)
    hi = math.prod(b.hi for b in bounds)
    hi_cert = "product"
    if local_rank_hi is not None and local_rank_hi < hi:
        hi, hi_cert = local_rank_hi, "local-rank"
    lo, lo_cert = max(b.lo for b in bounds), "blocks"
    if all_ces:
        lo, lo_cert = max(lo, n + 1), "ces"
    lo = min(lo, hi)
    return SnBound(lo, hi, lo_cert, hi_cert, lo < hi, None, None,
                   {"factors": [[b.lo, b.hi] for b in bounds], "all_ces": all_ces})


def reverify(rho, snb: SnBound, cut: Bipartition | None = None) -> bool:
    """Recompute the stored certificates of a bound."""
    if isinstance(rho, PureState):
        return True
    rb = as_bipartite(rho, cut)
    ok = True
    if snb.decomposition is not None and snb.hi_certificate == "decomposition":
        full, _, _ = restrict_to_support(rb)
        ok &= verify_decomposition(full, snb.decomposition)
    if snb.ces is not None:
        full, _, _ = restrict_to_support(rb)
        ok &= ces.verify_ces_certificate(full.matrix, snb.ces)
    return bool(ok)
