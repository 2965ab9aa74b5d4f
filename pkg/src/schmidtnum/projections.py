"""Local projections and the bounds relating ``sn(rho)`` to ``sn(sigma)``.

For ``sigma = (P (x) I) rho (P^dag (x) I)`` with ``dim ker P = k`` on an
``M``-dimensional side::

    max{1, sn(rho) - k} <= sn(sigma) <= min{sn(rho), M - k}

All checks use interval semantics: an inequality is reported violated only
when no choice of values inside the certified intervals satisfies it.
"""

from dataclasses import dataclass, field

import numpy as np

from .certify import Budget, SnBound, sn_bounds, tensor_product_bounds
from .errors import InputError
from .tensor_core import (
    DensityOp,
    PureState,
    as_bipartite,
    local_ranks,
    numerical_rank,
    random_unitary,
    schmidt_rank,
)
from .states import regrouped_product

SIDES = ("A", "B")


@dataclass(frozen=True, eq=False)
class LocalProjector:
    """An operator on one party, square (``M x M``) or rectangular (``M' x M``)."""

    matrix: np.ndarray
    rank: int = field(init=False)
    kernel_dim: int = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2:
            raise InputError("projector must be a matrix")
        object.__setattr__(self, "matrix", m)
        r = numerical_rank(m)
        object.__setattr__(self, "rank", r)
        object.__setattr__(self, "kernel_dim", m.shape[1] - r)

    @property
    def in_dim(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def identity(cls, m: int) -> "LocalProjector":
        return cls(np.eye(m))

    @classmethod
    def basis(cls, m: int, keep) -> "LocalProjector":
        p = np.zeros((m, m))
        for i in keep:
            p[i, i] = 1.0
        return cls(p)

    @classmethod
    def haar(cls, m: int, k: int, rng: np.random.Generator, compressed: bool = False) -> "LocalProjector":
        """Projector onto the span of the first ``m - k`` columns of a Haar unitary.

        ``compressed=True`` returns the ``(m-k) x m`` co-isometry instead,
        which gives a locally equivalent (same Schmidt number) smaller state.
        """
        if not 0 <= k < m:
            raise InputError(f"kernel dimension {k} outside [0, {m - 1}]")
        q = random_unitary(m, rng)[:, : m - k]
        return cls(q.conj().T if compressed else q @ q.conj().T)


@dataclass(frozen=True, eq=False)
class ProjBoundReport:
    k: int
    M: int
    side: str
    sn_rho: SnBound
    sn_sigma: SnBound | None
    lower_ok: bool
    upper_ok: bool
    degenerate: bool = False
    exact_iii: bool | None = None

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok and self.exact_iii is not False

    def as_dict(self):
        return {
            "k": self.k,
            "M": self.M,
            "side": self.side,
            "sn_rho": [self.sn_rho.lo, self.sn_rho.hi],
            "sn_sigma": None if self.sn_sigma is None else [self.sn_sigma.lo, self.sn_sigma.hi],
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "degenerate": self.degenerate,
            "exact_iii": self.exact_iii,
        }


def _side_index(side: str) -> int:
    if side not in SIDES:
        raise InputError(f"side must be 'A' or 'B', got {side!r}")
    return SIDES.index(side)


def apply_local(rho, p: LocalProjector, side: str = "A"):
    """``(P (x) I) rho (P^dag (x) I)`` (or ``I (x) P`` for side B).

    Pure input gives a pure output.  Returns ``None`` when the result is
    zero (the degenerate case).
    """
    s = _side_index(side)
    rho = as_bipartite(rho)
    dims = rho.dims
    if p.in_dim != dims[s]:
        raise InputError(f"projector acts on dimension {p.in_dim}, side {side} has {dims[s]}")
    out_dim = p.matrix.shape[0]
    new_dims = (out_dim, dims[1]) if s == 0 else (dims[0], out_dim)
    op = np.kron(p.matrix, np.eye(dims[1])) if s == 0 else np.kron(np.eye(dims[0]), p.matrix)
    if isinstance(rho, PureState):
        v = op @ rho.amplitudes
        if np.linalg.norm(v) <= 1e-13 * max(rho.norm, 1e-300):
            return None
        return PureState(v, new_dims)
    m = op @ rho.matrix @ op.conj().T
    if np.real(np.trace(m)) <= 1e-13 * rho.trace:
        return None
    return DensityOp(m, new_dims)


def lower_violated(rho_b: SnBound, sigma_b: SnBound, k: int) -> bool:
    return max(1, rho_b.lo - k) > sigma_b.hi


def upper_violated(rho_b: SnBound, sigma_b: SnBound, m: int, k: int) -> bool:
    return sigma_b.lo > min(rho_b.hi, m - k)


def check_proj_bounds(rho, p: LocalProjector, side: str = "A", budget: Budget | None = None,
                      rho_bounds: SnBound | None = None) -> ProjBoundReport:
    """Evaluate both projection inequalities for one projector."""
    budget = budget or Budget()
    s = _side_index(side)
    rho = as_bipartite(rho)
    m = rho.dims[s]
    k = p.kernel_dim
    rb = rho_bounds or sn_bounds(rho, budget=budget)
    sigma = apply_local(rho, p, side)
    if sigma is None:
        return ProjBoundReport(k, m, side, rb, None, True, True, degenerate=True)
    sb = sn_bounds(sigma, budget=budget)
    exact = None
    if isinstance(rho, PureState) and rb.lo == rb.hi == m:
        exact = sb.lo == sb.hi == m - k
    return ProjBoundReport(k, m, side, rb, sb, not lower_violated(rb, sb, k),
                           not upper_violated(rb, sb, m, k), False, exact)


@dataclass(frozen=True, eq=False)
class SnMinMaxEstimate:
    k: int
    side: str
    max_est: SnBound
    min_est: SnBound
    samples: tuple
    sandwich_ok: bool

    def as_dict(self):
        return {
            "k": self.k,
            "side": self.side,
            "max_est": [self.max_est.lo, self.max_est.hi],
            "min_est": [self.min_est.lo, self.min_est.hi],
            "samples": [list(x) for x in self.samples],
            "sandwich_ok": self.sandwich_ok,
        }


def _sample_bounds(rho, k, samples, seed, side, budget, extra=()):
    s = _side_index(side)
    m = rho.dims[s]
    out = []
    projs = list(extra)
    for i in range(samples):
        projs.append(LocalProjector.haar(m, k, np.random.default_rng([seed, k, s, i]), compressed=True))
    for p in projs:
        sigma = apply_local(rho, p, side)
        if sigma is None:
            continue
        out.append(sn_bounds(sigma, budget=budget))
    return out


def snminmax_estimate(rho, k: int, samples: int = 20, seed: int = 0, side: str = "A",
                      budget: Budget | None = None, rho_bounds: SnBound | None = None) -> SnMinMaxEstimate:
    """One-sided estimates of the max and min of ``sn(sigma)`` over rank ``M-k`` projectors.

    ``max_est.lo`` is a sound lower bound on the maximum (it is achieved);
    ``min_est.hi`` is a sound upper bound on the minimum.
    """
    budget = budget or Budget()
    rho = as_bipartite(rho)
    s = _side_index(side)
    m = rho.dims[s]
    if not 1 <= k <= m - 1:
        raise InputError(f"k={k} outside [1, {m - 1}]")
    rb = rho_bounds or sn_bounds(rho, budget=budget)
    got = _sample_bounds(rho, k, samples, seed, side, budget)
    if not got:
        raise InputError("every sampled projection annihilated the state")
    cap = min(rb.hi, m - k)
    max_lo = min(max(b.lo for b in got), cap)
    max_est = SnBound(max_lo, cap, "construction", "local-rank")
    min_hi = min(b.hi for b in got)
    min_lo = min(max(1, rb.lo - k), min_hi)
    sandwich = max(1, rb.lo - k) <= min_hi
    min_est = SnBound(min_lo, min_hi, "construction", "construction")
    return SnMinMaxEstimate(k, side, max_est, min_est, tuple((b.lo, b.hi) for b in got), sandwich)


@dataclass(frozen=True, eq=False)
class RankSweep:
    achieved: dict  # side -> list over k of sorted exact values
    bounds: dict  # side -> list over k of [(lo, hi), ...]
    union: dict
    covers: bool
    sets_agree: bool

    def as_dict(self):
        return {
            "achieved": {s: [list(v) for v in vals] for s, vals in self.achieved.items()},
            "union": {s: sorted(v) for s, v in self.union.items()},
            "covers": self.covers,
            "sets_agree": self.sets_agree,
        }


def rank_sweep(rho, samples: int = 6, seed: int = 0, budget: Budget | None = None,
               basis_projectors: bool = True, rho_bounds: SnBound | None = None) -> RankSweep:
    """Collect Schmidt numbers achieved by projections for every kernel dimension.

    Projectors are Haar samples plus, optionally, every coordinate projector.
    Only exact intervals count as achieved values.
    """
    from itertools import combinations

    budget = budget or Budget()
    rho = as_bipartite(rho)
    rb = rho_bounds or sn_bounds(rho, budget=budget)
    achieved, bounds, union = {}, {}, {}
    for side in SIDES:
        s = SIDES.index(side)
        m = rho.dims[s]
        per_k, per_b = [], []
        for k in range(m):
            if k == 0:
                got = [rb]
            else:
                extra = []
                if basis_projectors:
                    extra = [LocalProjector.basis(m, keep) for keep in combinations(range(m), m - k)]
                got = _sample_bounds(rho, k, samples, seed, side, budget, extra)
            per_b.append([(b.lo, b.hi) for b in got])
            per_k.append(sorted({b.lo for b in got if b.lo == b.hi}))
        achieved[side] = per_k
        bounds[side] = per_b
        union[side] = set().union(*map(set, per_k))
    need = set(range(1, rb.lo + 1))
    covers = need <= union["A"] and need <= union["B"]
    agree = union["A"] == union["B"]
    return RankSweep(achieved, bounds, union, covers, agree)


@dataclass(frozen=True, eq=False)
class TwoCopyReport:
    k: int
    M: int
    sn_sigma: SnBound
    sn_sigma2: SnBound
    sn_rho2: SnBound
    first_ok: bool
    second_ok: bool

    @property
    def ok(self) -> bool:
        return self.first_ok and self.second_ok

    def as_dict(self):
        return {
            "k": self.k,
            "M": self.M,
            "sn_sigma": [self.sn_sigma.lo, self.sn_sigma.hi],
            "sn_sigma2": [self.sn_sigma2.lo, self.sn_sigma2.hi],
            "sn_rho2": [self.sn_rho2.lo, self.sn_rho2.hi],
            "first_ok": self.first_ok,
            "second_ok": self.second_ok,
        }


def two_copy_bounds(state, bounds: SnBound, budget: Budget, all_ces: bool = False) -> SnBound:
    """Bounds for the regrouped ``state^{(x)2}``.

    Exact for pure states; otherwise the product rule from the single-copy
    bounds, tightened by a direct computation when the two-copy state is small.
    """
    if isinstance(state, PureState):
        s = schmidt_rank(state.amplitudes, *state.dims)
        return SnBound(s * s, s * s, "pure-rank", "pure-rank")
    two = regrouped_product([state, state])
    lr = min(local_ranks(two))
    prod_b = tensor_product_bounds([bounds, bounds], lr, all_ces)
    if two.dims[0] * two.dims[1] <= budget.max_search_dim:
        direct = sn_bounds(two, budget=budget)
        lo = max(prod_b.lo, direct.lo)
        hi = min(prod_b.hi, direct.hi)
        cert_lo = direct.lo_certificate if direct.lo >= prod_b.lo else prod_b.lo_certificate
        cert_hi = direct.hi_certificate if direct.hi <= prod_b.hi else prod_b.hi_certificate
        return SnBound(lo, hi, cert_lo, cert_hi, lo < hi)
    return prod_b


def two_copy_bound_check(rho, p: LocalProjector, side: str = "A", budget: Budget | None = None,
                         rho_bounds: SnBound | None = None, all_ces: bool = False) -> TwoCopyReport:
    """Check ``sn(sigma^2) <= min{sn(rho^2), (M-k)^2}`` and ``sn(rho^2) <= (sn(sigma) + k)^2``."""
    budget = budget or Budget()
    s = _side_index(side)
    rho = as_bipartite(rho)
    m = rho.dims[s]
    k = p.kernel_dim
    sigma = apply_local(rho, p, side)
    if sigma is None:
        raise InputError("projection annihilates the state")
    rb = rho_bounds or sn_bounds(rho, budget=budget)
    sb = sn_bounds(sigma, budget=budget)
    s2 = two_copy_bounds(sigma, sb, budget)
    r2 = two_copy_bounds(rho, rb, budget, all_ces)
    first = not (s2.lo > min(r2.hi, (m - k) ** 2))
    second = not (r2.lo > (sb.hi + k) ** 2)
    return TwoCopyReport(k, m, sb, s2, r2, first, second)
