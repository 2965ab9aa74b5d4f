"""Partial transpose, PPT verdicts, birank, the reduction criterion and the
low-dimensional separability shortcut."""

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .tensor_core import (
    TOL_PSD,
    TOL_RANK,
    Bipartition,
    DensityOp,
    Operator,
    PureState,
    as_bipartite,
    default_cut,
    hermitian_rank,
    local_ranks,
    partial_trace,
    partial_transpose_matrix,
)


@dataclass(frozen=True)
class BiRank:
    rank_rho: int
    rank_gamma: int


@dataclass(frozen=True)
class PptVerdict:
    is_ppt: bool
    min_eig_gamma: float
    tolerance: float


def _density(rho) -> DensityOp:
    return rho.to_density() if isinstance(rho, PureState) else rho


def partial_transpose(rho, parties) -> Operator:
    """Transpose the given subsystems.  The result is Hermitian but may be indefinite."""
    rho = _density(rho)
    return Operator(partial_transpose_matrix(rho.matrix, rho.dims, parties), rho.dims)


def gamma(rho, cut: Bipartition | None = None) -> Operator:
    """Partial transpose on the left side of ``cut`` (party 0 by default)."""
    rho = _density(rho)
    cut = cut or default_cut(rho.dims)
    return partial_transpose(rho, sorted(cut.left))


def ppt_check(rho, cut: Bipartition | None = None, tol_psd: float = TOL_PSD) -> PptVerdict:
    g = gamma(rho, cut)
    lo = float(g.eigvalsh()[0])
    tol = tol_psd * g.trace
    return PptVerdict(lo >= -tol, lo, tol)


def birank(rho, cut: Bipartition | None = None, tol_rank: float = TOL_RANK) -> BiRank:
    rho = _density(rho)
    return BiRank(hermitian_rank(rho.matrix, tol_rank), hermitian_rank(gamma(rho, cut).matrix, tol_rank))


def reduction_check(rho, cut: Bipartition | None = None):
    """Smallest eigenvalues of ``I_A (x) rho_B - rho`` and ``rho_A (x) I_B - rho``.

    A negative entry means the reduction criterion is violated, which
    certifies entanglement.
    """
    rb = as_bipartite(_density(rho), cut)
    m, n = rb.dims
    ra = partial_trace(rb, [0]).matrix
    rbb = partial_trace(rb, [1]).matrix
    la = np.kron(np.eye(m), rbb) - rb.matrix
    lb = np.kron(ra, np.eye(n)) - rb.matrix
    return float(np.linalg.eigvalsh(la)[0]), float(np.linalg.eigvalsh(lb)[0])


def violates_reduction(rho, cut: Bipartition | None = None, tol_psd: float = TOL_PSD) -> bool:
    a, b = reduction_check(rho, cut)
    tr = _density(rho).trace
    return min(a, b) < -tol_psd * tr


def lowdim_separability(rho, cut: Bipartition | None = None, tol_psd: float = TOL_PSD,
                        tol_rank: float = TOL_RANK) -> str:
    """``'separable'``, ``'entangled'`` or ``'undecided'``.

    PPT decides separability when the *local ranks* are 2 x 2 or 2 x 3
    (a local rank of 1 means a product state).
    """
    rho = _density(rho)
    ra, rb = local_ranks(rho, cut, tol_rank)
    if min(ra, rb) == 1:
        return "separable"
    verdict = ppt_check(rho, cut, tol_psd)
    if not verdict.is_ppt:
        return "entangled"
    if ra * rb in (4, 6):
        return "separable"
    return "undecided"


def tensor_npt_check(rho1: DensityOp, rho2: DensityOp, tol_psd: float = TOL_PSD) -> bool:
    """True iff the regrouped product ``rho1 (x) rho2`` is NPT across ``A1A2 : B1B2``.

    Restricted to local dimensions in {2, 3} with ``m + n < 6`` per factor.
    The direct eigenvalue computation is cross-checked against the pairwise
    products of the factors' partial-transpose spectra.
    """
    from .states import regrouped_product

    for r in (rho1, rho2):
        if len(r.dims) != 2 or any(d not in (2, 3) for d in r.dims) or sum(r.dims) >= 6:
            raise InputError(f"factor dims {r.dims} outside the 2x2 / 2x3 regime")
    composite = regrouped_product([rho1, rho2])
    direct = not ppt_check(composite, tol_psd=tol_psd).is_ppt
    e1 = gamma(rho1).eigvalsh()
    e2 = gamma(rho2).eigvalsh()
    prods = np.outer(e1, e2).ravel()
    predicted = prods.min() < -tol_psd * rho1.trace * rho2.trace
    if direct != predicted:
        raise AssertionError("partial-transpose spectrum does not factor over the tensor product")
    return direct
