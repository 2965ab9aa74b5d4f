"""Witness-based lower bounds on the Schmidt number.

* :func:`choi_matrix` assembles ``C = sum_ij |i><j| (x) phi(|i><j|)``.
* :func:`pairing` evaluates ``tr(rho C^T)``; a negative value fires the witness.
  For the Choi matrix of a k-positive map it certifies ``sn >= k + 1``.
* :func:`max_entangled_overlap` is a see-saw ascent for
  ``max_U <Psi_U| rho |Psi_U>`` with ``|Psi_U> = (U (x) I)|Phi_M>``; any value
  above ``k / N`` certifies ``sn > k``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InputError, PreconditionError
from .tensor_core import DensityOp, Operator, PureState, random_unitary

INF = math.inf


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    matrix: np.ndarray
    in_dim: int
    out_dim: int
    #: the map is k-positive for this k; ``math.inf`` means completely positive
    k_positive: float = 1
    name: str = "custom"


@dataclass(frozen=True, eq=False)
class OverlapResult:
    value: float
    optimizer_unitary: np.ndarray
    iterations: int
    restarts: int
    converged: bool
    history: tuple = field(default=(), repr=False)


def choi_matrix(phi, m: int, k_positive: float = 1, name: str = "custom") -> ChoiMatrix:
    """Choi matrix of a linear map given as a callable on ``m x m`` matrices."""
    blocks = {}
    out = None
    for i in range(m):
        for j in range(m):
            e = np.zeros((m, m), dtype=np.complex128)
            e[i, j] = 1.0
            img = np.asarray(phi(e), dtype=np.complex128)
            if img.ndim != 2 or img.shape[0] != img.shape[1]:
                raise InputError("map must return square matrices")
            if out is None:
                out = img.shape[0]
            elif img.shape[0] != out:
                raise InputError("map output dimension varies across matrix units")
            blocks[i, j] = img
    c = np.zeros((m * out, m * out), dtype=np.complex128)
    for (i, j), img in blocks.items():
        c[i * out:(i + 1) * out, j * out:(j + 1) * out] = img
    return ChoiMatrix(c, m, out, k_positive, name)


def identity_choi(m: int) -> ChoiMatrix:
    return choi_matrix(lambda x: x, m, INF, "identity")


def transpose_choi(m: int) -> ChoiMatrix:
    return choi_matrix(lambda x: x.T, m, 1, "transpose")


def reduction_choi(m: int, p: int = 1) -> ChoiMatrix:
    """Choi matrix of ``X -> p tr(X) I - X``, a p-positive map.

    ``p = 1`` is the reduction map; its Choi matrix is ``I - |Phi><Phi|`` with
    the unnormalized ``|Phi> = sum_i |ii>``.
    """
    if not 1 <= p < m:
        raise InputError(f"need 1 <= p < m, got p={p}, m={m}")
    name = "reduction" if p == 1 else f"reduction[{p}]"
    return choi_matrix(lambda x: p * np.trace(x) * np.eye(m) - x, m, p, name)


def pairing(rho, c: ChoiMatrix) -> float:
    """``tr(rho C^T)``."""
    mat = rho.matrix if isinstance(rho, Operator) else np.asarray(rho)
    if mat.shape != c.matrix.shape:
        raise InputError(f"dimension mismatch: state {mat.shape} vs Choi {c.matrix.shape}")
    return float(np.real(np.sum(mat * c.matrix)))  # tr(A B^T) = sum_ij A_ij B_ij


def witness_lower_bound(rho, c: ChoiMatrix, tol: float = 1e-12) -> int:
    """``k + 1`` if the k-positive witness fires on ``rho``, else 1."""
    if math.isinf(c.k_positive):
        return 1
    val = pairing(rho, c)
    scale = rho.trace if isinstance(rho, Operator) else 1.0
    return int(c.k_positive) + 1 if val < -tol * scale else 1


def perturbation_margin(rho, sigma, c: ChoiMatrix) -> float:
    """Largest ``eps*`` with ``pairing(rho + eps sigma, C) < 0`` for every ``eps < eps*``.

    The pairing is linear, so ``eps* = -pairing(rho)/pairing(sigma)`` when
    ``pairing(sigma) > 0`` and infinity otherwise.
    """
    a = pairing(rho, c)
    if a >= 0:
        raise PreconditionError(f"witness does not fire on rho (pairing {a:.3e} >= 0)")
    b = pairing(sigma, c)
    if b <= 0:
        return INF
    return -a / b


# ---------------------------------------------------------------------------
# see-saw over maximally entangled states


def _polar_unitary(g: np.ndarray) -> np.ndarray:
    u, s, vh = np.linalg.svd(g)
    return u @ vh


def overlap_of_unitary(rho_n: np.ndarray, u: np.ndarray) -> float:
    m = u.shape[0]
    v = u.ravel() / np.sqrt(m)
    return float(np.real(np.vdot(v, rho_n @ v)))


def _seesaw_run(rho_n, u, max_iters, patience=10, gain_tol=1e-12):
    m = u.shape[0]
    val = overlap_of_unitary(rho_n, u)
    hist = [val]
    quiet = 0
    it = 0
    for it in range(1, max_iters + 1):
        g = (rho_n @ u.ravel()).reshape(m, m) / m
        u_new = _polar_unitary(g)
        new = overlap_of_unitary(rho_n, u_new)
        # the convex objective cannot drop below its linearization
        if new < val - 1e-13:
            raise AssertionError(f"see-saw objective decreased: {val} -> {new}")
        gain = new - val
        u, val = u_new, max(new, val)
        hist.append(val)
        quiet = quiet + 1 if gain < gain_tol else 0
        if quiet >= patience:
            return u, val, it, True, hist
    return u, val, it, False, hist


def max_entangled_overlap(rho, restarts: int = 32, max_iters: int = 500, seed: int = 0) -> OverlapResult:
    """Best ``<Psi_U| rho/tr(rho) |Psi_U>`` found by polar-factor ascent.

    Restart 0 starts from ``U = I``; the others from Haar-random unitaries
    seeded by ``(seed, restart)``.  The value is a lower bound on the true
    maximum.
    """
    if isinstance(rho, PureState):
        rho = rho.to_density()
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1]:
        raise InputError(f"need equal local dimensions, got {rho.dims}")
    m = rho.dims[0]
    rho_n = np.asarray(rho.matrix) / rho.trace
    best = None
    total_iters = 0
    for r in range(max(1, restarts)):
        if r == 0:
            u0 = np.eye(m, dtype=np.complex128)
        else:
            u0 = random_unitary(m, np.random.default_rng([seed, r]))
        u, val, it, conv, hist = _seesaw_run(rho_n, u0, max_iters)
        total_iters += it
        if best is None or val > best[1]:
            best = (u, val, conv, hist)
    u, val, conv, hist = best
    return OverlapResult(overlap_of_unitary(rho_n, u), u, total_iters, max(1, restarts), conv, tuple(hist))


def sn_lower_from_overlap(value: float, n: int, tol: float = 1e-9) -> int:
    """``1 + max{k >= 0 : value > k/n + tol}``, clamped to ``[1, n]``."""
    k = math.floor((value - tol) * n)
    # floor hits equality; step back so the inequality is strict
    while k >= 0 and not value > k / n + tol:
        k -= 1
    return int(min(max(k + 1, 1), n))


def maximally_entangled_state(u: np.ndarray) -> PureState:
    m = u.shape[0]
    return PureState(u.ravel() / np.sqrt(m), (m, m))


def th00_bound(rho: DensityOp, restarts: int = 32, max_iters: int = 500, seed: int = 0, tol: float = 1e-9):
    """See-saw value and the Schmidt-number lower bound it certifies."""
    res = max_entangled_overlap(rho, restarts, max_iters, seed)
    return res, sn_lower_from_overlap(res.value, rho.dims[1], tol)
