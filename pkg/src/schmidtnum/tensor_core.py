"""Dense state types and the linear-algebra substrate.

Conventions
-----------
* Subsystems are indexed from 0.  Amplitudes are flattened in C order, so the
  first subsystem varies slowest (``|a b>`` sits at index ``a * d_b + b``).
* States are *not* assumed normalized.  Every tolerance is relative: scaled by
  the trace, the largest singular value or the largest entry.
* Arrays held by :class:`PureState` and :class:`DensityOp` are read-only.
"""

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import CapacityError, InputError

TOL_RANK = 1e-9
TOL_PSD = 1e-9
TOL_HERM = 1e-10
TOL_RECON = 1e-8
TOL_ORTH = 1e-10
MAX_DIM = 4096


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def _check_dims(dims) -> tuple:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise InputError(f"dimensions must be positive integers, got {dims}")
    return dims


@dataclass(frozen=True)
class Bipartition:
    """Split of subsystem indices ``0..n-1`` into two nonempty complementary sets."""

    left: frozenset
    right: frozenset

    def __post_init__(self):
        left, right = frozenset(self.left), frozenset(self.right)
        if not left or not right:
            raise InputError("both sides of a bipartition must be nonempty")
        if left & right:
            raise InputError("bipartition sides overlap")
        n = len(left | right)
        if left | right != frozenset(range(n)):
            raise InputError("bipartition must cover 0..n-1")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def of(cls, n: int, left: Iterable[int]) -> "Bipartition":
        left = frozenset(int(i) for i in left)
        return cls(left, frozenset(range(n)) - left)

    @property
    def n(self) -> int:
        return len(self.left) + len(self.right)

    def order(self) -> tuple:
        return tuple(sorted(self.left)) + tuple(sorted(self.right))

    def __str__(self):
        return f"{sorted(self.left)}:{sorted(self.right)}"


def default_cut(dims) -> Bipartition:
    """Party 0 against the rest."""
    return Bipartition.of(len(dims), [0])


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitude vector together with its subsystem dimensions."""

    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        amp = _freeze(np.ravel(self.amplitudes))
        dims = _check_dims(self.dims)
        if amp.size != prod(dims):
            raise InputError(f"{amp.size} amplitudes do not match dims {dims}")
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def normalized(self) -> bool:
        return abs(self.norm - 1.0) <= TOL_RECON

    def normalize(self) -> "PureState":
        nrm = self.norm
        if nrm == 0:
            raise InputError("cannot normalize the zero vector")
        return PureState(self.amplitudes / nrm, self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def to_density(self) -> "DensityOp":
        v = self.amplitudes
        return DensityOp(np.outer(v, v.conj()), self.dims)


class Operator:
    """Hermitian operator with subsystem dimensions; not necessarily PSD."""

    __slots__ = ("matrix", "dims")

    def __init__(self, matrix, dims, tol_herm: float = TOL_HERM):
        m = np.asarray(matrix, dtype=np.complex128)
        dims = _check_dims(dims)
        d = prod(dims)
        if m.shape != (d, d):
            raise InputError(f"matrix of shape {m.shape} does not match dims {dims}")
        if not np.all(np.isfinite(m)):
            raise InputError("matrix has non-finite entries")
        scale = np.max(np.abs(m)) if m.size else 0.0
        if scale > 0 and np.max(np.abs(m - m.conj().T)) > tol_herm * scale:
            raise InputError("matrix is not Hermitian within tolerance")
        object.__setattr__(self, "matrix", _freeze((m + m.conj().T) / 2))
        object.__setattr__(self, "dims", dims)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def as_density(self, tol_psd: float = TOL_PSD) -> "DensityOp":
        return DensityOp(self.matrix, self.dims, tol_psd=tol_psd)

    def __repr__(self):
        return f"{type(self).__name__}(dims={self.dims}, trace={self.trace:.6g})"


class DensityOp(Operator):
    """Positive semidefinite operator of positive trace (unnormalized allowed)."""

    __slots__ = ()

    def __init__(self, matrix, dims, tol_herm: float = TOL_HERM, tol_psd: float = TOL_PSD):
        super().__init__(matrix, dims, tol_herm=tol_herm)
        tr = self.trace
        if not tr > 0:
            raise InputError("density operator must have positive trace")
        lo = float(np.linalg.eigvalsh(self.matrix)[0])
        if lo < -tol_psd * tr:
            raise InputError(f"operator is not PSD (smallest eigenvalue {lo:.3e})")

    def normalize(self) -> "DensityOp":
        return DensityOp(self.matrix / self.trace, self.dims)

    def scaled(self, c: float) -> "DensityOp":
        return DensityOp(self.matrix * c, self.dims)


State = PureState | DensityOp


def ket(indices: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Computational-basis vector ``|i_0 i_1 ...>``."""
    v = np.zeros(prod(dims), dtype=np.complex128)
    v[np.ravel_multi_index(tuple(indices), tuple(dims))] = 1.0
    return v


def check_capacity(d: int, max_dim: int = MAX_DIM):
    if d > max_dim:
        raise CapacityError(f"ambient dimension {d} exceeds the configured maximum {max_dim}")


def tensor_product(a, b, max_dim: int = MAX_DIM):
    """Kronecker product; result dims are ``a.dims + b.dims``."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        check_capacity(a.dim * b.dim, max_dim)
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityOp) and isinstance(b, DensityOp):
        check_capacity(a.dim * b.dim, max_dim)
        return DensityOp(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    raise InputError("tensor_product operands must be of the same kind")


def _check_perm(perm, n) -> tuple:
    perm = tuple(int(p) for p in perm)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise InputError(f"{perm} is not a permutation of 0..{n - 1}")
    return perm


def permute_systems(s, perm):
    """Reorder subsystems: new subsystem ``i`` is old subsystem ``perm[i]``."""
    perm = _check_perm(perm, len(s.dims))
    new_dims = tuple(s.dims[p] for p in perm)
    if isinstance(s, PureState):
        return PureState(s.tensor().transpose(perm).ravel(), new_dims)
    n = len(s.dims)
    t = s.matrix.reshape(s.dims * 2)
    t = t.transpose(perm + tuple(p + n for p in perm))
    d = s.dim
    return type(s)(t.reshape(d, d), new_dims)


def partial_trace(rho, keep: Iterable[int]):
    """Trace out every subsystem not in ``keep``; the kept order is preserved."""
    if isinstance(rho, PureState):
        rho = rho.to_density()
    keep = sorted(set(int(k) for k in keep))
    n = len(rho.dims)
    if not keep:
        raise InputError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise InputError(f"keep indices {keep} out of range for {n} subsystems")
    drop = [i for i in range(n) if i not in keep]
    perm = tuple(keep) + tuple(drop)
    dk = prod(rho.dims[i] for i in keep)
    dd = prod(rho.dims[i] for i in drop)
    t = rho.matrix.reshape(rho.dims * 2).transpose(perm + tuple(p + n for p in perm))
    t = t.reshape(dk, dd, dk, dd)
    out = np.einsum("ajbj->ab", t)
    return DensityOp(out, tuple(rho.dims[i] for i in keep))


def bipartite_matrix(s, cut: Bipartition):
    """Regroup a state as bipartite ``left:right``; returns ``(array, d_left, d_right)``.

    For pure states the array is the ``d_left x d_right`` amplitude matrix, for
    density operators the ``(d_left d_right)``-square matrix.
    """
    if cut.n != len(s.dims):
        raise InputError(f"cut {cut} does not fit {len(s.dims)} subsystems")
    order = cut.order()
    dl = prod(s.dims[i] for i in sorted(cut.left))
    dr = prod(s.dims[i] for i in sorted(cut.right))
    if order != tuple(range(cut.n)):
        s = permute_systems(s, order)
    if isinstance(s, PureState):
        return s.amplitudes.reshape(dl, dr), dl, dr
    return s.matrix, dl, dr


def as_bipartite(s, cut: Bipartition | None = None):
    """Return the state regrouped with two subsystems ``(d_left, d_right)``."""
    if cut is None:
        if len(s.dims) == 2:
            return s
        cut = default_cut(s.dims)
    m, dl, dr = bipartite_matrix(s, cut)
    if isinstance(s, PureState):
        return PureState(m.ravel(), (dl, dr))
    return DensityOp(m, (dl, dr))


def direct_sum_b(alpha: DensityOp, beta: DensityOp) -> DensityOp:
    """B-direct sum: same A space, orthogonal B supports ``B' (+) B''``."""
    if len(alpha.dims) != 2 or len(beta.dims) != 2:
        raise InputError("direct_sum_b needs bipartite operands")
    (ma, na), (mb, nb) = alpha.dims, beta.dims
    if ma != mb:
        raise InputError(f"A dimensions differ: {ma} vs {mb}")
    n = na + nb
    out = np.zeros((ma, n, ma, n), dtype=np.complex128)
    out[:, :na, :, :na] = alpha.matrix.reshape(ma, na, ma, na)
    out[:, na:, :, na:] = beta.matrix.reshape(ma, nb, ma, nb)
    return DensityOp(out.reshape(ma * n, ma * n), (ma, n))


def direct_sum(alpha: DensityOp, beta: DensityOp) -> DensityOp:
    """Direct sum on both sides: ``A' (+) A''`` and ``B' (+) B''``."""
    if len(alpha.dims) != 2 or len(beta.dims) != 2:
        raise InputError("direct_sum needs bipartite operands")
    (ma, na), (mb, nb) = alpha.dims, beta.dims
    m, n = ma + mb, na + nb
    out = np.zeros((m, n, m, n), dtype=np.complex128)
    out[:ma, :na, :ma, :na] = alpha.matrix.reshape(ma, na, ma, na)
    out[ma:, na:, ma:, na:] = beta.matrix.reshape(mb, nb, mb, nb)
    return DensityOp(out.reshape(m * n, m * n), (m, n))


def block_restrict(rho: DensityOp, a_idx: Sequence[int], b_idx: Sequence[int]) -> np.ndarray:
    """Compress a bipartite operator onto computational-basis index sets on A and B."""
    m, n = rho.dims
    t = rho.matrix.reshape(m, n, m, n)
    a_idx, b_idx = np.asarray(a_idx, dtype=int), np.asarray(b_idx, dtype=int)
    sub = t[np.ix_(a_idx, b_idx, a_idx, b_idx)]
    d = len(a_idx) * len(b_idx)
    return sub.reshape(d, d)


def numerical_rank(m, tol_rank: float = TOL_RANK) -> int:
    """Count singular values above ``tol_rank * sigma_max``; 0 for the zero matrix."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol_rank * s[0]))


def hermitian_rank(m, tol_rank: float = TOL_RANK) -> int:
    """Numerical rank of a Hermitian matrix from its eigenvalues."""
    w = np.abs(np.linalg.eigvalsh(m))
    top = w.max() if w.size else 0.0
    if top == 0:
        return 0
    return int(np.sum(w > tol_rank * top))


@dataclass(frozen=True, eq=False)
class SchmidtDecomp:
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns
    right_vectors: np.ndarray  # columns
    rank: int = field(default=0)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ak,bk->ab", self.coefficients, self.left_vectors, self.right_vectors).ravel()


def schmidt_decompose(psi: PureState, cut: Bipartition | None = None,
                      tol_rank: float = TOL_RANK) -> SchmidtDecomp:
    """Schmidt decomposition across ``cut`` via the SVD of the reshaped amplitudes."""
    if cut is None:
        cut = default_cut(psi.dims)
    m, _, _ = bipartite_matrix(psi, cut)
    if not np.any(m):
        raise InputError("cannot Schmidt-decompose the zero vector")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > tol_rank * s[0]))
    return SchmidtDecomp(s[:r].copy(), u[:, :r].copy(), vh[:r].T.copy(), r)


def schmidt_rank(v, dl: int, dr: int, tol_rank: float = TOL_RANK) -> int:
    """Schmidt rank of a raw amplitude vector across a ``dl x dr`` split."""
    return numerical_rank(np.reshape(v, (dl, dr)), tol_rank)


def overlap(psi: PureState, rho: Operator) -> float:
    """``<psi|rho|psi>`` (real part; the imaginary part vanishes for Hermitian rho)."""
    if psi.dim != rho.dim:
        raise InputError(f"dimension mismatch: {psi.dim} vs {rho.dim}")
    v = psi.amplitudes
    return float(np.real(np.vdot(v, rho.matrix @ v)))


def spectral(rho: Operator, tol_rank: float = TOL_RANK):
    """Eigenpairs of ``rho`` above the relative rank threshold, largest first."""
    w, v = np.linalg.eigh(rho.matrix)
    top = np.max(np.abs(w))
    keep = w > tol_rank * top
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    return w, v


def local_ranks(rho, cut: Bipartition | None = None, tol_rank: float = TOL_RANK):
    """Ranks of the two reduced operators across ``cut``."""
    if isinstance(rho, PureState):
        m, _, _ = bipartite_matrix(rho, cut or default_cut(rho.dims))
        r = numerical_rank(m, tol_rank)
        return r, r
    rb = as_bipartite(rho, cut)
    ra = hermitian_rank(partial_trace(rb, [0]).matrix, tol_rank)
    rbb = hermitian_rank(partial_trace(rb, [1]).matrix, tol_rank)
    return ra, rbb


def partial_transpose_matrix(mat, dims, parties) -> np.ndarray:
    """Transpose the indices of every subsystem in ``parties``."""
    dims = tuple(dims)
    parties = sorted(set(int(p) for p in parties))
    n = len(dims)
    if any(p < 0 or p >= n for p in parties):
        raise InputError(f"parties {parties} out of range")
    if not parties:
        return np.array(mat)
    if n == 2 and parties == [0]:
        return _accel.partial_transpose_bipartite(mat, dims[0], dims[1])
    t = np.asarray(mat).reshape(dims * 2)
    axes = list(range(2 * n))
    for p in parties:
        axes[p], axes[p + n] = axes[p + n], axes[p]
    d = prod(dims)
    return np.ascontiguousarray(t.transpose(axes)).reshape(d, d)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_pure(dims, rng: np.random.Generator) -> PureState:
    d = prod(dims)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(v / np.linalg.norm(v), tuple(dims))


def random_mixed(dims, rank: int, rng: np.random.Generator) -> DensityOp:
    d = prod(dims)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityOp(m / np.trace(m).real, tuple(dims))


def random_separable(dims, terms: int, rng: np.random.Generator) -> DensityOp:
    """Random mixture of ``terms`` fully product pure states."""
    d = prod(dims)
    m = np.zeros((d, d), dtype=np.complex128)
    w = rng.random(terms)
    w /= w.sum()
    for p in w:
        v = np.ones(1, dtype=np.complex128)
        for dk in dims:
            x = rng.standard_normal(dk) + 1j * rng.standard_normal(dk)
            v = np.kron(v, x / np.linalg.norm(x))
        m += p * np.outer(v, v.conj())
    return DensityOp(m, tuple(dims))
