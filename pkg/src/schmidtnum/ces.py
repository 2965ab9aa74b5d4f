"""Completely-entangled-subspace tests.

Two independent routes:

* numeric: alternating projection between a subspace and the set of vectors
  of Schmidt rank <= l (:func:`min_schmidt_in_range`).  Success is a
  certificate that the subspace is *not* l-CES; failure is only evidence.
* combinatorial: if the kernel of ``rho`` is spanned by product vectors
  ``u_1..u_n``, a product vector orthogonal to all of them exists iff the
  members can be split among the parties so that every party's share fails
  to span its local space (:func:`unextendible`).  With a spanning product set
  this decides whether the range holds a product vector.
"""

from dataclasses import dataclass
from math import prod
import string

import numpy as np

from . import _accel
from .errors import InputError
from .tensor_core import TOL_RANK, numerical_rank

TOL_CERT = 1e-12


@dataclass(frozen=True, eq=False)
class RangeSearch:
    found: bool
    vector: np.ndarray | None
    value: float
    restarts: int


@dataclass(frozen=True, eq=False)
class CesCertificate:
    """Product vectors spanning ker(rho) that admit no orthogonal product vector."""

    members: tuple
    dims: tuple
    kernel_dim: int
    source: str  # "members" or "search"

    def as_dict(self):
        return {
            "kernel_dim": self.kernel_dim,
            "source": self.source,
            "members": [[_cvec(x) for x in m] for m in self.members],
        }


def _cvec(x):
    return [[float(z.real), float(z.imag)] for z in np.asarray(x, dtype=np.complex128)]


def range_kernel(mat: np.ndarray, tol_rank: float = TOL_RANK):
    """Orthonormal bases of range and kernel of a Hermitian PSD matrix."""
    w, v = np.linalg.eigh(mat)
    top = np.max(np.abs(w)) if w.size else 0.0
    keep = w > tol_rank * top
    return v[:, keep], v[:, ~keep]


def _unit(rng, shape):
    z = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def min_schmidt_in_range(basis: np.ndarray, dl: int, dr: int, l: int = 1, restarts: int = 200,
                         iters: int = 500, seed: int = 0, tol_cert: float = TOL_CERT) -> RangeSearch:
    """Look for a unit vector of Schmidt rank <= l in ``span(basis)``.

    All restarts run as one batch.  The objective is the tail energy
    ``sum_{i>l} sigma_i^2`` of the reshaped vector.
    """
    if l < 1:
        raise InputError("l must be >= 1")
    q = np.asarray(basis, dtype=np.complex128)
    if q.shape[0] != dl * dr:
        raise InputError(f"basis rows {q.shape[0]} != {dl}*{dr}")
    r = q.shape[1]
    if r == 0:
        return RangeSearch(False, None, float("inf"), 0)
    if l >= min(dl, dr):
        v = q[:, 0]
        return RangeSearch(True, v / np.linalg.norm(v), 0.0, 0)
    rng = np.random.default_rng([seed, 1])
    c = _unit(rng, (restarts, r))
    best = np.full(restarts, np.inf)
    for _ in range(iters):
        v = c @ q.T
        kept, tails = _accel.truncate_batch(np.ascontiguousarray(v.reshape(restarts, dl, dr)), l)
        best = np.minimum(best, tails)
        if best.min() < tol_cert:
            break
        c = kept.reshape(restarts, -1) @ q.conj()
        nrm = np.linalg.norm(c, axis=1, keepdims=True)
        nrm[nrm == 0] = 1.0
        c = c / nrm
    v = c @ q.T
    _, tails = _accel.truncate_batch(np.ascontiguousarray(v.reshape(restarts, dl, dr)), l)
    i = int(np.argmin(tails))
    val = float(tails[i])
    return RangeSearch(val < tol_cert, v[i] if val < tol_cert else None, val, restarts)


def _einsum_other(n, p):
    """einsum spec contracting a batched n-tensor with conj factors of all parties but p."""
    letters = string.ascii_lowercase[:n]
    ops = ["z" + letters] + ["z" + letters[j] for j in range(n) if j != p]
    return ",".join(ops) + "->z" + letters[p]


def product_vectors_in(kernel: np.ndarray, dims, restarts: int = 64, iters: int = 400,
                       seed: int = 0, tol: float = 1e-20):
    """Distinct fully-product unit vectors found inside ``span(kernel)``.

    Alternates between the best product approximation (one ALS sweep) and
    projection onto the subspace.  Returns a list of tuples of local vectors.
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    k = np.asarray(kernel, dtype=np.complex128)
    if k.shape[1] == 0:
        return []
    rng = np.random.default_rng([seed, 2])
    factors = [_unit(rng, (restarts, d)) for d in dims]
    specs = [_einsum_other(n, p) for p in range(n)]
    proj = k @ k.conj().T
    for _ in range(iters):
        v = factors[0]
        for f in factors[1:]:
            v = (v[:, :, None] * f[:, None, :]).reshape(restarts, -1)
        v = v @ proj.T
        t = v.reshape((restarts,) + dims)
        for p in range(n):
            others = [factors[j].conj() for j in range(n) if j != p]
            x = np.einsum(specs[p], t, *others)
            nrm = np.linalg.norm(x, axis=1, keepdims=True)
            nrm[nrm == 0] = 1.0
            factors[p] = x / nrm
    v = factors[0]
    for f in factors[1:]:
        v = (v[:, :, None] * f[:, None, :]).reshape(restarts, -1)
    resid = 1.0 - np.linalg.norm(v @ k.conj(), axis=1) ** 2
    out = []
    kept_vecs = []
    for i in np.argsort(resid):
        if resid[i] > tol ** 0.5:
            break
        vi = v[i]
        if any(abs(np.vdot(w, vi)) > 1 - 1e-8 for w in kept_vecs):
            continue
        kept_vecs.append(vi)
        out.append(tuple(f[i].copy() for f in factors))
    return out


def _kron_all(vectors):
    v = np.ones(1, dtype=np.complex128)
    for x in vectors:
        v = np.kron(v, x)
    return v


def unextendible(members, dims, tol_rank: float = TOL_RANK):
    """Return ``(True, None)`` if no product vector is orthogonal to every member.

    Otherwise return ``(False, partition)``: ``partition[p]`` lists the member
    indices assigned to party ``p``, each share failing to span ``C^{d_p}``.
    Depth-first search over assignments with pruning on full-rank shares.
    """
    dims = tuple(dims)
    n = len(dims)
    members = [tuple(np.asarray(x, dtype=np.complex128) for x in m) for m in members]
    for m in members:
        if len(m) != n or any(x.shape != (d,) for x, d in zip(m, dims)):
            raise InputError("member local vectors do not match dims")
    shares = [[] for _ in range(n)]

    def full(p):
        if len(shares[p]) < dims[p]:
            return False
        mat = np.array([members[j][p] for j in shares[p]])
        return numerical_rank(mat, tol_rank) >= dims[p]

    def dfs(j):
        if j == len(members):
            return True
        for p in range(n):
            shares[p].append(j)
            if not full(p) and dfs(j + 1):
                return True
            shares[p].pop()
        return False

    if dfs(0):
        return False, [list(s) for s in shares]
    return True, None


def orthogonal_product(members, dims, partition):
    """Explicit product vector orthogonal to all members for an extendible partition."""
    locals_ = []
    for p, d in enumerate(dims):
        if partition[p]:
            mat = np.array([members[j][p] for j in partition[p]]).conj()
            _, s, vh = np.linalg.svd(mat)
            x = vh[-1].conj()
        else:
            x = np.zeros(d, dtype=np.complex128)
            x[0] = 1
        locals_.append(x)
    return _kron_all(locals_)


def group_members(members, groups):
    """Merge each member's local vectors according to ``groups`` (lists of party indices)."""
    out = []
    for m in members:
        out.append(tuple(_kron_all([m[i] for i in g]) for g in groups))
    return tuple(out)


def conj_party(members, party: int):
    """Conjugate one party's local vectors (the kernel of a partial transpose of a UPB complement)."""
    return tuple(tuple(np.conj(x) if i == party else x for i, x in enumerate(m)) for m in members)


def verify_ces_certificate(mat: np.ndarray, cert: CesCertificate, tol_rank: float = 1e-7,
                           tol_kernel: float = 1e-8) -> bool:
    """Re-check a certificate from scratch against the matrix it claims to describe."""
    dims = cert.dims
    if prod(dims) != mat.shape[0]:
        return False
    _, kern = range_kernel(mat)
    if kern.shape[1] != cert.kernel_dim or kern.shape[1] == 0:
        return False
    vecs = np.array([_kron_all(m) for m in cert.members])
    scale = np.max(np.abs(np.linalg.eigvalsh(mat)))
    if np.max(np.linalg.norm(vecs @ mat.T, axis=1)) > tol_kernel * scale:
        return False
    if numerical_rank(vecs, tol_rank) != cert.kernel_dim:
        return False
    ok, _ = unextendible(cert.members, dims, tol_rank)
    return ok


def ces_certificate(mat: np.ndarray, dims, members=None, restarts: int = 64, seed: int = 0,
                    max_members: int = 24):
    """Try to certify that the range of ``mat`` holds no fully product vector.

    ``members`` (product vectors known to lie in the kernel) are used first;
    otherwise product vectors are searched for inside the kernel.  Returns a
    :class:`CesCertificate` or ``None``.
    """
    dims = tuple(dims)
    _, kern = range_kernel(mat)
    kd = kern.shape[1]
    if kd == 0:
        return None
    source = "members"
    tol = TOL_RANK
    if members is None:
        found = product_vectors_in(kern, dims, restarts=restarts, seed=seed)
        if len(found) > max_members:
            found = found[:max_members]
        members = tuple(found)
        source = "search"
        tol = 1e-7
    if not members:
        return None
    cert = CesCertificate(tuple(members), dims, kd, source)
    if not verify_ces_certificate(mat, cert, tol_rank=max(tol, 1e-7)):
        return None
    return cert
