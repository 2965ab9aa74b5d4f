"""Named states and counterexamples, addressable by name through a registry.

Mixed states built from an explicit ket list keep the literal (unnormalized)
weights; the parameter families (isotropic, Werner, UPB complements, ...)
are trace one.  Kets labelled from 1 embed into a local space with index 0
unused, so amplitudes match the printed labels.
"""

from dataclasses import dataclass, field
from itertools import combinations
from math import prod
from typing import Callable

import numpy as np

from .errors import CapacityError, InputError, RegistryError
from .tensor_core import (
    MAX_DIM,
    DensityOp,
    PureState,
    ket,
    permute_systems,
    random_mixed,
    random_pure,
    tensor_product,
)


@dataclass(frozen=True)
class StateRecipe:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class UPBState:
    """A UPB complement together with the product members that define it."""

    state: DensityOp
    members: tuple  # tuple of tuples of local vectors, one per party


def _proj_sum(vecs, weights=None) -> np.ndarray:
    vecs = [np.asarray(v, dtype=np.complex128) for v in vecs]
    if weights is None:
        weights = [1.0] * len(vecs)
    return sum(w * np.outer(v, v.conj()) for w, v in zip(weights, vecs))


def _kets(terms, dims):
    """Sum of signed basis kets, ``terms`` = [(coef, (i, j, ...)), ...]."""
    return sum(c * ket(idx, dims) for c, idx in terms)


# ---------------------------------------------------------------------------
# constructors


def max_entangled(d: int = 2) -> PureState:
    """``(|00> + ... + |d-1 d-1>) / sqrt(d)``."""
    return PureState(sum(ket((i, i), (d, d)) for i in range(d)) / np.sqrt(d), (d, d))


def ghz(d: int = 2, n: int = 3) -> PureState:
    dims = (d,) * n
    return PureState(sum(ket((i,) * n, dims) for i in range(d)) / np.sqrt(d), dims)


def w_state(n: int = 3) -> PureState:
    dims = (2,) * n
    v = sum(ket(tuple(int(j == i) for j in range(n)), dims) for i in range(n))
    return PureState(v / np.sqrt(n), dims)


def isotropic(d: int = 3, p: float = 0.5) -> DensityOp:
    """``p |Phi_d><Phi_d| + (1-p) I / d^2``."""
    if not 0 <= p <= 1:
        raise InputError(f"isotropic mixing parameter must lie in [0, 1], got {p}")
    phi = max_entangled(d).amplitudes
    return DensityOp(p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(d * d) / d**2, (d, d))


def swap_operator(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


def werner(d: int = 3, w: float = -1.0) -> DensityOp:
    """``(I + w SWAP) / (d^2 + w d)`` for ``w`` in [-1, 1]."""
    if not -1 <= w <= 1:
        raise InputError(f"Werner parameter must lie in [-1, 1], got {w}")
    return DensityOp((np.eye(d * d) + w * swap_operator(d)) / (d * d + w * d), (d, d))


def antisym3() -> DensityOp:
    """Unnormalized projector sum onto the two-qutrit antisymmetric subspace."""
    dims = (3, 3)
    vecs = [ket((j, k), dims) - ket((k, j), dims) for j, k in combinations(range(3), 2)]
    return DensityOp(_proj_sum(vecs), dims)


def tiles_members():
    s = np.sqrt(2)
    e = np.eye(3)
    return (
        (e[0], (e[0] - e[1]) / s),
        (e[2], (e[1] - e[2]) / s),
        ((e[0] - e[1]) / s, e[2]),
        ((e[1] - e[2]) / s, e[0]),
        (np.ones(3) / np.sqrt(3), np.ones(3) / np.sqrt(3)),
    )


def shifts_members():
    e = np.eye(2)
    plus, minus = (e[0] + e[1]) / np.sqrt(2), (e[0] - e[1]) / np.sqrt(2)
    return (
        (e[0], e[0], e[0]),
        (plus, e[1], minus),
        (e[1], minus, plus),
        (minus, plus, e[1]),
    )


def _product(vectors):
    v = np.ones(1, dtype=np.complex128)
    for x in vectors:
        v = np.kron(v, x)
    return v


def upb_complement(members, dims) -> UPBState:
    d = prod(dims)
    members = tuple(tuple(np.asarray(x, dtype=np.complex128) for x in m) for m in members)
    vecs = [_product(m) for m in members]
    mat = (np.eye(d) - _proj_sum(vecs)) / (d - len(vecs))
    return UPBState(DensityOp(mat, dims), members)


def tiles_upb() -> UPBState:
    return upb_complement(tiles_members(), (3, 3))


def shifts_upb() -> UPBState:
    return upb_complement(shifts_members(), (2, 2, 2))


def tiles_state() -> DensityOp:
    return tiles_upb().state


def shifts3_state() -> DensityOp:
    return shifts_upb().state


def nonconvex_alpha() -> DensityOp:
    dims = (3, 3)
    a = _kets([(1, (0, 0)), (1, (1, 1))], dims)
    b = _kets([(1, (0, 0)), (-1, (1, 1)), (1, (2, 2))], dims)
    return DensityOp(2 * np.outer(a, a.conj()) + np.outer(b, b.conj()), dims)


def nonconvex_beta() -> DensityOp:
    dims = (3, 3)
    b = _kets([(1, (0, 0)), (-1, (1, 1)), (-1, (2, 2))], dims)
    return DensityOp(np.outer(b, b.conj()), dims)


def nonconvex_mix(p: float = 0.5) -> DensityOp:
    if not 0 < p < 1:
        raise InputError("mixing weight must lie strictly between 0 and 1")
    return DensityOp(p * nonconvex_alpha().matrix + (1 - p) * nonconvex_beta().matrix, (3, 3))


def p_mix_bell(p: float = 0.5) -> DensityOp:
    """``p |Phi+><Phi+| + (1-p) |Phi-><Phi-|`` with normalized Bell vectors."""
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p}")
    dims = (2, 2)
    a = _kets([(1, (0, 0)), (1, (1, 1))], dims) / np.sqrt(2)
    b = _kets([(1, (0, 0)), (-1, (1, 1))], dims) / np.sqrt(2)
    return DensityOp(p * np.outer(a, a.conj()) + (1 - p) * np.outer(b, b.conj()), dims)


def problems_vectors():
    dims = (7, 7)
    psi = _kets([(1, (1, 1)), (1, (2, 2))], dims)
    phi = _kets([(1, (3, 3)), (1, (4, 4)), (1, (5, 5))], dims)
    omega = _kets([(1, (3, 3)), (-1, (4, 4)), (1, (6, 6))], dims)
    return psi, phi, omega


def problems_rho() -> DensityOp:
    """Rank-3 counterexample to ``sn(rho) <= sn(alpha) + sn(beta)``."""
    return DensityOp(_proj_sum(problems_vectors()), (7, 7))


def problems_projector() -> np.ndarray:
    """``P = |1><1| + |3><3| + |4><4|`` on the 7-dimensional A space."""
    p = np.zeros((7, 7))
    for i in (1, 3, 4):
        p[i, i] = 1.0
    return p


def proj_example() -> DensityOp:
    """``|psi><psi| + |03><03|`` with ``psi = |00>+|11>+|22>`` on 3 x 4."""
    dims = (3, 4)
    psi = _kets([(1, (0, 0)), (1, (1, 1)), (1, (2, 2))], dims)
    return DensityOp(_proj_sum([psi, ket((0, 3), dims)]), dims)


def expansion_vi(d: int = 2, terms: int = 2) -> DensityOp:
    """``|psi><psi|_{A1B1} (x) sum_i |ii><ii|_{A2B2}`` regrouped as ``A1A2 : B1B2``.

    ``psi = sum_j |jj>`` over ``d`` levels; the classical part has ``terms``
    diagonal entries.  Dims are ``(d * terms, d * terms)``.
    """
    psi = PureState(sum(ket((j, j), (d, d)) for j in range(d)), (d, d)).to_density()
    cls = DensityOp(_proj_sum([ket((i, i), (terms, terms)) for i in range(terms)]), (terms, terms))
    return regroup(tensor_product(psi, cls))


def sep_diag(d: int = 3) -> DensityOp:
    """``sum_i |ii><ii|``, unnormalized."""
    return DensityOp(_proj_sum([ket((i, i), (d, d)) for i in range(d)]), (d, d))


def basis_state(indices=(0, 0), dims=(2, 2)) -> PureState:
    return PureState(ket(tuple(indices), tuple(dims)), tuple(dims))


def maximally_mixed(dims=(2, 2)) -> DensityOp:
    d = prod(dims)
    return DensityOp(np.eye(d) / d, tuple(dims))


def regroup(rho, n_pairs: int | None = None):
    """Reorder ``A1 B1 A2 B2 ... `` into ``A1 A2 ... : B1 B2 ...`` and merge.

    The result is bipartite with dims ``(prod d_Ai, prod d_Bi)``.
    """
    dims = rho.dims
    if n_pairs is None:
        n_pairs = len(dims) // 2
    if len(dims) != 2 * n_pairs:
        raise InputError("regroup expects an even number of subsystems")
    perm = [2 * i for i in range(n_pairs)] + [2 * i + 1 for i in range(n_pairs)]
    s = permute_systems(rho, perm)
    da = prod(dims[2 * i] for i in range(n_pairs))
    db = prod(dims[2 * i + 1] for i in range(n_pairs))
    if isinstance(s, PureState):
        return PureState(s.amplitudes, (da, db))
    return DensityOp(s.matrix, (da, db))


def tensor_power_regrouped(rho, n: int, max_dim: int = MAX_DIM):
    """``rho^{(x) n}`` as a bipartite state on ``A1..An : B1..Bn``."""
    if n < 1:
        raise InputError("n must be >= 1")
    if len(rho.dims) != 2:
        raise InputError("tensor_power_regrouped needs a bipartite state")
    d = rho.dims[0] * rho.dims[1]
    if d**n > max_dim:
        raise CapacityError(f"ambient dimension {d ** n} exceeds {max_dim}")
    out = rho
    for _ in range(n - 1):
        out = tensor_product(out, rho, max_dim=max_dim)
    return regroup(out, n) if n > 1 else rho


def regrouped_product(factors, max_dim: int = MAX_DIM):
    """Tensor product of bipartite states regrouped as ``A1..An : B1..Bn``."""
    out = factors[0]
    for f in factors[1:]:
        out = tensor_product(out, f, max_dim=max_dim)
    return regroup(out, len(factors)) if len(factors) > 1 else out


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class _Entry:
    build: Callable
    params: dict
    doc: str


def _seeded(fn):
    def build(dims=(2, 2), seed=0, **kw):
        return fn(tuple(dims), rng=np.random.default_rng(seed), **kw)

    return build


REGISTRY = {
    "max_entangled": _Entry(max_entangled, {"d": 2}, "maximally entangled pure state on d x d"),
    "antisym3": _Entry(antisym3, {}, "antisymmetric projector sum on 3 x 3 (unnormalized)"),
    "tiles_state": _Entry(tiles_state, {}, "normalized complement of the Tiles UPB on 3 x 3"),
    "shifts3_state": _Entry(shifts3_state, {}, "normalized complement of the Shifts UPB on three qubits"),
    "ghz": _Entry(ghz, {"d": 2, "n": 3}, "d-level n-party GHZ pure state"),
    "w_state": _Entry(w_state, {"n": 3}, "n-qubit W pure state"),
    "isotropic": _Entry(isotropic, {"d": 3, "p": 0.5}, "p Phi_d + (1-p) I/d^2"),
    "werner": _Entry(werner, {"d": 3, "w": -1.0}, "(I + w SWAP)/(d^2 + w d)"),
    "nonconvex_alpha": _Entry(nonconvex_alpha, {}, "rank-2 state alpha on 3 x 3 (unnormalized)"),
    "nonconvex_beta": _Entry(nonconvex_beta, {}, "rank-1 state beta on 3 x 3 (unnormalized)"),
    "nonconvex_mix": _Entry(nonconvex_mix, {"p": 0.5}, "p alpha + (1-p) beta"),
    "p_mix_bell": _Entry(p_mix_bell, {"p": 0.5}, "p Phi+ + (1-p) Phi- on two qubits"),
    "problems_rho": _Entry(problems_rho, {}, "psi + phi + omega counterexample on 7 x 7 (index 0 unused)"),
    "proj_example": _Entry(proj_example, {}, "|psi><psi| + |03><03| on 3 x 4"),
    "expansion_vi": _Entry(expansion_vi, {"d": 2, "terms": 2}, "Phi (x) sum_i |ii><ii| regrouped"),
    "sep_diag": _Entry(sep_diag, {"d": 3}, "sum_i |ii><ii| (unnormalized)"),
    "basis": _Entry(basis_state, {"indices": [0, 0], "dims": [2, 2]}, "computational basis ket"),
    "maximally_mixed": _Entry(maximally_mixed, {"dims": [2, 2]}, "I/d"),
    "random_pure": _Entry(_seeded(random_pure), {"dims": [2, 2], "seed": 0}, "Haar-random pure state"),
    "random_mixed": _Entry(_seeded(random_mixed), {"dims": [2, 2], "seed": 0, "rank": 2},
                           "random rank-r mixed state (no claims attached)"),
}


def registry_names():
    return sorted(REGISTRY)


def construct(recipe: StateRecipe | str, **params):
    """Build the named state.  Unknown parameters raise :class:`InputError`."""
    if isinstance(recipe, str):
        recipe = StateRecipe(recipe, params)
    try:
        entry = REGISTRY[recipe.name]
    except KeyError:
        raise RegistryError(f"unknown state {recipe.name!r}; known: {', '.join(registry_names())}") from None
    extra = set(recipe.params) - set(entry.params)
    if extra:
        raise InputError(f"unexpected parameters for {recipe.name}: {sorted(extra)}")
    kw = {**entry.params, **recipe.params}
    try:
        return entry.build(**kw)
    except TypeError as exc:
        raise InputError(str(exc)) from None


def upb_members(name: str):
    """Product members for the registered UPB complements, else ``None``."""
    return {"tiles_state": tiles_members, "shifts3_state": shifts_members}.get(name, lambda: None)()
