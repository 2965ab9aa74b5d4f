"""State files and reports.

A state file is JSON with ``format: 1``, ``dims`` and either a dense
``matrix`` (rows of ``[re, im]`` pairs) or a ``kets`` list of
``{"weight": w, "amplitudes": [[re, im], ...]}``.  A single ket loads as a
pure state; several kets load as ``sum_j w_j |a_j><a_j|``.
"""

import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError, SchmidtError
from .tensor_core import DensityOp, PureState

FORMAT = 1


def _pairs(vec) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=np.complex128).ravel()]


def state_to_dict(state, name: str | None = None, seed: int | None = None, params=None) -> dict:
    meta = {"name": name}
    if seed is not None:
        meta["seed"] = seed
    if params:
        meta["params"] = params
    out = {"format": FORMAT, "dims": list(state.dims), "metadata": meta}
    if isinstance(state, PureState):
        out["kets"] = [{"weight": 1.0, "amplitudes": _pairs(state.amplitudes)}]
    else:
        out["matrix"] = [_pairs(row) for row in state.matrix]
    return out


def dumps_state(state, **meta) -> str:
    return json.dumps(state_to_dict(state, **meta), sort_keys=True, separators=(",", ":")) + "\n"


def _complex_list(items, where: str, length: int) -> np.ndarray:
    if not isinstance(items, list) or len(items) != length:
        raise InputError(f"{where}: expected a list of {length} [re, im] pairs")
    out = np.empty(length, dtype=np.complex128)
    for i, z in enumerate(items):
        if not (isinstance(z, list) and len(z) == 2 and all(isinstance(x, (int, float)) for x in z)):
            raise InputError(f"{where}[{i}]: expected [re, im], got {z!r}")
        out[i] = complex(z[0], z[1])
    return out


def state_from_dict(doc: dict):
    if not isinstance(doc, dict):
        raise InputError("state file: top level must be an object")
    if doc.get("format") != FORMAT:
        raise InputError(f"state file: unsupported format {doc.get('format')!r} (expected {FORMAT})")
    dims = doc.get("dims")
    if not (isinstance(dims, list) and dims and all(isinstance(d, int) and d >= 1 for d in dims)):
        raise InputError(f"dims: expected a list of positive integers, got {dims!r}")
    d = math.prod(dims)
    has_m, has_k = "matrix" in doc, "kets" in doc
    if has_m == has_k:
        raise InputError("state file: give exactly one of 'matrix' or 'kets'")
    try:
        if has_m:
            rows = doc["matrix"]
            if not isinstance(rows, list) or len(rows) != d:
                raise InputError(f"matrix: expected {d} rows")
            mat = np.array([_complex_list(r, f"matrix[{i}]", d) for i, r in enumerate(rows)])
            return DensityOp(mat, tuple(dims))
        kets = doc["kets"]
        if not isinstance(kets, list) or not kets:
            raise InputError("kets: expected a nonempty list")
        vecs, weights = [], []
        for j, k in enumerate(kets):
            if not isinstance(k, dict):
                raise InputError(f"kets[{j}]: expected an object")
            w = k.get("weight", 1.0)
            if not isinstance(w, (int, float)) or w <= 0:
                raise InputError(f"kets[{j}].weight: expected a positive number")
            vecs.append(_complex_list(k.get("amplitudes"), f"kets[{j}].amplitudes", d))
            weights.append(float(w))
        if len(vecs) == 1:
            return PureState(vecs[0] * math.sqrt(weights[0]), tuple(dims))
        mat = sum(w * np.outer(v, v.conj()) for w, v in zip(weights, vecs))
        return DensityOp(mat, tuple(dims))
    except InputError:
        raise
    except SchmidtError as e:
        raise InputError(f"state file: {e}") from e


def parse_state_file(path) -> PureState | DensityOp:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    return state_from_dict(doc)


# ---------------------------------------------------------------------------
# reports


def clean(obj):
    """Convert numpy scalars, tuples, sets and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(clean(v) for v in obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (complex, np.complexfloating)):
        return [clean(obj.real), clean(obj.imag)]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "as_dict"):
        return clean(obj.as_dict())
    return str(obj)


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        if not obj:
            out.append((prefix, "{}"))
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else k, obj[k], out)
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj) and len(obj) <= 64:
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, json.dumps(obj)))


def emit_report(report: dict, fmt: str = "json") -> bytes:
    """Serialize a report; JSON output has sorted keys and is byte-stable."""
    doc = clean(report)
    if fmt == "json":
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "table":
        rows = []
        _flatten("", doc, rows)
        width = max((len(k) for k, _ in rows), default=0)
        return ("\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n").encode()
    raise InputError(f"unknown format {fmt!r}")
