"""JSON formats for states, PVMs, quasi-probability tables and reports.

Complex numbers are two-element arrays ``[re, im]``. Floats are written with
17 significant digits so every double round-trips exactly and identical
inputs give byte-identical files. All readers validate on load.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .hilbert import (
    DEFAULT_TOL,
    DensityMatrix,
    Pvm,
    Seed,
    pvm_from_basis,
    validate_density,
    validate_pvm,
)
from .quasiprob import QuasiProbTable

__all__ = [
    "dumps",
    "dump",
    "read_json",
    "decode_matrix",
    "encode_complex",
    "state_to_dict",
    "pvm_to_dict",
    "table_to_dict",
    "load_state",
    "load_pvm",
    "load_table",
]


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _plain(obj: Any) -> Any:
    """Convert numpy and complex values to JSON-ready Python objects."""
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return np.stack([obj.real, obj.imag], axis=-1).tolist()
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(complex(obj))
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Seed):
        return obj.to_dict()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _is_flat(x: Any) -> bool:
    return isinstance(x, list) and all(not isinstance(v, (list, dict)) for v in x)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        # numeric vectors and matrix rows stay on one line
        if _is_flat(obj) or all(_is_flat(v) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(_plain(obj), indent, 0) + "\n"


def dump(obj: Any, path: "str | Path") -> None:
    Path(path).write_text(dumps(obj))


def read_json(source: "str | Path | dict") -> Any:
    if isinstance(source, (dict, list)):
        return source
    return json.loads(Path(source).read_text())


def decode_matrix(data) -> np.ndarray:
    """Matrix from either ``[[[re, im], ...], ...]`` or plain real rows."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(np.complex128)
    raise ValueError(f"cannot read a matrix from an array of shape {arr.shape}")


def _check_dim(obj: dict, m: np.ndarray) -> None:
    if "dim" in obj and int(obj["dim"]) != m.shape[0]:
        raise ValueError(f"declared dim {obj['dim']} but matrix is {m.shape[0]}x{m.shape[1]}")


def state_to_dict(rho) -> dict:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return {"dim": int(m.shape[0]), "matrix": m.astype(np.complex128)}


def pvm_to_dict(pvm: Pvm) -> dict:
    return {"dim": pvm.dim, "projectors": [p.matrix for p in pvm]}


def table_to_dict(table: QuasiProbTable) -> dict:
    rows, cols = table.row_sums, table.col_sums
    return {
        "kind": table.kind,
        "dim": table.dim,
        "values": table.values,
        "row_marginals": rows.real,
        "col_marginals": cols.real,
        "total": float(table.total.real),
        "state_row_probabilities": table.row_probs,
        "state_col_probabilities": table.col_probs,
    }


def load_state(source, tol: float = DEFAULT_TOL) -> DensityMatrix:
    obj = read_json(source)
    if isinstance(obj, dict):
        m = decode_matrix(obj["matrix"])
        _check_dim(obj, m)
    else:
        m = decode_matrix(obj)
    return validate_density(m, tol)


def load_pvm(source, tol: float = DEFAULT_TOL) -> Pvm:
    obj = read_json(source)
    if "basis" in obj:
        vecs = decode_matrix(obj["basis"])
        pvm = pvm_from_basis(list(vecs), tol)
    elif "projectors" in obj:
        pvm = validate_pvm([decode_matrix(p) for p in obj["projectors"]], tol)
    else:
        raise ValueError('PVM file needs a "projectors" or "basis" field')
    if "dim" in obj and int(obj["dim"]) != pvm.dim:
        raise ValueError(f"declared dim {obj['dim']} but PVM acts on dimension {pvm.dim}")
    return pvm


def load_table(source, pa: Pvm | None = None, pb: Pvm | None = None) -> QuasiProbTable:
    obj = read_json(source)
    values = decode_matrix(obj["values"])
    rows = obj.get("state_row_probabilities", values.sum(axis=1).real)
    cols = obj.get("state_col_probabilities", values.sum(axis=0).real)
    return QuasiProbTable(obj["kind"], values, rows, cols, pa, pb)
