"""JSON model documents.

A document looks like::

    {
      "format_version": 1,
      "kind": "hgamma",
      "parameters": {"kappa": 1.0},
      "dims": {"n1": 1, "n2": 0, "n3": 0, "m": 1},
      "matrices": {
        "H_co": [[0, 1], [1, 0]],
        "Gamma_co": {"scale": "sqrt(kappa/2)", "data": [[[0, 1], [0, -1]], [[0, -1], [0, 1]]]}
      }
    }

``kind`` is one of annihilation, kalman, hgamma or quadrature. Matrix entries
are numbers, expression strings over the named parameters, or [re, im] pairs.
Omitted blocks are zero. Optional sections: ``block_dims`` (Kalman block sizes
for annihilation/quadrature models already in block order), ``transforms``
(decomposition candidates) and ``expected`` (reference verdicts).
"""
import ast
import json
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ModelFormatError, QKalmanError
from .model import (KALMAN_BLOCKS, HGAMMA_BLOCKS, AnnihilationForm, BlockDims, HGammaParams,
                    KalmanForm, QuadratureSystem)

__all__ = ["FORMAT_VERSION", "KINDS", "ModelDocument", "read_document", "parse_document",
           "load_model", "save_model", "model_to_dict", "evaluate_expression", "parse_matrix"]

FORMAT_VERSION = 1
KINDS = ("annihilation", "kalman", "hgamma", "quadrature")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": math.sqrt}
_CONSTS = {"pi": math.pi}


def evaluate_expression(expr, names, where=None):
    """Arithmetic on numbers and named scalars; sqrt and pi are available."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as e:
        raise ModelFormatError(f"bad expression {expr!r}: {e.msg}", field=where) from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Name):
            if node.id in names:
                return float(names[node.id])
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            raise ModelFormatError(f"unknown name {node.id!r} in {expr!r}", field=where)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ModelFormatError(f"unsupported expression {expr!r}", field=where)

    try:
        return ev(tree)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise ModelFormatError(f"cannot evaluate {expr!r}: {e}", field=where) from None


def _scalar(v, names, where):
    if isinstance(v, bool):
        raise ModelFormatError("booleans are not numbers", field=where)
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        return evaluate_expression(v, names, where)
    raise ModelFormatError(f"expected a number or expression, got {type(v).__name__}", field=where)


def _entry(v, names, where):
    if isinstance(v, list):
        if len(v) != 2:
            raise ModelFormatError("complex entries must be [re, im] pairs", field=where)
        return complex(_scalar(v[0], names, where), _scalar(v[1], names, where))
    return _scalar(v, names, where)


def _matrix(spec, names, where):
    scale = 1.0
    if isinstance(spec, dict):
        if "data" not in spec:
            raise ModelFormatError("missing field", field=f"{where}.data")
        scale = _scalar(spec.get("scale", 1.0), names, f"{where}.scale")
        spec = spec["data"]
    if not isinstance(spec, list) or any(not isinstance(r, list) for r in spec):
        raise ModelFormatError("a matrix is a list of rows", field=where)
    if not spec:
        return np.zeros((0, 0))
    widths = {len(r) for r in spec}
    if len(widths) != 1:
        raise ModelFormatError("rows have different lengths", field=where)
    vals = [[_entry(v, names, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(spec)]
    dtype = complex if any(isinstance(v, complex) for r in vals for v in r) else float
    return scale * np.array(vals, dtype=dtype)


def parse_matrix(spec, names=None, where="matrix"):
    """Matrix from its document form (list of rows or {"scale", "data"})."""
    return _matrix(spec, names or {}, where)


def _int(d, key, where):
    if key not in d:
        raise ModelFormatError("missing field", field=f"{where}.{key}")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ModelFormatError("must be a non-negative integer", field=f"{where}.{key}")
    return v


def _block_dims(d, where):
    if not isinstance(d, dict):
        raise ModelFormatError("expected an object", field=where)
    n1 = _int(d, "n1", where)
    n2 = _int(d, "n2", where)
    m = _int(d, "m", where)
    if "n3" in d:
        return BlockDims.make(n1=n1, n2=n2, n3=_int(d, "n3", where), m=m)
    if "na" in d or "nb" in d:
        return BlockDims(n1=n1, n2=n2, na=_int(d, "na", where), nb=_int(d, "nb", where), m=m)
    raise ModelFormatError("missing field", field=f"{where}.n3")


@dataclass(frozen=True)
class ModelDocument:
    kind: str
    model: object
    parameters: dict = field(default_factory=dict)
    block_dims: BlockDims = None
    transforms: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    description: str = ""
    id: str = ""


def _transforms(spec, names):
    out = {}
    if not isinstance(spec, dict):
        raise ModelFormatError("expected an object", field="transforms")
    for key, t in spec.items():
        if key not in ("P_cbo", "P_co", "P_h"):
            raise ModelFormatError("unknown transform", field=f"transforms.{key}")
        if not isinstance(t, dict) or "matrix" not in t:
            raise ModelFormatError("missing field", field=f"transforms.{key}.matrix")
        P = _matrix(t["matrix"], names, f"transforms.{key}.matrix")
        if np.iscomplexobj(P):
            raise ModelFormatError("transforms must be real", field=f"transforms.{key}")
        out[key] = (P, _int(t, "split", f"transforms.{key}"))
    return out


def parse_document(doc, overrides=None):
    """Build a ModelDocument from decoded JSON; ``overrides`` replace parameter values."""
    if not isinstance(doc, dict):
        raise ModelFormatError("top level must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"expected {FORMAT_VERSION}", field="format_version")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ModelFormatError(f"must be one of {', '.join(KINDS)}", field="kind")
    params = doc.get("parameters", {})
    if not isinstance(params, dict):
        raise ModelFormatError("expected an object", field="parameters")
    names = {k: _scalar(v, {}, f"parameters.{k}") for k, v in params.items()}
    for k, v in (overrides or {}).items():
        if k not in names:
            raise ModelFormatError("override of an undeclared parameter", field=f"parameters.{k}")
        names[k] = float(v)
    if "dims" not in doc:
        raise ModelFormatError("missing field", field="dims")
    mats = doc.get("matrices", {})
    if not isinstance(mats, dict):
        raise ModelFormatError("expected an object", field="matrices")
    M = {k: _matrix(v, names, f"matrices.{k}") for k, v in mats.items()}
    dims = doc["dims"]

    try:
        if kind in ("kalman", "hgamma"):
            bd = _block_dims(dims, "dims")
            allowed = KALMAN_BLOCKS if kind == "kalman" else HGAMMA_BLOCKS
            for k in M:
                if k not in allowed:
                    raise ModelFormatError("unknown block", field=f"matrices.{k}")
            cls = KalmanForm if kind == "kalman" else HGammaParams
            model = cls(bd, **M)
            if kind == "hgamma":
                model.validate()
        else:
            n = _int(dims, "n", "dims")
            m = _int(dims, "m", "dims")
            allowed = ("A", "B", "C") if kind == "annihilation" else ("Abar", "Bbar", "Cbar")
            for k in M:
                if k not in allowed:
                    raise ModelFormatError("unknown block", field=f"matrices.{k}")
            if kind == "annihilation":
                model = AnnihilationForm(n, m, *(M.get(k) for k in allowed)).validate()
            else:
                model = QuadratureSystem(n, m, *(M.get(k) for k in allowed))
    except ModelFormatError:
        raise
    except QKalmanError as e:
        raise ModelFormatError(str(e), field="matrices") from None

    block = _block_dims(doc["block_dims"], "block_dims") if "block_dims" in doc else None
    if block is not None and kind in ("kalman", "hgamma"):
        raise ModelFormatError("only for annihilation or quadrature models", field="block_dims")
    if block is not None and (block.n != model.n or block.m != model.m):
        raise ModelFormatError("block sizes do not add up to dims", field="block_dims")
    return ModelDocument(kind, model, names, block, _transforms(doc.get("transforms", {}), names),
                         dict(doc.get("expected", {})), str(doc.get("description", "")),
                         str(doc.get("id", "")))


def read_document(path, overrides=None):
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(e.msg, line=e.lineno) from None
    return parse_document(doc, overrides)


def load_model(path):
    return read_document(path).model


def _encode(X):
    X = np.asarray(X)
    if np.iscomplexobj(X):
        return [[[float(v.real), float(v.imag)] for v in row] for row in X]
    return [[float(v) for v in row] for row in X]


def model_to_dict(model, **extra):
    if isinstance(model, (KalmanForm, HGammaParams)):
        kind = "kalman" if isinstance(model, KalmanForm) else "hgamma"
        dims = model.dims.as_dict()
        blocks = model.blocks()
    elif isinstance(model, AnnihilationForm):
        kind, dims = "annihilation", {"n": model.n, "m": model.m}
        blocks = {"A": model.A, "B": model.B, "C": model.C}
    elif isinstance(model, QuadratureSystem):
        kind, dims = "quadrature", {"n": model.n, "m": model.m}
        blocks = {"Abar": model.Abar, "Bbar": model.Bbar, "Cbar": model.Cbar}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    doc = {"format_version": FORMAT_VERSION, "kind": kind, "dims": dims,
           "matrices": {k: _encode(v) for k, v in blocks.items() if np.asarray(v).size}}
    doc.update(extra)
    return doc


def save_model(model, path, **extra):
    """Write ``model`` as a JSON document; floats use repr so values round-trip exactly."""
    Path(path).write_text(json.dumps(model_to_dict(model, **extra), indent=2) + "\n")
