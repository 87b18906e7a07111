"""Tensor files and deterministic JSON rendering.

Floats are written with 17 significant digits so that load/emit round-trips
are exact.  Complex numbers are ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction

import numpy as np

from . import tensor as kt
from .errors import DimensionMismatch, NonFinite
from .models import BundleCurvature


def _float(x):
    x = float(x)
    if not math.isfinite(x):
        raise NonFinite(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    if x == int(x) and abs(x) < 1e16:
        return str(int(x)) + ".0"
    return format(x, ".17g")


def _render(obj, indent, level):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = "," + nl if indent else ", "
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else json.dumps(str(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return "[" + _float(obj.real) + ", " + _float(obj.imag) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _render(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + _render(v, indent, level + 1) for k, v in obj.items()]
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj)
        parts = [_render(v, indent, level + 1) for v in obj]
        if flat or not indent:
            return "[" + ", ".join(parts) + "]"
        return "[" + nl + sep.join(pad + p for p in parts) + nl + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON text (insertion-ordered keys, 17-digit floats)."""
    return _render(obj, indent, 0) + "\n"


def write_text(path, text):
    """Write atomically so that a failure never leaves a partial file."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# complex arrays


def complex_to_nested(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1)


def nested_to_complex(data, shape=None, name="array"):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"{name}: not a numeric array") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise DimensionMismatch(f"{name}: entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None and out.shape != tuple(shape):
        raise DimensionMismatch(f"{name}: expected shape {tuple(shape)}, got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise NonFinite(f"{name}: non-finite entries")
    return out


# ---------------------------------------------------------------------------
# tensor files


def tensor_document(R, g=None):
    R = np.asarray(R, dtype=complex)
    n = R.shape[0]
    doc = {"n": int(n)}
    if g is not None and not np.array_equal(np.asarray(g), np.eye(n)):
        doc["metric"] = complex_to_nested(g)
    doc["R"] = complex_to_nested(R)
    return doc


def dump_tensor(R, g=None):
    return dumps(tensor_document(R, g))


def load_tensor_document(doc, tol=kt.VALIDATION_TOL):
    """Parse and validate; returns ``(g, R)`` (``g`` is the identity if absent)."""
    if not isinstance(doc, dict) or "n" not in doc or "R" not in doc:
        raise DimensionMismatch("tensor document needs fields 'n' and 'R'")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise DimensionMismatch("'n' must be a positive integer")
    R = nested_to_complex(doc["R"], (n,) * 4, "R")
    if doc.get("metric") is not None:
        g = nested_to_complex(doc["metric"], (n, n), "metric")
        kt.validate_hermitian(g)
        kt.orthonormal_frame(g)  # raises SingularMetric if not positive definite
    else:
        g = np.eye(n, dtype=complex)
    R = kt.validate_tensor(R, tol)
    return g, R


def load_tensor(path, tol=kt.VALIDATION_TOL):
    with open(path) as fh:
        doc = json.load(fh)
    return load_tensor_document(doc, tol)


def load_bundle_input(path):
    """Read a projectivized-bundle point description.

    Fields: ``lambda``, ``Rg`` (n^4 pairs), ``Rh`` (r x r x n x n pairs) and
    optional ``xi``, ``d3``, ``d4``.
    """
    from .projbundle import ProjBundleInput

    with open(path) as fh:
        doc = json.load(fh)
    for key in ("lambda", "Rg", "Rh"):
        if key not in doc:
            raise DimensionMismatch(f"bundle input needs field {key!r}")
    Rg = nested_to_complex(doc["Rg"], name="Rg")
    if Rg.ndim != 4:
        raise DimensionMismatch("Rg must be a rank-4 array")
    Rg = kt.validate_tensor(Rg)
    Rh = nested_to_complex(doc["Rh"], name="Rh")
    d3 = nested_to_complex(doc["d3"], name="d3") if doc.get("d3") is not None else None
    d4 = nested_to_complex(doc["d4"], name="d4") if doc.get("d4") is not None else None
    xi = np.asarray(doc["xi"], dtype=float) if doc.get("xi") is not None else None
    return ProjBundleInput(lam=float(doc["lambda"]), Rg=Rg, Rh=BundleCurvature(Rh), xi=xi, d3=d3, d4=d4)


def bundle_input_document(inp):
    doc = {"lambda": inp.lam, "Rg": complex_to_nested(inp.Rg), "Rh": complex_to_nested(inp.Rh.Rh), "xi": inp.xi}
    if np.any(inp.d3 != 0):
        doc["d3"] = complex_to_nested(inp.d3)
    if np.any(inp.d4 != 0):
        doc["d4"] = complex_to_nested(inp.d4)
    return doc
