"""JSON encodings: complex scalars as ``[re, im]``, matrices as row-major nested lists."""

import numpy as np

from .errors import ScenarioError


def complex_to_json(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(value, path=""):
    if isinstance(value, bool):
        raise ScenarioError("expected a number or [re, im]", path)
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ScenarioError("complex scalar must be a number or a two-element [re, im] array", path)


def matrix_to_json(m):
    m = np.asarray(m)
    return [[complex_to_json(z) for z in row] for row in m]


def matrix_from_json(rows, path=""):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ScenarioError("matrix must be a non-empty list of rows", path)
    width = len(rows[0])
    out = np.empty((len(rows), width), dtype=complex)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ScenarioError(f"ragged matrix: row {i} has {len(row)} entries, expected {width}", path)
        for j, v in enumerate(row):
            out[i, j] = complex_from_json(v, f"{path}[{i}][{j}]")
    return out
