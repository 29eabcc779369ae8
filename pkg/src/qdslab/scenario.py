"""Scenario files: JSON descriptions of an algebra plus a generator or a lattice.

Example::

    {"algebra": {"blocks": [2]},
     "generator": {"type": "lindblad", "hamiltonian": [[1, 0], [0, -1]],
                   "jump_ops": [[[0, 0], [1, 0]]]},
     "run": {"n_max": 4, "seed": 0}}
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .algebra import Algebra, AlgebraElement, State
from .errors import CapExceeded, ScenarioError
from .generators import Superoperator, element_from_json, generator_from_json
from .lattice import Interaction, LatticeRegion, interaction_from_json

_SCALAR = {
    "anyOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _SCALAR}}
_ELEMENT = {
    "anyOf": [
        _MATRIX,
        {"type": "object", "required": ["blocks"], "properties": {"blocks": {"type": "array", "items": _MATRIX}},
         "additionalProperties": False},
    ]
}
_INTERVAL = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "required": ["algebra"],
    "additionalProperties": False,
    "properties": {
        "algebra": {
            "type": "object",
            "required": ["blocks"],
            "properties": {"blocks": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}}},
            "additionalProperties": False,
        },
        "generator": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["commutator", "lindblad", "weyl", "matrix"]},
                "hamiltonian": _ELEMENT,
                "jump_ops": {"type": "array", "items": _ELEMENT},
                "weyl": {
                    "type": "object",
                    "required": ["d", "weights"],
                    "properties": {
                        "d": {"type": "integer", "minimum": 2},
                        "weights": {"type": "array", "items": {
                            "type": "array", "minItems": 3, "maxItems": 3,
                            "prefixItems": [{"type": "integer"}, {"type": "integer"}, {"type": "number", "minimum": 0}]}},
                    },
                },
                "matrix": _MATRIX,
                "label": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "lattice": {
            "type": "object",
            "required": ["q", "terms", "region"],
            "properties": {
                "q": {"type": "integer", "minimum": 2},
                "terms": {"type": "array", "items": {
                    "type": "object", "required": ["offsets", "matrix"],
                    "properties": {"offsets": {"type": "array", "minItems": 1, "items": {"type": "integer"}},
                                   "matrix": _MATRIX},
                    "additionalProperties": False}},
                "explicit_terms": {"type": "array", "items": {
                    "type": "object", "required": ["sites", "matrix"],
                    "properties": {"sites": {"type": "array", "minItems": 1, "items": {"type": "integer"}},
                                   "matrix": _MATRIX},
                    "additionalProperties": False}},
                "region": _INTERVAL,
                "volumes": {"type": "array", "items": _INTERVAL},
                "lambda": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "state": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["trace", "pure", "density"]},
                "vector": {"type": "array", "items": _SCALAR},
                "block": {"type": "integer", "minimum": 0},
                "densities": {"type": "array", "items": _MATRIX},
                "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
            },
            "additionalProperties": False,
        },
        "observables": {"type": "object"},
        "run": {
            "type": "object",
            "properties": {
                "t_grid": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "alpha_grid": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
                "n_max": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "sample_count": {"type": "integer", "minimum": 0},
                "t": {"type": "number"},
                "t_small": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
    },
}

RUN_DEFAULTS = {"n_max": 4, "seed": 0, "tol": 1e-9, "sample_count": 20, "t_grid": [0.1, 0.5, 1.0, 2.0]}


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


@dataclass(frozen=True)
class Scenario:
    """Validated scenario. ``data`` is the normalized JSON (defaults filled in)."""

    data: dict = field(compare=True)

    @property
    def algebra(self) -> Algebra:
        return Algebra(tuple(self.data["algebra"]["blocks"]))

    @property
    def run(self) -> dict:
        return self.data["run"]

    @property
    def seed(self) -> int:
        return self.run["seed"]

    @property
    def kind(self) -> str:
        return "generator" if "generator" in self.data else "lattice"

    def generator(self) -> Superoperator:
        return generator_from_json(self.data["generator"], self.algebra)

    def interaction(self) -> Interaction:
        return interaction_from_json(self.data["lattice"])

    def region(self) -> LatticeRegion:
        lo, hi = self.data["lattice"]["region"]
        return LatticeRegion(lo, hi, self.data["lattice"]["q"])

    def state(self) -> State:
        A = self.algebra
        spec = self.data.get("state", {"type": "trace"})
        path = "state"
        try:
            if spec["type"] == "trace":
                return State.normalized_trace(A)
            if spec["type"] == "pure":
                from .serialize import complex_from_json

                vec = [complex_from_json(v, f"{path}.vector[{i}]") for i, v in enumerate(spec.get("vector", []))]
                block = spec.get("block", 0)
                if block >= len(A.blocks) or len(vec) != A.blocks[block]:
                    raise ScenarioError("dimension mismatch: vector length must match the block", f"{path}.vector")
                return State.pure(A, vec, block)
            from .serialize import matrix_from_json

            dens = [matrix_from_json(m, f"{path}.densities[{k}]") for k, m in enumerate(spec.get("densities", []))]
            return State(A, dens, spec.get("weights", [1.0] * len(dens)))
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), path) from exc

    def observable(self, label: str):
        """``(element, support)``; ``support`` is a region for lattice scenarios, else None."""
        obs = self.data.get("observables", {})
        if label not in obs:
            raise ScenarioError(f"unknown observable {label!r}; known: {sorted(obs)}", "observables")
        spec = obs[label]
        path = f"observables.{label}"
        if self.kind == "generator":
            return element_from_json(self.algebra, spec, path), None
        from .serialize import matrix_from_json

        if not isinstance(spec, dict) or "support" not in spec or "matrix" not in spec:
            raise ScenarioError("lattice observable needs 'support' [lo, hi] and 'matrix'", path)
        lo, hi = spec["support"]
        q = self.data["lattice"]["q"]
        support = LatticeRegion(lo, hi, q)
        m = matrix_from_json(spec["matrix"], f"{path}.matrix")
        if m.shape != (support.dim, support.dim):
            raise ScenarioError(f"dimension mismatch: observable is {m.shape[0]}-dimensional, support needs {support.dim}", f"{path}.matrix")
        return AlgebraElement(support.algebra, [m]), support

    def to_json(self) -> dict:
        return copy.deepcopy(self.data)

    def with_overrides(self, **overrides) -> Scenario:
        data = copy.deepcopy(self.data)
        for k, v in overrides.items():
            if v is not None:
                data["run"][k] = v
        return scenario_from_dict(data)


def scenario_from_dict(data) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        # report the deepest error: it names the most specific failing field
        err = max(errors, key=lambda e: len(e.absolute_path))
        while err.context:
            err = max(err.context, key=lambda e: len(e.absolute_path))
        raise ScenarioError(f"schema violation: {err.message}", _path(err.absolute_path))
    data = copy.deepcopy(data)
    if ("generator" in data) == ("lattice" in data):
        raise ScenarioError("exactly one of 'generator' or 'lattice' is required", "<root>")
    run = dict(RUN_DEFAULTS)
    run.update(data.get("run", {}))
    run["t_grid"] = [float(t) for t in run["t_grid"]]
    data["run"] = run
    data.setdefault("observables", {})
    sc = Scenario(data)
    try:
        if sc.kind == "generator":
            sc.generator()
            if "state" in data:
                sc.state()
        else:
            if tuple(data["algebra"]["blocks"]) != (data["lattice"]["q"] ** (data["lattice"]["region"][1] - data["lattice"]["region"][0] + 1),):
                raise ScenarioError("dimension mismatch: algebra blocks must be [q^N] for the lattice region", "algebra.blocks")
            phi = sc.interaction()
            region = sc.region()
            if phi.q != region.q:
                raise ScenarioError("q mismatch", "lattice.q")
            for lo, hi in data["lattice"].get("volumes", []):
                LatticeRegion(lo, hi, region.q)
        for label in data["observables"]:
            sc.observable(label)
    except ScenarioError:
        raise
    except (ValueError, CapExceeded) as exc:
        raise ScenarioError(str(exc), "<root>") from exc
    return sc


def parse_scenario(path) -> Scenario:
    p = Path(path)
    if not p.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data)


def parse_t_grid(spec: str) -> list[float]:
    """``start:stop:step`` with inclusive ``stop``."""
    try:
        start, stop, step = (float(s) for s in spec.split(":"))
    except ValueError as exc:
        raise ScenarioError(f"--t-grid must be start:stop:step, got {spec!r}", "--t-grid") from exc
    if step <= 0 or stop < start:
        raise ScenarioError("--t-grid needs step > 0 and stop >= start", "--t-grid")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]
