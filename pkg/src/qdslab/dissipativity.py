"""Dissipativity certificates with reproducible witnesses.

Three routes decide whether ``delta`` is dissipative at an element ``x``:

* norm condition: ``||x - alpha*delta(x)|| >= ||x||`` on a grid of ``alpha > 0``;
* functional condition: ``Re f(delta(x)) <= 0`` for every norming functional
  ``f`` of ``x``. Norming functionals of a block matrix are mixtures of
  ``y -> <y u, v>`` with ``u`` in the top right singular subspace and
  ``v = x u / ||x||``, so the worst case is the largest eigenvalue of
  ``herm(x* delta(x))`` compressed to that subspace; this is exact;
* contractivity: ``||exp(t delta)(x)|| <= ||x||`` on a time grid. This is
  the sharpest of the three in finite dimensions.

Levels ``n = 1..n_max`` repeat the checks for ``delta_n``. A finite ``n_max``
only ever gives "verified up to n_max".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg

from .algebra import Algebra, AlgebraElement, _gaussian, operator_norm
from .errors import HypothesisViolation
from .generators import Superoperator, amplify_generator
from .serialize import complex_to_json, matrix_to_json
from .verdict import Verdict

DEFAULT_ALPHA_GRID = tuple(2.0 ** np.linspace(-10, 10, 41))
DEFAULT_T_GRID = (0.1, 0.5, 1.0, 2.0)
DEGENERACY = 1e-8


def _norms(A: Algebra, vecs: np.ndarray) -> np.ndarray:
    """C*-norms of a stack of vectorized elements, shape ``(m, dim)``."""
    out = np.zeros(vecs.shape[0])
    for d, off in zip(A.blocks, A.offsets):
        # C-order reshape gives the transpose of each block; singular values agree
        mats = vecs[:, off : off + d * d].reshape(-1, d, d)
        out = np.maximum(out, np.linalg.norm(mats, ord=2, axis=(1, 2)))
    return out


def norming_functional_bound(x: AlgebraElement, y: AlgebraElement):
    """``max Re f(y)`` over norming functionals ``f`` of ``x``.

    Returns ``(value, witness)`` with the witness giving the block and the unit
    vectors ``u, v`` of the maximizing functional ``f(z) = <z u, v>``.
    """
    nx = operator_norm(x)
    best = (-np.inf, None)
    for k, (xb, yb) in enumerate(zip(x.blocks, y.blocks)):
        U, s, Vh = np.linalg.svd(xb)
        if s[0] < nx * (1 - DEGENERACY):
            continue
        top = s >= nx * (1 - DEGENERACY)
        V = Vh.conj().T[:, top]
        Q = xb.conj().T @ yb
        Q = (Q + Q.conj().T) / 2
        w, z = np.linalg.eigh(V.conj().T @ Q @ V)
        val = float(w[-1]) / nx
        if val > best[0]:
            u = V @ z[:, -1]
            v = xb @ u
            v = v / np.linalg.norm(v)
            best = (val, {"block": k, "u": u, "v": v})
    return best


def check_dissipative(delta: Superoperator, x: AlgebraElement, alpha_grid=None, tol: float = 1e-9) -> Verdict:
    """Norm condition on ``alpha_grid`` plus the exact functional condition at ``x``.

    ``x`` is rescaled to unit norm first, so ``tol`` is relative. ``info``
    reports both method verdicts and whether they agree.
    """
    if alpha_grid is None:
        alpha_grid = DEFAULT_ALPHA_GRID
    alphas = np.asarray(alpha_grid, dtype=float)
    if alphas.size == 0 or np.any(alphas <= 0):
        raise ValueError("alpha grid must be nonempty and positive")
    nx = operator_norm(x)
    if nx == 0:
        return Verdict(True, None, {"norm_condition": True, "functional_condition": True, "agree": True})
    xs = x / nx
    dx = delta(xs)
    vecs = xs.vec()[None, :] - alphas[:, None] * dx.vec()[None, :]
    norms = _norms(x.algebra, vecs)
    i = int(np.argmin(norms))
    norm_ok = bool(norms[i] >= 1 - tol)
    fval, fwit = norming_functional_bound(xs, dx)
    func_ok = bool(fval <= tol)
    info = {
        "norm_condition": norm_ok,
        "functional_condition": func_ok,
        "agree": norm_ok == func_ok,
        "min_ratio": float(norms[i]),
        "max_functional": fval,
    }
    if norm_ok and func_ok:
        return Verdict(True, None, info)
    if not norm_ok:
        witness = {"method": "norm_condition", "element": x, "alpha": float(alphas[i]),
                   "value": float(norms[i] * nx), "norm": nx}
    else:
        witness = {"method": "functional_condition", "element": x, "value": fval, **fwit}
    return Verdict(False, witness, info)


def _structured_probes(B: Algebra, n: int, base: Algebra) -> dict[str, AlgebraElement]:
    """Choi-type elements ``sum E_ij (x) E_ij`` and flips ``sum E_ij (x) E_ji``
    in the first block of the amplified algebra."""
    if n < 2:
        return {}
    d = base.blocks[0]
    m = min(n, d)
    choi = np.zeros((n * d, n * d), dtype=complex)
    flip = np.zeros((n * d, n * d), dtype=complex)
    for i in range(m):
        for j in range(m):
            choi[i * d + i, j * d + j] = 1
            flip[i * d + j, j * d + i] = 1
    rest = [np.zeros((b, b)) for b in B.blocks[1:]]
    return {"choi": AlgebraElement(B, [choi, *rest]), "flip": AlgebraElement(B, [flip, *rest])}


def _samples(B: Algebra, count: int, seed: int, n: int) -> list[AlgebraElement]:
    rng = np.random.default_rng([seed, n])
    return [AlgebraElement(B, [_gaussian(rng, d) for d in B.blocks]) for _ in range(count)]


@dataclass
class LevelResult:
    n: int
    ok: bool
    checks: dict[str, bool]
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)


@dataclass
class DissipativityReport:
    levels: list[LevelResult]
    methods: list[str]
    seed: int
    tol: float
    n_max: int
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(lv.ok for lv in self.levels)

    def level(self, n: int) -> LevelResult:
        return self.levels[n - 1]

    def first_failure(self) -> int | None:
        for lv in self.levels:
            if not lv.ok:
                return lv.n
        return None

    def to_json(self) -> dict:
        return {
            "levels": [
                {"n": lv.n, "verdict": "pass" if lv.ok else "fail", "checks": lv.checks,
                 "witness": witness_to_json(lv.witness), "details": _jsonable(lv.details)}
                for lv in self.levels
            ],
            "methods": list(self.methods),
            "seed": self.seed,
            "tol": self.tol,
            "n_max": self.n_max,
            "summary": ("verified up to n_max" if self.ok else f"violation at level {self.first_failure()}"),
            "notes": list(self.notes),
        }


def _jsonable(value):
    if isinstance(value, AlgebraElement):
        return value.to_json()
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return matrix_to_json(value)
        return [complex_to_json(z) for z in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, complex):
        return complex_to_json(value)
    return value


def witness_to_json(witness):
    """Full-matrix serialization; no hashing, so a witness can be replayed offline."""
    return None if witness is None else _jsonable(witness)


def certify_completely_dissipative(
    delta: Superoperator,
    n_max: int = 4,
    sample_count: int = 20,
    alpha_grid=None,
    t_grid=DEFAULT_T_GRID,
    seed: int = 0,
    tol: float = 1e-9,
) -> DissipativityReport:
    """Dissipativity of ``delta_n`` for ``n = 1..n_max``.

    Each level tests the matrix units, Choi/flip probes and ``sample_count``
    seeded Gaussian elements against the norm condition, the functional
    condition and the contractivity of ``exp(t delta_n)`` on ``t_grid``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    A = delta.algebra
    levels = []
    for n in range(1, n_max + 1):
        dn = amplify_generator(delta, n) if n > 1 else delta
        B = dn.algebra
        named = _structured_probes(B, n, A)
        elements = B.basis() + list(named.values()) + _samples(B, sample_count, seed, n)
        checks = {"norm_condition": True, "functional_condition": True, "contractivity": True}
        witness = None
        for x in elements:
            v = check_dissipative(dn, x, alpha_grid, tol)
            if not v:
                for key in ("norm_condition", "functional_condition"):
                    checks[key] = checks[key] and v.info[key]
                if witness is None:
                    witness = {"level": n, **v.witness}
        X = np.array([x.vec() for x in elements])
        base = _norms(B, X)
        worst_growth = 0.0
        growth_witness = None
        probe_norms = {name: {} for name in named}
        for t in t_grid:
            E = scipy.linalg.expm(t * dn.matrix)
            out = _norms(B, X @ E.T)
            ratio = out / base
            j = int(np.argmax(ratio))
            worst_growth = max(worst_growth, float(ratio[j] - 1))
            for offset, name in enumerate(named):
                probe_norms[name][float(t)] = float(out[B.dim + offset])
            if out[j] > base[j] * (1 + tol) + tol:
                checks["contractivity"] = False
                if growth_witness is None or ratio[j] > growth_witness["value"] / growth_witness["norm"]:
                    growth_witness = {"level": n, "method": "contractivity", "element": elements[j],
                                      "t": float(t), "value": float(out[j]), "norm": float(base[j])}
        if growth_witness is not None:
            witness = growth_witness
        details = {"elements": len(elements), "max_relative_growth": worst_growth}
        if probe_norms:
            details["probe_norms"] = probe_norms
        levels.append(LevelResult(n, all(checks.values()), checks, witness, details))
    notes = [f"verified up to n_max={n_max}; complete dissipativity needs every n"]
    if len(A.blocks) == 1 and n_max >= A.blocks[0]:
        notes.append(
            f"n_max >= d={A.blocks[0]}: for maps into M_d, positivity at level d already implies complete positivity"
        )
    return DissipativityReport(levels, ["norm_condition", "functional_condition", "contractivity"], seed, tol, n_max, notes)


def reproduce_witness(delta: Superoperator, witness: dict) -> float:
    """Recompute the violation amount stored in a witness (positive = violated)."""
    n = witness.get("level", 1)
    dn = amplify_generator(delta, n) if n > 1 else delta
    x = witness["element"]
    method = witness["method"]
    nx = operator_norm(x)
    if method == "norm_condition":
        return nx - operator_norm(x - witness["alpha"] * dn(x))
    if method == "functional_condition":
        y = dn(x / nx)
        k = witness["block"]
        return float(np.real(witness["v"].conj() @ y.blocks[k] @ witness["u"]))
    if method == "contractivity":
        E = Superoperator(dn.algebra, scipy.linalg.expm(witness["t"] * dn.matrix))
        return operator_norm(E(x)) - nx
    raise ValueError(f"unknown witness method {method!r}")


def check_dissipation_inequality(delta: Superoperator, x: AlgebraElement, tol: float = 1e-8) -> Verdict:
    """``delta(x*x) - delta(x)* x - x* delta(x) >= 0`` (requires ``delta(1) = 0``)."""
    from .algebra import is_positive

    A = delta.algebra
    scale = max(1.0, float(np.linalg.norm(delta.matrix, 2)))
    if operator_norm(delta(A.identity())) > 1e-10 * scale:
        raise HypothesisViolation("delta(1) != 0: the inequality is only asserted for unital generators")
    dx = delta(x)
    gap = delta(x.adjoint() @ x) - dx.adjoint() @ x - x.adjoint() @ dx
    v = is_positive(gap, tol)
    info = dict(v.info)
    info["gap_norm"] = operator_norm(gap)
    if v:
        return Verdict(True, None, info)
    return Verdict(False, {"x": x, "gap": gap, **v.witness}, info)


# -- well-behaved derivations ------------------------------------------------------

def _spectral_states(a: AlgebraElement, count: int, rng) -> tuple[list[tuple[int, np.ndarray]], bool]:
    """Pure states at the top of the spectrum of positive ``a``.

    Returns ``(states, degenerate)``; for a degenerate top eigenspace the list
    holds ``count`` random unit vectors from it.
    """
    top = max(float(np.linalg.eigvalsh(b)[-1]) for b in a.blocks)
    spaces = []
    for k, b in enumerate(a.blocks):
        w, v = np.linalg.eigh((b + b.conj().T) / 2)
        sel = w >= top - DEGENERACY * max(top, 1.0)
        if sel.any():
            spaces.append((k, v[:, sel]))
    dim = sum(V.shape[1] for _, V in spaces)
    if dim == 1:
        k, V = spaces[0]
        return [(k, V[:, 0])], False
    states = []
    for _ in range(count):
        k, V = spaces[rng.integers(len(spaces))]
        c = rng.standard_normal(V.shape[1]) + 1j * rng.standard_normal(V.shape[1])
        states.append((k, V @ (c / np.linalg.norm(c))))
    return states, True


@dataclass
class WellBehavedResult:
    n: int
    state_condition: Verdict
    norm_condition: Verdict
    incomplete: bool

    @property
    def ok(self) -> bool:
        return bool(self.state_condition) and bool(self.norm_condition)

    @property
    def agree(self) -> bool:
        return bool(self.state_condition) == bool(self.norm_condition)

    def to_json(self) -> dict:
        def one(v):
            return {"verdict": "pass" if v else "fail", "witness": witness_to_json(v.witness), "info": _jsonable(v.info)}

        return {"n": self.n, "verdict": "pass" if self.ok else "fail", "agree": self.agree,
                "incomplete_probe": self.incomplete,
                "state_condition": one(self.state_condition), "norm_condition": one(self.norm_condition)}


def check_well_behaved(
    delta: Superoperator,
    sample_count: int = 20,
    alpha_grid_signed=None,
    seed: int = 0,
    tol: float = 1e-9,
    elements=None,
    _level: int = 1,
) -> WellBehavedResult:
    """Spectral-state and two-sided norm conditions on positive elements.

    State condition: for positive ``a`` and a pure state ``phi`` at the top of
    its spectrum (so ``phi(a) = ||a||``), ``|phi(delta(a))| <= tol * ||a||``.
    Norm condition: ``||a + alpha delta(a)|| >= ||a||`` for ``alpha`` of both
    signs. Degenerate top eigenspaces are probed with 20 random pure states,
    which is flagged as incomplete.
    """
    if alpha_grid_signed is None:
        g = np.asarray(DEFAULT_ALPHA_GRID)
        alpha_grid_signed = np.concatenate([-g[::-1], g])
    alphas = np.asarray(alpha_grid_signed, dtype=float)
    A = delta.algebra
    rng = np.random.default_rng([seed, _level, 7])
    family = list(elements or [])
    for _ in range(sample_count):
        g = AlgebraElement(A, [_gaussian(rng, d) for d in A.blocks])
        family.append(g.adjoint() @ g)
    state_fail = norm_fail = None
    worst_state = 0.0
    min_ratio = np.inf
    incomplete = False
    for a in family:
        na = operator_norm(a)
        if na == 0:
            continue
        da = delta(a)
        states, degenerate = _spectral_states(a, 20, rng)
        incomplete |= degenerate
        for k, u in states:
            val = complex(u.conj() @ da.blocks[k] @ u) / na
            worst_state = max(worst_state, abs(val))
            if abs(val) > tol and state_fail is None:
                state_fail = {"element": a, "block": k, "vector": u, "value": val}
        vecs = a.vec()[None, :] + alphas[:, None] * da.vec()[None, :]
        ratios = _norms(A, vecs) / na
        i = int(np.argmin(ratios))
        min_ratio = min(min_ratio, float(ratios[i]))
        if ratios[i] < 1 - tol and norm_fail is None:
            norm_fail = {"element": a, "alpha": float(alphas[i]), "value": float(ratios[i] * na), "norm": na}
    sv = Verdict(state_fail is None, state_fail, {"max_abs_state_value": worst_state, "tested": len(family)})
    nv = Verdict(norm_fail is None, norm_fail, {"min_ratio": min_ratio, "tested": len(family)})
    return WellBehavedResult(_level, sv, nv, incomplete)


def check_matricial_well_behaved(delta: Superoperator, n_max: int = 4, sample_count: int = 20,
                                 alpha_grid_signed=None, seed: int = 0, tol: float = 1e-9) -> list[WellBehavedResult]:
    """:func:`check_well_behaved` on ``delta_n`` for ``n = 1..n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    out = []
    for n in range(1, n_max + 1):
        dn = amplify_generator(delta, n) if n > 1 else delta
        out.append(check_well_behaved(dn, sample_count, alpha_grid_signed, seed, tol, _level=n))
    return out
