"""Generators on finite-dimensional algebras, stored as dense superoperator matrices.

A :class:`Superoperator` acts on vectorized elements (see :mod:`qdslab.algebra`
for the column-stacking convention). Every constructor satisfies
``delta(1) = 0``: bit-exactly for commutators and d = 2, 4 Weyl damping, and to
rounding (~1e-16) for Lindblad and other Weyl generators.

Amplification ``delta_n = delta (x) id_n`` acts on ``A (x) M_n``, realized as the
algebra with blocks ``n*d_k`` whose elements are ``n x n`` block matrices
``(x_ij)``; ``delta_n`` applies ``delta`` to every entry. In the amplified
algebra's own vectorization the amplification of an amplification is the
amplification at the product level, so no basis reordering is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from scipy.linalg import block_diag

from .algebra import Algebra, AlgebraElement, _gaussian, operator_norm
from .errors import AlgebraMismatch, HypothesisViolation, ScenarioError
from .verdict import Verdict


@dataclass(frozen=True, eq=False)
class Superoperator:
    algebra: Algebra
    matrix: np.ndarray
    label: str = ""
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.algebra.dim, self.algebra.dim):
            raise AlgebraMismatch(f"matrix shape {m.shape} does not fit algebra dim {self.algebra.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, x: AlgebraElement) -> AlgebraElement:
        return apply_generator(self, x)

    def _same(self, other):
        if other.algebra != self.algebra:
            raise AlgebraMismatch(f"{self.algebra.blocks} vs {other.algebra.blocks}")

    def __add__(self, other):
        self._same(other)
        return Superoperator(self.algebra, self.matrix + other.matrix, f"({self.label} + {other.label})")

    def __sub__(self, other):
        self._same(other)
        return Superoperator(self.algebra, self.matrix - other.matrix, f"({self.label} - {other.label})")

    def __neg__(self):
        return Superoperator(self.algebra, -self.matrix, f"-{self.label}", self.meta)

    def __mul__(self, scalar):
        return Superoperator(self.algebra, scalar * self.matrix, f"{scalar}*{self.label}")

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition ``(self @ other)(x) = self(other(x))``."""
        self._same(other)
        return Superoperator(self.algebra, self.matrix @ other.matrix, f"{self.label}.{other.label}")

    @classmethod
    def zero(cls, A: Algebra):
        return cls(A, np.zeros((A.dim, A.dim)), "zero")

    @classmethod
    def identity(cls, A: Algebra):
        return cls(A, np.eye(A.dim), "id")

    @classmethod
    def from_function(cls, A: Algebra, f: Callable[[AlgebraElement], AlgebraElement], label=""):
        cols = [f(e).vec() for e in A.basis()]
        return cls(A, np.column_stack(cols), label)


def apply_generator(delta: Superoperator, x: AlgebraElement) -> AlgebraElement:
    if x.algebra != delta.algebra:
        raise AlgebraMismatch(f"superoperator on {delta.algebra.blocks}, element on {x.algebra.blocks}")
    return delta.algebra.from_vector(delta.matrix @ x.vec())


def left_mult(x: AlgebraElement) -> np.ndarray:
    """Matrix of ``y -> x y`` in the vectorized basis."""
    return block_diag(*[np.kron(np.eye(b.shape[0]), b) for b in x.blocks])


def right_mult(x: AlgebraElement) -> np.ndarray:
    """Matrix of ``y -> y x`` in the vectorized basis."""
    return block_diag(*[np.kron(b.T, np.eye(b.shape[0])) for b in x.blocks])


def _require_hermitian(H: AlgebraElement, tol=1e-12):
    if operator_norm(H - H.adjoint()) > tol:
        raise HypothesisViolation("Hamiltonian must be hermitian")


def commutator_derivation(H: AlgebraElement) -> Superoperator:
    """``delta(a) = i(Ha - aH)`` for hermitian ``H``."""
    _require_hermitian(H)
    m = 1j * (left_mult(H) - right_mult(H))
    return Superoperator(H.algebra, m, "commutator", {"constructor": "commutator_derivation"})


def lindblad_generator(H: AlgebraElement, jumps=()) -> Superoperator:
    """``i[H, a] + sum_k (V_k* a V_k - (V_k* V_k a + a V_k* V_k) / 2)``."""
    _require_hermitian(H)
    A = H.algebra
    m = 1j * (left_mult(H) - right_mult(H))
    for V in jumps:
        if V.algebra != A:
            raise AlgebraMismatch("jump operator lives on a different algebra")
        Vs = V.adjoint()
        K = Vs @ V
        m = m + left_mult(Vs) @ right_mult(V) - 0.5 * (left_mult(K) + right_mult(K))
    return Superoperator(A, m, "lindblad", {"constructor": "lindblad_generator", "n_jumps": len(jumps)})


def random_lindblad(A: Algebra, seed: int, n_jumps: int = 2) -> Superoperator:
    """Seeded Lindblad generator with O(1) norm.

    Per block of size d: ``H = herm(G) / sqrt(d)`` and ``V_k = G_k / sqrt(2d)``
    with ``G`` standard complex Gaussian.
    """
    rng = np.random.default_rng(seed)
    Hb = []
    for d in A.blocks:
        g = _gaussian(rng, d)
        Hb.append((g + g.conj().T) / 2 / np.sqrt(d))
    jumps = [AlgebraElement(A, [_gaussian(rng, d) / np.sqrt(2 * d) for d in A.blocks]) for _ in range(n_jumps)]
    delta = lindblad_generator(AlgebraElement(A, Hb), jumps)
    return Superoperator(A, delta.matrix, "lindblad", {"constructor": "random_lindblad", "seed": seed})


def _root_of_unity(k: int, d: int) -> complex:
    # quarter turns are returned exactly so that d = 2, 4 Weyl operators are exact
    k %= d
    if (4 * k) % d == 0:
        return (1, 1j, -1, -1j)[4 * k // d]
    return complex(np.exp(2j * np.pi * k / d))


def weyl_operator(d: int, p: int, q: int) -> np.ndarray:
    """``W(p, q) = X^p Z^q`` with ``X|j> = |j+1 mod d>`` and ``Z = diag(zeta^j)``."""
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag([_root_of_unity(j, d) for j in range(d)])
    return np.linalg.matrix_power(X, p % d) @ np.linalg.matrix_power(Z, q % d)


def minimal_length_weights(d: int) -> dict[tuple[int, int], float]:
    """``c(p, q) = |p|^2 + |q|^2`` using minimal representatives of Z_d."""
    return {(p, q): float(min(p, d - p) ** 2 + min(q, d - q) ** 2) for p in range(d) for q in range(d)}


def weyl_damping_generator(d: int, weights: Mapping[tuple[int, int], float]) -> Superoperator:
    """Generator diagonal in the Weyl basis: ``delta(W(v)) = -c(v) W(v)``.

    Missing weights are zero. ``c(0, 0)`` must vanish and all weights must be
    nonnegative.
    """
    c = {}
    for (p, q), val in weights.items():
        key = (p % d, q % d)
        c[key] = c.get(key, 0.0) + float(val)
    if c.get((0, 0), 0.0) != 0.0:
        raise HypothesisViolation("c(0, 0) must be 0, otherwise delta(1) != 0")
    if any(v < 0 for v in c.values()):
        raise HypothesisViolation("Weyl damping weights must be nonnegative")
    A = Algebra((d,))
    # W(v)/sqrt(d) is an orthonormal basis for the Hilbert-Schmidt inner product
    U = np.column_stack([weyl_operator(d, p, q).reshape(-1, order="F") for p in range(d) for q in range(d)])
    U = U / np.sqrt(d)
    rates = np.array([c.get((p, q), 0.0) for p in range(d) for q in range(d)])
    m = -(U * rates) @ U.conj().T
    return Superoperator(A, m, "weyl", {"constructor": "weyl_damping_generator", "d": d, "weights": c})


def transpose_map(A: Algebra) -> Superoperator:
    return Superoperator.from_function(A, lambda x: AlgebraElement(A, [b.T for b in x.blocks]), "transpose")


def amplification_index(A: Algebra, n: int) -> np.ndarray:
    """``idx[u, a]``: position in ``vec(A (x) M_n)`` of algebra basis index ``a``
    inside matrix unit ``u = i + j*n`` of ``M_n``."""
    B = A.amplify(n)
    idx = np.empty((n * n, A.dim), dtype=int)
    for k, (d, off, boff) in enumerate(zip(A.blocks, A.offsets, B.offsets)):
        r, c = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        r, c = r.reshape(-1, order="F"), c.reshape(-1, order="F")
        for j in range(n):
            for i in range(n):
                idx[i + j * n, off : off + d * d] = boff + (i * d + r) + (j * d + c) * (n * d)
    return idx


def amplify_generator(delta: Superoperator, n: int) -> Superoperator:
    """``delta_n``: apply ``delta`` entrywise to ``n x n`` matrices over the algebra."""
    B = delta.algebra.amplify(n)
    m = np.zeros((B.dim, B.dim), dtype=complex)
    for block in amplification_index(delta.algebra, n):
        m[np.ix_(block, block)] = delta.matrix
    meta = dict(delta.meta)
    meta["amplification"] = meta.get("amplification", 1) * n
    return Superoperator(B, m, f"{delta.label}_{n}" if n > 1 else delta.label, meta)


def _star_permutation(A: Algebra) -> np.ndarray:
    """Permutation ``P`` with ``vec(x*) = P @ conj(vec(x))``."""
    perm = []
    for d, off in zip(A.blocks, A.offsets):
        for c in range(d):
            for r in range(d):
                perm.append(off + c + r * d)
    return np.array(perm)


def is_hermitian_map(delta: Superoperator, tol: float = 1e-10) -> Verdict:
    """``delta(e*) == delta(e)*`` for every matrix unit ``e`` (within ``tol`` in norm)."""
    A = delta.algebra
    perm = _star_permutation(A)
    M = delta.matrix
    worst, where = 0.0, None
    for j in range(A.dim):
        # e_j* is the matrix unit at perm[j]
        lhs = M[:, perm[j]]
        rhs = np.conj(M[:, j])[perm]
        defect = operator_norm(A.from_vector(lhs - rhs))
        if defect > worst:
            worst, where = defect, j
    if worst <= tol:
        return Verdict(True, None, {"max_defect": worst})
    return Verdict(False, {"basis_index": where, "defect": worst}, {"max_defect": worst})


def leibniz_defect(delta: Superoperator, pairs) -> float:
    """Largest ``||delta(xy) - delta(x) y - x delta(y)||`` over the given pairs."""
    out = 0.0
    for x, y in pairs:
        r = delta(x @ y) - delta(x) @ y - x @ delta(y)
        out = max(out, operator_norm(r))
    return out


# -- JSON generator specification ------------------------------------------------

def element_from_json(A: Algebra, value, path="") -> AlgebraElement:
    """An element given as a single matrix (single-block algebras) or ``{"blocks": [...]}``."""
    from .serialize import matrix_from_json

    if isinstance(value, dict):
        if "blocks" not in value or not isinstance(value["blocks"], list):
            raise ScenarioError("element object needs a 'blocks' list", path)
        mats = [matrix_from_json(b, f"{path}.blocks[{k}]") for k, b in enumerate(value["blocks"])]
    else:
        if len(A.blocks) != 1:
            raise ScenarioError("multi-block algebra: give the element as {'blocks': [...]}", path)
        mats = [matrix_from_json(value, path)]
    if len(mats) != len(A.blocks):
        raise ScenarioError(f"expected {len(A.blocks)} blocks, got {len(mats)}", path)
    for k, (m, d) in enumerate(zip(mats, A.blocks)):
        if m.shape != (d, d):
            raise ScenarioError(f"dimension mismatch: block {k} is {m.shape[0]}x{m.shape[1]}, algebra needs {d}x{d}", path)
    return AlgebraElement(A, mats)


def generator_from_json(spec: Mapping, A: Algebra, path="generator") -> Superoperator:
    """Build a generator from ``{"type": "commutator"|"lindblad"|"weyl"|"matrix", ...}``."""
    from .serialize import matrix_from_json

    kind = spec.get("type")
    if kind in ("commutator", "lindblad"):
        if "hamiltonian" in spec:
            H = element_from_json(A, spec["hamiltonian"], f"{path}.hamiltonian")
        else:
            H = A.zero()
        try:
            if kind == "commutator":
                return commutator_derivation(H)
            jumps = [element_from_json(A, v, f"{path}.jump_ops[{k}]") for k, v in enumerate(spec.get("jump_ops", []))]
            return lindblad_generator(H, jumps)
        except HypothesisViolation as exc:
            raise ScenarioError(str(exc), f"{path}.hamiltonian") from exc
    if kind == "weyl":
        w = spec.get("weyl") or {}
        d = w.get("d")
        if A.blocks != (d,):
            raise ScenarioError(f"dimension mismatch: weyl d={d} needs algebra blocks [{d}]", f"{path}.weyl.d")
        weights = {(int(p), int(q)): float(c) for p, q, c in w.get("weights", [])}
        try:
            return weyl_damping_generator(d, weights)
        except HypothesisViolation as exc:
            raise ScenarioError(str(exc), f"{path}.weyl.weights") from exc
    if kind == "matrix":
        m = matrix_from_json(spec["matrix"], f"{path}.matrix")
        if m.shape != (A.dim, A.dim):
            raise ScenarioError(f"dimension mismatch: superoperator is {m.shape}, algebra needs {(A.dim, A.dim)}", f"{path}.matrix")
        return Superoperator(A, m, spec.get("label", "matrix"), {"constructor": "matrix"})
    raise ScenarioError(f"unknown generator type {kind!r}", f"{path}.type")
