"""Finite-dimensional C*-algebras ``M_{d_1} + ... + M_{d_m}``, their elements and states.

Vectorization convention (used everywhere a superoperator is stored as a
matrix): each block is column-stacked (Fortran order) and the block vectors
are concatenated in declaration order. With this convention
``vec(a x b) = kron(b.T, a) @ vec(x)``.

Random general elements have i.i.d. standard complex Gaussian entries,
``(N(0,1) + i N(0,1)) / sqrt(2)``, drawn block by block from
``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlgebraMismatch, CapExceeded
from .verdict import Verdict

DEFAULT_CAP = 4096


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Algebra:
    """Direct sum of full matrix algebras with block sizes ``blocks``.

    ``cap`` bounds the element dimension ``sum(d**2)`` so that superoperators
    (``dim x dim`` dense matrices) stay tractable.
    """

    blocks: tuple[int, ...]
    cap: int = field(default=DEFAULT_CAP, compare=False)

    def __post_init__(self):
        blocks = tuple(int(d) for d in self.blocks)
        if not blocks:
            raise ValueError("an algebra needs at least one block")
        if any(d < 1 for d in blocks):
            raise ValueError(f"block dimensions must be >= 1, got {blocks}")
        object.__setattr__(self, "blocks", blocks)
        if self.dim > self.cap:
            raise CapExceeded(f"element dimension {self.dim} exceeds cap {self.cap}")

    @property
    def total_dim(self) -> int:
        """Embedding dimension ``D = sum(d_k)``."""
        return sum(self.blocks)

    @property
    def dim(self) -> int:
        """Element (vector-space) dimension ``sum(d_k**2)``."""
        return sum(d * d for d in self.blocks)

    @property
    def offsets(self) -> list[int]:
        out, acc = [], 0
        for d in self.blocks:
            out.append(acc)
            acc += d * d
        return out

    def element(self, blocks) -> AlgebraElement:
        return AlgebraElement(self, blocks)

    def identity(self) -> AlgebraElement:
        return AlgebraElement(self, [np.eye(d) for d in self.blocks])

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, [np.zeros((d, d)) for d in self.blocks])

    def from_vector(self, v) -> AlgebraElement:
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise ValueError(f"vector of shape {v.shape} does not match algebra dim {self.dim}")
        return AlgebraElement(
            self,
            [v[o : o + d * d].reshape((d, d), order="F") for o, d in zip(self.offsets, self.blocks)],
        )

    def basis(self) -> list[AlgebraElement]:
        """Matrix units, ordered to match the vectorization."""
        return [self.from_vector(e) for e in np.eye(self.dim)]

    def amplify(self, n: int) -> Algebra:
        """``A (x) M_n`` realized as ``M_{n d_1} + ... + M_{n d_m}``."""
        if n < 1:
            raise ValueError("amplification level must be >= 1")
        dim = n * n * self.dim
        if dim > self.cap:
            raise CapExceeded(f"amplified element dimension {dim} exceeds cap {self.cap}")
        return Algebra(tuple(n * d for d in self.blocks), cap=self.cap)

    def to_json(self):
        return {"blocks": list(self.blocks)}


class AlgebraElement:
    """An element of an :class:`Algebra`; one complex matrix per block.

    Immutable. ``+``, ``-`` and scalar ``*`` act blockwise; ``@`` is the
    algebra product.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: Algebra, blocks):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != len(algebra.blocks):
            raise AlgebraMismatch(f"expected {len(algebra.blocks)} blocks, got {len(blocks)}")
        for k, (b, d) in enumerate(zip(blocks, algebra.blocks)):
            if b.shape != (d, d):
                raise AlgebraMismatch(f"block {k} has shape {b.shape}, expected {(d, d)}")
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.algebra != self.algebra:
            raise AlgebraMismatch(f"{self.algebra.blocks} vs {other.algebra.blocks}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.algebra, [scalar * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return AlgebraElement(self.algebra, [a / scalar for a in self.blocks])

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> AlgebraElement:
        return AlgebraElement(self.algebra, [a.conj().T for a in self.blocks])

    def vec(self) -> np.ndarray:
        return np.concatenate([b.reshape(-1, order="F") for b in self.blocks])

    def allclose(self, other, atol=1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self):
        return f"AlgebraElement(blocks={self.algebra.blocks})"

    def to_json(self):
        from .serialize import matrix_to_json

        return {"blocks": [matrix_to_json(b) for b in self.blocks]}


def operator_norm(x: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in x.blocks)


def default_positivity_tol(x: AlgebraElement) -> float:
    return 1e-9 * x.algebra.total_dim * max(operator_norm(x), 1.0)


def is_positive(x: AlgebraElement, tol: float | None = None) -> Verdict:
    """Hermitian within ``tol`` and smallest eigenvalue ``>= -tol``.

    On failure the witness names the block, the offending eigenvalue and its
    eigenvector (or the hermiticity defect).
    """
    if tol is None:
        tol = default_positivity_tol(x)
    defect = operator_norm(x - x.adjoint())
    if defect > tol:
        return Verdict(False, {"reason": "not hermitian", "hermiticity_defect": defect}, {"tol": tol})
    worst = (np.inf, None, None)
    for k, b in enumerate(x.blocks):
        w, v = np.linalg.eigh((b + b.conj().T) / 2)
        if w[0] < worst[0]:
            worst = (float(w[0]), k, v[:, 0])
    lam, k, vec = worst
    info = {"tol": tol, "min_eigenvalue": lam, "hermiticity_defect": defect}
    if lam >= -tol:
        return Verdict(True, None, info)
    return Verdict(False, {"block": k, "eigenvalue": lam, "eigenvector": vec}, info)


@dataclass(frozen=True, eq=False)
class State:
    """Normalized positive functional ``w(x) = sum_k weights[k] * tr(densities[k] @ x_k)``."""

    algebra: Algebra
    densities: tuple
    weights: tuple
    tol: float = 1e-9

    def __post_init__(self):
        dens = tuple(_frozen(r) for r in self.densities)
        weights = tuple(float(w) for w in self.weights)
        A = self.algebra
        if len(dens) != len(A.blocks) or len(weights) != len(A.blocks):
            raise AlgebraMismatch("one density and one weight per block required")
        for k, (r, d) in enumerate(zip(dens, A.blocks)):
            if r.shape != (d, d):
                raise AlgebraMismatch(f"density {k} has shape {r.shape}, expected {(d, d)}")
            if np.linalg.norm(r - r.conj().T, 2) > self.tol:
                raise ValueError(f"density {k} is not hermitian")
            if weights[k] > 0:
                if np.linalg.eigvalsh(r)[0] < -self.tol:
                    raise ValueError(f"density {k} is not positive")
                if abs(np.trace(r) - 1) > self.tol:
                    raise ValueError(f"density {k} does not have unit trace")
        if any(w < 0 for w in weights) or abs(sum(weights) - 1) > self.tol:
            raise ValueError(f"weights must be nonnegative and sum to 1, got {weights}")
        object.__setattr__(self, "densities", dens)
        object.__setattr__(self, "weights", weights)

    def __call__(self, x: AlgebraElement) -> complex:
        return evaluate_state(self, x)

    @classmethod
    def normalized_trace(cls, A: Algebra) -> State:
        D = A.total_dim
        return cls(A, [np.eye(d) / d for d in A.blocks], [d / D for d in A.blocks])

    @classmethod
    def pure(cls, A: Algebra, vector, block: int = 0) -> State:
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        dens = [np.outer(v, v.conj()) if k == block else np.eye(d) / d for k, d in enumerate(A.blocks)]
        return cls(A, dens, [1.0 if k == block else 0.0 for k in range(len(A.blocks))])

    def density_vector(self) -> np.ndarray:
        """``r`` with ``w(x) = r @ x.vec()``."""
        return np.concatenate([w * r.T.reshape(-1, order="F") for w, r in zip(self.weights, self.densities)])

    def is_faithful(self, tol: float = 1e-12) -> bool:
        return all(w > tol and np.linalg.eigvalsh(r)[0] > tol for w, r in zip(self.weights, self.densities))

    def to_json(self):
        from .serialize import matrix_to_json

        return {"densities": [matrix_to_json(r) for r in self.densities], "weights": list(self.weights)}


def evaluate_state(omega: State, x: AlgebraElement) -> complex:
    if omega.algebra != x.algebra:
        raise AlgebraMismatch(f"state on {omega.algebra.blocks}, element on {x.algebra.blocks}")
    return complex(sum(w * np.trace(r @ b) for w, r, b in zip(omega.weights, omega.densities, x.blocks)))


def _gaussian(rng, d):
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)


def random_sample(A: Algebra, seed: int, kind: str = "general"):
    """Seeded random element (``general``, ``hermitian``, ``positive``) or ``state``."""
    rng = np.random.default_rng(seed)
    gs = [_gaussian(rng, d) for d in A.blocks]
    if kind == "general":
        return AlgebraElement(A, gs)
    if kind == "hermitian":
        return AlgebraElement(A, [(g + g.conj().T) / 2 for g in gs])
    if kind == "positive":
        return AlgebraElement(A, [g.conj().T @ g for g in gs])
    if kind == "state":
        dens = []
        for g in gs:
            p = g.conj().T @ g
            dens.append(p / np.trace(p).real)
        weights = rng.dirichlet(np.ones(len(A.blocks)))
        return State(A, dens, weights)
    raise ValueError(f"unknown sample kind {kind!r}")


def amplify_element(x: AlgebraElement, n: int) -> AlgebraElement:
    """``x (x) 1_n``: the block-diagonal n x n matrix with ``x`` on the diagonal."""
    B = x.algebra.amplify(n)
    return AlgebraElement(B, [np.kron(np.eye(n), b) for b in x.blocks])


def amplify_state(omega: State, n: int) -> State:
    """``w (x) tr_n`` with ``tr_n`` the normalized trace on ``M_n``."""
    B = omega.algebra.amplify(n)
    return State(B, [np.kron(np.eye(n) / n, r) for r in omega.densities], omega.weights)


def matrix_entries(x: AlgebraElement, n: int, base: Algebra) -> list[list[AlgebraElement]]:
    """Split an element of ``base.amplify(n)`` into its n x n entries in ``base``."""
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(
                AlgebraElement(base, [b[i * d : (i + 1) * d, j * d : (j + 1) * d] for b, d in zip(x.blocks, base.blocks)])
            )
        out.append(row)
    return out
