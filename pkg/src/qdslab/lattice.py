"""One-dimensional quantum spin chains: interactions, local Hamiltonians and
finite-volume dynamics.

Sites of a region ``[lo, hi]`` are tensored left to right, so site ``lo`` is
the most significant factor. Dynamics act on the ``q**N``-dimensional state
space (``e^{itH} a e^{-itH}``), not on the superoperator space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import Algebra, AlgebraElement, operator_norm
from .errors import CapExceeded, ScenarioError

STATE_CAP = 4096


@dataclass(frozen=True)
class LatticeRegion:
    lo: int
    hi: int
    q: int = 2
    cap: int = field(default=STATE_CAP, compare=False)

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty region [{self.lo}, {self.hi}]")
        if self.q < 2:
            raise ValueError("single-site dimension q must be >= 2")
        if self.q**self.size > self.cap:
            raise CapExceeded(f"q^N = {self.q}^{self.size} exceeds state cap {self.cap}")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    @property
    def sites(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def dim(self) -> int:
        return self.q**self.size

    @property
    def algebra(self) -> Algebra:
        # the superoperator cap is irrelevant here: only states are exponentiated
        return Algebra((self.dim,), cap=max(self.dim**2, 1))

    def contains(self, other: LatticeRegion) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    @classmethod
    def around(cls, center: int, radius: int, q: int = 2) -> LatticeRegion:
        return cls(center - radius, center + radius, q)


def _hermitian(m, what):
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what}: local term must be a square matrix")
    if np.linalg.norm(m - m.conj().T, 2) > 1e-12:
        raise ValueError(f"{what}: local term must be hermitian")
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class Interaction:
    """Finite list of translation-invariant terms plus optional explicit terms.

    ``terms`` holds ``(offsets, matrix)`` pairs: the matrix acts on the sites
    ``s + o`` (in increasing order) for every placement ``s``. ``explicit``
    holds ``(sites, matrix)`` pairs at fixed absolute positions.
    """

    q: int
    terms: tuple = ()
    explicit: tuple = ()

    def __post_init__(self):
        norm_terms = []
        for offsets, m in self.terms:
            offs = sorted(int(o) for o in offsets)
            if not offs or len(set(offs)) != len(offs):
                raise ValueError("term support must be a nonempty set of distinct offsets")
            base = offs[0]
            offs = tuple(o - base for o in offs)
            m = _hermitian(m, f"term {offs}")
            if m.shape[0] != self.q ** len(offs):
                raise ValueError(f"term {offs}: matrix is {m.shape[0]}-dimensional, expected q^{len(offs)}")
            norm_terms.append((offs, m))
        norm_explicit = []
        for sites, m in self.explicit:
            sites = tuple(sorted(int(s) for s in sites))
            m = _hermitian(m, f"explicit term {sites}")
            if m.shape[0] != self.q ** len(sites):
                raise ValueError(f"explicit term {sites}: wrong matrix dimension")
            norm_explicit.append((sites, m))
        object.__setattr__(self, "terms", tuple(norm_terms))
        object.__setattr__(self, "explicit", tuple(norm_explicit))

    @property
    def translation_invariant(self) -> bool:
        return not self.explicit

    def placements(self, region: LatticeRegion):
        """Every ``(sites, matrix)`` with support inside ``region``."""
        for offs, m in self.terms:
            for s in range(region.lo, region.hi - offs[-1] + 1):
                yield tuple(s + o for o in offs), m
        for sites, m in self.explicit:
            if region.lo <= sites[0] and sites[-1] <= region.hi:
                yield sites, m


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def transverse_field_ising(J: float = 1.0, h: float = 0.5) -> Interaction:
    """``J Z_s Z_{s+1} + h X_s``."""
    terms = []
    if J:
        terms.append(((0, 1), J * np.kron(PAULI["Z"], PAULI["Z"])))
    if h:
        terms.append(((0,), h * PAULI["X"]))
    return Interaction(2, tuple(terms))


def embed_operator(m: np.ndarray, sites, region: LatticeRegion) -> np.ndarray:
    """``m`` acting on ``sites`` (increasing) tensored with identity elsewhere in ``region``."""
    q, N = region.q, region.size
    pos = [s - region.lo for s in sites]
    rest = [p for p in range(N) if p not in pos]
    k = len(pos)
    full = np.kron(m, np.eye(q ** (N - k)))
    full = full.reshape([q] * (2 * N))
    order = pos + rest
    # axis order -> natural site order, rows then columns
    perm = [order.index(p) for p in range(N)]
    perm = perm + [N + p for p in perm]
    return full.transpose(perm).reshape(q**N, q**N)


def local_hamiltonian(phi: Interaction, region: LatticeRegion) -> AlgebraElement:
    """Sum of ``phi(X)`` over all placements ``X`` inside ``region``."""
    if region.q != phi.q:
        raise ValueError("region and interaction disagree on q")
    H = np.zeros((region.dim, region.dim), dtype=complex)
    for sites, m in phi.placements(region):
        H += embed_operator(m, sites, region)
    return AlgebraElement(region.algebra, [H])


@dataclass(frozen=True)
class RuelleBound:
    value: float
    contributions: tuple[float, ...]
    exact: bool
    tail: float


def ruelle_bound(phi: Interaction, lam: float, n_max: int) -> RuelleBound:
    """``sum_{n <= n_max} e^{n lam} sup_s sum_{X ∋ s, |X| = n+1} ||phi(X)||``.

    Terms sharing a support pattern are summed before taking norms. For a
    translation-invariant interaction every site sees the same sum, and a
    pattern ``P`` has ``|P|`` placements containing a given site. ``tail`` is
    the (finite) remainder beyond ``n_max``; ``exact`` is True when it vanishes.
    """
    if not phi.translation_invariant:
        raise ValueError("the summability bound needs a translation-invariant interaction")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    by_pattern: dict[tuple, np.ndarray] = {}
    for offs, m in phi.terms:
        by_pattern[offs] = by_pattern.get(offs, 0) + m
    per_n: dict[int, float] = {}
    for offs, m in by_pattern.items():
        n = len(offs) - 1
        per_n[n] = per_n.get(n, 0.0) + len(offs) * float(np.linalg.norm(m, 2))
    contributions = tuple(math.exp(n * lam) * per_n.get(n, 0.0) for n in range(n_max + 1))
    tail = sum(math.exp(n * lam) * v for n, v in per_n.items() if n > n_max)
    return RuelleBound(float(sum(contributions)), contributions, tail == 0.0, tail)


def embed_observable(a: AlgebraElement, inner: LatticeRegion, outer: LatticeRegion) -> AlgebraElement:
    """``a (x) 1`` on ``outer`` minus ``inner``, preserving site order."""
    if not outer.contains(inner) or inner.q != outer.q:
        raise ValueError(f"region [{inner.lo}, {inner.hi}] is not nested in [{outer.lo}, {outer.hi}]")
    if a.algebra.blocks != (inner.dim,):
        raise ValueError("observable does not live on the inner region")
    left = np.eye(inner.q ** (inner.lo - outer.lo))
    right = np.eye(inner.q ** (outer.hi - inner.hi))
    return AlgebraElement(outer.algebra, [np.kron(np.kron(left, a.blocks[0]), right)])


def _propagator(H: AlgebraElement, t: float) -> np.ndarray:
    w, V = np.linalg.eigh(H.blocks[0])
    return (V * np.exp(1j * t * w)) @ V.conj().T


def finite_volume_dynamics(phi: Interaction, region: LatticeRegion, t: float, a: AlgebraElement) -> AlgebraElement:
    """``e^{itH} a e^{-itH}`` with ``H`` the local Hamiltonian of ``region``."""
    if a.algebra.blocks != (region.dim,):
        raise ValueError("observable must live on the region; embed it first")
    if t == 0:
        return a
    U = _propagator(local_hamiltonian(phi, region), t)
    return AlgebraElement(a.algebra, [U @ a.blocks[0] @ U.conj().T])


@dataclass(frozen=True)
class ConvergenceDiagnostic:
    gaps: tuple[float, ...]
    strictly_decreasing: bool


def convergence_diagnostic(phi: Interaction, a: AlgebraElement, support: LatticeRegion, t: float, volumes) -> ConvergenceDiagnostic:
    """Gaps ``||alpha_t^{V_{k+1}}(a) - alpha_t^{V_k}(a)||`` between nested volumes,
    both evolved observables embedded in the larger volume."""
    volumes = list(volumes)
    for V in volumes:
        if not V.contains(support):
            raise ValueError("every volume must contain the observable's support")
    for V, W in zip(volumes, volumes[1:]):
        if not W.contains(V):
            raise ValueError("volumes must be nested and increasing")
    evolved = [finite_volume_dynamics(phi, V, t, embed_observable(a, support, V)) for V in volumes]
    gaps = []
    for k in range(len(volumes) - 1):
        small = embed_observable(evolved[k], volumes[k], volumes[k + 1])
        gaps.append(operator_norm(evolved[k + 1] - small))
    dec = len(gaps) >= 2 and all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    return ConvergenceDiagnostic(tuple(gaps), dec)


def derivative_check(phi: Interaction, region: LatticeRegion, a: AlgebraElement, t_small: float) -> float:
    """``||(alpha_t(a) - a)/t - i[H, a]||``; O(t) as ``t -> 0``."""
    if t_small <= 0:
        raise ValueError("t_small must be positive")
    H = local_hamiltonian(phi, region)
    at = finite_volume_dynamics(phi, region, t_small, a)
    comm = 1j * (H @ a - a @ H)
    return operator_norm((at - a) / t_small - comm)


# -- JSON scenario schema ------------------------------------------------------------

def interaction_from_json(spec, path="lattice") -> Interaction:
    from .serialize import matrix_from_json

    q = spec.get("q")
    terms = []
    for k, term in enumerate(spec.get("terms", [])):
        m = matrix_from_json(term["matrix"], f"{path}.terms[{k}].matrix")
        terms.append((term["offsets"], m))
    explicit = []
    for k, term in enumerate(spec.get("explicit_terms", []) or []):
        m = matrix_from_json(term["matrix"], f"{path}.explicit_terms[{k}].matrix")
        explicit.append((term["sites"], m))
    try:
        return Interaction(q, tuple(terms), tuple(explicit))
    except ValueError as exc:
        raise ScenarioError(str(exc), f"{path}.terms") from exc
