"""Semigroups generated by superoperators: exponentials, resolvents, Euler
approximants, Choi matrices and the identities that tie them together."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .algebra import Algebra, AlgebraElement, is_positive, operator_norm, random_sample
from .errors import NotUnitalError, ResolventError, UnsupportedStructure
from .generators import Superoperator, amplify_generator
from .verdict import Verdict

MAX_CONDITION = 1e12


def exp_generator(delta: Superoperator, t: float) -> Superoperator:
    """``exp(t delta)`` via scaling and squaring (scipy's Pade implementation)."""
    if t == 0:
        return Superoperator(delta.algebra, np.eye(delta.algebra.dim), "id")
    m = scipy.linalg.expm(t * delta.matrix)
    return Superoperator(delta.algebra, m, f"exp({t}*{delta.label})", {"t": t})


def resolvent(delta: Superoperator, alpha: float) -> Superoperator:
    """``(I - alpha*delta)^{-1}``; raises :class:`ResolventError` when it does not exist."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n = delta.algebra.dim
    M = np.eye(n) - alpha * delta.matrix
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ResolventError(f"resolvent does not exist at alpha={alpha} (condition number {cond:.3g})")
    R = np.linalg.solve(M, np.eye(n))
    return Superoperator(delta.algebra, R, f"R({alpha})", {"alpha": alpha})


def shifted_resolvent(delta: Superoperator, k: float) -> np.ndarray:
    """``(kI - delta)^{-1} = resolvent(delta, 1/k) / k`` as a bare matrix."""
    return resolvent(delta, 1.0 / k).matrix / k


def euler_approximant(delta: Superoperator, t: float, n: int) -> Superoperator:
    """``(I - (t/n) delta)^{-n}``, which converges to ``exp(t delta)`` like ``O(1/n)``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return Superoperator(delta.algebra, np.eye(delta.algebra.dim), "id")
    R = resolvent(delta, t / n).matrix
    return Superoperator(delta.algebra, np.linalg.matrix_power(R, n), f"euler({t},{n})", {"t": t, "n": n})


def superop_distance(S: Superoperator, T: Superoperator) -> float:
    """Spectral norm of the difference of the stored matrices."""
    return float(np.linalg.norm(S.matrix - T.matrix, 2))


def recover_generator(tau: Callable[[float], Superoperator], h: float) -> Superoperator:
    """Forward difference quotient ``(tau(h) - I) / h``."""
    if h <= 0:
        raise ValueError("h must be positive")
    T = tau(h)
    return Superoperator(T.algebra, (T.matrix - np.eye(T.algebra.dim)) / h, f"recovered(h={h})", {"h": h})


def check_resolvent_identity(delta: Superoperator, k1: float, k2: float, tol: float = 1e-10) -> Verdict:
    """``R(k1) - R(k2) = (k2 - k1) R(k1) R(k2)`` with ``R(k) = (kI - delta)^{-1}``."""
    R1 = shifted_resolvent(delta, k1)
    R2 = shifted_resolvent(delta, k2)
    residual = float(np.linalg.norm(R1 - R2 - (k2 - k1) * R1 @ R2, 2))
    info = {"residual": residual, "k1": k1, "k2": k2, "tol": tol}
    return Verdict(residual <= tol, None if residual <= tol else {"residual": residual}, info)


def is_unital(T: Superoperator, tol: float = 1e-10) -> bool:
    one = T.algebra.identity()
    return operator_norm(T(one) - one) <= tol


def check_schwarz_inequality(T: Superoperator, x: AlgebraElement, tol: float = 1e-9) -> Verdict:
    """``T(x*x) >= T(x)*T(x)`` for unital ``T``."""
    if not is_unital(T, tol):
        raise NotUnitalError("Kadison-Schwarz check needs a unital map")
    Tx = T(x)
    gap = T(x.adjoint() @ x) - Tx.adjoint() @ Tx
    v = is_positive(gap, tol)
    if v:
        return Verdict(True, None, v.info)
    return Verdict(False, {"x": x, **v.witness}, v.info)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """``C = sum_ij E_ij (x) T(E_ij)``; the left tensor factor carries the input index."""

    source: Superoperator
    matrix: np.ndarray
    hermiticity_defect: float
    min_eigenvalue: float


def choi_matrix(T: Superoperator) -> ChoiMatrix:
    A = T.algebra
    if len(A.blocks) != 1:
        raise UnsupportedStructure("unsupported structure: use blockwise CP probe")
    d = A.blocks[0]
    C = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for i in range(d):
            E = np.zeros((d, d))
            E[i, j] = 1.0
            out = T.matrix[:, i + j * d].reshape((d, d), order="F")
            C += np.kron(E, out)
    defect = float(np.linalg.norm(C - C.conj().T, 2))
    lam = float(np.linalg.eigvalsh((C + C.conj().T) / 2)[0])
    return ChoiMatrix(T, C, defect, lam)


def is_completely_positive(T: Superoperator, tol: float = 1e-9) -> Verdict:
    """Choi criterion. The failure witness is an explicit ``d``-positivity violation:
    ``<v, T_d(P) v> < 0`` for the positive element ``P = sum_ij E_ij (x) E_ij``."""
    C = choi_matrix(T)
    info = {"min_eigenvalue": C.min_eigenvalue, "hermiticity_defect": C.hermiticity_defect, "tol": tol}
    if C.hermiticity_defect > tol:
        return Verdict(False, {"reason": "choi matrix not hermitian", "hermiticity_defect": C.hermiticity_defect}, info)
    if C.min_eigenvalue >= -tol:
        return Verdict(True, None, info)
    w, v = np.linalg.eigh((C.matrix + C.matrix.conj().T) / 2)
    d = T.algebra.blocks[0]
    omega = np.eye(d).reshape(-1)
    return Verdict(
        False,
        {
            "eigenvalue": float(w[0]),
            "eigenvector": v[:, 0],
            "level": d,
            "positive_input": np.outer(omega, omega),
        },
        info,
    )


def positivity_probe(T: Superoperator, n_max: int = 2, samples: int = 100, seed: int = 0, tol: float = 1e-9) -> Verdict:
    """Sampled check that ``T_n`` maps positives to positives for ``n <= n_max``.

    Works on direct sums; a pass is evidence, not a certificate.
    """
    for n in range(1, n_max + 1):
        Tn = amplify_generator(T, n) if n > 1 else T
        B = Tn.algebra
        for s in range(samples):
            p = random_sample(B, seed * 100003 + n * 1009 + s, "positive")
            v = is_positive(Tn(p), tol * max(1.0, operator_norm(p)))
            if not v:
                return Verdict(False, {"level": n, "input": p, **v.witness}, {"kind": "probe"})
    return Verdict(True, None, {"kind": "probe", "n_max": n_max, "samples": samples})


def cp_grid(delta: Superoperator, t_grid, tol: float = 1e-9) -> dict:
    """Complete positivity of ``exp(t delta)`` over a time grid.

    Uses the Choi certificate on single-block algebras and the sampled probe
    otherwise.
    """
    results = []
    single = len(delta.algebra.blocks) == 1
    for t in t_grid:
        T = exp_generator(delta, t)
        v = is_completely_positive(T, tol) if single else positivity_probe(T, tol=tol)
        entry = {"t": float(t), "verdict": "pass" if v else "fail", "unital": is_unital(T, max(tol, 1e-10))}
        if single:
            entry["min_choi_eigenvalue"] = v.info["min_eigenvalue"]
        results.append(entry)
    return {
        "method": "choi certificate" if single else "positivity probe",
        "grid": results,
        "pass": all(r["verdict"] == "pass" for r in results),
    }


# -- trajectories ------------------------------------------------------------------

def trajectory_header(algebra: Algebra) -> list[str]:
    cols = ["t", "observable"]
    for k, d in enumerate(algebra.blocks):
        for r in range(d):
            for c in range(d):
                cols += [f"b{k}_{r}_{c}_re", f"b{k}_{r}_{c}_im"]
    return cols


def trajectory_row(t: float, label: str, x: AlgebraElement) -> list[str]:
    row = [repr(float(t)), label]
    for b in x.blocks:
        for z in b.reshape(-1):  # row-major
            row += [repr(float(z.real)), repr(float(z.imag))]
    return row


def write_trajectory_csv(fh, label: str, times, elements) -> None:
    """Columns ``t, observable`` then Re/Im of every entry, row-major, block by block."""
    elements = list(elements)
    if not elements:
        raise ValueError("empty trajectory")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(trajectory_header(elements[0].algebra))
    for t, x in zip(times, elements):
        w.writerow(trajectory_row(t, label, x))


def evolve(delta: Superoperator, x: AlgebraElement, times) -> list[AlgebraElement]:
    return [exp_generator(delta, t)(x) for t in times]
