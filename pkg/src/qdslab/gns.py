"""GNS representations of finite-dimensional algebras and Hilbert-space
operators implementing generators in them.

Coordinates: for a state ``w`` let ``G[a, b] = w(e_b* e_a)`` over the matrix
units ``e_a``. Factor ``G.T = F^H F`` with ``F`` of full row rank ``r``; the
column ``F[:, a]`` is the GNS vector ``pi(e_a) Omega`` in ``C^r`` and
``pi(x) = F @ left_mult(x) @ pinv(F)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import Algebra, AlgebraElement, State, _gaussian, amplify_state, matrix_entries
from .errors import HypothesisViolation, NotImplementableError, RankAmbiguityError
from .generators import Superoperator, amplify_generator, is_hermitian_map, left_mult
from .verdict import Verdict


@dataclass(frozen=True, eq=False)
class GnsRepresentation:
    algebra: Algebra
    state: State
    F: np.ndarray
    F_pinv: np.ndarray
    omega: np.ndarray
    gram_eigenvalues: np.ndarray
    rank_tol: float

    @property
    def dim(self) -> int:
        return self.F.shape[0]

    @property
    def faithful(self) -> bool:
        return self.dim == self.algebra.dim

    def pi(self, x: AlgebraElement) -> np.ndarray:
        return self.F @ left_mult(x) @ self.F_pinv

    def vector(self, x: AlgebraElement) -> np.ndarray:
        """``pi(x) Omega``."""
        return self.F @ x.vec()

    def basis_representation(self) -> list[np.ndarray]:
        return [self.pi(e) for e in self.algebra.basis()]


def gram_matrix(A: Algebra, omega: State) -> np.ndarray:
    basis = A.basis()
    G = np.empty((A.dim, A.dim), dtype=complex)
    for a, ea in enumerate(basis):
        for b, eb in enumerate(basis):
            G[a, b] = omega(eb.adjoint() @ ea)
    return G


def gns_construct(A: Algebra, omega: State, rank_tol: float = 1e-10) -> GnsRepresentation:
    """Cyclic representation of ``A`` for ``omega``.

    ``rank_tol`` is relative to the largest Gram eigenvalue. Eigenvalues within
    a factor 10 of the threshold make the rank ambiguous and raise
    :class:`RankAmbiguityError`.
    """
    if omega.algebra != A:
        raise ValueError("state lives on a different algebra")
    K = gram_matrix(A, omega).T
    K = (K + K.conj().T) / 2
    w, V = np.linalg.eigh(K)
    thr = rank_tol * w[-1]
    if np.any((w > thr / 10) & (w < thr * 10)):
        raise RankAmbiguityError(f"Gram eigenvalues straddle the rank threshold {thr:.3g}: {w[(w > thr / 10) & (w < thr * 10)]}")
    keep = w > thr
    wr, Vr = w[keep], V[:, keep]
    F = np.sqrt(wr)[:, None] * Vr.conj().T
    F_pinv = Vr / np.sqrt(wr)[None, :]
    omega_vec = F @ A.identity().vec()
    return GnsRepresentation(A, omega, F, F_pinv, omega_vec, w, rank_tol)


def gram_residual(rep: GnsRepresentation) -> float:
    """``max |<pi(a)Omega, pi(b)Omega> - w(b* a)|`` over the basis, via the representation matrices."""
    basis = rep.algebra.basis()
    vecs = [rep.pi(e) @ rep.omega for e in basis]
    out = 0.0
    for a, ea in enumerate(basis):
        for b, eb in enumerate(basis):
            out = max(out, abs(np.vdot(vecs[b], vecs[a]) - rep.state(eb.adjoint() @ ea)))
    return out


@dataclass(frozen=True, eq=False)
class ImplementingOperator:
    """Operator ``L`` on the GNS space; ``form`` is ``one_sided``, ``two_sided`` or ``skew``."""

    matrix: np.ndarray
    form: str
    residual: float
    kill_cyclic: bool
    cyclic_norm: float
    details: dict = field(default_factory=dict)

    @property
    def skew_defect(self) -> float:
        return float(np.linalg.norm(self.matrix + self.matrix.conj().T, 2))


def _one_sided_residual(L, rep, Mdelta):
    R = (L @ rep.F - rep.F @ Mdelta) @ rep.F_pinv
    return float(np.linalg.norm(R, 2))


def _two_sided_residual(L, rep, delta):
    out = 0.0
    for e in rep.algebra.basis():
        P = rep.pi(e)
        Q = rep.pi(delta(e))
        out = max(out, float(np.linalg.norm(L @ P + P @ L.conj().T - Q, 2)))
    return out


def _commutation_matrix(r: int) -> np.ndarray:
    """``Kc @ vec(L) = vec(L.T)`` for column-stacked ``r x r`` matrices."""
    K = np.zeros((r * r, r * r))
    for i in range(r):
        for j in range(r):
            K[j + i * r, i + j * r] = 1
    return K


def _solve_two_sided(rep: GnsRepresentation, delta: Superoperator, kill_cyclic: bool) -> np.ndarray:
    # L P + P L^H = Q is real-linear in L: split vec(L) = u + i v
    r = rep.dim
    I = np.eye(r)
    Kc = _commutation_matrix(r)
    rows, rhs = [], []
    for e in rep.algebra.basis():
        P = rep.pi(e)
        Q = rep.pi(delta(e))
        A_ = np.kron(P.T, I)
        B_ = np.kron(I, P) @ Kc
        rows.append((A_ + B_, A_ - B_))
        rhs.append(Q.reshape(-1, order="F"))
    if kill_cyclic:
        A_ = np.kron(rep.omega[None, :], I)
        rows.append((A_, A_))
        rhs.append(np.zeros(r, dtype=complex))
    real_rows = []
    for S, D in rows:
        real_rows.append(np.hstack([S.real, -D.imag]))
        real_rows.append(np.hstack([S.imag, D.real]))
    M = np.vstack(real_rows)
    b = np.concatenate([np.concatenate([q.real, q.imag]) for q in rhs])
    sol = scipy.linalg.lstsq(M, b)[0]
    u, v = sol[: r * r], sol[r * r :]
    return (u + 1j * v).reshape((r, r), order="F")


def implementing_operator(
    delta: Superoperator,
    rep: GnsRepresentation,
    form: str = "two_sided",
    kill_cyclic: bool = False,
    tol: float = 1e-8,
) -> ImplementingOperator:
    """Least-squares ``L`` with ``pi(delta(x)) Omega = L pi(x) Omega`` (one-sided)
    or ``pi(delta(a)) = L pi(a) + pi(a) L*`` (two-sided).

    Raises :class:`NotImplementableError` (with the best fit attached) when the
    residual exceeds ``tol``.
    """
    if delta.algebra != rep.algebra:
        raise ValueError("generator and representation live on different algebras")
    Mdelta = delta.matrix
    r = rep.dim
    if form == "one_sided":
        if kill_cyclic:
            # (F^T (x) I) vec(L) = vec(F M), (Omega^T (x) I) vec(L) = 0
            I = np.eye(r)
            M = np.vstack([np.kron(rep.F.T, I), np.kron(rep.omega[None, :], I)])
            b = np.concatenate([(rep.F @ Mdelta).reshape(-1, order="F"), np.zeros(r)])
            L = scipy.linalg.lstsq(M, b)[0].reshape((r, r), order="F")
        else:
            L = rep.F @ Mdelta @ rep.F_pinv
        residual = _one_sided_residual(L, rep, Mdelta)
    elif form == "two_sided":
        L = _solve_two_sided(rep, delta, kill_cyclic)
        residual = _two_sided_residual(L, rep, delta)
    else:
        raise ValueError(f"unknown form {form!r}")
    op = ImplementingOperator(L, form, residual, kill_cyclic, float(np.linalg.norm(L @ rep.omega)))
    if residual > tol or (kill_cyclic and op.cyclic_norm > tol):
        raise NotImplementableError(
            f"generator is not implementable in the {form} form under the given constraints "
            f"(residual {residual:.3g} > tol {tol:.3g})",
            op,
        )
    return op


def operator_dissipativity(L, tol: float = 1e-10) -> Verdict:
    """``Re <L xi, xi> <= 0`` for all ``xi``: largest eigenvalue of ``(L + L*)/2``."""
    m = L.matrix if isinstance(L, ImplementingOperator) else np.asarray(L)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    info = {"max_symmetric_eigenvalue": float(w[-1])}
    if w[-1] <= tol:
        return Verdict(True, None, info)
    return Verdict(False, {"eigenvalue": float(w[-1]), "vector": v[:, -1]}, info)


def skew_implementing_operator(delta: Superoperator, rep: GnsRepresentation, tol: float = 1e-9) -> ImplementingOperator:
    """``S pi(b) Omega = pi(delta(b)) Omega`` for a *-derivation whose state
    annihilates ``delta``; then ``S`` is skew and ``pi(delta(b)) = [S, pi(b)]``."""
    A = delta.algebra
    basis = A.basis()
    if not is_hermitian_map(delta, tol):
        raise HypothesisViolation("precondition: delta is not a hermitian map")
    for ea in basis:
        for eb in basis:
            r = delta(ea @ eb) - delta(ea) @ eb - ea @ delta(eb)
            if np.abs(r.vec()).max() > tol:
                raise HypothesisViolation("precondition: delta violates the Leibniz rule")
    worst = max(abs(rep.state(delta(e))) for e in basis)
    if worst > tol:
        raise HypothesisViolation(f"precondition: |w(delta(b))| = {worst:.3g} on the basis")
    S = rep.F @ delta.matrix @ rep.F_pinv
    comm = 0.0
    for e in basis:
        P = rep.pi(e)
        comm = max(comm, float(np.linalg.norm(rep.pi(delta(e)) - (S @ P - P @ S), 2)))
    op = ImplementingOperator(S, "skew", comm, False, float(np.linalg.norm(S @ rep.omega)),
                              {"commutator_residual": comm})
    if op.skew_defect > tol or comm > tol:
        raise NotImplementableError(
            f"skew fit failed: ||S + S*|| = {op.skew_defect:.3g}, commutator residual {comm:.3g}", op
        )
    return op


# -- amplified representations -------------------------------------------------------

def amplified_pi(rep: GnsRepresentation, x: AlgebraElement, n: int) -> np.ndarray:
    """``pi_n(x) = sum_ij pi(x_ij) (x) tau_n(E_ij)`` on ``K (x) C^{n^2}``, with
    ``tau_n`` the trace representation (left multiplication on ``M_n``)."""
    entries = matrix_entries(x, n, rep.algebra)
    r = rep.dim
    out = np.zeros((r * n * n, r * n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 1
            out += np.kron(rep.pi(entries[i][j]), np.kron(np.eye(n), E))
    return out


def trace_vector(n: int) -> np.ndarray:
    return np.eye(n).reshape(-1, order="F") / np.sqrt(n)


@dataclass
class ImplementationReport:
    status: str
    hilbert_dim: int
    algebra_dim: int
    gram_residual: float
    fit_residual: float | None = None
    cyclic_norm: float | None = None
    skew_defect: float | None = None
    operator_dissipative: bool | None = None
    max_symmetric_eigenvalue: float | None = None
    levels: list = field(default_factory=list)
    cross_check: dict | None = None
    consistent: bool | None = None
    tol: float = 1e-8

    @property
    def ok(self) -> bool:
        return self.status == "ok" and bool(self.consistent)

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def implementation_report(
    delta: Superoperator,
    omega: State,
    n_max: int = 3,
    tol: float = 1e-8,
    seed: int = 0,
    samples: int = 10,
) -> ImplementationReport:
    """Faithful GNS -> two-sided implementing ``L`` with ``L Omega = 0`` ->
    dissipativity of ``L`` -> ``L_n = L (x) I`` on amplified representations ->
    cross-check with :func:`certify_completely_dissipative`.

    A dissipative implementing ``L`` with ``L Omega = 0`` forces complete
    dissipativity, so a failed cross-check means a bug, not a finding.
    Raises :class:`HypothesisViolation` for a non-faithful state or a
    non-implementable generator.
    """
    from .dissipativity import certify_completely_dissipative

    A = delta.algebra
    rep = gns_construct(A, omega)
    if not rep.faithful:
        raise HypothesisViolation(f"state is not faithful: GNS dimension {rep.dim} < {A.dim}")
    report = ImplementationReport("ok", rep.dim, A.dim, gram_residual(rep), tol=tol)
    try:
        L = implementing_operator(delta, rep, "two_sided", kill_cyclic=True, tol=tol)
    except NotImplementableError as exc:
        report.status = "hypotheses not met"
        report.fit_residual = exc.operator.residual
        report.cyclic_norm = exc.operator.cyclic_norm
        raise HypothesisViolation(
            f"hypotheses not met: {exc}", report
        ) from exc
    dv = operator_dissipativity(L, tol)
    report.fit_residual = L.residual
    report.cyclic_norm = L.cyclic_norm
    report.skew_defect = L.skew_defect
    report.operator_dissipative = bool(dv)
    report.max_symmetric_eigenvalue = dv.info["max_symmetric_eigenvalue"]
    rng = np.random.default_rng([seed, 11])
    for n in range(1, n_max + 1):
        dn = amplify_generator(delta, n) if n > 1 else delta
        wn = amplify_state(omega, n)
        B = dn.algebra
        Ln = np.kron(L.matrix, np.eye(n * n))
        On = np.kron(rep.omega, trace_vector(n))
        elements = [AlgebraElement(B, [_gaussian(rng, d) for d in B.blocks]) for _ in range(samples)]
        diss_form = state_gap = form_gap = -np.inf
        for a in elements:
            val = wn(a.adjoint() @ dn(a))
            P = amplified_pi(rep, a, n)
            xi = P @ On
            diss_form = max(diss_form, val.real)
            state_gap = max(state_gap, abs(np.vdot(On, xi) - wn(a)))
            form_gap = max(form_gap, abs(val - np.vdot(xi, Ln @ xi)))
        report.levels.append({
            "n": n,
            "max_dissipation_form": float(diss_form),
            "cyclic_norm": float(np.linalg.norm(Ln @ On)),
            "max_quadratic_form_gap": float(form_gap),
            "max_state_gap": float(state_gap),
            "ok": bool(diss_form <= tol and np.linalg.norm(Ln @ On) <= tol and form_gap <= tol),
        })
    cert = certify_completely_dissipative(delta, n_max=n_max, seed=seed, tol=max(tol, 1e-9))
    report.cross_check = {"verdict": "pass" if cert.ok else "fail", "first_failure": cert.first_failure()}
    pipeline_ok = report.operator_dissipative and all(lv["ok"] for lv in report.levels)
    report.consistent = (not pipeline_ok) or cert.ok
    if not pipeline_ok:
        report.status = "pipeline failed"
    return report
