import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdslab.algebra import Algebra, State, random_sample
from qdslab.errors import HypothesisViolation, NotImplementableError
from qdslab.generators import commutator_derivation, minimal_length_weights, weyl_damping_generator
from qdslab.gns import (
    amplified_pi,
    gns_construct,
    gram_matrix,
    gram_residual,
    implementation_report,
    implementing_operator,
    operator_dissipativity,
    skew_implementing_operator,
    trace_vector,
)

from conftest import rand_matrix


@pytest.mark.parametrize("blocks,dim", [((2,), 4), ((1, 1), 2), ((2, 3), 13)])
def test_faithful_dimensions(blocks, dim):
    A = Algebra(blocks)
    rep = gns_construct(A, State.normalized_trace(A))
    assert rep.dim == dim and rep.faithful
    assert gram_residual(rep) <= 1e-10


def test_pure_state_dimension():
    # the GNS space of a vector state on M_d is C^d
    A = Algebra((3,))
    rep = gns_construct(A, State.pure(A, [1, 0, 0]))
    assert rep.dim == 3 and not rep.faithful


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_representation_is_star_homomorphism(seed):
    A = Algebra((2, 1))
    rep = gns_construct(A, random_sample(A, seed, "state"))
    x, y = random_sample(A, seed + 1), random_sample(A, seed + 2)
    assert np.allclose(rep.pi(x @ y), rep.pi(x) @ rep.pi(y), atol=1e-9)
    assert np.allclose(rep.pi(x.adjoint()), rep.pi(x).conj().T, atol=1e-9)
    # <pi(x) Omega, Omega> = omega(x)
    assert np.vdot(rep.omega, rep.pi(x) @ rep.omega) == pytest.approx(rep.state(x), abs=1e-10)


def test_gram_matrix_oracle():
    A = Algebra((2,))
    G = gram_matrix(A, State.normalized_trace(A))
    # trace state: omega(E_b* E_a) = delta_ab / 2 for matrix units
    assert np.allclose(G, np.eye(4) / 2)


def test_commutator_is_implemented_by_skew_operator():
    A = Algebra((3,))
    rng = np.random.default_rng(5)
    delta = commutator_derivation(A.element([rand_matrix(rng, 3, hermitian=True)]))
    rep = gns_construct(A, State.normalized_trace(A))
    L = implementing_operator(delta, rep, kill_cyclic=True)
    assert L.residual <= 1e-8
    assert L.cyclic_norm <= 1e-10
    assert L.skew_defect <= 1e-10
    assert operator_dissipativity(L)
    S = skew_implementing_operator(delta, rep)
    assert S.skew_defect <= 1e-9


def test_weyl_not_implementable_two_sided():
    delta = weyl_damping_generator(2, minimal_length_weights(2))
    rep = gns_construct(delta.algebra, State.normalized_trace(delta.algebra))
    with pytest.raises(NotImplementableError) as exc:
        implementing_operator(delta, rep, form="two_sided", kill_cyclic=True)
    assert exc.value.operator.residual > 1e-8
    # the one-sided form always fits on a faithful representation
    assert implementing_operator(delta, rep, form="one_sided").residual < 1e-10


def test_skew_preconditions():
    delta = weyl_damping_generator(2, minimal_length_weights(2))
    rep = gns_construct(delta.algebra, State.normalized_trace(delta.algebra))
    with pytest.raises(HypothesisViolation):
        skew_implementing_operator(delta, rep)


def test_amplified_rep_is_homomorphism():
    A = Algebra((2,))
    rep = gns_construct(A, State.normalized_trace(A))
    B = A.amplify(2)
    x, y = random_sample(B, 1), random_sample(B, 2)
    assert np.allclose(amplified_pi(rep, x @ y, 2), amplified_pi(rep, x, 2) @ amplified_pi(rep, y, 2))
    assert np.linalg.norm(trace_vector(3)) == pytest.approx(1.0)


def test_implementation_report():
    A = Algebra((2,))
    rng = np.random.default_rng(8)
    delta = commutator_derivation(A.element([rand_matrix(rng, 2, hermitian=True)]))
    rep = implementation_report(delta, State.normalized_trace(A), n_max=2)
    assert rep.ok and rep.hilbert_dim == 4
    with pytest.raises(HypothesisViolation) as exc:
        implementation_report(delta, State.pure(A, [1, 0]))
    weyl = weyl_damping_generator(2, minimal_length_weights(2))
    with pytest.raises(HypothesisViolation) as exc:
        implementation_report(weyl, State.normalized_trace(A))
    assert exc.value.report is not None and exc.value.report.status != "ok"
