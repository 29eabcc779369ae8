import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdslab.algebra import (
    Algebra,
    State,
    amplify_element,
    amplify_state,
    is_positive,
    matrix_entries,
    operator_norm,
    random_sample,
)
from qdslab.errors import AlgebraMismatch, CapExceeded

from conftest import rand_matrix

block_tuples = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple)


def test_dimensions():
    A = Algebra((2, 3))
    assert A.total_dim == 5
    assert A.dim == 13
    assert A.offsets == [0, 4]
    assert len(A.basis()) == 13


def test_cap():
    with pytest.raises(CapExceeded):
        Algebra((100,), cap=50)
    with pytest.raises(CapExceeded):
        Algebra((10,), cap=200).amplify(3)


def test_vec_is_column_stacking():
    A = Algebra((2,))
    x = A.element([np.array([[1, 2], [3, 4]])])
    np.testing.assert_array_equal(x.vec(), [1, 3, 2, 4])
    assert A.from_vector(x.vec()).allclose(x)


@given(block_tuples, st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_star_algebra_laws(blocks, seed):
    A = Algebra(blocks)
    x, y, z = (random_sample(A, seed + k) for k in range(3))
    assert ((x @ y) @ z).allclose(x @ (y @ z), atol=1e-10)
    assert (x @ y).adjoint().allclose(y.adjoint() @ x.adjoint(), atol=1e-12)
    assert (A.identity() @ x).allclose(x)
    # C*-identity ||x* x|| = ||x||^2
    assert np.isclose(operator_norm(x.adjoint() @ x), operator_norm(x) ** 2)


def test_norm_is_max_over_blocks():
    A = Algebra((1, 2))
    x = A.element([np.array([[3.0]]), np.diag([1.0, -2.0])])
    assert operator_norm(x) == pytest.approx(3.0)


def test_mismatched_algebras():
    with pytest.raises(AlgebraMismatch):
        Algebra((2,)).identity() + Algebra((3,)).identity()


def test_elements_are_immutable():
    x = Algebra((2,)).identity()
    with pytest.raises(ValueError):
        x.blocks[0][0, 0] = 5
    with pytest.raises(AttributeError):
        x.algebra = None


def test_positivity_witness():
    A = Algebra((2,))
    assert is_positive(A.element([np.diag([1.0, 0.0])]))
    v = is_positive(A.element([np.diag([1.0, -0.5])]))
    assert not v
    assert v.witness["eigenvalue"] == pytest.approx(-0.5)
    vec = v.witness["eigenvector"]
    assert np.allclose(np.abs(vec), [0, 1])


@given(block_tuples, st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_positive_samples_and_states(blocks, seed):
    A = Algebra(blocks)
    p = random_sample(A, seed, "positive")
    assert is_positive(p)
    w = random_sample(A, seed, "state")
    assert w(A.identity()) == pytest.approx(1.0)
    assert w(p).real >= -1e-12
    assert abs(w(p).imag) < 1e-12


def test_normalized_trace_weights():
    A = Algebra((1, 3))
    tau = State.normalized_trace(A)
    assert tau(A.identity()) == pytest.approx(1.0)
    assert tau.is_faithful()
    e = A.basis()[0]  # the 1x1 block unit
    assert tau(e) == pytest.approx(0.25)


def test_pure_state_not_faithful():
    A = Algebra((2,))
    w = State.pure(A, [1, 0])
    assert not w.is_faithful()
    assert w(A.element([np.diag([2.0, 5.0])])) == pytest.approx(2.0)


def test_invalid_states():
    A = Algebra((2,))
    with pytest.raises(ValueError):
        State(A, [np.diag([1.0, -0.1])], [1.0])
    with pytest.raises(ValueError):
        State(A, [np.diag([1.0, 1.0])], [1.0])


def test_amplification_and_entries():
    rng = np.random.default_rng(0)
    A = Algebra((2,))
    x = A.element([rand_matrix(rng, 2)])
    X = amplify_element(x, 3)
    assert X.algebra.blocks == (6,)
    entries = matrix_entries(X, 3, A)
    for i in range(3):
        for j in range(3):
            assert entries[i][j].allclose(x if i == j else A.zero())
    w = State.normalized_trace(A)
    assert amplify_state(w, 3)(X) == pytest.approx(w(x))
