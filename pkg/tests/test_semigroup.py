import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdslab.algebra import Algebra, random_sample
from qdslab.errors import NotUnitalError, ResolventError, UnsupportedStructure
from qdslab.generators import (
    Superoperator,
    commutator_derivation,
    minimal_length_weights,
    random_lindblad,
    transpose_map,
    weyl_damping_generator,
)
from qdslab.semigroup import (
    check_resolvent_identity,
    check_schwarz_inequality,
    choi_matrix,
    cp_grid,
    euler_approximant,
    evolve,
    exp_generator,
    is_completely_positive,
    is_unital,
    positivity_probe,
    recover_generator,
    resolvent,
    superop_distance,
    write_trajectory_csv,
)

from conftest import SX, SY, SZ

Q = Algebra((2,))


def el(m):
    return Q.element([np.asarray(m, dtype=complex)])


def test_scalar_euler():
    # delta = -id on C: (1 + 1/10)^(-10) versus e^{-1}
    A = Algebra((1,))
    delta = Superoperator(A, -np.eye(1))
    e10 = euler_approximant(delta, 1.0, 10).matrix[0, 0].real
    assert e10 == pytest.approx(1.1 ** -10, abs=1e-12)
    assert e10 == pytest.approx(0.38554, abs=1e-5)
    assert exp_generator(delta, 1.0).matrix[0, 0].real == pytest.approx(math.exp(-1), abs=1e-14)


def test_exp_of_commutator_is_rotation():
    delta = commutator_derivation(el(0.5 * SZ))
    for t in (0.0, 0.3, 1.7):
        out = exp_generator(delta, t)(el(SX))
        assert out.allclose(el(math.cos(t) * SX - math.sin(t) * SY), atol=1e-13)


def test_exp_group_law():
    delta = random_lindblad(Algebra((3,)), 4)
    a = exp_generator(delta, 0.3) @ exp_generator(delta, 0.5)
    assert superop_distance(a, exp_generator(delta, 0.8)) < 1e-12


def test_resolvent_of_dissipative_is_contraction_inverse():
    delta = random_lindblad(Q, 1)
    R = resolvent(delta, 0.7)
    lhs = R.matrix @ (np.eye(4) - 0.7 * delta.matrix)
    assert np.allclose(lhs, np.eye(4), atol=1e-12)


def test_resolvent_singular():
    with pytest.raises(ResolventError):
        resolvent(Superoperator.identity(Q), 1.0)


@pytest.mark.parametrize("k1,k2", [(1, 2), (0.5, 3), (2, 2)])
def test_resolvent_identity(k1, k2):
    assert check_resolvent_identity(random_lindblad(Q, 7), k1, k2)


def test_euler_first_order():
    delta = random_lindblad(Algebra((3,)), 0)
    E = exp_generator(delta, 1.0)
    errs = [superop_distance(euler_approximant(delta, 1.0, n), E) for n in (8, 16, 32, 64)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(1.7 <= r <= 2.3 for r in ratios)


def test_recover_generator():
    delta = random_lindblad(Q, 2)
    est = recover_generator(lambda t: exp_generator(delta, t), 1e-6)
    assert np.allclose(est.matrix, delta.matrix, atol=1e-5)


def test_choi_of_identity_and_transpose():
    C = choi_matrix(Superoperator.identity(Q))
    assert C.min_eigenvalue == pytest.approx(0.0, abs=1e-14)
    assert np.linalg.matrix_rank(C.matrix) == 1
    v = is_completely_positive(transpose_map(Q))
    assert not v
    assert v.witness["eigenvalue"] == pytest.approx(-1.0)
    assert v.witness["level"] == 2


def test_choi_direct_sum_unsupported():
    with pytest.raises(UnsupportedStructure):
        choi_matrix(Superoperator.identity(Algebra((1, 2))))


def test_positivity_probe_on_direct_sums():
    A = Algebra((1, 2))
    assert positivity_probe(exp_generator(random_lindblad(A, 0), 0.5), samples=20)
    assert not positivity_probe(transpose_map(Algebra((2,))), samples=20)


@given(st.integers(0, 10_000), st.sampled_from([0.1, 0.5, 1.0, 2.0]))
@settings(max_examples=20, deadline=None)
def test_lindblad_semigroup_is_cp_unital_schwarz(seed, t):
    delta = random_lindblad(Algebra((2,)), seed)
    T = exp_generator(delta, t)
    assert is_unital(T)
    assert is_completely_positive(T)
    x = random_sample(T.algebra, seed + 3)
    assert check_schwarz_inequality(T, x)


def test_schwarz_requires_unital():
    with pytest.raises(NotUnitalError):
        check_schwarz_inequality(Superoperator(Q, 2 * np.eye(4)), Q.identity())


def test_weyl_pauli_channel():
    delta = weyl_damping_generator(2, minimal_length_weights(2))
    for t in (0.1, 0.5, 1.0, 2.0):
        T = exp_generator(delta, t)
        # the channel scales X, Z by e^{-t} and Y by e^{-2t}
        assert T(el(SX)).allclose(el(math.exp(-t) * SX), atol=1e-12)
        assert T(el(SY)).allclose(el(math.exp(-2 * t) * SY), atol=1e-12)
        assert is_completely_positive(T)
    res = cp_grid(delta, [0.1, 0.5, 1.0, 2.0])
    assert res["pass"] and res["method"] == "choi certificate"


def test_trajectory_csv_is_deterministic():
    delta = commutator_derivation(el(0.5 * SZ))
    traj = evolve(delta, el(SX), [0.0, 0.5])
    bufs = []
    for _ in range(2):
        buf = io.StringIO()
        write_trajectory_csv(buf, "sx", [0.0, 0.5], traj)
        bufs.append(buf.getvalue())
    assert bufs[0] == bufs[1]
    lines = bufs[0].splitlines()
    assert lines[0].startswith("t,observable,")
    assert lines[1] == "0.0,sx,0.0,0.0,1.0,0.0,1.0,0.0,0.0,0.0"
