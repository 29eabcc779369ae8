"""Finite-dimensional laboratory for completely dissipative generators and
quantum dynamical semigroups on matrix algebras."""

__version__ = "0.1.0"

from .algebra import (
    Algebra,
    AlgebraElement,
    State,
    evaluate_state,
    is_positive,
    operator_norm,
    random_sample,
)
from .generators import (
    Superoperator,
    amplify_generator,
    apply_generator,
    commutator_derivation,
    is_hermitian_map,
    lindblad_generator,
    weyl_damping_generator,
)

__all__ = [
    "Algebra",
    "AlgebraElement",
    "State",
    "Superoperator",
    "amplify_generator",
    "apply_generator",
    "commutator_derivation",
    "evaluate_state",
    "is_hermitian_map",
    "is_positive",
    "lindblad_generator",
    "operator_norm",
    "random_sample",
    "weyl_damping_generator",
]
