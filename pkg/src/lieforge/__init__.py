"""Exact computations with modular Lie (super)algebras over small finite fields."""

__version__ = "0.1.0"

from .errors import LieforgeError
from .ffield import FieldCtx, FieldElement, ff_frobenius, ff_make
from .linalg import MatrixGF, Subspace, kernel, mat_power_p, rref, solve
from .superalg import (
    Element,
    SuperAlgebra,
    algebra_from_constants,
    center,
    centralizer,
    check_axioms,
    derived,
    derived_series,
    grade_mod2,
    is_simple,
    quotient,
    spin_ideal,
    subalgebra,
)

__all__ = [
    "Element",
    "FieldCtx",
    "FieldElement",
    "LieforgeError",
    "MatrixGF",
    "Subspace",
    "SuperAlgebra",
    "algebra_from_constants",
    "center",
    "centralizer",
    "check_axioms",
    "derived",
    "derived_series",
    "ff_frobenius",
    "ff_make",
    "grade_mod2",
    "is_simple",
    "kernel",
    "mat_power_p",
    "quotient",
    "rref",
    "solve",
    "spin_ideal",
    "subalgebra",
]
