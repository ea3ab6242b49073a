"""Exact computer algebra for the quasi-exactly solvable BC2 Inozemtsev model.

The package builds the gauge-transformed Hamiltonian and its fourth-order
commuting partner as exact symbolic differential operators, represents them
as matrices over Q[e2, e3] on the finite invariant space of symmetric
polynomials, and verifies invariance, commutation, spectra and the
algebraic relations between the two operators -- all in exact rational
arithmetic.
"""

from .basis import (
    MonomialBasis,
    OpMatrix,
    enumerate_basis,
    matrix_of,
    monomial_symmetric,
    to_coordinates,
)
from .errors import (
    AmbiguousRelation,
    DegreeOverflow,
    DimensionMismatch,
    NoRelation,
    NonConvergence,
    NonDivisible,
    NonPolynomial,
    NotSymmetric,
)
from .operators import (
    CouplingParams,
    DerivedConstants,
    DiffOperator,
    ExponentParams,
    apply_operator,
    build_commuting_operator,
    build_hamiltonian,
    couplings_to_exponents,
    derived_constants,
    is_symmetric,
    swap_z,
)
from .poly import (
    E1,
    E2,
    E3,
    ONE,
    VARIABLES,
    Z1,
    Z2,
    ZERO,
    DenomAtom,
    Poly,
    differentiate,
    exact_divide_atom,
    specialize,
)
from .spectral import (
    CharPoly,
    RelationCoefficients,
    SpectrumReport,
    char_poly,
    commutator,
    discriminant,
    discriminant_nonzero,
    find_minimal_relation,
    fit_relation,
    numeric_roots,
    spectrum_report,
)

__version__ = "0.1.0"
