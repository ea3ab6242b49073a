"""Exception types shared across the package.

Every error that callers are expected to branch on gets its own class;
anything else surfaces as a plain ValueError.  The CLI maps these onto
process exit codes (see bc2qes.cli).
"""


class NonDivisible(ArithmeticError):
    """Synthetic division by a denominator atom left a nonzero remainder."""


class NonPolynomial(ValueError):
    """Applying a differential operator did not produce a polynomial.

    Wraps NonDivisible.  On symmetric input this indicates an operator
    construction defect (or a genuinely non-invariant action) and should be
    reported, never swallowed.
    """


class DegreeOverflow(ValueError):
    """A polynomial exceeds the degree bound of the target basis.

    This is the designed failure signal when the integrality condition on
    the parameters is violated: the operator action escapes the space.
    """

    def __init__(self, message: str, element=None):
        super().__init__(message)
        self.element = element


class NotSymmetric(ValueError):
    """Coordinate extraction was attempted on a non-symmetric polynomial."""


class DimensionMismatch(ValueError):
    """Matrix operands have incompatible dimensions."""


class NoRelation(ValueError):
    """No algebraic relation of the requested shape exists (or the exact
    system was inconsistent, which signals an upstream transcription bug)."""


class AmbiguousRelation(ValueError):
    """The relation-fitting system is underdetermined."""

    def __init__(self, message: str, nullspace_dim: int = 0):
        super().__init__(message)
        self.nullspace_dim = nullspace_dim


class NonConvergence(RuntimeError):
    """The simultaneous root iteration missed the residual target."""

    def __init__(self, message: str, residuals=None, iterations: int = 0):
        super().__init__(message)
        self.residuals = residuals or []
        self.iterations = iterations
