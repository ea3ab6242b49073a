"""The finite invariant space of symmetric polynomials and its matrices.

For a nonnegative integer d the space is spanned by the monomial symmetric
polynomials m_{(m1, m2)} = z1^m1 z2^m2 + z1^m2 z2^m1 (a single monomial when
m1 = m2) over all 0 <= m1 <= m2 <= d; its dimension is (d+1)(d+2)/2.  When
the parameters satisfy the integrality condition, both operators map this
space into itself and are therefore representable as exact matrices with
entries in Q[e2, e3].

Column convention: column j of an operator matrix holds the coordinates of
the operator applied to basis element j.  Basis order is graded by m1 + m2,
then lexicographic on (m1, m2); golden files depend on this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DegreeOverflow, DimensionMismatch, NonPolynomial, NotSymmetric
from .operators import DiffOperator, apply_operator
from .poly import ONE, ZERO, Poly, Scalar


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered basis of the degree-d invariant space."""

    d: int
    elements: "tuple[tuple[int, int], ...]"

    @property
    def size(self) -> int:
        return len(self.elements)


def enumerate_basis(d: int) -> MonomialBasis:
    if not isinstance(d, int) or d < 0:
        raise ValueError(f"d must be a nonnegative int, got {d!r}")
    elements = [(m1, m2) for m1 in range(d + 1) for m2 in range(m1, d + 1)]
    elements.sort(key=lambda m: (m[0] + m[1], m))
    return MonomialBasis(d=d, elements=tuple(elements))


def monomial_symmetric(m1: int, m2: int) -> Poly:
    """The basis polynomial m_{(m1, m2)}; a single monomial when m1 = m2."""
    if m1 > m2:
        m1, m2 = m2, m1
    p = Poly({(m1, m2, 0, 0): Fraction(1)})
    if m1 != m2:
        p = p + Poly({(m2, m1, 0, 0): Fraction(1)})
    return p


def to_coordinates(f: Poly, basis: MonomialBasis) -> "list[Poly]":
    """Exact coordinates of a symmetric polynomial in the monomial basis.

    Reads off the coefficient of z1^m1 z2^m2 for each m1 <= m2, which is the
    unique expansion of a symmetric polynomial.  DegreeOverflow (degree > d
    in either variable) is the designed invariance-violation signal.
    """
    if not f.is_symmetric():
        raise NotSymmetric(f"cannot extract coordinates of non-symmetric {f}")
    deg = max(f.degree("z1"), f.degree("z2"))
    if deg > basis.d:
        raise DegreeOverflow(
            f"polynomial has z-degree {deg} > d = {basis.d}"
        )
    return [f.coefficient_of_z(m1, m2) for m1, m2 in basis.elements]


@dataclass(frozen=True)
class OpMatrix:
    """A square matrix of z-free polynomials in e2, e3.

    entries[i][j] is row i, column j; column j the image of basis element j.
    The attached basis is optional (synthetic matrices carry None).
    """

    dim: int
    entries: "tuple[tuple[Poly, ...], ...]"
    basis: "MonomialBasis | None" = None

    def __post_init__(self):
        if len(self.entries) != self.dim or any(len(r) != self.dim for r in self.entries):
            raise ValueError("entries are not a dim x dim grid")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], basis=None) -> "OpMatrix":
        entries = tuple(
            tuple(e if isinstance(e, Poly) else Poly(e) for e in row) for row in rows
        )
        return cls(dim=len(entries), entries=entries, basis=basis)

    @classmethod
    def identity(cls, dim: int) -> "OpMatrix":
        return cls.from_rows(
            [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)]
        )

    @classmethod
    def diagonal(cls, values: Sequence) -> "OpMatrix":
        n = len(values)
        return cls.from_rows(
            [[values[i] if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    def map_entries(self, fn: Callable[[Poly], Poly]) -> "OpMatrix":
        return OpMatrix.from_rows(
            [[fn(e) for e in row] for row in self.entries], basis=self.basis
        )

    def specialize(self, e2_value: Scalar, e3_value: Scalar) -> "OpMatrix":
        return self.map_entries(lambda p: p.specialize(e2_value, e3_value))

    def subs(self, assignments) -> "OpMatrix":
        return self.map_entries(lambda p: p.subs(assignments))

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    def is_constant(self) -> bool:
        return all(e.is_constant for row in self.entries for e in row)

    def trace(self) -> Poly:
        t = ZERO
        for i in range(self.dim):
            t = t + self.entries[i][i]
        return t

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        self._check_dim(other)
        return OpMatrix.from_rows(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        self._check_dim(other)
        return OpMatrix.from_rows(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.dim)]
                for i in range(self.dim)
            ]
        )

    def __matmul__(self, other: "OpMatrix") -> "OpMatrix":
        self._check_dim(other)
        n = self.dim
        rows = []
        for i in range(n):
            row = []
            arow = self.entries[i]
            for j in range(n):
                acc = ZERO
                for k in range(n):
                    a = arow[k]
                    b = other.entries[k][j]
                    if a.is_zero or b.is_zero:
                        continue
                    acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return OpMatrix.from_rows(rows)

    def scale(self, factor: "Poly | Scalar") -> "OpMatrix":
        factor = factor if isinstance(factor, Poly) else Poly(factor)
        return self.map_entries(lambda p: p * factor)

    def power(self, k: int) -> "OpMatrix":
        if k < 0:
            raise ValueError("negative matrix power")
        result = OpMatrix.identity(self.dim)
        for _ in range(k):
            result = result @ self
        return result

    def _check_dim(self, other: "OpMatrix"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"{self.dim} x {self.dim} vs {other.dim} x {other.dim}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpMatrix):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def to_json(self) -> dict:
        out: dict = {}
        if self.basis is not None:
            out["d"] = self.basis.d
            out["basis"] = [list(m) for m in self.basis.elements]
        out["entries"] = [[str(e) for e in row] for row in self.entries]
        return out


def matrix_of(op: DiffOperator, basis: MonomialBasis) -> OpMatrix:
    """Exact matrix of an operator on the monomial basis.

    Propagates DegreeOverflow / NonPolynomial annotated with the basis
    element that failed; with parameters violating the integrality
    condition this is the expected negative-test behavior.
    """
    columns = []
    for element in basis.elements:
        f = monomial_symmetric(*element)
        try:
            image = apply_operator(op, f)
            columns.append(to_coordinates(image, basis))
        except DegreeOverflow as exc:
            err = DegreeOverflow(
                f"basis element m_{element}: {exc}", element=element
            )
            raise err from exc
        except NonPolynomial as exc:
            raise NonPolynomial(f"basis element m_{element}: {exc}") from exc
    entries = tuple(
        tuple(columns[j][i] for j in range(basis.size)) for i in range(basis.size)
    )
    return OpMatrix(dim=basis.size, entries=entries, basis=basis)
