"""Everything computed from the operator matrices.

Commutators, exact characteristic polynomials (two independent algorithms
that serve as each other's oracle), numeric spectra, nondegeneracy tests,
and discovery/verification of the algebraic relations between the
Hamiltonian matrix and its commuting partner.

All symbolic computation is exact over Q or Q[e2, e3]; floating point only
enters in :func:`numeric_roots`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .basis import OpMatrix
from .errors import (
    AmbiguousRelation,
    DimensionMismatch,
    NoRelation,
    NonConvergence,
)
from .poly import ONE, ZERO, Poly, Scalar

__all__ = [
    "CharPoly",
    "RelationCoefficients",
    "SpectrumReport",
    "commutator",
    "char_poly",
    "numeric_roots",
    "discriminant",
    "discriminant_nonzero",
    "fit_relation",
    "find_minimal_relation",
    "spectrum_report",
]


def commutator(a: OpMatrix, b: OpMatrix) -> OpMatrix:
    """A @ B - B @ A, exact."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.dim} vs {b.dim}")
    return (a @ b) - (b @ a)


# ---------------------------------------------------------------------------
# Characteristic polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharPoly:
    """Monic characteristic polynomial; coefficients[k] multiplies lambda^k."""

    coefficients: "tuple[Poly, ...]"

    def __post_init__(self):
        if not self.coefficients or self.coefficients[-1] != ONE:
            raise ValueError("characteristic polynomial must be monic")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def rational_coefficients(self) -> "list[Fraction]":
        """Coefficients as exact rationals; requires constant entries."""
        return [c.constant_value() for c in self.coefficients]

    def specialize(self, e2_value: Scalar, e3_value: Scalar) -> "CharPoly":
        return CharPoly(
            tuple(c.specialize(e2_value, e3_value) for c in self.coefficients)
        )

    def __str__(self) -> str:
        return " | ".join(str(c) for c in self.coefficients)


def char_poly(m: OpMatrix, method: str = "faddeev") -> CharPoly:
    """det(lambda*I - M), monic, by one of two independent exact routes.

    "faddeev": the trace recursion, valid over the full polynomial ring
    (symbolic e2, e3 entries welcome).  "bareiss": fraction-free elimination
    on lambda*I - M over Q[lambda]; requires constant entries.  The two
    paths agreeing on specialized matrices is an acceptance-level oracle.
    """
    if method == "faddeev":
        return _char_poly_faddeev(m)
    if method == "bareiss":
        return _char_poly_bareiss(m)
    raise ValueError(f"unknown char_poly method {method!r}")


def _char_poly_faddeev(m: OpMatrix) -> CharPoly:
    n = m.dim
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    mk = m
    for k in range(1, n + 1):
        ck = mk.trace() * Fraction(-1, k)
        coeffs[n - k] = ck
        if k < n:
            mk = m @ (mk + OpMatrix.identity(n).scale(ck))
    return CharPoly(tuple(coeffs))


# Dense univariate polynomials over Fraction, little-endian coefficient
# lists, used by the Bareiss path and the resultant computation.


def _up_trim(p: "list[Fraction]") -> "list[Fraction]":
    while p and not p[-1]:
        p.pop()
    return p


def _up_add(p, q):
    n = max(len(p), len(q))
    return _up_trim(
        [
            (p[i] if i < len(p) else Fraction(0)) + (q[i] if i < len(q) else Fraction(0))
            for i in range(n)
        ]
    )


def _up_neg(p):
    return [-c for c in p]


def _up_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _up_trim(out)


def _up_divexact(p, q):
    """Exact division in Q[lambda]; raises if the remainder is nonzero."""
    if not q:
        raise ZeroDivisionError("univariate division by zero")
    rem = list(p)
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(rem) >= len(q):
        c = rem[-1] / lead
        k = len(rem) - len(q)
        quot[k] = c
        for i, b in enumerate(q):
            rem[i + k] -= c * b
        _up_trim(rem)
        if not rem:
            break
    if rem:
        raise ArithmeticError("inexact univariate division inside Bareiss")
    return _up_trim(quot)


def _up_eval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _char_poly_bareiss(m: OpMatrix) -> CharPoly:
    """Fraction-free Bareiss determinant of lambda*I - M over Q[lambda]."""
    if not m.is_constant():
        raise ValueError("bareiss char_poly needs a matrix with constant entries")
    n = m.dim
    a = [
        [
            _up_trim(
                [-m.entries[i][j].constant_value()] + ([Fraction(1)] if i == j else [])
            )
            for j in range(n)
        ]
        for i in range(n)
    ]
    sign = 1
    prev = [Fraction(1)]
    for k in range(n - 1):
        if not a[k][k]:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                # det(lambda*I - M) is monic, so a fully zero column cannot occur
                raise ArithmeticError("Bareiss elimination hit a zero column")
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _up_add(_up_mul(a[i][j], a[k][k]), _up_neg(_up_mul(a[i][k], a[k][j])))
                a[i][j] = _up_divexact(num, prev)
            a[i][k] = []
        prev = a[k][k]
    det = a[n - 1][n - 1]
    if sign < 0:
        det = _up_neg(det)
    coeffs = det + [Fraction(0)] * (n + 1 - len(det))
    return CharPoly(tuple(Poly(c) for c in coeffs))


# ---------------------------------------------------------------------------
# Numeric spectra and nondegeneracy
# ---------------------------------------------------------------------------


def numeric_roots(
    cp: CharPoly,
    precision_target: float = 1e-12,
    max_iterations: int = 500,
) -> "list[tuple[complex, float]]":
    """All roots by simultaneous Durand-Kerner iteration, with residuals.

    Starts from deterministic points on a circle of radius given by the
    Cauchy bound, so identical input yields identical output.  Raises
    NonConvergence if some |cp(root)| residual still exceeds the target at
    the iteration cap; never silently truncates.
    """
    coeffs = [float(c) for c in cp.rational_coefficients()]
    n = cp.degree
    if n == 0:
        return []

    def value(x: complex) -> complex:
        acc = 0j
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    radius = 1.0 + max(abs(c) for c in coeffs[:-1]) if n else 1.0
    seed = complex(0.4, 0.9)
    seed /= abs(seed)
    roots = [radius * seed ** (k + 1) for k in range(n)]
    residuals = [abs(value(r)) for r in roots]
    for iteration in range(max_iterations):
        if all(r < precision_target for r in residuals):
            break
        moved = []
        for i, zi in enumerate(roots):
            denom = 1.0 + 0j
            for j, zj in enumerate(roots):
                if i != j:
                    diff = zi - zj
                    if diff == 0:
                        diff = complex(1e-30, 1e-30)
                    denom *= diff
            moved.append(zi - value(zi) / denom)
        roots = moved
        residuals = [abs(value(r)) for r in roots]
    if not all(r < precision_target for r in residuals):
        raise NonConvergence(
            f"root residuals {max(residuals):.3e} above target {precision_target:.3e} "
            f"after {max_iterations} iterations",
            residuals=residuals,
            iterations=max_iterations,
        )
    paired = sorted(zip(roots, residuals), key=lambda p: (p[0].real, p[0].imag))
    return [(r, res) for r, res in paired]


def _resultant(p: "list[Fraction]", q: "list[Fraction]") -> Fraction:
    """Resultant via exact Gaussian elimination on the Sylvester matrix."""
    m, n = len(p) - 1, len(q) - 1
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0 and n == 0:
        return Fraction(1)
    size = m + n
    rows = []
    for i in range(n):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(p)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(q)):
            row[i + j] = c
        rows.append(row)
    det = Fraction(1)
    for col in range(size):
        pivot = None
        for r in range(col, size):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = Fraction(1) / rows[col][col]
        for r in range(col + 1, size):
            if rows[r][col]:
                factor = rows[r][col] * inv
                rows[r] = [rv - factor * cv for rv, cv in zip(rows[r], rows[col])]
    return det


def discriminant(cp: CharPoly) -> Fraction:
    """Exact discriminant of a monic charpoly with rational coefficients."""
    p = cp.rational_coefficients()
    n = cp.degree
    dp = _up_trim([p[k] * k for k in range(1, n + 1)])
    res = _resultant(p, dp)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res


def discriminant_nonzero(cp: CharPoly) -> bool:
    """Exact test that the spectrum is simple (no repeated eigenvalue)."""
    return discriminant(cp) != 0


@dataclass(frozen=True)
class SpectrumReport:
    """Numeric spectrum of a specialized matrix, with exact backing."""

    exact_charpoly: CharPoly
    roots: "list[tuple[complex, float]]"
    discriminant_nonzero: bool
    trace_residual: float
    det_residual: float


def spectrum_report(cp: CharPoly, precision_target: float = 1e-12) -> SpectrumReport:
    """Roots plus sanity residuals against the exact trace/determinant."""
    roots = numeric_roots(cp, precision_target)
    coeffs = cp.rational_coefficients()
    n = cp.degree
    trace = -coeffs[n - 1] if n >= 1 else Fraction(0)
    det = (-1) ** n * coeffs[0] if n >= 1 else Fraction(1)
    root_sum = sum((r for r, _ in roots), 0j)
    root_prod = 1 + 0j
    for r, _ in roots:
        root_prod *= r
    return SpectrumReport(
        exact_charpoly=cp,
        roots=roots,
        discriminant_nonzero=discriminant_nonzero(cp),
        trace_residual=abs(root_sum - complex(float(trace))),
        det_residual=abs(root_prod - complex(float(det))),
    )


# ---------------------------------------------------------------------------
# Exact linear algebra over Q
# ---------------------------------------------------------------------------


def _rref(rows: "list[list[Fraction]]") -> "tuple[list[list[Fraction]], list[int]]":
    """Reduced row echelon form (in place on a copy) and pivot columns."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [vi - factor * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


class _Underdetermined(Exception):
    def __init__(self, nullity: int):
        self.nullity = nullity


class _Inconsistent(Exception):
    pass


def _solve_unique(
    rows: "list[list[Fraction]]", rhs: "list[Fraction]"
) -> "list[Fraction]":
    """Solve A x = b exactly; require a unique solution."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = _rref(aug)
    for row in red:
        if row[-1] and not any(row[:-1]):
            raise _Inconsistent()
    if ncols in pivots:
        raise _Inconsistent()
    if len(pivots) < ncols:
        raise _Underdetermined(ncols - len(pivots))
    solution = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        solution[c] = red[r][-1]
    return solution


def _nullspace(rows: "list[list[Fraction]]", ncols: int) -> "list[list[Fraction]]":
    """Basis of the exact nullspace of A (possibly empty)."""
    if not rows:
        return [
            [Fraction(1) if i == j else Fraction(0) for i in range(ncols)]
            for j in range(ncols)
        ]
    red, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# Algebraic relations between the two matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationCoefficients:
    """Exact coefficients of an algebraic relation between the matrices.

    kind "d1_relation":  P2 = c2 H^2 + c1 H + c0           (names c2, c1, c0)
    kind "d2_relation":  P2^2 + d0 P2 = c4 H^4 + ... + c0  (d0, c4 ... c0)
    kind "general":      sum over (i, j) of coeff * H^i P2^j = 0

    Every coefficient is weight-homogeneous under wt(e) = 2; fitted kinds
    check this at construction time.
    """

    kind: str
    coefficients: "dict[str, Poly] | None" = None
    terms: "tuple[tuple[tuple[int, int], Poly], ...] | None" = None

    def __post_init__(self):
        if self.kind in ("d1_relation", "d2_relation"):
            expected = _RELATION_WEIGHTS[self.kind]
            if self.coefficients is None or list(self.coefficients) != list(expected):
                raise ValueError(f"{self.kind} needs coefficients {list(expected)}")
            for name, weight in expected.items():
                poly = self.coefficients[name]
                if not poly.is_zero and poly.homogeneous_weight() != weight:
                    raise ValueError(
                        f"coefficient {name} = {poly} is not weight-{weight} homogeneous"
                    )
        elif self.kind == "general":
            if self.terms is None:
                raise ValueError("general relation needs terms")
        else:
            raise ValueError(f"unknown relation kind {self.kind!r}")

    def to_json(self) -> dict:
        if self.kind == "general":
            return {
                "kind": self.kind,
                "terms": [
                    {"H_power": i, "P2_power": j, "coefficient": str(c)}
                    for (i, j), c in self.terms
                ],
            }
        return {
            "kind": self.kind,
            "coefficients": {k: str(v) for k, v in self.coefficients.items()},
        }


_RELATION_WEIGHTS = {
    "d1_relation": {"c2": 0, "c1": 2, "c0": 4},
    "d2_relation": {"d0": 4, "c4": 0, "c3": 2, "c2": 4, "c1": 6, "c0": 8},
}


def _active_vars(*mats: OpMatrix) -> "tuple[str, ...]":
    seen = set()
    for m in mats:
        for row in m.entries:
            for entry in row:
                seen.update(v for v in entry.variables() if v in ("e2", "e3"))
    return tuple(v for v in ("e2", "e3") if v in seen)


def _sample_points(active: "tuple[str, ...]", count: int) -> "list[dict[str, Fraction]]":
    """Deterministic rational sample points avoiding e_i collisions.

    With e1 = -e2 - e3, collisions happen at e2 = e3, 2 e2 + e3 = 0 and
    e2 + 2 e3 = 0; e2 = 0 or e3 = 0 degenerate too.  Positive coprime pairs
    with distinct ratios avoid all of them.
    """
    points: "list[dict[str, Fraction]]" = []
    if not active:
        return [{}]
    if len(active) == 1:
        var = active[0]
        return [{var: Fraction(k)} for k in range(1, count + 1)]
    q = 1
    while len(points) < count:
        q += 1
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                points.append({"e2": Fraction(p, q), "e3": Fraction(1)})
                points.append({"e2": Fraction(q, p), "e3": Fraction(1)})
                if len(points) >= count:
                    break
    return points[:count]


def _monomial_basis(weight: int, active: "tuple[str, ...]") -> "list[Poly]":
    """All monomials in the active e-variables of homogeneous weight."""
    if weight < 0 or weight % 2:
        return []
    degree = weight // 2
    if not active:
        return [ONE] if degree == 0 else []
    if len(active) == 1:
        return [Poly.variable(active[0]) ** degree]
    return [
        Poly.variable("e2") ** k * Poly.variable("e3") ** (degree - k)
        for k in range(degree, -1, -1)
    ]


def _vec(m: OpMatrix) -> "list[Fraction]":
    return [e.constant_value() for row in m.entries for e in row]


def _specialize_matrix(m: OpMatrix, point: "dict[str, Fraction]") -> OpMatrix:
    if not point:
        if not m.is_constant():
            raise ValueError("matrix has symbolic entries but no point given")
        return m
    e2 = point.get("e2", Fraction(0))
    e3 = point.get("e3", Fraction(0))
    return m.specialize(e2, e3)


def fit_relation(h: OpMatrix, p2: OpMatrix, d: int) -> RelationCoefficients:
    """Fit the degree-d algebraic relation between the two matrices.

    Strategy: specialize (e2, e3) at deterministic rational points, solve
    each exact linear system for the scalar coefficient values, interpolate
    every coefficient as a homogeneous polynomial of its known weight, then
    verify the reconstructed relation symbolically before returning.

    d=1 fits P2 = c2 H^2 + c1 H + c0; d=2 fits P2^2 + d0 P2 = sum c_k H^k.
    """
    if h.dim != p2.dim:
        raise DimensionMismatch(f"{h.dim} vs {p2.dim}")
    if d == 1:
        kind = "d1_relation"
    elif d == 2:
        kind = "d2_relation"
    else:
        raise ValueError(f"fit_relation supports d = 1 or 2, got {d}")
    if h.basis is not None and h.basis.d != d:
        raise ValueError(f"matrix basis has d = {h.basis.d}, expected {d}")

    weights = _RELATION_WEIGHTS[kind]
    active = _active_vars(h, p2)
    bases = {name: _monomial_basis(w, active) for name, w in weights.items()}
    unknown_names = [name for name, basis in bases.items() if basis]
    needed_points = max((len(b) for b in bases.values()), default=1)
    points = _sample_points(active, needed_points + 1)

    per_point: "list[dict[str, Fraction]]" = []
    nullity = None
    for point in points:
        hs = _specialize_matrix(h, point)
        ps = _specialize_matrix(p2, point)
        columns, rhs = _relation_system(hs, ps, kind, unknown_names)
        rows = [[col[r] for col in columns] for r in range(len(rhs))]
        try:
            solution = _solve_unique(rows, rhs)
        except _Inconsistent:
            raise NoRelation(
                f"no exact degree-{d} relation at sample point {point}; "
                "this signals an upstream transcription bug"
            )
        except _Underdetermined as exc:
            nullity = exc.nullity if nullity is None else min(nullity, exc.nullity)
            continue
        per_point.append({"point": point, "values": dict(zip(unknown_names, solution))})
    if not per_point:
        raise AmbiguousRelation(
            f"relation system underdetermined at every sample point "
            f"(nullspace dimension {nullity})",
            nullspace_dim=nullity or 0,
        )

    coefficients = {}
    for name, weight in weights.items():
        basis = bases[name]
        if not basis:
            coefficients[name] = ZERO
            continue
        coefficients[name] = _interpolate(
            [(rec["point"], rec["values"][name]) for rec in per_point], basis, name
        )

    _verify_fitted(h, p2, kind, coefficients)
    return RelationCoefficients(kind=kind, coefficients=coefficients)


def _relation_system(hs, ps, kind, unknown_names):
    """Vectorized per-point linear system: columns per unknown, rhs."""
    if kind == "d1_relation":
        column_sources = {
            "c2": _vec(hs @ hs),
            "c1": _vec(hs),
            "c0": _vec(OpMatrix.identity(hs.dim)),
        }
        rhs = _vec(ps)
    else:
        h2 = hs @ hs
        h3 = h2 @ hs
        h4 = h3 @ hs
        column_sources = {
            "d0": [-v for v in _vec(ps)],
            "c4": _vec(h4),
            "c3": _vec(h3),
            "c2": _vec(h2),
            "c1": _vec(hs),
            "c0": _vec(OpMatrix.identity(hs.dim)),
        }
        rhs = _vec(ps @ ps)
    return [column_sources[name] for name in unknown_names], rhs


def _interpolate(samples, basis: "list[Poly]", name: str) -> Poly:
    """Fit a homogeneous coefficient polynomial through its point values."""
    rows = []
    rhs = []
    for point, value in samples:
        rows.append(
            [b.specialize(point.get("e2", 0), point.get("e3", 0)).constant_value() for b in basis]
        )
        rhs.append(value)
    try:
        alphas = _solve_unique(rows, rhs)
    except _Inconsistent:
        raise NoRelation(
            f"coefficient {name} does not interpolate as a weight-homogeneous "
            "polynomial; this signals an upstream transcription bug"
        )
    except _Underdetermined as exc:
        raise AmbiguousRelation(
            f"not enough independent sample points to pin coefficient {name}",
            nullspace_dim=exc.nullity,
        )
    result = ZERO
    for alpha, b in zip(alphas, basis):
        result = result + alpha * b
    return result


def _verify_fitted(h, p2, kind, coefficients):
    identity = OpMatrix.identity(h.dim)
    if kind == "d1_relation":
        lhs = p2
        rhs = (
            (h @ h).scale(coefficients["c2"])
            + h.scale(coefficients["c1"])
            + identity.scale(coefficients["c0"])
        )
    else:
        h2 = h @ h
        rhs = (
            (h2 @ h2).scale(coefficients["c4"])
            + (h2 @ h).scale(coefficients["c3"])
            + h2.scale(coefficients["c2"])
            + h.scale(coefficients["c1"])
            + identity.scale(coefficients["c0"])
        )
        lhs = (p2 @ p2) + p2.scale(coefficients["d0"])
    if not (lhs - rhs).is_zero:
        raise NoRelation(
            "interpolated relation fails exact symbolic verification; "
            "this signals an upstream transcription bug"
        )


def find_minimal_relation(
    h: OpMatrix, p2: OpMatrix, max_bidegree: "tuple[int, int]"
) -> RelationCoefficients:
    """Minimal-total-degree algebraic relation within a bidegree bound.

    Searches sum_{i,j} coeff_{ij} H^i P2^j = 0 with i <= max_i, j <= max_j,
    coeff weight-homogeneous in the active e-variables.  Candidate nullspace
    vectors come from exact specializations; each survivor is then verified
    as an exact symbolic identity (the verification itself is a second exact
    nullspace computation, so no spurious relation can escape).  Among the
    verified relations of minimal total degree, the returned one eliminates
    the lowest monomials first and is normalized so the coefficient of its
    highest monomial (largest (j, i)) has leading rational coefficient 1.
    """
    max_i, max_j = max_bidegree
    if max_i < 0 or max_j < 0:
        raise ValueError("max_bidegree must be nonnegative")
    if h.dim != p2.dim:
        raise DimensionMismatch(f"{h.dim} vs {p2.dim}")

    active = _active_vars(h, p2)
    max_weight = 2 * max_i + 4 * max_j
    max_coeff_degree = max_weight // 2
    points = _sample_points(active, max_coeff_degree + 2)

    sym_powers = _PowerCache(h, p2)
    numeric_powers = [
        _PowerCache(_specialize_matrix(h, pt), _specialize_matrix(p2, pt))
        for pt in points
    ]

    all_monomials = [(i, j) for i in range(max_i + 1) for j in range(max_j + 1)]
    for total_degree in range(0, max_i + max_j + 1):
        support = sorted(
            [(i, j) for i, j in all_monomials if i + j <= total_degree],
            key=lambda ij: (ij[0] + ij[1], ij[1], ij[0]),
        )
        if not support:
            continue
        # Without symbolic variables the weight grading carries no
        # information: every coefficient is a free rational and one system
        # covers everything.  With symbolic entries, relations split into
        # weight-homogeneous strata searched in increasing weight.
        weight_range = [None] if not active else range(0, max_weight + 1, 2)
        for weight in weight_range:
            candidate = _relation_at_weight(
                support, weight, active, points, numeric_powers, sym_powers
            )
            if candidate is not None:
                return candidate
    raise NoRelation(f"no algebraic relation within bidegree {max_bidegree}")


class _PowerCache:
    """Lazily computed products H^i @ P2^j for one matrix pair."""

    def __init__(self, h: OpMatrix, p2: OpMatrix):
        self._h = h
        self._p2 = p2
        self._h_powers = {0: OpMatrix.identity(h.dim)}
        self._p2_powers = {0: OpMatrix.identity(h.dim)}
        self._products: dict = {}

    def product(self, i: int, j: int) -> OpMatrix:
        if (i, j) not in self._products:
            while max(self._h_powers) < i:
                k = max(self._h_powers)
                self._h_powers[k + 1] = self._h_powers[k] @ self._h
            while max(self._p2_powers) < j:
                k = max(self._p2_powers)
                self._p2_powers[k + 1] = self._p2_powers[k] @ self._p2
            self._products[(i, j)] = self._h_powers[i] @ self._p2_powers[j]
        return self._products[(i, j)]


def _relation_at_weight(support, weight, active, points, numeric_powers, sym_powers):
    """Exact relation search over one candidate support (one weight stratum)."""
    unknowns = []  # (monomial (i,j), e-basis Poly)
    for i, j in support:
        if weight is None:
            unknowns.append(((i, j), ONE))
        else:
            for b in _monomial_basis(weight - 2 * i - 4 * j, active):
                unknowns.append(((i, j), b))
    if not unknowns:
        return None

    rows = []
    for point, powers in zip(points, numeric_powers):
        e2 = point.get("e2", Fraction(0))
        e3 = point.get("e3", Fraction(0))
        vecs = {ij: _vec(powers.product(*ij)) for ij in support}
        scalars = [b.specialize(e2, e3).constant_value() for _, b in unknowns]
        dim_sq = len(next(iter(vecs.values())))
        for r in range(dim_sq):
            rows.append(
                [s * vecs[ij][r] for (ij, _), s in zip(unknowns, scalars)]
            )
    candidates = _nullspace(rows, len(unknowns))
    if not candidates:
        return None

    # Exact filter: a candidate alpha-vector is a true relation iff the
    # symbolic residual matrix vanishes; solving for vanishing combinations
    # of the residuals keeps every true relation and kills every artifact.
    residuals = []
    for vec in candidates:
        acc = None
        for alpha, ((i, j), b) in zip(vec, unknowns):
            if not alpha:
                continue
            piece = sym_powers.product(i, j).scale(b * alpha)
            acc = piece if acc is None else acc + piece
        residuals.append(acc)
    combo_rows = _residual_rows(residuals)
    true_combos = _nullspace(combo_rows, len(candidates))
    if not true_combos:
        return None
    verified = []
    for combo in true_combos:
        vec = [Fraction(0)] * len(unknowns)
        for t, basis_vec in zip(combo, candidates):
            if t:
                for idx in range(len(unknowns)):
                    vec[idx] += t * basis_vec[idx]
        verified.append(vec)

    chosen = _canonical_relation_vector(verified)
    terms: dict = {}
    for alpha, ((i, j), b) in zip(chosen, unknowns):
        if alpha:
            new = terms.get((i, j), ZERO) + alpha * b
            if new.is_zero:
                terms.pop((i, j), None)
            else:
                terms[(i, j)] = new
    lead_ij = max(terms, key=lambda ij: (ij[1], ij[0]))
    lead_coeff = next(iter(terms[lead_ij].terms()))[1]
    scale = Fraction(1) / lead_coeff
    ordered = sorted(
        ((ij, c * scale) for ij, c in terms.items()),
        key=lambda kv: (kv[0][1], kv[0][0]),
        reverse=True,
    )
    return RelationCoefficients(kind="general", terms=tuple(ordered))


def _residual_rows(residual_matrices):
    """Rows of the exact system "combination of residual matrices == 0"."""
    keys = set()
    for mat in residual_matrices:
        if mat is None:
            continue
        for row in mat.entries:
            for entry in row:
                for exps, _ in entry.terms():
                    keys.add(exps)
    keys = sorted(keys)
    dim = next(m.dim for m in residual_matrices if m is not None)
    rows = []
    for i in range(dim):
        for j in range(dim):
            for exps in keys:
                row = []
                for mat in residual_matrices:
                    if mat is None:
                        row.append(Fraction(0))
                    else:
                        row.append(mat.entries[i][j].coefficient(exps))
                rows.append(row)
    if not rows:
        rows = [[Fraction(0)] * len(residual_matrices)]
    return rows


def _canonical_relation_vector(verified):
    """Pick the canonical element of the verified relation space.

    Row-reduce with unknown columns ordered lowest monomial first and take
    the last basis vector: the relation whose low-order coefficients are
    eliminated as far as the space allows.  The caller renormalizes by the
    leading (highest (j, i)) monomial.
    """
    red, _ = _rref(verified)
    red = [row for row in red if any(row)]
    return red[-1]
