"""The two BC2 operators acting on symmetric polynomials in z1, z2.

After the gauge transformation that removes the ground-state-like factor,
the Hamiltonian of the BC2 Inozemtsev model and its fourth-order commuting
partner act on polynomials in z_j = wp(x_j) with rational-function
coefficients.  This module builds both as exact symbolic differential
operators and applies them to polynomials.

With c(z) = 4(z - e1)(z - e2)(z - e3) and
b(z) = (2*b1 + 1/2)/(z - e1) + (2*b2 + 1/2)/(z - e2) + (2*b3 + 1/2)/(z - e3),
the second-order operator is

    H = - c(z1) * (D1^2 + (2a/(z1 - z2) + b(z1)) * D1)
        - c(z2) * (D2^2 + (2a/(z2 - z1) + b(z2)) * D2)
        - 4(a + B)(a + B') (z1 + z2) + 2*s1 + s2

where D_j = d/dz_j, B = b0 + b1 + b2 + b3, B' = -b0 + b1 + b2 + b3 + 1/2,
s1 = 4((b1 + b2)^2 e3 + (b1 + b3)^2 e2 + (b2 + b3)^2 e1) and
s2 = -8a(e1 b1 + e2 b2 + e3 b3).

The fourth-order commuting operator is

    P2 = c(z1) c(z2) * [ D1^2 D2^2
         + (2a/(z2 - z1) + b(z2)) D1^2 D2
         + (2a/(z1 - z2) + b(z1)) D1 D2^2
         + q(z1, z2) D1^2 + q(z2, z1) D2^2
         + ((2a/(z1 - z2) + b(z1)) (2a/(z2 - z1) + b(z2))
            + 2a(a + 1)/(z1 - z2)^2) D1 D2
         + (a(a + 1)/(z2 - z1)^2 * (2(a - 1)/(z2 - z1) + b(z2))
            + (2a/(z1 - z2) + b(z1)) q(z1, z2)) D1
         + (a(a + 1)/(z1 - z2)^2 * (2(a - 1)/(z1 - z2) + b(z1))
            + (2a/(z2 - z1) + b(z2)) q(z2, z1)) D2 ]
         + 4(a + B)(a + B') (4 B B' z1 z2 - s1 (z1 + z2))

    with q(x, y) = a/(y - x) * ((a - 1)/(y - x) + b(y))
                   + (4 B B' y - s1)/c(y),

normalized so that (P2 . 1) vanishes at z1 = z2 = 0.  The builders below
transcribe these displays term by term (one code block per displayed
summand), multiply the c(z1)c(z2) prefactor through, and cancel every
denominator factor that divides its numerator, so the only surviving
denominator atoms are powers of (z1 - z2).

e1 is eliminated as -e2 - e3 throughout, so every coefficient is an honest
element of Q[z1, z2, e2, e3] (over the enumerated atoms).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NonDivisible, NonPolynomial
from .poly import (
    E_VALUES,
    ONE,
    ZERO,
    DenomAtom,
    Poly,
    Scalar,
    exact_divide_atom,
)
from .poly import is_symmetric, swap_z  # re-exported: symmetry ops live here

__all__ = [
    "ExponentParams",
    "CouplingParams",
    "DerivedConstants",
    "DiffOperator",
    "OpTerm",
    "couplings_to_exponents",
    "derived_constants",
    "build_hamiltonian",
    "build_commuting_operator",
    "apply_operator",
    "swap_z",
    "is_symmetric",
]


@dataclass(frozen=True)
class ExponentParams:
    """The five exponent parameters of the gauge factor.

    The operators exist for arbitrary rationals; the integrality of
    d = -(a + b0 + b1 + b2 + b3) is only needed (and only checked) by
    callers that want the finite invariant space.
    """

    a: Fraction
    b0: Fraction
    b1: Fraction
    b2: Fraction
    b3: Fraction

    def __post_init__(self):
        for name in ("a", "b0", "b1", "b2", "b3"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def d(self) -> Fraction:
        """The degree parameter -(a + b0 + b1 + b2 + b3)."""
        return -(self.a + self.b0 + self.b1 + self.b2 + self.b3)

    def integral_d(self):
        """d as a nonnegative int, or None if the condition fails."""
        d = self.d
        if d.denominator == 1 and d >= 0:
            return int(d)
        return None

    @property
    def b(self) -> "tuple[Fraction, Fraction, Fraction, Fraction]":
        return (self.b0, self.b1, self.b2, self.b3)


BRANCH_A = ("minus_l", "l_plus_1")
BRANCH_B = ("minus_half_l", "half_l_plus_1")


@dataclass(frozen=True)
class CouplingParams:
    """Coupling constants with a branch choice for each exponent.

    Each coupling l maps to a in {-l, l+1}, and each l_i to
    b_i in {-l_i/2, (l_i+1)/2}; the branch fields pick which.
    """

    l: Fraction
    l0: Fraction
    l1: Fraction
    l2: Fraction
    l3: Fraction
    branch_a: str = "minus_l"
    branch_b0: str = "minus_half_l"
    branch_b1: str = "minus_half_l"
    branch_b2: str = "minus_half_l"
    branch_b3: str = "minus_half_l"

    def __post_init__(self):
        for name in ("l", "l0", "l1", "l2", "l3"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.branch_a not in BRANCH_A:
            raise ValueError(f"branch_a must be one of {BRANCH_A}")
        for name in ("branch_b0", "branch_b1", "branch_b2", "branch_b3"):
            if getattr(self, name) not in BRANCH_B:
                raise ValueError(f"{name} must be one of {BRANCH_B}")


def couplings_to_exponents(c: CouplingParams) -> ExponentParams:
    """Apply the selected branch to every coupling constant."""
    a = -c.l if c.branch_a == "minus_l" else c.l + 1
    bs = []
    for li, branch in (
        (c.l0, c.branch_b0),
        (c.l1, c.branch_b1),
        (c.l2, c.branch_b2),
        (c.l3, c.branch_b3),
    ):
        bs.append(-li / 2 if branch == "minus_half_l" else (li + 1) / 2)
    return ExponentParams(a, *bs)


@dataclass(frozen=True)
class DerivedConstants:
    """Constants entering the zeroth-order parts of both operators.

    b_sum     = b0 + b1 + b2 + b3
    b_sum_alt = -b0 + b1 + b2 + b3 + 1/2
    shift1    = 4((b1+b2)^2 e3 + (b1+b3)^2 e2 + (b2+b3)^2 e1), e1 expanded
    shift2    = -8a (e1 b1 + e2 b2 + e3 b3), e1 expanded
    """

    b_sum: Fraction
    b_sum_alt: Fraction
    shift1: Poly
    shift2: Poly


def derived_constants(p: ExponentParams) -> DerivedConstants:
    b_sum = p.b0 + p.b1 + p.b2 + p.b3
    b_sum_alt = -p.b0 + p.b1 + p.b2 + p.b3 + Fraction(1, 2)
    e1, e2, e3 = E_VALUES[1], E_VALUES[2], E_VALUES[3]
    shift1 = 4 * ((p.b1 + p.b2) ** 2 * e3 + (p.b1 + p.b3) ** 2 * e2 + (p.b2 + p.b3) ** 2 * e1)
    shift2 = -8 * p.a * (e1 * p.b1 + e2 * p.b2 + e3 * p.b3)
    return DerivedConstants(b_sum, b_sum_alt, shift1, shift2)


def c_poly(z_var: int) -> Poly:
    """c(z_j) = 4 (z_j - e1)(z_j - e2)(z_j - e3) with e1 expanded."""
    z = Poly.variable(f"z{z_var}")
    return 4 * (z - E_VALUES[1]) * (z - E_VALUES[2]) * (z - E_VALUES[3])


@dataclass(frozen=True)
class OpTerm:
    """One summand (num / prod(denom)) * D1^deriv[0] D2^deriv[1]."""

    num: Poly
    denom: "tuple[DenomAtom, ...]"  # sorted, repeated per multiplicity
    deriv: "tuple[int, int]"


@dataclass(frozen=True)
class DiffOperator:
    """A finite sum of rational-coefficient partial-derivative terms.

    Immutable after build; applying it is a pure function, so instances may
    be shared freely.
    """

    terms: "tuple[OpTerm, ...]"

    def max_derivative_order(self) -> int:
        return max((t.deriv[0] + t.deriv[1] for t in self.terms), default=0)

    def denominator_profile(self) -> "dict[DenomAtom, int]":
        """Maximum multiplicity of each denominator atom across terms."""
        profile: dict = {}
        for t in self.terms:
            seen: dict = {}
            for atom in t.denom:
                seen[atom] = seen.get(atom, 0) + 1
            for atom, mult in seen.items():
                profile[atom] = max(profile.get(atom, 0), mult)
        return profile

    def apply(self, f: Poly) -> Poly:
        return apply_operator(self, f)

    def dump(self) -> "list[dict]":
        """JSON-ready term list with canonical polynomial strings."""
        out = []
        for t in sorted(
            self.terms,
            key=lambda t: (-(t.deriv[0] + t.deriv[1]), t.deriv, tuple(map(str, t.denom))),
        ):
            out.append(
                {
                    "num": str(t.num),
                    "denom": [str(a) for a in t.denom],
                    "deriv": list(t.deriv),
                }
            )
        return out


# ---------------------------------------------------------------------------
# Internal rational-sum calculus used only at build time.
#
# A "rational sum" is a list of (numerator Poly, denominator atom multiset)
# pairs.  Products only ever multiply denominators together; the final
# normalization step cancels every atom that exactly divides its numerator.
# ---------------------------------------------------------------------------

_RatTerm = "tuple[Poly, tuple[DenomAtom, ...]]"


def _rs(num: "Poly | Scalar", atoms: Iterable[DenomAtom] = ()) -> "list[_RatTerm]":
    num = num if isinstance(num, Poly) else Poly(num)
    if num.is_zero:
        return []
    return [(num, tuple(sorted(atoms)))]


def _rs_add(*sums: "list[_RatTerm]") -> "list[_RatTerm]":
    merged: dict = {}
    for s in sums:
        for num, denom in s:
            merged[denom] = merged.get(denom, ZERO) + num
    return [(num, denom) for denom, num in merged.items() if not num.is_zero]


def _rs_mul(a: "list[_RatTerm]", b: "list[_RatTerm]") -> "list[_RatTerm]":
    out: dict = {}
    for na, da in a:
        for nb, db in b:
            denom = tuple(sorted(da + db))
            out[denom] = out.get(denom, ZERO) + na * nb
    return [(num, denom) for denom, num in out.items() if not num.is_zero]


def _rs_cancel(s: "list[_RatTerm]") -> "list[_RatTerm]":
    """Divide out every denominator atom that exactly divides the numerator."""
    out = []
    for num, denom in s:
        remaining = []
        for atom in denom:
            try:
                num = exact_divide_atom(num, atom)
            except NonDivisible:
                remaining.append(atom)
        if not num.is_zero:
            out.append((num, tuple(sorted(remaining))))
    return _rs_add(out)


def _inv_zdiff(j: int, k: int) -> "list[_RatTerm]":
    """1/(z_j - z_k) over the single stored atom (z1 - z2)."""
    sign = 1 if (j, k) == (1, 2) else -1
    return _rs(sign, [DenomAtom.z_diff()])


def _inv_c(z_var: int) -> "list[_RatTerm]":
    """1/c(z_j) as 1/4 over the three monic linear atoms."""
    atoms = [DenomAtom.z_minus_e(z_var, i) for i in (1, 2, 3)]
    return _rs(Fraction(1, 4), atoms)


def _b_sum_rs(p: ExponentParams, z_var: int) -> "list[_RatTerm]":
    """b(z_j) = sum_i (2 b_i + 1/2)/(z_j - e_i)."""
    pieces = []
    for i, bi in ((1, p.b1), (2, p.b2), (3, p.b3)):
        pieces.append(_rs(2 * bi + Fraction(1, 2), [DenomAtom.z_minus_e(z_var, i)]))
    return _rs_add(*pieces)


def _q_rs(p: ExponentParams, x: int, y: int, dc: DerivedConstants) -> "list[_RatTerm]":
    """q(z_x, z_y) = a/(y-x) ((a-1)/(y-x) + b(z_y)) + (4 B B' z_y - s1)/c(z_y)."""
    inv_yx = _inv_zdiff(y, x)
    first = _rs_mul(
        _rs_mul(_rs(p.a), inv_yx),
        _rs_add(_rs_mul(_rs(p.a - 1), inv_yx), _b_sum_rs(p, y)),
    )
    zy = Poly.variable(f"z{y}")
    second = _rs_mul(_rs(4 * dc.b_sum * dc.b_sum_alt * zy - dc.shift1), _inv_c(y))
    return _rs_add(first, second)


def _finish(term_map: "dict[tuple[int, int], list[_RatTerm]]") -> DiffOperator:
    terms = []
    for deriv in sorted(term_map, reverse=True):
        for num, denom in sorted(
            _rs_cancel(term_map[deriv]), key=lambda t: tuple(map(str, t[1]))
        ):
            terms.append(OpTerm(num=num, denom=denom, deriv=deriv))
    op = DiffOperator(terms=tuple(terms))
    for atom, mult in op.denominator_profile().items():
        limit = 3 if atom.kind == "zdiff" else 1
        if mult > limit:
            raise AssertionError(f"denominator {atom}^{mult} exceeds design bound {limit}")
    return op


def build_hamiltonian(p: ExponentParams) -> DiffOperator:
    """The gauge-transformed second-order operator, term by term."""
    dc = derived_constants(p)
    term_map: dict = {}

    for j, k in ((1, 2), (2, 1)):
        cz = _rs(c_poly(j))
        # - c(z_j) * D_j^2
        term_map[(2, 0) if j == 1 else (0, 2)] = _rs_mul(_rs(-1), cz)
        # - c(z_j) * (2a/(z_j - z_k) + b(z_j)) * D_j
        coeff = _rs_mul(
            _rs_mul(_rs(-1), cz),
            _rs_add(_rs_mul(_rs(2 * p.a), _inv_zdiff(j, k)), _b_sum_rs(p, j)),
        )
        term_map[(1, 0) if j == 1 else (0, 1)] = coeff

    # - 4 (a + B)(a + B')(z1 + z2) + 2 s1 + s2
    z1, z2 = Poly.variable("z1"), Poly.variable("z2")
    zero_order = (
        -4 * (p.a + dc.b_sum) * (p.a + dc.b_sum_alt) * (z1 + z2)
        + 2 * dc.shift1
        + dc.shift2
    )
    term_map[(0, 0)] = _rs(zero_order)

    return _finish(term_map)


def build_commuting_operator(p: ExponentParams) -> DiffOperator:
    """The gauge-transformed fourth-order commuting operator, term by term."""
    dc = derived_constants(p)
    prefactor = _rs(c_poly(1) * c_poly(2))

    b1_rs = _b_sum_rs(p, 1)
    b2_rs = _b_sum_rs(p, 2)
    a12 = _rs_add(_rs_mul(_rs(2 * p.a), _inv_zdiff(1, 2)), b1_rs)  # 2a/(z1-z2) + b(z1)
    a21 = _rs_add(_rs_mul(_rs(2 * p.a), _inv_zdiff(2, 1)), b2_rs)  # 2a/(z2-z1) + b(z2)
    q12 = _q_rs(p, 1, 2, dc)  # q(z1, z2)
    q21 = _q_rs(p, 2, 1, dc)  # q(z2, z1)
    inv12 = _inv_zdiff(1, 2)
    inv21 = _inv_zdiff(2, 1)
    inv21_sq = _rs_mul(inv21, inv21)
    inv12_sq = _rs_mul(inv12, inv12)

    bracket: dict = {}
    # D1^2 D2^2
    bracket[(2, 2)] = _rs(1)
    # (2a/(z2 - z1) + b(z2)) D1^2 D2
    bracket[(2, 1)] = a21
    # (2a/(z1 - z2) + b(z1)) D1 D2^2
    bracket[(1, 2)] = a12
    # q(z1, z2) D1^2  and  q(z2, z1) D2^2
    bracket[(2, 0)] = q12
    bracket[(0, 2)] = q21
    # ((2a/(z1-z2) + b(z1))(2a/(z2-z1) + b(z2)) + 2a(a+1)/(z1-z2)^2) D1 D2
    bracket[(1, 1)] = _rs_add(
        _rs_mul(a12, a21),
        _rs_mul(_rs(2 * p.a * (p.a + 1)), inv12_sq),
    )
    # (a(a+1)/(z2-z1)^2 (2(a-1)/(z2-z1) + b(z2)) + (2a/(z1-z2) + b(z1)) q(z1,z2)) D1
    bracket[(1, 0)] = _rs_add(
        _rs_mul(
            _rs_mul(_rs(p.a * (p.a + 1)), inv21_sq),
            _rs_add(_rs_mul(_rs(2 * (p.a - 1)), inv21), b2_rs),
        ),
        _rs_mul(a12, q12),
    )
    # (a(a+1)/(z1-z2)^2 (2(a-1)/(z1-z2) + b(z1)) + (2a/(z2-z1) + b(z2)) q(z2,z1)) D2
    bracket[(0, 1)] = _rs_add(
        _rs_mul(
            _rs_mul(_rs(p.a * (p.a + 1)), inv12_sq),
            _rs_add(_rs_mul(_rs(2 * (p.a - 1)), inv12), b1_rs),
        ),
        _rs_mul(a21, q21),
    )

    term_map = {deriv: _rs_mul(prefactor, coeff) for deriv, coeff in bracket.items()}

    # + 4 (a + B)(a + B')(4 B B' z1 z2 - s1 (z1 + z2)); this also realizes
    # the normalization (P2 . 1) = 0 at z1 = z2 = 0.
    z1, z2 = Poly.variable("z1"), Poly.variable("z2")
    term_map[(0, 0)] = _rs(
        4
        * (p.a + dc.b_sum)
        * (p.a + dc.b_sum_alt)
        * (4 * dc.b_sum * dc.b_sum_alt * z1 * z2 - dc.shift1 * (z1 + z2))
    )

    return _finish(term_map)


def apply_operator(op: DiffOperator, f: Poly) -> Poly:
    """Apply op to a polynomial, returning the exact polynomial result.

    All terms are brought over one least common denominator (the atom-wise
    maximum across terms) before dividing, because individual terms need not
    be polynomial: only the full symmetrized sum is.  Raises NonPolynomial
    if any division leaves a remainder, which for symmetric input means an
    operator defect and is worth reporting as a finding.
    """
    f = f if isinstance(f, Poly) else Poly(f)
    profile = op.denominator_profile()
    deriv_cache: dict = {}
    complement_cache: dict = {}
    acc = ZERO
    for term in op.terms:
        if term.deriv not in deriv_cache:
            g = f
            for _ in range(term.deriv[0]):
                g = g.diff("z1")
            for _ in range(term.deriv[1]):
                g = g.diff("z2")
            deriv_cache[term.deriv] = g
        g = deriv_cache[term.deriv]
        if g.is_zero:
            continue
        if term.denom not in complement_cache:
            counts: dict = {}
            for atom in term.denom:
                counts[atom] = counts.get(atom, 0) + 1
            mult = ONE
            for atom, maximum in profile.items():
                for _ in range(maximum - counts.get(atom, 0)):
                    mult = mult * atom.as_poly()
            complement_cache[term.denom] = mult
        acc = acc + term.num * complement_cache[term.denom] * g
    for atom, maximum in profile.items():
        try:
            acc = exact_divide_atom(acc, atom, maximum)
        except NonDivisible as exc:
            raise NonPolynomial(
                f"operator output is not polynomial (stuck on {atom}^{maximum}); "
                f"input symmetric: {f.is_symmetric()}"
            ) from exc
    return acc
