"""Sparse exact polynomial arithmetic in the variables z1, z2, e2, e3.

Coefficients are exact rationals (``fractions.Fraction``); nothing here ever
rounds.  The half-period value e1 never appears as a variable of its own:
every entry point eliminates it through e1 = -e2 - e3, so values live in the
honest polynomial ring Q[z1, z2, e2, e3] with unique normal forms and no
quotient-ring machinery.

Monomials are keyed by exponent tuples (n_z1, n_z2, n_e2, n_e3).  The
canonical term order, used for iteration, printing and golden files, is
graded lexicographic with z1 > z2 > e2 > e3, leading term first.

Division only ever happens by the enumerated monic-linear "denominator
atoms" (z1 - z2 and z_j - e_i); see :func:`exact_divide_atom`.  No general
multivariate GCD or factorization lives here, and no floating point either.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .errors import NonDivisible

Scalar = Union[Fraction, int]
Exponents = "tuple[int, int, int, int]"

VARIABLES = ("z1", "z2", "e2", "e3")
_VAR_INDEX = {name: i for i, name in enumerate(VARIABLES)}
_ZERO = Fraction(0)


def _grlex_key(exps):
    return (sum(exps), exps)


class Poly:
    """Immutable sparse polynomial in z1, z2, e2, e3 over the rationals.

    Instances must be treated as frozen: all arithmetic returns new objects
    and the internal term map is never mutated after construction.  Zero
    coefficients are never stored, so structural equality is semantic
    equality.
    """

    __slots__ = ("_terms",)

    def __init__(self, value: "Poly | Mapping | Scalar | None" = None):
        if value is None:
            self._terms = {}
        elif isinstance(value, Poly):
            self._terms = value._terms
        elif isinstance(value, (int, Fraction)):
            c = Fraction(value)
            self._terms = {(0, 0, 0, 0): c} if c else {}
        elif isinstance(value, Mapping):
            terms = {}
            for exps, coeff in value.items():
                exps = tuple(exps)
                if len(exps) != 4 or any((not isinstance(e, int)) or e < 0 for e in exps):
                    raise ValueError(f"bad exponent tuple {exps!r}")
                c = Fraction(coeff)
                if c:
                    terms[exps] = terms.get(exps, _ZERO) + c
                    if not terms[exps]:
                        del terms[exps]
            self._terms = terms
        else:
            raise TypeError(f"cannot build Poly from {type(value).__name__}")

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        # trusted constructor: terms already canonical (no zeros, valid keys)
        p = cls.__new__(cls)
        p._terms = terms
        return p

    @classmethod
    def variable(cls, name: str) -> "Poly":
        i = _VAR_INDEX[name]
        exps = [0, 0, 0, 0]
        exps[i] = 1
        return cls._raw({tuple(exps): Fraction(1)})

    # -- basic queries ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return not self._terms or self._terms.keys() == {(0, 0, 0, 0)}

    def constant_value(self) -> Fraction:
        if not self._terms:
            return _ZERO
        if not self.is_constant:
            raise ValueError(f"not a constant polynomial: {self}")
        return self._terms[(0, 0, 0, 0)]

    def coefficient(self, exps) -> Fraction:
        return self._terms.get(tuple(exps), _ZERO)

    def degree(self, var: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        i = _VAR_INDEX[var]
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def variables(self) -> "tuple[str, ...]":
        """Variables that actually occur, in canonical order."""
        present = [False] * 4
        for exps in self._terms:
            for i, e in enumerate(exps):
                if e:
                    present[i] = True
        return tuple(v for i, v in enumerate(VARIABLES) if present[i])

    def homogeneous_weight(self):
        """Weight under wt(z_j) = wt(e_i) = 2, or None if not homogeneous.

        The zero polynomial is homogeneous of every weight; it reports None
        so callers must treat it specially.
        """
        degrees = {sum(e) for e in self._terms}
        if len(degrees) != 1:
            return None
        return 2 * degrees.pop()

    def terms(self) -> Iterator["tuple[tuple[int, int, int, int], Fraction]"]:
        """Terms in canonical graded-lex order, leading term first."""
        for exps in sorted(self._terms, key=_grlex_key, reverse=True):
            yield exps, self._terms[exps]

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            s = terms.get(exps, _ZERO) + coeff
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return Poly._raw(terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return ZERO
            return Poly._raw({e: k * c for e, k in self._terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3])
                s = out.get(key, _ZERO) + ca * cb
                if s:
                    out[key] = s
                else:
                    del out[key]
        return Poly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Poly":
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        return self * (Fraction(1) / Fraction(scalar))

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int):
            raise TypeError("polynomial exponent must be an int")
        if exponent < 0:
            raise ValueError("negative polynomial exponent")
        result = ONE
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # -- calculus and substitution ----------------------------------------

    def diff(self, var: str) -> "Poly":
        """Exact formal partial derivative with respect to z1 or z2."""
        if var not in ("z1", "z2"):
            raise ValueError(f"can only differentiate in z1 or z2, not {var!r}")
        i = _VAR_INDEX[var]
        out = {}
        for exps, coeff in self._terms.items():
            n = exps[i]
            if n:
                e = list(exps)
                e[i] = n - 1
                out[tuple(e)] = coeff * n
        return Poly._raw(out)

    def subs(self, assignments: Mapping[str, "Poly | Scalar"]) -> "Poly":
        """Substitute polynomials or rationals for variables, exactly."""
        values = {}
        for name, val in assignments.items():
            i = _VAR_INDEX[name]  # KeyError on unknown variable
            values[i] = val if isinstance(val, Poly) else Poly(val)
        if not values:
            return self
        power_cache: dict = {i: {0: ONE} for i in values}
        result = ZERO
        for exps, coeff in self._terms.items():
            piece = Poly(coeff)
            residual = list(exps)
            for i, v in values.items():
                n = exps[i]
                residual[i] = 0
                cache = power_cache[i]
                while len(cache) <= n:
                    cache[len(cache)] = cache[len(cache) - 1] * v
                piece = piece * cache[n]
            piece = piece * Poly._raw({tuple(residual): Fraction(1)})
            result = result + piece
        return result

    def specialize(self, e2_value: Scalar, e3_value: Scalar) -> "Poly":
        """Substitute exact rational values for e2 and e3."""
        return self.subs({"e2": Fraction(e2_value), "e3": Fraction(e3_value)})

    def swap_z(self) -> "Poly":
        """Exchange z1 and z2."""
        return Poly._raw({(e[1], e[0], e[2], e[3]): c for e, c in self._terms.items()})

    def is_symmetric(self) -> bool:
        return self.swap_z() == self

    def coefficient_of_z(self, n1: int, n2: int) -> "Poly":
        """The e2/e3-polynomial multiplying z1^n1 * z2^n2."""
        out = {}
        for exps, coeff in self._terms.items():
            if exps[0] == n1 and exps[1] == n2:
                out[(0, 0, exps[2], exps[3])] = coeff
        return Poly._raw(out)

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for exps, coeff in self.terms():
            factors = []
            for name, e in zip(VARIABLES, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = " * ".join([str(abs(coeff))] + factors)
            if not chunks:
                chunks.append(body if coeff > 0 else f"-{body}")
            else:
                chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(chunks)

    def __repr__(self) -> str:
        return f"Poly({self})"


def _coerce(value):
    if isinstance(value, Poly):
        return value
    if isinstance(value, (int, Fraction)):
        return Poly(value)
    return NotImplemented


ZERO = Poly._raw({})
ONE = Poly._raw({(0, 0, 0, 0): Fraction(1)})
Z1 = Poly.variable("z1")
Z2 = Poly.variable("z2")
E2 = Poly.variable("e2")
E3 = Poly.variable("e3")
#: e1 expressed through the constraint e1 + e2 + e3 = 0.
E1 = -E2 - E3

#: The e_i values as polynomials, indexed 1..3 (slot 0 unused).
E_VALUES = (None, E1, E2, E3)


@dataclass(frozen=True, order=True)
class DenomAtom:
    """A monic linear denominator factor: z1 - z2, or z_j - e_i.

    Viewed as a polynomial each atom is monic of degree one in exactly one
    z-variable, which is what makes remainder-checked synthetic division
    sufficient for all coefficient clearing in this package.
    """

    kind: str      # "zdiff" or "zminuse"
    z_var: int     # 1 or 2
    e_index: int   # 1..3 for zminuse, 0 for zdiff

    def __post_init__(self):
        if self.kind == "zdiff":
            if (self.z_var, self.e_index) != (1, 0):
                raise ValueError("zdiff atom is always stored as z1 - z2")
        elif self.kind == "zminuse":
            if self.z_var not in (1, 2) or self.e_index not in (1, 2, 3):
                raise ValueError(f"bad zminuse atom ({self.z_var}, {self.e_index})")
        else:
            raise ValueError(f"unknown atom kind {self.kind!r}")

    @classmethod
    def z_diff(cls) -> "DenomAtom":
        return cls("zdiff", 1, 0)

    @classmethod
    def z_minus_e(cls, z_var: int, e_index: int) -> "DenomAtom":
        return cls("zminuse", z_var, e_index)

    @property
    def variable(self) -> str:
        return "z1" if self.kind == "zdiff" else f"z{self.z_var}"

    def subtrahend(self) -> Poly:
        """The polynomial r with atom = z_var - r (z2, or e_i expanded)."""
        if self.kind == "zdiff":
            return Z2
        return E_VALUES[self.e_index]

    def as_poly(self) -> Poly:
        return Poly.variable(self.variable) - self.subtrahend()

    def __str__(self) -> str:
        if self.kind == "zdiff":
            return "(z1-z2)"
        if self.e_index == 1:
            return f"(z{self.z_var}+e2+e3)"
        return f"(z{self.z_var}-e{self.e_index})"


def exact_divide_atom(p: Poly, atom: DenomAtom, multiplicity: int = 1) -> Poly:
    """Divide p exactly by atom^multiplicity, via repeated synthetic division.

    Returns q with p = atom**multiplicity * q.  Raises NonDivisible as soon
    as any stage leaves a nonzero remainder; by design that signals either a
    non-symmetric input upstream or an operator transcription bug, so the
    remainder is reported in the message.
    """
    if not isinstance(multiplicity, int) or multiplicity < 1:
        raise ValueError(f"multiplicity must be a positive int, got {multiplicity!r}")
    for _ in range(multiplicity):
        p = _divide_once(p, atom)
    return p


def _divide_once(p: Poly, atom: DenomAtom) -> Poly:
    if p.is_zero:
        return p
    vi = _VAR_INDEX[atom.variable]
    r = atom.subtrahend()  # never contains the division variable
    layers: dict = {}
    for exps, coeff in p._terms.items():
        n = exps[vi]
        rest = list(exps)
        rest[vi] = 0
        layers.setdefault(n, {})[tuple(rest)] = coeff
    top = max(layers)
    if top == 0:
        raise NonDivisible(f"{p} is not divisible by {atom} (degree 0 in {atom.variable})")
    coeffs = [Poly._raw(layers.get(k, {})) for k in range(top + 1)]
    quotient = [ZERO] * top
    quotient[top - 1] = coeffs[top]
    for k in range(top - 2, -1, -1):
        quotient[k] = coeffs[k + 1] + r * quotient[k + 1]
    remainder = coeffs[0] + r * quotient[0]
    if not remainder.is_zero:
        raise NonDivisible(f"division by {atom} leaves remainder {remainder}")
    out: dict = {}
    for k, layer in enumerate(quotient):
        if layer.is_zero:
            continue
        for exps, coeff in layer._terms.items():
            e = list(exps)
            e[vi] += k
            out[tuple(e)] = coeff
    return Poly._raw(out)


# Spec'd free-function aliases for the method API.

def differentiate(p: Poly, var: str) -> Poly:
    return p.diff(var)


def specialize(p: Poly, e2_value: Scalar, e3_value: Scalar) -> Poly:
    return p.specialize(e2_value, e3_value)


def swap_z(p: Poly) -> Poly:
    return p.swap_z()


def is_symmetric(p: Poly) -> bool:
    return p.is_symmetric()
