"""Exact arithmetic tower: rationals, sparse multivariate polynomials and rational functions.

Every coefficient in the project lives here. Rationals are `fractions.Fraction`, polynomials are
sparse maps from exponent vectors over a fixed set of named indeterminates, and rational
functions keep their denominator as a tuple of primitive factors so that equality can be decided
by cross-multiplication without a multivariate GCD.
"""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
import operator
from collections import Counter
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Sequence, Set, Tuple, Union

import ply.lex as lex
import ply.yacc as yacc

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before tagging a release or reset
# to 0 if you are raising the major API version
LIBPATCH = 3

logger = logging.getLogger(__name__)

# Fixed global order; exponent vectors are indexed by position in this tuple.
INDETERMINATES = ("x", "y", "a", "b", "c", "n", "k", "ell", "tau")

_POSITION = {name: index for index, name in enumerate(INDETERMINATES)}
_WIDTH = len(INDETERMINATES)
_UNIT = (0,) * _WIDTH

ExactScalar = Fraction
Scalar = Union[int, Fraction]
Exponent = Tuple[int, ...]


class AlgebraError(Exception):
    """Common parent for exact algebra errors, allowing to catch them all at once."""

    pass


class DenominatorVanishes(AlgebraError, ZeroDivisionError):
    """Raised when a denominator is zero, either by construction or after specialization."""

    pass


class UnknownIndeterminate(AlgebraError, ValueError):
    """Raised when a name is not one of the known indeterminates."""

    pass


class IncompleteAssignment(AlgebraError):
    """Raised when an evaluation does not assign every indeterminate that occurs."""

    pass


class PolynomialSyntaxError(AlgebraError, ValueError):
    """Raised when polynomial text cannot be parsed."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


def _index(name: str) -> int:
    try:
        return _POSITION[name]
    except KeyError:
        raise UnknownIndeterminate(f"unknown indeterminate {name!r}") from None


def _scalar(value) -> Scalar:
    """Return value as an int when it is integral, otherwise as a Fraction."""
    if isinstance(value, int):
        return int(value)
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    raise TypeError(f"not an exact scalar: {value!r}")


def _grlex_key(exponent: Exponent) -> Tuple[int, Exponent]:
    return (sum(exponent), exponent)


def _lcm(left: int, right: int) -> int:
    return left * right // gcd(left, right)


def _format_scalar(value: Scalar) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _format_monomial(exponent: Exponent) -> str:
    parts = []
    for name, power in zip(INDETERMINATES, exponent):
        if power == 1:
            parts.append(name)
        elif power > 1:
            parts.append(f"{name}^{power}")
    return "*".join(parts)


class ParamPoly:
    """Sparse polynomial over the named indeterminates with exact rational coefficients.

    Values are immutable. Terms are stored as a dict from exponent vectors to int or Fraction
    coefficients and zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Exponent, Scalar]] = None) -> None:
        cleaned: Dict[Exponent, Scalar] = {}
        for exponent, coefficient in (terms or {}).items():
            exponent = tuple(exponent)
            if len(exponent) != _WIDTH or any(power < 0 for power in exponent):
                raise ValueError(f"bad exponent vector {exponent!r}")
            coefficient = _scalar(coefficient)
            if coefficient:
                cleaned[exponent] = cleaned.get(exponent, 0) + coefficient
        self._terms = {key: value for key, value in cleaned.items() if value}
        self._hash = None

    @classmethod
    def _from_terms(cls, terms: Dict[Exponent, Scalar]) -> "ParamPoly":
        """Wrap a dict that already satisfies the storage invariants."""
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._hash = None
        return poly

    @classmethod
    def constant(cls, value: Scalar) -> "ParamPoly":
        """Return the constant polynomial with the given value."""
        value = _scalar(value)
        return cls._from_terms({_UNIT: value} if value else {})

    @classmethod
    def variable(cls, name: str) -> "ParamPoly":
        """Return the polynomial consisting of a single indeterminate."""
        exponent = [0] * _WIDTH
        exponent[_index(name)] = 1
        return cls._from_terms({tuple(exponent): 1})

    @classmethod
    def monomial(cls, powers: Mapping[str, int], coefficient: Scalar = 1) -> "ParamPoly":
        """Return coefficient times the product of name**power."""
        exponent = [0] * _WIDTH
        for name, power in powers.items():
            exponent[_index(name)] += power
        return cls({tuple(exponent): coefficient})

    @classmethod
    def parse(cls, text: str) -> "ParamPoly":
        """Parse the text form produced by `to_text`."""
        return _polynomial_parser().parse(text)

    @staticmethod
    def _coerce(other) -> Optional["ParamPoly"]:
        if isinstance(other, ParamPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return ParamPoly.constant(other)
        return None

    @property
    def terms(self) -> Mapping[Exponent, Scalar]:
        """Read-only view of the exponent to coefficient map."""
        return MappingProxyType(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        return self._terms == other_poly._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"ParamPoly({self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._from_terms({key: -value for key, value in self._terms.items()})

    def __add__(self, other) -> "ParamPoly":
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        if not other_poly._terms:
            return self
        if not self._terms:
            return other_poly
        terms = dict(self._terms)
        _accumulate(terms, other_poly._terms)
        return ParamPoly._from_terms(terms)

    __radd__ = __add__

    def __sub__(self, other) -> "ParamPoly":
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        return self + (-other_poly)

    def __rsub__(self, other) -> "ParamPoly":
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        return other_poly + (-self)

    def scale(self, factor: Scalar) -> "ParamPoly":
        """Multiply every coefficient by an exact scalar."""
        factor = _scalar(factor)
        if not factor or not self._terms:
            return ParamPoly()
        if factor == 1:
            return self
        return ParamPoly._from_terms(
            {key: _scalar(value * factor) for key, value in self._terms.items()}
        )

    def __mul__(self, other) -> "ParamPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        if not self._terms or not other._terms:
            return ParamPoly()
        if len(other._terms) == 1 and _UNIT in other._terms:
            return self.scale(other._terms[_UNIT])
        if len(self._terms) == 1 and _UNIT in self._terms:
            return other.scale(self._terms[_UNIT])
        terms: Dict[Exponent, Scalar] = {}
        for left_exponent, left in self._terms.items():
            for right_exponent, right in other._terms.items():
                exponent = tuple(map(operator.add, left_exponent, right_exponent))
                terms[exponent] = terms.get(exponent, 0) + left * right
        return ParamPoly._from_terms(
            {key: _scalar(value) for key, value in terms.items() if value}
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "ParamPoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"polynomial powers must be non-negative integers, got {exponent!r}")
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __truediv__(self, other) -> Union["ParamPoly", "ParamFrac"]:
        if isinstance(other, ParamPoly) and other.is_constant():
            other = other.constant_value()
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DenominatorVanishes("division of a polynomial by zero")
            return self.scale(Fraction(1) / other)
        if isinstance(other, ParamPoly):
            return ParamFrac(self, other)
        return NotImplemented

    def is_constant(self) -> bool:
        """Return True when no indeterminate occurs."""
        return not self._terms or (len(self._terms) == 1 and _UNIT in self._terms)

    def constant_value(self) -> Scalar:
        """Return the coefficient of the unit monomial."""
        return self._terms.get(_UNIT, 0)

    def coefficient(self, powers: Mapping[str, int]) -> Scalar:
        """Return the coefficient of a single monomial."""
        exponent = [0] * _WIDTH
        for name, power in powers.items():
            exponent[_index(name)] = power
        return self._terms.get(tuple(exponent), 0)

    def leading_term(self) -> Tuple[Exponent, Scalar]:
        """Return the largest term under graded lexicographic order."""
        if not self._terms:
            raise ValueError("the zero polynomial has no leading term")
        exponent = max(self._terms, key=_grlex_key)
        return exponent, self._terms[exponent]

    def variables(self) -> Set[str]:
        """Return the names of the indeterminates that occur."""
        seen = set()
        for exponent in self._terms:
            seen.update(INDETERMINATES[i] for i, power in enumerate(exponent) if power)
        return seen

    def total_degree(self, names: Optional[Iterable[str]] = None) -> int:
        """Return the total degree in the given names (all names by default); -1 for zero."""
        if not self._terms:
            return -1
        positions = range(_WIDTH) if names is None else [_index(name) for name in names]
        return max(sum(exponent[i] for i in positions) for exponent in self._terms)

    def degree(self, name: str) -> int:
        """Return the degree in a single indeterminate; -1 for zero."""
        return self.total_degree([name])

    def derive(self, name: str) -> "ParamPoly":
        """Return the formal partial derivative with respect to one indeterminate."""
        position = _index(name)
        terms: Dict[Exponent, Scalar] = {}
        for exponent, coefficient in self._terms.items():
            power = exponent[position]
            if power:
                lowered = exponent[:position] + (power - 1,) + exponent[position + 1 :]
                terms[lowered] = coefficient * power
        return ParamPoly._from_terms(terms)

    def evaluate(self, assignment: Mapping[str, Scalar]) -> Fraction:
        """Evaluate exactly; every indeterminate that occurs must be assigned."""
        powers: Dict[Tuple[int, int], Fraction] = {}
        total = Fraction(0)
        for exponent, coefficient in self._terms.items():
            value = Fraction(coefficient)
            for position, power in enumerate(exponent):
                if not power:
                    continue
                key = (position, power)
                cached = powers.get(key)
                if cached is None:
                    name = INDETERMINATES[position]
                    if name not in assignment:
                        raise IncompleteAssignment(f"no value assigned to {name!r}")
                    cached = Fraction(assignment[name]) ** power
                    powers[key] = cached
                value *= cached
            total += value
        return total

    def substitute(self, mapping: Mapping[str, Union["ParamPoly", Scalar]]) -> "ParamPoly":
        """Replace indeterminates by polynomials or scalars, all at once."""
        targets: Dict[int, ParamPoly] = {}
        for name, value in mapping.items():
            replacement = self._coerce(value)
            if replacement is None:
                raise TypeError(f"cannot substitute {value!r} for {name!r}")
            targets[_index(name)] = replacement
        positions = sorted(i for i in targets if any(e[i] for e in self._terms))
        if not positions:
            return self
        groups: Dict[Exponent, Dict[Exponent, Scalar]] = {}
        for exponent, coefficient in self._terms.items():
            key = tuple(exponent[i] for i in positions)
            rest = list(exponent)
            for i in positions:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = coefficient
        powers: Dict[Tuple[int, int], ParamPoly] = {}
        terms: Dict[Exponent, Scalar] = {}
        for key, rest in groups.items():
            product = ParamPoly._from_terms(rest)
            for position, power in zip(positions, key):
                if not power:
                    continue
                cached = powers.get((position, power))
                if cached is None:
                    cached = targets[position] ** power
                    powers[(position, power)] = cached
                product = product * cached
            _accumulate(terms, product._terms)
        return ParamPoly._from_terms(terms)

    def primitive(self) -> Tuple[Fraction, "ParamPoly"]:
        """Split into (content, primitive part) with a positive leading coefficient.

        The primitive part has coprime integer coefficients.
        """
        if not self._terms:
            return Fraction(0), self
        values = [Fraction(value) for value in self._terms.values()]
        numerator = reduce(gcd, (abs(value.numerator) for value in values))
        denominator = reduce(_lcm, (value.denominator for value in values))
        content = Fraction(numerator, denominator)
        if self.leading_term()[1] < 0:
            content = -content
        if content == 1:
            return content, self
        return content, self.scale(1 / content)

    def coefficients(self, outer: Sequence[str]) -> Dict[Tuple[int, ...], "ParamPoly"]:
        """Group terms by their exponents in the outer names.

        Returns a map from the tuple of outer exponents to the polynomial in the remaining names.
        """
        positions = [_index(name) for name in outer]
        grouped: Dict[Tuple[int, ...], Dict[Exponent, Scalar]] = {}
        for exponent, coefficient in self._terms.items():
            key = tuple(exponent[i] for i in positions)
            rest = list(exponent)
            for i in positions:
                rest[i] = 0
            grouped.setdefault(key, {})[tuple(rest)] = coefficient
        return {key: ParamPoly._from_terms(terms) for key, terms in grouped.items()}

    def to_text(self, compact: bool = False) -> str:
        """Render terms in descending graded lexicographic order.

        `compact` drops the spaces around the signs, as used inside parentheses.
        """
        if not self._terms:
            return "0"
        plus, minus = ("+", "-") if compact else (" + ", " - ")
        pieces = []
        for exponent in sorted(self._terms, key=_grlex_key, reverse=True):
            coefficient = self._terms[exponent]
            monomial = _format_monomial(exponent)
            magnitude = abs(coefficient)
            if not monomial:
                body = _format_scalar(magnitude)
            elif magnitude == 1:
                body = monomial
            else:
                body = f"{_format_scalar(magnitude)}*{monomial}"
            if not pieces:
                pieces.append(f"-{body}" if coefficient < 0 else body)
            else:
                pieces.append(f"{minus if coefficient < 0 else plus}{body}")
        return "".join(pieces)


ZERO = ParamPoly()
ONE = ParamPoly.constant(1)


def _accumulate(target: Dict[Exponent, Scalar], terms: Mapping[Exponent, Scalar]) -> None:
    for exponent, coefficient in terms.items():
        value = target.get(exponent, 0) + coefficient
        if value:
            target[exponent] = _scalar(value)
        else:
            target.pop(exponent, None)


def as_poly(value: Union[ParamPoly, Scalar]) -> ParamPoly:
    """Coerce an exact scalar or polynomial to a polynomial."""
    poly = ParamPoly._coerce(value)
    if poly is None:
        raise TypeError(f"not a polynomial or exact scalar: {value!r}")
    return poly


def symbols(*names: str) -> Tuple[ParamPoly, ...]:
    """Return the indeterminates with the given names as polynomials."""
    return tuple(ParamPoly.variable(name) for name in names)


def pochhammer(base: Union[ParamPoly, Scalar], length: int) -> ParamPoly:
    """Rising factorial base (base+1) ... (base+length-1); 1 for length 0."""
    if length < 0:
        raise ValueError(f"negative Pochhammer length {length}")
    base = ParamPoly._coerce(base)
    result = ONE
    for step in range(length):
        result = result * (base + step)
    return result


def exact_quotient(dividend: ParamPoly, divisor: ParamPoly) -> Optional[ParamPoly]:
    """Return dividend / divisor when the division is exact, otherwise None."""
    if not divisor:
        raise DenominatorVanishes("division by the zero polynomial")
    lead_exponent, lead = divisor.leading_term()
    remainder = dict(dividend.terms)
    quotient: Dict[Exponent, Scalar] = {}
    while remainder:
        exponent = max(remainder, key=_grlex_key)
        shift = tuple(map(operator.sub, exponent, lead_exponent))
        if any(power < 0 for power in shift):
            return None
        factor = _scalar(Fraction(remainder[exponent]) / lead)
        quotient[shift] = factor
        for divisor_exponent, coefficient in divisor.terms.items():
            target = tuple(map(operator.add, divisor_exponent, shift))
            value = remainder.get(target, 0) - factor * coefficient
            if value:
                remainder[target] = _scalar(value)
            else:
                remainder.pop(target, None)
    return ParamPoly._from_terms(quotient)


def _product(factors: Iterable[ParamPoly]) -> ParamPoly:
    result = ONE
    for factor in factors:
        result = result * factor
    return result


class ParamFrac:
    """Quotient of a polynomial by a product of primitive polynomial factors.

    Constant contents of the denominator are folded into the numerator. Equality is decided by
    cross-multiplication, so values are not hashable.
    """

    __slots__ = ("_num", "_factors")

    def __init__(self, num=0, den=1) -> None:
        numerator = ParamPoly._coerce(num)
        if numerator is None:
            raise TypeError(f"not a polynomial numerator: {num!r}")
        raw = list(den) if isinstance(den, (list, tuple)) else [den]
        factors = []
        for item in raw:
            factor = ParamPoly._coerce(item)
            if factor is None:
                raise TypeError(f"not a polynomial denominator: {item!r}")
            if not factor:
                raise DenominatorVanishes("zero denominator factor")
            content, primitive = factor.primitive()
            numerator = numerator.scale(1 / content)
            if not primitive.is_constant():
                factors.append(primitive)
        self._num = numerator
        self._factors = tuple(factors) if numerator else ()

    @classmethod
    def _make(cls, num: ParamPoly, factors: Tuple[ParamPoly, ...]) -> "ParamFrac":
        frac = cls.__new__(cls)
        frac._num = num
        frac._factors = factors if num else ()
        return frac

    @property
    def num(self) -> ParamPoly:
        """Numerator polynomial."""
        return self._num

    @property
    def factors(self) -> Tuple[ParamPoly, ...]:
        """Primitive denominator factors, with repetition."""
        return self._factors

    @property
    def den(self) -> ParamPoly:
        """Denominator as a single polynomial."""
        return _product(self._factors)

    def is_zero(self) -> bool:
        """Return True for the zero rational function."""
        return not self._num

    def __bool__(self) -> bool:
        return bool(self._num)

    __hash__ = None

    def __eq__(self, other) -> bool:
        if _as_frac(other) is None:
            return NotImplemented
        return frac_eq(self, other)

    def __repr__(self) -> str:
        return f"ParamFrac({self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    def __neg__(self) -> "ParamFrac":
        return ParamFrac._make(-self._num, self._factors)

    def __add__(self, other) -> "ParamFrac":
        other_frac = _as_frac(other)
        if other_frac is None:
            return NotImplemented
        if not other_frac._num:
            return self
        if not self._num:
            return other_frac
        mine, theirs = Counter(self._factors), Counter(other_frac._factors)
        common = mine | theirs
        num = self._num * _product((common - mine).elements()) + other_frac._num * _product(
            (common - theirs).elements()
        )
        return ParamFrac._make(num, tuple(common.elements()))

    __radd__ = __add__

    def __sub__(self, other) -> "ParamFrac":
        other_frac = _as_frac(other)
        if other_frac is None:
            return NotImplemented
        return self + (-other_frac)

    def __rsub__(self, other) -> "ParamFrac":
        other_frac = _as_frac(other)
        if other_frac is None:
            return NotImplemented
        return other_frac + (-self)

    def __mul__(self, other) -> "ParamFrac":
        other_frac = _as_frac(other)
        if other_frac is None:
            return NotImplemented
        num = self._num * other_frac._num
        if not num:
            return ParamFrac._make(num, ())
        return ParamFrac._make(num, self._factors + other_frac._factors)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ParamFrac":
        other_frac = _as_frac(other)
        if other_frac is None:
            return NotImplemented
        if not other_frac._num:
            raise DenominatorVanishes("division by the zero rational function")
        return self * ParamFrac(_product(other_frac._factors), other_frac._num)

    def __rtruediv__(self, other) -> "ParamFrac":
        other_frac = _as_frac(other)
        if other_frac is None:
            return NotImplemented
        return other_frac / self

    def cancel(self) -> "ParamFrac":
        """Drop denominator factors that divide the numerator exactly."""
        numerator = self._num
        kept = []
        for factor in self._factors:
            quotient = exact_quotient(numerator, factor)
            if quotient is None:
                kept.append(factor)
            else:
                numerator = quotient
        return ParamFrac._make(numerator, tuple(kept))

    def variables(self) -> Set[str]:
        """Return the names occurring in numerator or denominator."""
        names = self._num.variables()
        for factor in self._factors:
            names |= factor.variables()
        return names

    def substitute(self, mapping: Mapping[str, Union[ParamPoly, Scalar]]) -> "ParamFrac":
        """Substitute in numerator and every factor; raises DenominatorVanishes on a zero factor."""
        return ParamFrac(
            self._num.substitute(mapping), [factor.substitute(mapping) for factor in self._factors]
        )

    def evaluate(self, assignment: Mapping[str, Scalar]) -> Fraction:
        """Evaluate exactly; raises DenominatorVanishes when a factor evaluates to zero."""
        denominator = Fraction(1)
        for factor in self._factors:
            value = factor.evaluate(assignment)
            if not value:
                raise DenominatorVanishes(f"factor {factor.to_text(compact=True)} vanishes")
            denominator *= value
        return self._num.evaluate(assignment) / denominator

    def to_text(self, compact: bool = False) -> str:
        """Render as "(num)/(den)", or just the numerator when there is no denominator."""
        if not self._factors:
            return self._num.to_text(compact)
        numerator = f"({self._num.to_text(compact)})"
        parts = [f"({factor.to_text(compact)})" for factor in self._factors]
        if len(parts) == 1:
            return f"{numerator}/{parts[0]}"
        return f"{numerator}/({'*'.join(parts)})"


def _as_frac(value) -> Optional[ParamFrac]:
    if isinstance(value, ParamFrac):
        return value
    poly = ParamPoly._coerce(value)
    if poly is None:
        return None
    return ParamFrac._make(poly, ())


def poly_mul(p: ParamPoly, q: ParamPoly) -> ParamPoly:
    """Product of two polynomials."""
    return p * q


def poly_derive(p: ParamPoly, var: str) -> ParamPoly:
    """Formal partial derivative; raises UnknownIndeterminate for an unknown name."""
    return p.derive(var)


def frac_eq(
    f: Union[ParamFrac, ParamPoly, Scalar], g: Union[ParamFrac, ParamPoly, Scalar]
) -> bool:
    """Decide f == g by cross-multiplication, skipping the factors both sides share."""
    f, g = _as_frac(f), _as_frac(g)
    if f is None or g is None:
        raise TypeError("frac_eq compares polynomials and rational functions only")
    mine, theirs = Counter(f.factors), Counter(g.factors)
    shared = mine & theirs
    left = f.num * _product((theirs - shared).elements())
    right = g.num * _product((mine - shared).elements())
    return left == right


def eval_exact(value: Union[ParamPoly, ParamFrac], assignment: Mapping[str, Scalar]) -> Fraction:
    """Exact value of a polynomial or rational function at a rational point."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return value.evaluate(assignment)


def grouped_text(poly: ParamPoly, outer: Sequence[str] = ("x", "y")) -> str:
    """Render poly with terms grouped by monomials in the outer names.

    Groups appear in ascending total degree, earlier outer names first. Each coefficient is a
    compact parenthesized polynomial, or bare when constant, and a coefficient with a negative
    leading term is negated and shown with a minus sign.
    """
    grouped = poly.coefficients(outer)
    if not grouped:
        return "0"

    def order(key: Tuple[int, ...]) -> Tuple:
        return (sum(key), tuple(-power for power in key))

    pieces = []
    for key in sorted(grouped, key=order):
        coefficient = grouped[key]
        negative = coefficient.leading_term()[1] < 0
        if negative:
            coefficient = -coefficient
        monomial = "*".join(
            name if power == 1 else f"{name}^{power}"
            for name, power in zip(outer, key)
            if power
        )
        if coefficient.is_constant():
            value = coefficient.constant_value()
            body = _format_scalar(value)
            if monomial:
                body = monomial if value == 1 else f"{body}*{monomial}"
        else:
            body = f"({coefficient.to_text(compact=True)})"
            if monomial:
                body = f"{body}*{monomial}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


class _PolynomialGrammar:
    """ply lexer and parser for the polynomial text format."""

    tokens = ("NAME", "NUMBER", "PLUS", "MINUS", "TIMES", "DIVIDE", "CARET", "LPAREN", "RPAREN")

    t_PLUS = r"\+"
    t_MINUS = r"-"
    t_TIMES = r"\*"
    t_DIVIDE = r"/"
    t_CARET = r"\^"
    t_LPAREN = r"\("
    t_RPAREN = r"\)"
    t_ignore = " \t"

    start = "expression"

    def __init__(self) -> None:
        self.lexer = lex.lex(module=self)
        self.parser = yacc.yacc(
            module=self, write_tables=False, debug=False, errorlog=yacc.NullLogger()
        )

    def parse(self, text: str) -> ParamPoly:
        if not text.strip():
            raise PolynomialSyntaxError("empty polynomial text", 0)
        return self.parser.parse(text, lexer=self.lexer.clone())

    def t_NAME(self, t):
        r"[A-Za-z_][A-Za-z_0-9]*"
        return t

    def t_NUMBER(self, t):
        r"\d+"
        t.value = int(t.value)
        return t

    def t_error(self, t):
        raise PolynomialSyntaxError(
            f"unexpected character {t.value[0]!r} at position {t.lexpos}", t.lexpos
        )

    def p_expression_plus(self, p):
        """expression : expression PLUS term"""
        p[0] = p[1] + p[3]

    def p_expression_minus(self, p):
        """expression : expression MINUS term"""
        p[0] = p[1] - p[3]

    def p_expression_term(self, p):
        """expression : term"""
        p[0] = p[1]

    def p_term_times(self, p):
        """term : term TIMES unary"""
        p[0] = p[1] * p[3]

    def p_term_divide(self, p):
        """term : term DIVIDE unary"""
        if not p[3].is_constant():
            raise PolynomialSyntaxError(
                f"division by a non-constant at position {p.lexpos(2)}", p.lexpos(2)
            )
        if not p[3]:
            raise PolynomialSyntaxError(f"division by zero at position {p.lexpos(2)}", p.lexpos(2))
        p[0] = p[1].scale(Fraction(1) / p[3].constant_value())

    def p_term_unary(self, p):
        """term : unary"""
        p[0] = p[1]

    def p_unary_minus(self, p):
        """unary : MINUS unary"""
        p[0] = -p[2]

    def p_unary_power(self, p):
        """unary : power"""
        p[0] = p[1]

    def p_power_caret(self, p):
        """power : atom CARET NUMBER"""
        p[0] = p[1] ** p[3]

    def p_power_atom(self, p):
        """power : atom"""
        p[0] = p[1]

    def p_atom_name(self, p):
        """atom : NAME"""
        p[0] = ParamPoly.variable(p[1])

    def p_atom_number(self, p):
        """atom : NUMBER"""
        p[0] = ParamPoly.constant(p[1])

    def p_atom_group(self, p):
        """atom : LPAREN expression RPAREN"""
        p[0] = p[2]

    def p_error(self, p):
        if p is None:
            raise PolynomialSyntaxError("unexpected end of polynomial text")
        raise PolynomialSyntaxError(
            f"unexpected {p.value!r} at position {p.lexpos}", p.lexpos
        )


@lru_cache(maxsize=None)
def _polynomial_parser() -> _PolynomialGrammar:
    return _PolynomialGrammar()


def as_frac(value: Union[ParamFrac, ParamPoly, Scalar]) -> ParamFrac:
    """Coerce an exact scalar, polynomial or rational function to a rational function."""
    frac = _as_frac(value)
    if frac is None:
        raise TypeError(f"not a rational function: {value!r}")
    return frac
