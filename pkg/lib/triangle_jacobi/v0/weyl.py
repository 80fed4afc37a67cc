"""Differential operators in x and y with polynomial coefficients.

Operators are kept in normal form, every coefficient to the left of the derivatives, and are
composed with the Leibniz rule. This module also carries the builtin generators of the variable
representation and the checks that only need operator identities.
"""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from types import MappingProxyType
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from triangle_jacobi.v0.exact import (
    ONE,
    ZERO,
    AlgebraError,
    ParamPoly,
    Scalar,
    as_poly,
    symbols,
)
from triangle_jacobi.v0.report import SYMBOLIC, VARIABLE, Stopwatch, VerificationReport, outcome

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before tagging a release or reset
# to 0 if you are raising the major API version
LIBPATCH = 4

logger = logging.getLogger(__name__)

Index = Tuple[int, int]


class UnknownGenerator(AlgebraError, LookupError):
    """Raised when a generator name is not in the builtin catalogue."""

    pass


class NotSpecializable(AlgebraError):
    """Raised when restricting to var=value while the operator differentiates in var."""

    pass


def _derivative_name(index: Index) -> str:
    return "d" + "x" * index[0] + "y" * index[1]


def _print_key(index: Index) -> Tuple[int, int]:
    return (index[0] + index[1], index[0])


@lru_cache(maxsize=8192)
def _mixed_derivative(poly: ParamPoly, order_x: int, order_y: int) -> ParamPoly:
    for _ in range(order_x):
        poly = poly.derive("x")
    for _ in range(order_y):
        poly = poly.derive("y")
    return poly


def _add_into(terms: Dict, index, coefficient: ParamPoly) -> None:
    total = terms.get(index, ZERO) + coefficient
    if total:
        terms[index] = total
    else:
        terms.pop(index, None)


class DiffOp:
    """Normal-ordered operator: a finite map from (i, j) to the coefficient of dx^i dy^j."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Index, Union[ParamPoly, Scalar]]] = None) -> None:
        cleaned = {}
        for index, coefficient in (terms or {}).items():
            i, j = index
            if i < 0 or j < 0:
                raise ValueError(f"negative derivative order {index!r}")
            poly = as_poly(coefficient)
            if poly:
                cleaned[(i, j)] = poly
        self._terms = cleaned

    @classmethod
    def _from_terms(cls, terms: Dict[Index, ParamPoly]) -> "DiffOp":
        op = cls.__new__(cls)
        op._terms = terms
        return op

    @classmethod
    def identity(cls) -> "DiffOp":
        """The identity operator I."""
        return cls._from_terms({(0, 0): ONE})

    @classmethod
    def multiplication(cls, value: Union[ParamPoly, Scalar]) -> "DiffOp":
        """Multiplication by a polynomial; scalars embed as multiples of I."""
        poly = as_poly(value)
        return cls._from_terms({(0, 0): poly} if poly else {})

    @classmethod
    def partial(cls, order_x: int, order_y: int) -> "DiffOp":
        """The pure derivative dx^order_x dy^order_y."""
        return cls._from_terms({(order_x, order_y): ONE})

    @classmethod
    def parse(cls, text: str) -> "DiffOp":
        """Parse the form produced by `to_text`."""
        text = text.strip()
        if text == "0":
            return cls()
        terms: Dict[Index, ParamPoly] = {}
        for piece in text.split(" + "):
            head, _, derivative = piece.rpartition(")*d")
            if head:
                coefficient_text = head[1:]
                if not piece.startswith("(") or set(derivative) - {"x", "y"}:
                    raise ValueError(f"malformed operator term {piece!r}")
                index = (derivative.count("x"), derivative.count("y"))
                if derivative != _derivative_name(index):
                    raise ValueError(f"malformed derivative {derivative!r}")
            else:
                if not (piece.startswith("(") and piece.endswith(")")):
                    raise ValueError(f"malformed operator term {piece!r}")
                coefficient_text, index = piece[1:-1], (0, 0)
            _add_into(terms, index, ParamPoly.parse(coefficient_text))
        return cls._from_terms(terms)

    @property
    def terms(self) -> Mapping[Index, ParamPoly]:
        """Read-only view of the derivative index to coefficient map."""
        return MappingProxyType(self._terms)

    def coefficient(self, order_x: int, order_y: int) -> ParamPoly:
        """Coefficient of dx^order_x dy^order_y."""
        return self._terms.get((order_x, order_y), ZERO)

    def with_coefficient(self, index: Index, coefficient: Union[ParamPoly, Scalar]) -> "DiffOp":
        """Copy with one coefficient replaced."""
        terms = dict(self._terms)
        terms.pop(tuple(index), None)
        poly = as_poly(coefficient)
        if poly:
            terms[tuple(index)] = poly
        return DiffOp._from_terms(terms)

    def order(self) -> int:
        """Highest total derivative order; -1 for the zero operator."""
        return max((i + j for i, j in self._terms), default=-1)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"DiffOp({self.to_text()!r})"

    def __neg__(self) -> "DiffOp":
        return DiffOp._from_terms({index: -value for index, value in self._terms.items()})

    def __add__(self, other) -> "DiffOp":
        if not isinstance(other, DiffOp):
            try:
                other = DiffOp.multiplication(other)
            except TypeError:
                return NotImplemented
        terms = dict(self._terms)
        for index, coefficient in other._terms.items():
            _add_into(terms, index, coefficient)
        return DiffOp._from_terms(terms)

    __radd__ = __add__

    def __sub__(self, other) -> "DiffOp":
        if not isinstance(other, DiffOp):
            try:
                other = DiffOp.multiplication(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "DiffOp":
        return (-self) + other

    def __mul__(self, other) -> "DiffOp":
        if isinstance(other, DiffOp):
            return compose(self, other)
        try:
            return compose(self, DiffOp.multiplication(other))
        except TypeError:
            return NotImplemented

    def __rmul__(self, other) -> "DiffOp":
        try:
            poly = as_poly(other)
        except TypeError:
            return NotImplemented
        if not poly:
            return DiffOp()
        return DiffOp._from_terms(
            {index: product for index, value in self._terms.items() if (product := poly * value)}
        )

    def substitute(self, mapping: Mapping[str, Union[ParamPoly, Scalar]]) -> "DiffOp":
        """Specialize parameters in every coefficient; x and y cannot be substituted here."""
        if "x" in mapping or "y" in mapping:
            raise ValueError("use specialize() or reflect() to change the variables")
        terms: Dict[Index, ParamPoly] = {}
        for index, coefficient in self._terms.items():
            value = coefficient.substitute(mapping)
            if value:
                terms[index] = value
        return DiffOp._from_terms(terms)

    def specialize(self, var: str, value: Union[ParamPoly, Scalar]) -> "DiffOp":
        """Restrict to the line var=value; only allowed without derivatives in var."""
        if var not in ("x", "y"):
            raise ValueError(f"can only specialize x or y, got {var!r}")
        position = 0 if var == "x" else 1
        if any(index[position] for index in self._terms):
            raise NotSpecializable(f"operator differentiates in {var}")
        terms: Dict[Index, ParamPoly] = {}
        for index, coefficient in self._terms.items():
            restricted = coefficient.substitute({var: value})
            if restricted:
                terms[index] = restricted
        return DiffOp._from_terms(terms)

    def apply(self, poly: Union[ParamPoly, Scalar]) -> ParamPoly:
        """Image of a polynomial."""
        return apply(self, poly)

    def witness(self) -> Optional[str]:
        """Text of the first term in print order, or None for the zero operator."""
        if not self._terms:
            return None
        index = max(self._terms, key=_print_key)
        return f"({self._terms[index].to_text(compact=True)})*{_derivative_name(index)}"

    def to_text(self) -> str:
        """Render as "(coef)*dxy + ... + (coef)", highest derivative order first."""
        if not self._terms:
            return "0"
        pieces = []
        for index in sorted(self._terms, key=_print_key, reverse=True):
            coefficient = f"({self._terms[index].to_text(compact=True)})"
            if index == (0, 0):
                pieces.append(coefficient)
            else:
                pieces.append(f"{coefficient}*{_derivative_name(index)}")
        return " + ".join(pieces)


def compose(left: DiffOp, right: DiffOp) -> DiffOp:
    """Normal form of left o right, by d^alpha g = sum C(alpha, gamma) (d^gamma g) d^(alpha-gamma)."""
    if not left.terms or not right.terms:
        return DiffOp()
    terms: Dict[Index, ParamPoly] = {}
    for (i, j), outer in left.terms.items():
        for (k, m), inner in right.terms.items():
            for p in range(i + 1):
                for q in range(j + 1):
                    derived = _mixed_derivative(inner, p, q)
                    if not derived:
                        continue
                    weight = comb(i, p) * comb(j, q)
                    _add_into(terms, (i - p + k, j - q + m), outer * derived.scale(weight))
    return DiffOp._from_terms(terms)


def bracket(left: DiffOp, right: DiffOp) -> DiffOp:
    """Commutator [left, right] = left right - right left."""
    return compose(left, right) - compose(right, left)


def antibracket(left: DiffOp, right: DiffOp) -> DiffOp:
    """Anticommutator {left, right} = left right + right left."""
    return compose(left, right) + compose(right, left)


def apply(op: DiffOp, poly: Union[ParamPoly, Scalar]) -> ParamPoly:
    """Image of a polynomial under op."""
    poly = as_poly(poly)
    result = ZERO
    for (i, j), coefficient in op.terms.items():
        derived = _mixed_derivative(poly, i, j)
        if derived:
            result = result + coefficient * derived
    return result


def reflect(op: DiffOp) -> DiffOp:
    """Rewrite op in the chart (x, y) -> (x, 1-x-y).

    The map is an involution. Coefficients get y -> 1-x-y, dx becomes dx - dy and dy becomes -dy.
    """
    x, y = symbols("x", "y")
    chart = {"y": 1 - x - y}
    terms: Dict[Index, ParamPoly] = {}
    for (i, j), coefficient in op.terms.items():
        moved = coefficient.substitute(chart)
        for m in range(i + 1):
            weight = comb(i, m) * (-1) ** (m + j)
            _add_into(terms, (i - m, m + j), moved.scale(weight))
    return DiffOp._from_terms(terms)


x, y, a, b, c = symbols("x", "y", "a", "b", "c")
_z = 1 - x - y
_s = a + b + c

_BUILDERS: Dict[str, Callable[[], DiffOp]] = {
    "I": DiffOp.identity,
    "L": lambda: DiffOp(
        {
            (2, 0): x * (1 - x),
            (0, 2): y * (1 - y),
            (1, 1): -2 * x * y,
            (1, 0): a + 1 - (_s + 3) * x,
            (0, 1): b + 1 - (_s + 3) * y,
        }
    ),
    "L1": lambda: DiffOp({(0, 2): y * _z, (0, 1): (b + 1) * (1 - x) - (b + c + 2) * y}),
    "L2": lambda: DiffOp({(2, 0): x * _z, (1, 0): (a + 1) * (1 - y) - (a + c + 2) * x}),
    "L3": lambda: DiffOp(
        {
            (2, 0): x * y,
            (1, 1): -2 * x * y,
            (0, 2): x * y,
            (1, 0): (a + 1) * y - (b + 1) * x,
            (0, 1): (b + 1) * x - (a + 1) * y,
        }
    ),
    "X1": lambda: DiffOp.multiplication(x),
    "X2": lambda: DiffOp.multiplication(y),
    "X3": lambda: DiffOp.multiplication(_z),
    "N1": lambda: DiffOp(
        {(1, 0): 2 * x * (1 - x), (0, 1): -2 * x * y, (0, 0): a + 1 - (_s + 3) * x}
    ),
    "N3": lambda: DiffOp(
        {
            (1, 0): 2 * x * (x + y - 1),
            (0, 1): 2 * y * (x + y - 1),
            (0, 0): c + 1 + (_s + 3) * (x + y - 1),
        }
    ),
    "M1": DiffOp,
    "M3": lambda: DiffOp(
        {(0, 1): 2 * y * (x + y - 1), (0, 0): (b + 1) * (x + y - 1) + (c + 1) * y}
    ),
    "J1": lambda: DiffOp(
        {(1, 0): 2 * x * y, (0, 1): -2 * x * y, (0, 0): (a + 1) * y - (b + 1) * x}
    ),
    "J3": DiffOp,
    "G13": lambda: bracket(builtin("L1"), builtin("L3")),
    "s1": lambda: DiffOp({(0, 1): x + y - 1, (0, 0): c}),
    "s2": lambda: DiffOp({(1, 0): x, (0, 0): a}),
    "s3": lambda: DiffOp({(1, 0): -y, (0, 1): y, (0, 0): b}),
    "s1s": lambda: DiffOp({(0, 1): -y, (0, 0): -b}),
    "s2s": lambda: DiffOp({(1, 0): _z, (0, 0): -c}),
    "s3s": lambda: DiffOp({(1, 0): -x, (0, 1): x, (0, 0): -a}),
    "H": lambda: DiffOp({(2, 0): x * (1 - x), (1, 0): a + 1 - (a + b + 2) * x}),
    "K1": lambda: builtin("H"),
    "K2": lambda: DiffOp.multiplication(x),
    "K3": lambda: DiffOp({(1, 0): 2 * x * (1 - x), (0, 0): a + 1 - (a + b + 2) * x}),
}

GENERATORS = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def builtin(name: str) -> DiffOp:
    """Return the named generator of the variable representation."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownGenerator(f"unknown generator {name!r}") from None
    return builder()


@dataclass(frozen=True)
class WeightedPoly:
    """x^ex y^ey (1-x-y)^ez times a polynomial body, with symbolic exponents.

    The exponents are polynomials in a, b, c; non-polynomial weights such as x^a never have to be
    expanded.
    """

    ex: ParamPoly
    ey: ParamPoly
    ez: ParamPoly
    body: ParamPoly

    def derive_x(self) -> "WeightedPoly":
        """d/dx, using d(1-x-y)/dx = -1."""
        q = self.body
        body = self.ex * _z * q + x * _z * q.derive("x") - self.ez * x * q
        return WeightedPoly(self.ex - 1, self.ey, self.ez - 1, body)

    def derive_y(self) -> "WeightedPoly":
        """d/dy, using d(1-x-y)/dy = -1."""
        q = self.body
        body = self.ey * _z * q + y * _z * q.derive("y") - self.ez * y * q
        return WeightedPoly(self.ex, self.ey - 1, self.ez - 1, body)

    def times(self, poly: ParamPoly) -> "WeightedPoly":
        """Multiply the body by poly."""
        return WeightedPoly(self.ex, self.ey, self.ez, self.body * poly)

    def reweighted(self, dx, dy, dz) -> "WeightedPoly":
        """Same body with the weight exponents moved by (dx, dy, dz)."""
        return WeightedPoly(self.ex + dx, self.ey + dy, self.ez + dz, self.body)

    def lowered_to(self, ex: ParamPoly, ey: ParamPoly, ez: ParamPoly) -> ParamPoly:
        """Body after moving the weight down to (ex, ey, ez); the gaps must be natural numbers."""
        body = self.body
        for mine, target, base in ((self.ex, ex, x), (self.ey, ey, y), (self.ez, ez, _z)):
            body = body * base ** _gap(mine, target)
        return body


def _gap(higher: ParamPoly, lower: ParamPoly) -> int:
    difference = higher - lower
    value = difference.constant_value()
    if not difference.is_constant() or int(value) != value or value < 0:
        raise ValueError(f"weights differ by {difference.to_text()}, not a natural number")
    return int(value)


def _lowest(values: List[ParamPoly]) -> ParamPoly:
    lowest = values[0]
    for value in values[1:]:
        difference = value - lowest
        if not difference.is_constant():
            raise ValueError(f"weights differ by {difference.to_text()}, not an integer")
        if difference.constant_value() < 0:
            lowest = value
    return lowest


def _weighted_sum(items: List[WeightedPoly]) -> WeightedPoly:
    items = [item for item in items if item.body]
    if not items:
        return WeightedPoly(ZERO, ZERO, ZERO, ZERO)
    ex = _lowest([item.ex for item in items])
    ey = _lowest([item.ey for item in items])
    ez = _lowest([item.ez for item in items])
    body = ZERO
    for item in items:
        body = body + item.lowered_to(ex, ey, ez)
    return WeightedPoly(ex, ey, ez, body)


def _weighted_apply(op: DiffOp, weighted: WeightedPoly) -> WeightedPoly:
    images = []
    for (i, j), coefficient in op.terms.items():
        derived = weighted
        for _ in range(i):
            derived = derived.derive_x()
        for _ in range(j):
            derived = derived.derive_y()
        images.append(derived.times(coefficient))
    return _weighted_sum(images)


def _weighted_equal(left: WeightedPoly, right: WeightedPoly) -> bool:
    if not left.body or not right.body:
        return not left.body and not right.body
    lowest = _weighted_sum([left, right])
    return left.lowered_to(lowest.ex, lowest.ey, lowest.ez) == right.lowered_to(
        lowest.ex, lowest.ey, lowest.ez
    )


# i -> (weight g_i, weight that undoes g_i after s_i), exponents on (x, y, 1-x-y)
_CONJUGATIONS = {
    1: ((ZERO, b, -c), (ZERO, 1 - b, c - 1)),
    2: ((-a, ZERO, c), (a - 1, ZERO, 1 - c)),
    3: ((a, -b, ZERO), (1 - a, b - 1, ZERO)),
}


def conjugate_check(i: int, degree: int = 6) -> bool:
    """Check s_i* p = shifted_g_i . s_i(g_i . p) for all monomials p of total degree <= degree."""
    try:
        weight, undo = _CONJUGATIONS[i]
    except KeyError:
        raise UnknownGenerator(f"no s-operator with index {i!r}") from None
    forward, adjoint = builtin(f"s{i}"), builtin(f"s{i}s")
    for total in range(degree + 1):
        for power_x in range(total + 1):
            monomial = ParamPoly.monomial({"x": power_x, "y": total - power_x})
            image = _weighted_apply(forward, WeightedPoly(*weight, monomial)).reweighted(*undo)
            expected = WeightedPoly(ZERO, ZERO, ZERO, adjoint.apply(monomial))
            if not _weighted_equal(image, expected):
                logger.debug("conjugation %d fails on %s", i, monomial)
                return False
    return True


def _factorization_identities() -> Dict[str, Tuple[DiffOp, DiffOp]]:
    g = builtin
    eye = DiffOp.identity()
    constant = a + b + c + a * b + a * c + b * c
    lower = sum(
        (g(f"s{i}s") * g(f"s{i}") - g(f"s{i}") for i in (1, 2, 3)), DiffOp()
    ) + DiffOp.multiplication(constant)
    upper = sum(
        (g(f"s{i}") * g(f"s{i}s") + g(f"s{i}s") for i in (1, 2, 3)), DiffOp()
    ) + DiffOp.multiplication(constant)
    return {
        "L-sum": (g("L"), g("L1") + g("L2") + g("L3")),
        "L-commutes-L2": (bracket(g("L"), g("L2")), DiffOp()),
        "L1-factorization-adjoint-first": (g("L1"), (g("s1s") - eye) * g("s1") + c * (b + 1)),
        "L1-factorization-adjoint-last": (g("L1"), (g("s1") + eye) * g("s1s") + b * (c + 1)),
        "L2-factorization-adjoint-first": (g("L2"), (g("s2s") - eye) * g("s2") + a * (c + 1)),
        "L2-factorization-adjoint-last": (g("L2"), (g("s2") + eye) * g("s2s") + c * (a + 1)),
        "L3-factorization-adjoint-first": (g("L3"), (g("s3s") - eye) * g("s3") + b * (a + 1)),
        "L3-factorization-adjoint-last": (g("L3"), (g("s3") + eye) * g("s3s") + a * (b + 1)),
        "L-s-decomposition-adjoint-first": (g("L"), lower),
        "L-s-decomposition-adjoint-last": (g("L"), upper),
    }


def verify_factorizations() -> List[VerificationReport]:
    """Check the sum decomposition of L, the s-operator factorizations and the conjugations."""
    reports = []
    for name, (lhs, rhs) in _factorization_identities().items():
        watch = Stopwatch()
        reports.append(outcome(name, VARIABLE, SYMBOLIC, (lhs - rhs).witness(), watch.elapsed_ms))
    for i in (1, 2, 3):
        watch = Stopwatch()
        witness = None if conjugate_check(i) else f"s{i}s differs from the conjugated s{i}"
        reports.append(outcome(f"s{i}-conjugation", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms))
    return reports
