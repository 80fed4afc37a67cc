"""Relation catalogue, expression parser and verification engine.

A relation is a line of text such as

    [N1,X1] = -2*X1*X1 + 2*X1

over generator names, commutators [A,B], anticommutators {A,B}, products and sums, with scalar
coefficients that are polynomials in the parameters a, b, c (and ell in the subalgebra checks).
Relations are realized either by differential operators (the variable representation, see
`weyl`) or by difference operators on the degree lattice (the degree representation, see
`shiftalg`), and a relation holds when lhs - rhs realizes to zero.
"""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import ply.lex as lex
import ply.yacc as yacc

from triangle_jacobi.v0.exact import AlgebraError, ParamPoly, symbols
from triangle_jacobi.v0.jacobi2 import J, indices, swapped_family, warm_cache
from triangle_jacobi.v0.report import (
    BOTH,
    DEGREE,
    SAMPLED,
    SYMBOLIC,
    VARIABLE,
    Stopwatch,
    VerificationReport,
    outcome,
)
from triangle_jacobi.v0.shiftalg import (
    DEGREE_NAMES,
    DegenerateSampleBudgetExceeded,
    DegreeOp,
    Row,
    Shift,
    accept_sample,
    compose_row,
    dantibracket,
    dapply,
    dbracket,
    dbuiltin,
    point_key,
    sample_line,
    shift_label,
)
from triangle_jacobi.v0.weyl import DiffOp, antibracket, bracket, builtin, reflect

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before tagging a release or reset
# to 0 if you are raising the major API version
LIBPATCH = 4

logger = logging.getLogger(__name__)

PARAMETERS = frozenset({"a", "b", "c", "ell"})

# "auto" verifies the variable representation symbolically and the degree one by sampling.
AUTO = "auto"
MODES = (SYMBOLIC, SAMPLED, AUTO)

DEFAULT_SAMPLES = 50
# Sampled checks are only trusted up to this cleared numerator degree.
MAX_SAMPLED_DEGREE = 64
SAMPLED_PARAMETERS = ("a", "b", "c")
DEFAULT_SEED = 42
STRUCTURE_N_MAX = 5

# Names the degree representation builds from brackets instead of carrying a builtin.
DEGREE_DERIVED = {"J1": "[L3,X1]", "J3": "[L3,X3]", "G13": "[L1,L3]"}
VARIABLE_DERIVED = {"G13": "[L1,L3]"}

# Every commutator name written as the bracket that defines it.
DEFINING_BRACKETS = {
    "N1": "[L,X1]",
    "N3": "[L,X3]",
    "M1": "[L1,X1]",
    "M3": "[L1,X3]",
    "J1": "[L3,X1]",
    "J3": "[L3,X3]",
    "G13": "[L1,L3]",
}


class RelationSyntaxError(AlgebraError, SyntaxError):
    """Raised for relation text outside the grammar; `position` is the character offset."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


class CatalogueFormatError(AlgebraError, ValueError):
    """Raised for a malformed catalogue line or a duplicate relation id."""

    pass


# Raised by grammar actions; ply would take a SyntaxError there for a recoverable parse error.
class _RejectedAction(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Generator:
    """A named generator of the algebra."""

    name: str


@dataclass(frozen=True)
class Coefficient:
    """A scalar in a, b, c and ell."""

    value: ParamPoly


@dataclass(frozen=True)
class Sum:
    """Sum of two or more terms."""

    terms: Tuple["Node", ...]


@dataclass(frozen=True)
class Product:
    """Ordered product of two or more factors."""

    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Bracket:
    """Commutator [left, right]."""

    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class AntiBracket:
    """Anticommutator {left, right}."""

    left: "Node"
    right: "Node"


Node = Union[Generator, Coefficient, Sum, Product, Bracket, AntiBracket]

ZERO_NODE = Coefficient(ParamPoly())


def make_sum(items: Iterable[Node]) -> Node:
    """Flattened sum; coefficient terms merge into one trailing term."""
    terms: List[Node] = []
    constant = ParamPoly()
    for item in items:
        for term in item.terms if isinstance(item, Sum) else (item,):
            if isinstance(term, Coefficient):
                constant = constant + term.value
            else:
                terms.append(term)
    if constant:
        terms.append(Coefficient(constant))
    if not terms:
        return ZERO_NODE
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def make_product(items: Iterable[Node]) -> Node:
    """Flattened product; coefficient factors merge into one leading factor."""
    factors: List[Node] = []
    scale = ParamPoly.constant(1)
    for item in items:
        for factor in item.factors if isinstance(item, Product) else (item,):
            if isinstance(factor, Coefficient):
                scale = scale * factor.value
            else:
                factors.append(factor)
    if not scale:
        return ZERO_NODE
    if not factors:
        return Coefficient(scale)
    if scale != ParamPoly.constant(1):
        factors.insert(0, Coefficient(scale))
    if len(factors) == 1:
        return factors[0]
    return Product(tuple(factors))


def negate(node: Node) -> Node:
    """-node."""
    return make_product([Coefficient(ParamPoly.constant(-1)), node])


def unparse(node: Node) -> str:
    """Canonical text; parse_expression(unparse(node)) == node."""
    if isinstance(node, Generator):
        return node.name
    if isinstance(node, Coefficient):
        return "0" if not node.value else f"({node.value.to_text(compact=True)})"
    if isinstance(node, Sum):
        return " + ".join(unparse(term) for term in node.terms)
    if isinstance(node, Product):
        return "*".join(
            f"({unparse(factor)})" if isinstance(factor, Sum) else unparse(factor)
            for factor in node.factors
        )
    if isinstance(node, Bracket):
        return f"[{unparse(node.left)},{unparse(node.right)}]"
    return f"{{{unparse(node.left)},{unparse(node.right)}}}"


def generator_names(node: Node) -> Set[str]:
    """Every generator name occurring in the tree."""
    if isinstance(node, Generator):
        return {node.name}
    if isinstance(node, Coefficient):
        return set()
    if isinstance(node, Sum):
        children = node.terms
    elif isinstance(node, Product):
        children = node.factors
    else:
        children = (node.left, node.right)
    names: Set[str] = set()
    for child in children:
        names |= generator_names(child)
    return names


def rewrite(
    node: Node,
    generator: Callable[[str], Node],
    coefficient: Callable[[ParamPoly], ParamPoly] = lambda value: value,
) -> Node:
    """Rebuild the tree with generators and coefficients replaced."""
    if isinstance(node, Generator):
        return generator(node.name)
    if isinstance(node, Coefficient):
        return Coefficient(coefficient(node.value))
    if isinstance(node, Sum):
        return make_sum(rewrite(term, generator, coefficient) for term in node.terms)
    if isinstance(node, Product):
        return make_product(rewrite(factor, generator, coefficient) for factor in node.factors)
    kind = Bracket if isinstance(node, Bracket) else AntiBracket
    return kind(
        rewrite(node.left, generator, coefficient), rewrite(node.right, generator, coefficient)
    )


@dataclass(frozen=True)
class RelationSpec:
    """A catalogue entry: lhs = rhs, or a bare operator expression for structure entries."""

    id: str
    lhs: Node
    rhs: Optional[Node] = None
    representations: FrozenSet[str] = field(default=frozenset({VARIABLE, DEGREE}))
    structure: bool = False

    def to_text(self) -> str:
        """Catalogue text of the relation, without id or tags."""
        if self.rhs is None:
            return unparse(self.lhs)
        return f"{unparse(self.lhs)} = {unparse(self.rhs)}"

    def generators(self) -> Set[str]:
        """Generator names on both sides."""
        names = generator_names(self.lhs)
        if self.rhs is not None:
            names |= generator_names(self.rhs)
        return names


class _RelationGrammar:
    """ply lexer and parser for relation text."""

    tokens = (
        "NAME",
        "NUMBER",
        "PLUS",
        "MINUS",
        "TIMES",
        "DIVIDE",
        "LPAREN",
        "RPAREN",
        "LBRACKET",
        "RBRACKET",
        "LBRACE",
        "RBRACE",
        "COMMA",
        "EQUALS",
        "CARET",
    )

    t_PLUS = r"\+"
    t_MINUS = r"-"
    t_TIMES = r"\*"
    t_DIVIDE = r"/"
    t_LPAREN = r"\("
    t_RPAREN = r"\)"
    t_LBRACKET = r"\["
    t_RBRACKET = r"\]"
    t_LBRACE = r"\{"
    t_RBRACE = r"\}"
    t_COMMA = r","
    t_EQUALS = r"="
    t_CARET = r"\^"
    t_ignore = " \t"

    start = "relation"

    def __init__(self) -> None:
        self.lexer = lex.lex(module=self)
        self.parser = yacc.yacc(
            module=self, write_tables=False, debug=False, errorlog=yacc.NullLogger()
        )
        self._length = 0

    def parse(self, text: str) -> Tuple[Node, Optional[Node]]:
        if not text.strip():
            raise RelationSyntaxError("empty relation text", 0)
        self._length = len(text)
        try:
            return self.parser.parse(text, lexer=self.lexer.clone())
        except _RejectedAction as e:
            raise RelationSyntaxError(str(e), e.position) from None

    def t_NAME(self, t):
        r"[A-Za-z_][A-Za-z_0-9]*"
        return t

    def t_NUMBER(self, t):
        r"\d+"
        t.value = int(t.value)
        return t

    def t_error(self, t):
        raise RelationSyntaxError(
            f"unexpected character {t.value[0]!r} at position {t.lexpos}", t.lexpos
        )

    def p_relation_equation(self, p):
        """relation : expression EQUALS expression"""
        p[0] = (p[1], p[3])

    def p_relation_expression(self, p):
        """relation : expression"""
        p[0] = (p[1], None)

    def p_expression_plus(self, p):
        """expression : expression PLUS term"""
        p[0] = make_sum([p[1], p[3]])

    def p_expression_minus(self, p):
        """expression : expression MINUS term"""
        p[0] = make_sum([p[1], negate(p[3])])

    def p_expression_term(self, p):
        """expression : term"""
        p[0] = p[1]

    def p_term_times(self, p):
        """term : term TIMES unary"""
        p[0] = make_product([p[1], p[3]])

    def p_term_divide(self, p):
        """term : term DIVIDE unary"""
        divisor = p[3]
        if not (isinstance(divisor, Coefficient) and divisor.value.is_constant()):
            raise _RejectedAction(
                f"division by a non-constant at position {p.lexpos(2)}", p.lexpos(2)
            )
        if not divisor.value:
            raise _RejectedAction(f"division by zero at position {p.lexpos(2)}", p.lexpos(2))
        inverse = ParamPoly.constant(Fraction(1) / divisor.value.constant_value())
        p[0] = make_product([p[1], Coefficient(inverse)])

    def p_term_unary(self, p):
        """term : unary"""
        p[0] = p[1]

    def p_unary_minus(self, p):
        """unary : MINUS unary"""
        p[0] = negate(p[2])

    def p_unary_atom(self, p):
        """unary : atom"""
        p[0] = p[1]

    def p_unary_power(self, p):
        """unary : atom CARET NUMBER"""
        p[0] = make_product([Coefficient(ParamPoly.constant(1))] + [p[1]] * p[3])

    def p_atom_name(self, p):
        """atom : NAME"""
        if p[1] in PARAMETERS:
            p[0] = Coefficient(ParamPoly.variable(p[1]))
        else:
            p[0] = Generator(p[1])

    def p_atom_number(self, p):
        """atom : NUMBER"""
        p[0] = Coefficient(ParamPoly.constant(p[1]))

    def p_atom_group(self, p):
        """atom : LPAREN expression RPAREN"""
        p[0] = p[2]

    def p_atom_bracket(self, p):
        """atom : LBRACKET expression COMMA expression RBRACKET"""
        p[0] = Bracket(p[2], p[4])

    def p_atom_antibracket(self, p):
        """atom : LBRACE expression COMMA expression RBRACE"""
        p[0] = AntiBracket(p[2], p[4])

    def p_error(self, p):
        if p is None:
            raise RelationSyntaxError(
                f"unexpected end of relation text at position {self._length}", self._length
            )
        raise RelationSyntaxError(f"unexpected {p.value!r} at position {p.lexpos}", p.lexpos)


@lru_cache(maxsize=None)
def _relation_parser() -> _RelationGrammar:
    return _RelationGrammar()


def parse_relation(text: str, relation_id: str = "") -> RelationSpec:
    """Parse "lhs = rhs" (or a bare expression) into a RelationSpec."""
    lhs, rhs = _relation_parser().parse(text)
    return RelationSpec(relation_id, lhs, rhs, structure=rhs is None)


@lru_cache(maxsize=256)
def parse_expression(text: str) -> Node:
    """Parse an expression without "="."""
    spec = parse_relation(text)
    if spec.rhs is not None:
        raise RelationSyntaxError(f"expected an expression, got a relation: {text!r}")
    return spec.lhs


_TAGS = {
    "@variable": VARIABLE,
    "@degree": DEGREE,
    "@structure": "structure",
}


def parse_catalogue(text: str) -> List[RelationSpec]:
    """Parse catalogue text: one "id [@tag ...]: relation" per line, "#" starts a comment."""
    specs: List[RelationSpec] = []
    seen: Set[str] = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, colon, body = line.partition(":")
        if not colon:
            raise CatalogueFormatError(f"line {number}: missing ':' after the relation id")
        words = head.split()
        if not words:
            raise CatalogueFormatError(f"line {number}: missing relation id")
        relation_id, tags = words[0], words[1:]
        unknown = [tag for tag in tags if tag not in _TAGS]
        if unknown:
            raise CatalogueFormatError(f"line {number}: unknown tags {unknown}")
        if relation_id in seen:
            raise CatalogueFormatError(f"line {number}: duplicate relation id {relation_id!r}")
        seen.add(relation_id)
        try:
            spec = parse_relation(body, relation_id)
        except RelationSyntaxError as e:
            raise CatalogueFormatError(f"line {number} ({relation_id}): {e}") from e
        structure = "@structure" in tags
        if structure != (spec.rhs is None):
            raise CatalogueFormatError(
                f"line {number}: only @structure entries may omit the right side"
            )
        restricted = frozenset(_TAGS[tag] for tag in tags if tag in ("@variable", "@degree"))
        specs.append(
            RelationSpec(
                relation_id,
                spec.lhs,
                spec.rhs,
                restricted or frozenset({VARIABLE, DEGREE}),
                structure,
            )
        )
    logger.debug("parsed %d catalogue entries", len(specs))
    return specs


def load_catalogue(path: Union[str, Path]) -> List[RelationSpec]:
    """Read and parse a catalogue file."""
    return parse_catalogue(Path(path).read_text())


def relation_entries(catalogue: Sequence[RelationSpec]) -> List[RelationSpec]:
    """The entries with a right side, in catalogue order."""
    return [spec for spec in catalogue if not spec.structure]


def structure_entries(catalogue: Sequence[RelationSpec]) -> List[RelationSpec]:
    """The @structure entries, in catalogue order."""
    return [spec for spec in catalogue if spec.structure]


Operator = Union[DiffOp, DegreeOp]


class _Realizer:
    """Evaluate expression trees with the arithmetic of one operator type."""

    derived: Mapping[str, str] = {}

    def __init__(self, overrides: Optional[Mapping[str, Operator]] = None):
        self._overrides = dict(overrides or {})
        self._memo: Dict[Node, Operator] = {}

    def builtin(self, name: str) -> Operator:
        raise NotImplementedError

    def coefficient(self, value: ParamPoly) -> Operator:
        raise NotImplementedError

    def bracket(self, left: Operator, right: Operator) -> Operator:
        raise NotImplementedError

    def antibracket(self, left: Operator, right: Operator) -> Operator:
        raise NotImplementedError

    def generator(self, name: str) -> Operator:
        if name in self._overrides:
            return self._overrides[name]
        if name in self.derived:
            return self.realize(parse_expression(self.derived[name]))
        return self.builtin(name)

    def realize(self, node: Node) -> Operator:
        cached = self._memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, Generator):
            result = self.generator(node.name)
        elif isinstance(node, Coefficient):
            result = self.coefficient(node.value)
        elif isinstance(node, Sum):
            result = self.realize(node.terms[0])
            for term in node.terms[1:]:
                result = result + self.realize(term)
        elif isinstance(node, Product):
            result = self.realize(node.factors[0])
            for factor in node.factors[1:]:
                result = result * self.realize(factor)
        elif isinstance(node, Bracket):
            result = self.bracket(self.realize(node.left), self.realize(node.right))
        else:
            result = self.antibracket(self.realize(node.left), self.realize(node.right))
        self._memo[node] = result
        return result

    def difference(self, spec: RelationSpec) -> Operator:
        """Realization of lhs - rhs."""
        return self.realize(spec.lhs) - self.realize(spec.rhs)


class VariableRealizer(_Realizer):
    """Realize with differential operators, optionally at fixed parameters or in another chart."""

    derived = VARIABLE_DERIVED

    def __init__(
        self,
        overrides: Optional[Mapping[str, DiffOp]] = None,
        parameters: Optional[Mapping[str, Union[ParamPoly, Fraction, int]]] = None,
        transform: Optional[Callable[[DiffOp], DiffOp]] = None,
    ):
        super().__init__(overrides)
        self._parameters = dict(parameters or {})
        self._transform = transform

    def _finish(self, op: DiffOp) -> DiffOp:
        if self._parameters:
            op = op.substitute(self._parameters)
        if self._transform is not None:
            op = self._transform(op)
        return op

    def generator(self, name: str) -> DiffOp:
        """Override for name, else the builtin or derived operator."""
        if name in self._overrides:
            return self._finish(self._overrides[name])
        return super().generator(name)

    def builtin(self, name: str) -> DiffOp:
        """Builtin differential operator, specialized and transformed."""
        return self._finish(builtin(name))

    def coefficient(self, value: ParamPoly) -> DiffOp:
        """Multiplication by value."""
        if self._parameters:
            value = value.substitute(self._parameters)
        return DiffOp.multiplication(value)

    def bracket(self, left: DiffOp, right: DiffOp) -> DiffOp:
        """Commutator."""
        return bracket(left, right)

    def antibracket(self, left: DiffOp, right: DiffOp) -> DiffOp:
        """Anticommutator."""
        return antibracket(left, right)


_n, _k = symbols("n", "k")


class DegreeRealizer(_Realizer):
    """Realize with symbolic difference operators; ell stands for -k."""

    derived = DEGREE_DERIVED

    def builtin(self, name: str) -> DegreeOp:
        """Hatted builtin; I maps to the identity."""
        return dbuiltin(name if name == "I" else f"{name}h")

    def coefficient(self, value: ParamPoly) -> DegreeOp:
        """Diagonal operator of value with ell = -k."""
        return DegreeOp.diagonal(value.substitute({"ell": -_k}))

    def bracket(self, left: DegreeOp, right: DegreeOp) -> DegreeOp:
        """Commutator."""
        return dbracket(left, right)

    def antibracket(self, left: DegreeOp, right: DegreeOp) -> DegreeOp:
        """Anticommutator."""
        return dantibracket(left, right)


def _row_combine(left: Row, right: Row, sign: int = 1) -> Row:
    result = dict(left)
    for shift, value in right.items():
        total = result.get(shift, 0) + sign * value
        if total:
            result[shift] = total
        else:
            result.pop(shift, None)
    return result


class DegreeSampler:
    """Exact rows of realized expressions at rational points (a, b, c, n, k).

    Compositions are evaluated row by row, so no symbolic product is ever built.
    """

    def __init__(self, overrides: Optional[Mapping[str, DegreeOp]] = None):
        self._overrides = dict(overrides or {})
        self._memo: Dict[Tuple[Node, Tuple], Row] = {}
        self._coefficients: Dict[ParamPoly, ParamPoly] = {}

    def _generator_row(self, name: str, point: Mapping[str, Fraction]) -> Row:
        if name in self._overrides:
            return self._overrides[name].row(point)
        if name in DEGREE_DERIVED:
            return self.row(parse_expression(DEGREE_DERIVED[name]), point)
        return dbuiltin(name if name == "I" else f"{name}h").row(point)

    def _coefficient_row(self, value: ParamPoly, point: Mapping[str, Fraction]) -> Row:
        moved = self._coefficients.get(value)
        if moved is None:
            moved = value.substitute({"ell": -_k})
            self._coefficients[value] = moved
        number = moved.evaluate(point)
        return {(0, 0): number} if number else {}

    def _compose(self, outer: Node, inner: Row, point: Mapping[str, Fraction]) -> Row:
        return compose_row(lambda moved: self.row(outer, moved), inner, point)

    def row(self, node: Node, point: Mapping[str, Fraction]) -> Row:
        """Row of the realized node at the point."""
        key = (node, point_key(point))
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, Generator):
            result = self._generator_row(node.name, point)
        elif isinstance(node, Coefficient):
            result = self._coefficient_row(node.value, point)
        elif isinstance(node, Sum):
            result = {}
            for term in node.terms:
                result = _row_combine(result, self.row(term, point))
        elif isinstance(node, Product):
            result = self.row(node.factors[-1], point)
            for factor in reversed(node.factors[:-1]):
                result = self._compose(factor, result, point)
        else:
            forward = self._compose(node.left, self.row(node.right, point), point)
            backward = self._compose(node.right, self.row(node.left, point), point)
            sign = -1 if isinstance(node, Bracket) else 1
            result = _row_combine(forward, backward, sign)
        self._memo[key] = result
        return result

    def residual(self, spec: RelationSpec, point: Mapping[str, Fraction]) -> Row:
        """Row of lhs - rhs at the point."""
        return _row_combine(self.row(spec.lhs, point), self.row(spec.rhs, point), -1)


def _describe(point: Mapping[str, Fraction]) -> str:
    return ", ".join(f"{name}={value}" for name, value in point.items())


def resolve_mode(mode: str, representation: str) -> str:
    """The concrete mode for one representation; "auto" picks by representation."""
    if mode == AUTO:
        return SYMBOLIC if representation == VARIABLE else SAMPLED
    if mode not in (SYMBOLIC, SAMPLED):
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    return mode


# Shift -> (numerator degree bound, denominator factors with multiplicity).
Bound = Dict[Shift, Tuple[int, Counter]]


def _factor_degree(factors: Counter) -> int:
    return sum(factor.total_degree() * multiplicity for factor, multiplicity in factors.items())


@lru_cache(maxsize=None)
def _moved_factor(factor: ParamPoly, shift: Shift) -> ParamPoly:
    return factor.substitute({"n": _n + shift[0], "k": _k + shift[1]}).primitive()[1]


def _add_bound(target: Bound, shift: Shift, degree: int, factors: Counter) -> None:
    existing = target.get(shift)
    if existing is None:
        target[shift] = (degree, factors)
        return
    current_degree, current = existing
    common = current | factors
    target[shift] = (
        max(
            current_degree + _factor_degree(common - current),
            degree + _factor_degree(common - factors),
        ),
        common,
    )


def _combine_bounds(left: Bound, right: Bound) -> Bound:
    result = dict(left)
    for shift, (degree, factors) in right.items():
        _add_bound(result, shift, degree, factors)
    return result


def _compose_bounds(outer: Bound, inner: Bound) -> Bound:
    result: Bound = {}
    for inner_shift, (inner_degree, inner_factors) in inner.items():
        for outer_shift, (outer_degree, outer_factors) in outer.items():
            moved = outer_factors
            if inner_shift != (0, 0):
                moved = Counter()
                for factor, multiplicity in outer_factors.items():
                    moved[_moved_factor(factor, inner_shift)] += multiplicity
            total_shift = (inner_shift[0] + outer_shift[0], inner_shift[1] + outer_shift[1])
            _add_bound(result, total_shift, inner_degree + outer_degree, inner_factors + moved)
    return result


def _op_bound(op: DegreeOp) -> Bound:
    return {
        shift: (value.num.total_degree(DEGREE_NAMES), Counter(value.factors))
        for shift, value in op.terms.items()
    }


@lru_cache(maxsize=None)
def _builtin_bound(name: str) -> Bound:
    return _op_bound(dbuiltin(name if name == "I" else f"{name}h"))


class DegreeBounds:
    """Degree bounds of realized expressions in the degree representation, never expanded.

    Every shift of a realized expression has a coefficient N / D where D is the product of the
    recorded denominator factors; the bound caps the total degree of N in a, b, c, n and k.
    Denominators are joined the way ParamFrac sums join them, so the bound holds for the
    coefficients DegreeSampler evaluates.
    """

    def __init__(self, overrides: Optional[Mapping[str, DegreeOp]] = None):
        self._overrides = dict(overrides or {})
        self._memo: Dict[Node, Bound] = {}

    def _generator(self, name: str) -> Bound:
        if name in self._overrides:
            return _op_bound(self._overrides[name])
        if name in DEGREE_DERIVED:
            return self.bound(parse_expression(DEGREE_DERIVED[name]))
        return _builtin_bound(name)

    def bound(self, node: Node) -> Bound:
        """Per-shift bound of the realized node."""
        cached = self._memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, Generator):
            result = self._generator(node.name)
        elif isinstance(node, Coefficient):
            value = node.value.substitute({"ell": -_k})
            result = {(0, 0): (value.total_degree(), Counter())} if value else {}
        elif isinstance(node, Sum):
            result = {}
            for term in node.terms:
                result = _combine_bounds(result, self.bound(term))
        elif isinstance(node, Product):
            result = self.bound(node.factors[-1])
            for factor in reversed(node.factors[:-1]):
                result = _compose_bounds(self.bound(factor), result)
        else:
            left, right = self.bound(node.left), self.bound(node.right)
            result = _combine_bounds(_compose_bounds(left, right), _compose_bounds(right, left))
        self._memo[node] = result
        return result

    def residual_degree(self, spec: RelationSpec) -> int:
        """Largest numerator degree over the shifts of lhs - rhs; -1 when both sides are 0."""
        residual = _combine_bounds(self.bound(spec.lhs), self.bound(spec.rhs))
        return max((degree for degree, _ in residual.values()), default=-1)


def _diff_degree(op: DiffOp) -> int:
    return max(
        (coefficient.total_degree(SAMPLED_PARAMETERS) for coefficient in op.terms.values()),
        default=-1,
    )


class ParameterDegrees:
    """Degree in a, b and c of the coefficients of realized differential operators."""

    def __init__(self, overrides: Optional[Mapping[str, DiffOp]] = None):
        self._overrides = dict(overrides or {})
        self._memo: Dict[Node, int] = {}

    def degree(self, node: Node) -> int:
        """Bound on the coefficient degree of the realized node, -1 for the zero operator."""
        cached = self._memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, Generator):
            if node.name in self._overrides:
                result = _diff_degree(self._overrides[node.name])
            elif node.name in VARIABLE_DERIVED:
                result = self.degree(parse_expression(VARIABLE_DERIVED[node.name]))
            else:
                result = _diff_degree(builtin(node.name))
        elif isinstance(node, Coefficient):
            result = node.value.total_degree(SAMPLED_PARAMETERS) if node.value else -1
        elif isinstance(node, Sum):
            result = max(self.degree(term) for term in node.terms)
        else:
            parts = node.factors if isinstance(node, Product) else (node.left, node.right)
            degrees = [self.degree(part) for part in parts]
            result = -1 if min(degrees) < 0 else sum(degrees)
        self._memo[node] = result
        return result


def degree_bound(
    spec: RelationSpec, representation: str, overrides: Optional[Mapping[str, Operator]] = None
) -> int:
    """Bound on the total degree of the cleared coefficients of lhs - rhs.

    The degrees are in a, b and c for the variable representation, and in a, b, c, n and k for
    the degree representation, where ell stands for -k.
    """
    if representation == VARIABLE:
        degrees = ParameterDegrees(overrides)
        return max(degrees.degree(spec.lhs), degrees.degree(spec.rhs))
    if representation == DEGREE:
        return DegreeBounds(overrides).residual_degree(spec)
    raise ValueError(f"unknown representation {representation!r}")


def _variable_sampled_witness(
    spec: RelationSpec,
    samples: int,
    seed: int,
    overrides: Optional[Mapping[str, DiffOp]],
    bound: int,
) -> Optional[str]:
    for point in islice(sample_line(seed, names=SAMPLED_PARAMETERS), samples):
        residual = VariableRealizer(overrides, parameters=point).difference(spec)
        if residual:
            return f"degree bound {bound}: at {_describe(point)}: {residual.witness()}"
    return None


def _degree_sampled_witness(
    spec: RelationSpec,
    samples: int,
    seed: int,
    overrides: Optional[Mapping[str, DegreeOp]],
    bound: int,
) -> Optional[str]:
    sampler = DegreeSampler(overrides)
    points = sample_line(seed)

    def evaluate(point):
        return point, sampler.residual(spec, point)

    for _ in range(samples):
        point, residual = accept_sample(points, evaluate)
        if residual:
            shift = max(residual)
            return (
                f"degree bound {bound}: at {_describe(point)}: "
                f"{shift_label(shift)}: {residual[shift]}"
            )
    return None


def verify(
    spec: RelationSpec,
    representation: str,
    mode: str,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    overrides: Optional[Mapping[str, Operator]] = None,
) -> VerificationReport:
    """Certify one relation in one representation.

    Sampled checks walk a seeded line and need more agreeing points than degree_bound; a
    relation whose bound is above MAX_SAMPLED_DEGREE or not below samples is checked
    symbolically instead. Raises DegenerateSampleBudgetExceeded when sampling keeps hitting
    vanishing denominators.
    """
    if spec.structure:
        return verify_structure(spec)
    mode = resolve_mode(mode, representation)
    watch = Stopwatch()
    bound = -1
    if mode == SAMPLED:
        bound = degree_bound(spec, representation, overrides)
        if bound > MAX_SAMPLED_DEGREE or samples <= bound:
            logger.warning(
                "%s (%s): degree bound %d needs more than %d samples, checking symbolically",
                spec.id,
                representation,
                bound,
                samples,
            )
            mode = SYMBOLIC
    if representation == VARIABLE:
        if mode == SYMBOLIC:
            witness = VariableRealizer(overrides).difference(spec).witness()
        else:
            witness = _variable_sampled_witness(spec, samples, seed, overrides, bound)
    elif representation == DEGREE:
        if mode == SYMBOLIC:
            witness = DegreeRealizer(overrides).difference(spec).witness()
        else:
            witness = _degree_sampled_witness(spec, samples, seed, overrides, bound)
    else:
        raise ValueError(f"unknown representation {representation!r}")
    return outcome(spec.id, representation, mode, witness, watch.elapsed_ms)


def _guarded_verify(
    spec: RelationSpec,
    representation: str,
    mode: str,
    samples: int,
    seed: int,
    overrides: Optional[Mapping[str, Operator]] = None,
) -> VerificationReport:
    try:
        return verify(spec, representation, mode, samples, seed, overrides)
    except DegenerateSampleBudgetExceeded as e:
        return outcome(spec.id, representation, resolve_mode(mode, representation), str(e))


def _verify_task(task: Tuple[str, str, str, str, int, int]) -> VerificationReport:
    relation_id, text, representation, mode, samples, seed = task
    return _guarded_verify(parse_relation(text, relation_id), representation, mode, samples, seed)


def _representations(representation: str) -> Tuple[str, ...]:
    if representation == BOTH:
        return (VARIABLE, DEGREE)
    if representation in (VARIABLE, DEGREE):
        return (representation,)
    raise ValueError(f"unknown representation {representation!r}")


def verify_all(
    catalogue: Sequence[RelationSpec],
    representation: str = BOTH,
    mode: str = AUTO,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    overrides: Optional[Mapping[str, Operator]] = None,
    workers: int = 1,
) -> List[VerificationReport]:
    """One report per (relation, representation), in catalogue order.

    With workers > 1 the checks run in a process pool; the order of the result does not depend
    on it. Overrides are only honoured in-process.
    """
    tasks = [
        (spec, rep)
        for spec in relation_entries(catalogue)
        for rep in _representations(representation)
        if rep in spec.representations
    ]
    logger.info("verifying %d relation checks (%s, %s)", len(tasks), representation, mode)
    if workers > 1 and not overrides:
        payload = [(spec.id, spec.to_text(), rep, mode, samples, seed) for spec, rep in tasks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_verify_task, payload))
    return [_guarded_verify(spec, rep, mode, samples, seed, overrides) for spec, rep in tasks]


def verify_structure(spec: RelationSpec, n_max: int = STRUCTURE_N_MAX) -> VerificationReport:
    """The differential operator and its hatted mirror act alike on J(n, k) for n <= n_max."""
    watch = Stopwatch()
    differential = VariableRealizer().realize(spec.lhs)
    difference = DegreeRealizer().realize(spec.lhs)
    warm_cache(n_max + 1)
    witness = None
    for n, k in indices(n_max):
        lhs = differential.apply(J(n, k))
        residual = dapply(difference, n, k, J) - lhs
        if not residual.is_zero():
            witness = f"(n, k) = ({n}, {k}): {residual.num.to_text(compact=True)}"
            break
    return outcome(spec.id, BOTH, SYMBOLIC, witness, watch.elapsed_ms)


def verify_structures(
    catalogue: Sequence[RelationSpec], n_max: int = STRUCTURE_N_MAX
) -> List[VerificationReport]:
    """verify_structure for every @structure entry."""
    return [verify_structure(spec, n_max) for spec in structure_entries(catalogue)]


def _symbolic_witness(texts: Sequence[str], realizer: _Realizer) -> Optional[str]:
    for text in texts:
        residual = realizer.difference(parse_relation(text))
        if residual:
            return f"{text}: {residual.witness()}"
    return None


def _sampled_check(
    relation_id: str, texts: Sequence[str], samples: int, seed: int
) -> VerificationReport:
    """Degree-representation check of every text; symbolic only if every text fell back."""
    watch = Stopwatch()
    witness = None
    modes = set()
    for text in texts:
        report = verify(parse_relation(text), DEGREE, SAMPLED, samples, seed)
        modes.add(report.mode)
        if not report.passed:
            witness = f"{text}: {report.witness}"
            break
    mode = SYMBOLIC if modes == {SYMBOLIC} else SAMPLED
    return outcome(relation_id, DEGREE, mode, witness, watch.elapsed_ms)


CENTRALIZERS = {
    "L1": ("L", "X1"),
    "X1": ("L1", "X3"),
    "X3": ("X1", "L3"),
    "L3": ("X3", "L"),
    "L": ("L3", "L1"),
}


def rank_one_texts(k1: str, k2: str, alpha: str, beta: str) -> List[str]:
    """The two rank-one Jacobi relations for K1, K2 and parameters alpha, beta."""
    total = f"(({alpha})+({beta}))"
    return [
        f"[{k1},[{k1},{k2}]] = -2*{{{k1},{k2}}} + 2*{k1} + {total}*({total}+2)*{k2}"
        f" - {total}*(({alpha})+1)",
        f"[{k2},[{k2},{k1}]] = -2*{k2}*{k2} + 2*{k2}",
    ]


def cleared_rank_one_texts(k1: str, u: str, v: str, alpha: str, beta: str) -> List[str]:
    """The rank-one relations for K1 and K2 = U/V multiplied through by the central V."""
    total = f"(({alpha})+({beta}))"
    return [
        f"[{u},[{u},{k1}]] = -2*{u}*{u} + 2*{u}*{v}",
        f"[{k1},[{k1},{u}]] = -2*{{{k1},{u}}} + 2*{k1}*{v} + {total}*({total}+2)*{u}"
        f" - {total}*(({alpha})+1)*{v}",
    ]


# K1 = L - ell(a+b+c-ell+2) shifted to the univariate operator on an L1 (or L3) eigenspace.
_SHIFTED_L = "(L - ell*(a+b+c-ell+2))"

L1_CENTRAL = rank_one_texts(_SHIFTED_L, "X1", "a", "b+c-2*ell+1")
L3_CENTRAL = rank_one_texts(_SHIFTED_L, "X3", "c", "a+b-2*ell+1")
X1_CENTRAL = cleared_rank_one_texts("L1", "(X3+X1-I)", "(X1-I)", "b", "c")
X3_CENTRAL = cleared_rank_one_texts("L3", "(X1+X3-I)", "(X3-I)", "b", "a")

X1_EQUALS_ONE = [
    "[M3,X3] = -2*X3*X3",
    "[M3,L1] = 2*{X3,L1} - (b+c)*(b+c+2)*X3",
]
X3_EQUALS_ONE = [
    "[X1,J1] = 2*X1*X1",
    "[L3,J1] = -2*{X1,L3} + (a+b)*(a+b+2)*X1",
]

SUBALGEBRA_N_MAX = 4


def _swapped_basis_witness(texts: Sequence[str], n_max: int) -> Optional[str]:
    for n, k in indices(n_max):
        realizer = VariableRealizer(parameters={"ell": -k})
        basis = swapped_family(n, k)
        for text in texts:
            residual = realizer.difference(parse_relation(text)).apply(basis)
            if residual:
                return f"{text} on (n, k) = ({n}, {k}): {residual.to_text(compact=True)}"
    return None


class RacahParameters(NamedTuple):
    """Coefficients of the two Racah-form relations with L central.

    The full alpha is 2 L + alpha and the full gamma and epsilon carry a factor L; the fields
    hold the L-free parts.
    """

    alpha: ParamPoly
    beta: ParamPoly
    gamma: ParamPoly
    delta: ParamPoly
    epsilon: ParamPoly

    def to_text(self) -> str:
        """Racah parameters with the central element written as L."""

        def text(value: ParamPoly) -> str:
            return value.to_text(compact=True)

        return (
            f"alpha=2*L+({text(self.alpha)}), beta={text(self.beta)}, "
            f"gamma=({text(self.gamma)})*L, delta={text(self.delta)}, "
            f"epsilon=({text(self.epsilon)})*L"
        )


Word = Tuple[str, ...]


def expand_words(node: Node, central: str = "L") -> Dict[Word, ParamPoly]:
    """Noncommutative expansion into words in the generators; the central one moves last."""

    def expand(item: Node) -> Dict[Word, ParamPoly]:
        if isinstance(item, Generator):
            return {() if item.name == "I" else (item.name,): ParamPoly.constant(1)}
        if isinstance(item, Coefficient):
            return {(): item.value} if item.value else {}
        if isinstance(item, Sum):
            total: Dict[Word, ParamPoly] = {}
            for term in item.terms:
                _merge_words(total, expand(term), 1)
            return total
        if isinstance(item, Product):
            result = {(): ParamPoly.constant(1)}
            for factor in item.factors:
                result = _multiply_words(result, expand(factor))
            return result
        left, right = expand(item.left), expand(item.right)
        total = _multiply_words(left, right)
        _merge_words(total, _multiply_words(right, left), -1 if isinstance(item, Bracket) else 1)
        return total

    normalized: Dict[Word, ParamPoly] = {}
    for word, value in expand(node).items():
        moved = tuple(name for name in word if name != central)
        moved += (central,) * (len(word) - len(moved))
        _merge_words(normalized, {moved: value}, 1)
    return normalized


def _merge_words(target: Dict[Word, ParamPoly], terms: Mapping[Word, ParamPoly], sign: int):
    for word, value in terms.items():
        total = target.get(word, ParamPoly()) + value.scale(sign)
        if total:
            target[word] = total
        else:
            target.pop(word, None)


def _multiply_words(
    left: Mapping[Word, ParamPoly], right: Mapping[Word, ParamPoly]
) -> Dict[Word, ParamPoly]:
    result: Dict[Word, ParamPoly] = {}
    for first, x in left.items():
        for second, y in right.items():
            _merge_words(result, {first + second: x * y}, 1)
    return result


def _racah_pattern(words: Mapping[Word, ParamPoly], k1: str, k2: str) -> Tuple[ParamPoly, ...]:
    """Check -2{K1,K2} - 2 K1^2 + 2 K1 L + alpha0 K1 + beta K2 + gamma0 L; return the rest."""
    fixed = {(k1, k2): -2, (k2, k1): -2, (k1, k1): -2, (k1, "L"): 2}
    free = {(k1,), (k2,), ("L",)}
    for word, expected in fixed.items():
        if words.get(word) != ParamPoly.constant(expected):
            raise ValueError(f"coefficient of {'*'.join(word)} is not {expected}")
    extra = set(words) - set(fixed) - free
    if extra:
        raise ValueError(f"unexpected words {sorted('*'.join(word) for word in extra)}")
    return tuple(words.get(word, ParamPoly()) for word in ((k1,), (k2,), ("L",)))


def racah_parameters(catalogue: Sequence[RelationSpec]) -> RacahParameters:
    """Read alpha, beta, gamma, delta, epsilon off the two Racah-form catalogue entries.

    Raises ValueError when an entry does not have the Racah shape or the alphas disagree.
    """
    by_id = {spec.id: spec for spec in catalogue}
    first = _racah_pattern(expand_words(by_id["L1_L1_L3"].rhs), "L1", "L3")
    second = _racah_pattern(expand_words(by_id["L3_L3_L1"].rhs), "L3", "L1")
    if first[0] != second[0]:
        raise ValueError(
            f"alpha differs: {first[0].to_text(compact=True)} against "
            f"{second[0].to_text(compact=True)}"
        )
    return RacahParameters(
        alpha=first[0], beta=first[1], gamma=first[2], delta=second[1], epsilon=second[2]
    )


def verify_subalgebras(
    catalogue: Sequence[RelationSpec],
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> List[VerificationReport]:
    """Centralizers, rank-one Jacobi subalgebras, degenerate limits and the Racah match."""
    reports = []
    for central, pair in CENTRALIZERS.items():
        watch = Stopwatch()
        texts = [f"[{central},{other}] = 0" for other in pair]
        witness = _symbolic_witness(texts, VariableRealizer())
        reports.append(
            outcome(f"centralizer-{central}", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)
        )

    reports.append(_sampled_check("rank-one-L1-central", L1_CENTRAL, samples, seed))

    watch = Stopwatch()
    warm_cache(SUBALGEBRA_N_MAX)
    witness = _swapped_basis_witness(L3_CENTRAL, SUBALGEBRA_N_MAX)
    reports.append(outcome("rank-one-L3-central", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms))

    for name, texts in (("X1", X1_CENTRAL), ("X3", X3_CENTRAL)):
        watch = Stopwatch()
        witness = _symbolic_witness(texts, VariableRealizer())
        reports.append(
            outcome(f"rank-one-{name}-central", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)
        )
        reports.append(_sampled_check(f"rank-one-{name}-central", texts, samples, seed))

    watch = Stopwatch()
    on_line = VariableRealizer(transform=lambda op: op.specialize("x", 1))
    witness = _symbolic_witness(X1_EQUALS_ONE, on_line)
    reports.append(
        outcome("degenerate-X1-equals-1", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)
    )

    watch = Stopwatch()
    on_line = VariableRealizer(transform=lambda op: reflect(op).specialize("y", 1))
    witness = _symbolic_witness(X3_EQUALS_ONE, on_line)
    reports.append(
        outcome("degenerate-X3-equals-1", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)
    )

    watch = Stopwatch()
    a, b, c = symbols("a", "b", "c")
    left = (b + c) * (b + 1) + (b - c) * (a + 1)
    right = (a + b) * (b + 1) + (b - a) * (c + 1)
    witness = None if left == right else f"{left.to_text()} != {right.to_text()}"
    reports.append(outcome("racah-alpha", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms))

    watch = Stopwatch()
    try:
        parameters = racah_parameters(catalogue)
        logger.info("Racah parameters: %s", parameters.to_text())
        witness = None
    except (KeyError, ValueError) as e:
        witness = str(e)
    reports.append(outcome("racah-form", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms))
    return reports


# Index pairs and the matching parameter swaps: X1, X2, X3 carry a, b, c.
SYMMETRY_PAIRS = ((1, 2), (1, 3), (2, 3))
_INDEX_PARAMETERS = {1: "a", 2: "b", 3: "c"}


def expand_defining_brackets(node: Node) -> Node:
    """Replace every commutator name by the bracket that defines it."""

    def generator(name: str) -> Node:
        if name in DEFINING_BRACKETS:
            return parse_expression(DEFINING_BRACKETS[name])
        return Generator(name)

    return rewrite(node, generator)


def permute_indices(spec: RelationSpec, first: int, second: int) -> RelationSpec:
    """Swap L_i with L_j, X_i with X_j and their parameters, after expanding commutator names."""
    names = {}
    for prefix in ("L", "X"):
        names[f"{prefix}{first}"] = f"{prefix}{second}"
        names[f"{prefix}{second}"] = f"{prefix}{first}"
    one, other = _INDEX_PARAMETERS[first], _INDEX_PARAMETERS[second]
    swap = {one: ParamPoly.variable(other), other: ParamPoly.variable(one)}

    def move(node: Node) -> Node:
        return rewrite(
            expand_defining_brackets(node),
            lambda name: Generator(names.get(name, name)),
            lambda value: value.substitute(swap),
        )

    return RelationSpec(f"{spec.id}({first}{second})", move(spec.lhs), move(spec.rhs))


def verify_symmetry(catalogue: Sequence[RelationSpec]) -> VerificationReport:
    """Every relation survives the index swaps (1,2), (1,3) and (2,3)."""
    watch = Stopwatch()
    realizer = VariableRealizer()
    witness = None
    for first, second in SYMMETRY_PAIRS:
        logger.info("checking the index swap (%d, %d)", first, second)
        for spec in relation_entries(catalogue):
            moved = permute_indices(spec, first, second)
            residual = realizer.difference(moved)
            if residual:
                witness = f"{moved.id}: {residual.witness()}"
                break
        if witness:
            break
    return outcome("index-symmetry", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


JACOBI_CONSEQUENCES = (
    "[L1,J1] = -[X1,G13]",
    "[L3,N1] = [L,J1]",
    "[N1,X3] = [N3,X1]",
    "[M3,L] = [N3,L1]",
    "[L3,M3] = [X3,G13]",
    "[X3,J1] = 0",
    "[L3,N3] = 0",
)


def verify_jacobi_consequences() -> VerificationReport:
    """Equalities between triple commutators that follow from the Jacobi identity."""
    watch = Stopwatch()
    realizer = VariableRealizer()
    witness = None
    for text in JACOBI_CONSEQUENCES:
        spec = parse_relation(text)
        expanded = RelationSpec(
            text, expand_defining_brackets(spec.lhs), expand_defining_brackets(spec.rhs)
        )
        residual = realizer.difference(expanded)
        if residual:
            witness = f"{text}: {residual.witness()}"
            break
    return outcome("jacobi-identity-consequences", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


class Mutation(NamedTuple):
    """Add delta to one coefficient of one builtin generator."""

    representation: str
    name: str
    key: Tuple[int, int]
    delta: int = 1


MUTATIONS = (
    Mutation(VARIABLE, "L", (1, 0)),
    Mutation(VARIABLE, "L1", (0, 2)),
    Mutation(VARIABLE, "L3", (1, 1)),
    Mutation(VARIABLE, "N1", (0, 0)),
    Mutation(VARIABLE, "N3", (1, 0)),
    Mutation(VARIABLE, "M3", (0, 0)),
    Mutation(VARIABLE, "J1", (0, 1)),
    Mutation(DEGREE, "X1", (1, 0)),
    Mutation(DEGREE, "L3", (0, 0)),
    Mutation(DEGREE, "M3", (1, 1)),
)


def mutate(representation: str, name: str, key: Tuple[int, int], delta: int = 1) -> Dict:
    """Overrides for verify with one builtin coefficient moved by delta."""
    if representation == VARIABLE:
        op = builtin(name)
        return {name: op.with_coefficient(key, op.coefficient(*key) + delta)}
    if representation == DEGREE:
        op = dbuiltin(f"{name}h")
        return {name: op.with_coefficient(key, op.coefficient(*key) + delta)}
    raise ValueError(f"unknown representation {representation!r}")


def first_failure(
    catalogue: Sequence[RelationSpec],
    representation: str,
    overrides: Mapping[str, Operator],
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> Optional[str]:
    """Id of the first relation that fails under the overrides, or None."""
    for spec in relation_entries(catalogue):
        if representation not in spec.representations:
            continue
        report = _guarded_verify(spec, representation, AUTO, samples, seed, overrides)
        if not report.passed:
            return spec.id
    return None


def mutation_controls(
    catalogue: Sequence[RelationSpec], mutations: Iterable[Mutation] = MUTATIONS
) -> List[VerificationReport]:
    """A report per mutation that passes when the mutation is caught."""
    reports = []
    for mutation in mutations:
        watch = Stopwatch()
        overrides = mutate(*mutation)
        caught = first_failure(catalogue, mutation.representation, overrides)
        row, column = mutation.key
        label = f"mutation-{mutation.name}({row},{column}){mutation.delta:+d}"
        witness = None if caught else "no relation failed"
        mode = resolve_mode(AUTO, mutation.representation)
        reports.append(outcome(label, mutation.representation, mode, witness, watch.elapsed_ms))
    return reports


# Substitution data for the contraction to the rank-two Jacobi algebra of four parameters;
# recorded for reference, not verified.
CONTRACTION_ASSIGNMENTS = {
    "C12": "X3",
    "C23": "-L1 + (1/4)*(b+c)*(b+c+2)",
    "C34": "-L3 + (1/4)*(a+b)*(a+b+2)",
    "C123": "I - X1",
    "C234": "-L + (1/4)*(a+b+c+3)*(a+b+c+1)",
}
CONTRACTION_CENTRAL_VALUES = {
    "C1": "0",
    "C2": "(1/4)*(c*c-1)",
    "C3": "(1/4)*(b*b-1)",
    "C4": "(1/4)*(a*a-1)",
    "C1234": "1",
}
