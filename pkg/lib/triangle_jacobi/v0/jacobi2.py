"""Jacobi polynomials on the triangle x, y >= 0, x + y <= 1.

J_{n,k}^(a,b,c)(x, y) = J_{n-k}^(a, b+c+2k+1)(x) (1-x)^k J_k^(b,c)(y / (1-x)) is orthogonal for the
weight x^a y^b (1-x-y)^c. Inner products are normalized by the weight integral and computed from
the Dirichlet moments

    <x^m1 y^m2> = (a+1)_m1 (b+1)_m2 / (a+b+c+3)_(m1+m2)

so every quantity here is a rational function of a, b and c.
"""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from triangle_jacobi.v0.exact import (
    ZERO,
    AlgebraError,
    ParamFrac,
    ParamPoly,
    as_poly,
    pochhammer,
    symbols,
)
from triangle_jacobi.v0.jacobi1 import Parameter, rising_factors, uni_coefficients
from triangle_jacobi.v0.report import (
    SAMPLED,
    SYMBOLIC,
    VARIABLE,
    Stopwatch,
    VerificationReport,
    outcome,
)
from triangle_jacobi.v0.shiftalg import accept_sample, dapply, dbuiltin, in_cone, sample_line
from triangle_jacobi.v0.weyl import builtin

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before tagging a release or reset
# to 0 if you are raising the major API version
LIBPATCH = 3

logger = logging.getLogger(__name__)

Index = Tuple[int, int]
Family = Callable[[int, int], ParamPoly]

x, y, a, b, c = symbols("x", "y", "a", "b", "c")
_u = b + c
_s = a + b + c

PARAMETER_NAMES = ("a", "b", "c")


class BoundaryFailure(AlgebraError):
    """Raised when an identity fails at a lattice point; carries the point and the residual."""

    def __init__(self, n: int, k: int, residual: str):
        super().__init__(f"(n, k) = ({n}, {k}): {residual}")
        self.n = n
        self.k = k
        self.residual = residual


@dataclass(frozen=True)
class BiJacobi:
    """J_{n,k} as a polynomial in x and y with coefficients in the parameters."""

    n: int
    k: int
    poly: ParamPoly

    @property
    def total_degree(self) -> int:
        """Total degree in x and y, -1 for the zero polynomial."""
        return self.poly.total_degree(("x", "y"))


@dataclass(frozen=True)
class TriangleMoment:
    """Normalized moment of x^m1 y^m2 against the triangle weight."""

    m1: int
    m2: int

    @property
    def value(self) -> ParamFrac:
        """Exact value as a fraction in a, b, c."""
        return triangle_moment(self.m1, self.m2)


def _univariate(coefficients: Sequence[ParamPoly], variable: ParamPoly) -> ParamPoly:
    total = ZERO
    power = ParamPoly.constant(1)
    for coefficient in coefficients:
        total = total + coefficient * power
        power = power * variable
    return total


@lru_cache(maxsize=1024)
def _bi_poly(n: int, k: int, alpha: ParamPoly, beta: ParamPoly, gamma: ParamPoly) -> ParamPoly:
    outer = _univariate(uni_coefficients(n - k, alpha, beta + gamma + 2 * k + 1), x)
    inner = ZERO
    for j, coefficient in enumerate(uni_coefficients(k, beta, gamma)):
        inner = inner + coefficient * y ** j * (1 - x) ** (k - j)
    return outer * inner


def bi_jacobi(
    n: int, k: int, alpha: Parameter = a, beta: Parameter = b, gamma: Parameter = c
) -> BiJacobi:
    """J_{n,k}^(alpha,beta,gamma); the zero polynomial outside 0 <= k <= n."""
    if not in_cone(n, k):
        return BiJacobi(n, k, ZERO)
    return BiJacobi(n, k, _bi_poly(n, k, as_poly(alpha), as_poly(beta), as_poly(gamma)))


def J(n: int, k: int) -> ParamPoly:
    """Shorthand for bi_jacobi(n, k).poly."""
    return bi_jacobi(n, k).poly


def shifted_family(da: int = 0, db: int = 0, dc: int = 0) -> Family:
    """J^(a+da, b+db, c+dc) obtained by substituting into the unshifted family."""
    mapping = {"a": a + da, "b": b + db, "c": c + dc}

    def family(n: int, k: int) -> ParamPoly:
        return J(n, k).substitute(mapping)

    return family


def swapped_family(n: int, k: int) -> ParamPoly:
    """J^(c,b,a)_{n,k}(1-x-y, y), the joint eigenbasis of L and L3."""
    return bi_jacobi(n, k, c, b, a).poly.substitute({"x": 1 - x - y})


def indices(n_max: int) -> Iterator[Index]:
    """Lattice points 0 <= k <= n <= n_max in graded-lex order."""
    for n in range(n_max + 1):
        for k in range(n + 1):
            yield n, k


def warm_cache(n_max: int) -> None:
    """Build every J_{n,k} up to n_max so later workers only read the cache."""
    logger.debug("building J(n, k) for n <= %d", n_max)
    for n, k in indices(n_max):
        bi_jacobi(n, k)


@lru_cache(maxsize=None)
def _moment_factors(m1: int, m2: int) -> Tuple[ParamPoly, List[ParamPoly]]:
    return pochhammer(a + 1, m1) * pochhammer(b + 1, m2), rising_factors(_s + 3, m1 + m2)


def triangle_moment(m1: int, m2: int) -> ParamFrac:
    """(a+1)_m1 (b+1)_m2 / (a+b+c+3)_(m1+m2)."""
    numerator, factors = _moment_factors(m1, m2)
    return ParamFrac(numerator, factors)


def inner(p: ParamPoly, q: ParamPoly) -> ParamFrac:
    """Normalized inner product on the triangle; inner(1, 1) = 1."""
    product = p * q
    top = product.total_degree(("x", "y"))
    if top < 0:
        return ParamFrac()
    numerator = ZERO
    for (m1, m2), coefficient in product.coefficients(("x", "y")).items():
        head, _ = _moment_factors(m1, m2)
        tail = ParamPoly.constant(1)
        for factor in rising_factors(_s + 3 + m1 + m2, top - m1 - m2):
            tail = tail * factor
        numerator = numerator + coefficient * head * tail
    return ParamFrac(numerator, rising_factors(_s + 3, top)).cancel()


def inner_at(p: ParamPoly, q: ParamPoly, point: Dict[str, Fraction]) -> Fraction:
    """inner(p, q) at a rational parameter point, integrating after the substitution.

    Raises DenominatorVanishes when a moment is undefined at the point.
    """
    product = p.substitute(point) * q.substitute(point)
    total = Fraction(0)
    for (m1, m2), coefficient in product.coefficients(("x", "y")).items():
        total += coefficient.constant_value() * triangle_moment(m1, m2).evaluate(point)
    return total


def norm_h(n: int, k: int) -> ParamFrac:
    """inner(J_{n,k}, J_{n,k}) in closed form."""
    if not in_cone(n, k):
        raise ValueError(f"(n, k) = ({n}, {k}) is outside 0 <= k <= n")
    numerator = (
        pochhammer(_u + 2 * k + 2, n - k)
        * pochhammer(_u + k + 1, k)
        * pochhammer(a + 1, n - k)
        * pochhammer(b + 1, k)
        * pochhammer(c + 1, k)
        * (_s + 2)
    )
    return ParamFrac(
        numerator.scale(Fraction(1, factorial(n - k) * factorial(k))),
        [_s + 2 * n + 2] + rising_factors(_s + 2, n + k),
    ).cancel()


def _residual_text(lhs, rhs) -> Optional[str]:
    difference = ParamFrac(lhs) - rhs if isinstance(lhs, ParamPoly) else lhs - rhs
    if difference.is_zero():
        return None
    return difference.num.to_text(compact=True)


def eigenvalues(n: int, k: int) -> Tuple[ParamPoly, ParamPoly]:
    """The pair (-n(n+a+b+c+2), -k(k+b+c+1)) of L and L1 eigenvalues on J_{n,k}."""
    return -n * (n + _s + 2), -k * (k + _u + 1)


def verify_eigen(n_max: int) -> VerificationReport:
    """L J = -n(n+a+b+c+2) J and L1 J = -k(k+b+c+1) J for 0 <= k <= n <= n_max."""
    watch = Stopwatch()
    big_l, l1 = builtin("L"), builtin("L1")
    witness = None
    for n, k in indices(n_max):
        poly = J(n, k)
        on_l, on_l1 = eigenvalues(n, k)
        for name, op, value in (("L", big_l, on_l), ("L1", l1, on_l1)):
            residual = op.apply(poly) - value * poly
            if residual:
                witness = f"{name} on J({n}, {k}): {residual.to_text(compact=True)}"
                break
        if witness:
            break
    return outcome("bispectral-eigen", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


_RECURRENCES = {
    "X1": ("X1", "X1h"),
    "X3": ("X3", "X3h"),
}


def check_recurrence(which: str, n: int, k: int) -> None:
    """Compare multiplication by X1 (or X3) with the degree operator on one basis vector.

    Raises BoundaryFailure with the residual numerator when they differ.
    """
    variable_name, degree_name = _RECURRENCES[which]
    lhs = builtin(variable_name).apply(J(n, k))
    rhs = dapply(dbuiltin(degree_name), n, k, J)
    residual = _residual_text(lhs, rhs)
    if residual is not None:
        raise BoundaryFailure(n, k, residual)


def verify_recurrence(which: str, n_max: int) -> VerificationReport:
    """The three-term (X1) or nine-term (X3) recurrence for 0 <= k <= n <= n_max.

    Out-of-cone polynomials count as zero, so the boundary rows are checked too.
    """
    if which not in _RECURRENCES:
        raise ValueError(f"unknown recurrence {which!r}, expected one of {sorted(_RECURRENCES)}")
    watch = Stopwatch()
    witness = None
    try:
        for n, k in indices(n_max):
            check_recurrence(which, n, k)
    except BoundaryFailure as e:
        logger.error("recurrence %s fails at (%d, %d)", which, e.n, e.k)
        witness = str(e)
    return outcome(f"recurrence-{which}", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


def _two_terms(
    family: Family,
    n: int,
    k: int,
    side_shift: int,
    side: ParamPoly,
    centre: ParamPoly,
) -> ParamFrac:
    return ParamFrac(side * family(n, k + side_shift) + centre * family(n, k), _u + 2 * k + 1)


def _s1(n: int, k: int) -> ParamFrac:
    return ParamFrac((c + k) * shifted_family(0, 1, -1)(n, k))


def _s1s(n: int, k: int) -> ParamFrac:
    return ParamFrac(-(b + k) * shifted_family(0, -1, 1)(n, k))


def _s2(n: int, k: int) -> ParamFrac:
    return _two_terms(
        shifted_family(-1, 0, 1),
        n,
        k,
        -1,
        (n - k + 1) * (b + k),
        (a + n - k) * (_u + k + 1),
    )


def _s2s(n: int, k: int) -> ParamFrac:
    return _two_terms(
        shifted_family(1, 0, -1),
        n,
        k,
        1,
        -(k + 1) * (_s + n + k + 2),
        -(c + k) * (_u + k + n + 1),
    )


def _s3(n: int, k: int) -> ParamFrac:
    return _two_terms(
        shifted_family(1, -1, 0),
        n,
        k,
        1,
        -(k + 1) * (_s + n + k + 2),
        (b + k) * (_u + k + n + 1),
    )


def _s3s(n: int, k: int) -> ParamFrac:
    return _two_terms(
        shifted_family(-1, 1, 0),
        n,
        k,
        -1,
        (n - k + 1) * (c + k),
        -(a + n - k) * (_u + k + 1),
    )


S_ACTIONS: Dict[str, Callable[[int, int], ParamFrac]] = {
    "s1": _s1,
    "s1s": _s1s,
    "s2": _s2,
    "s2s": _s2s,
    "s3": _s3,
    "s3s": _s3s,
}


def verify_saction(name: str, n_max: int) -> VerificationReport:
    """One first-order operator against its two-term action formula."""
    watch = Stopwatch()
    op, expected = builtin(name), S_ACTIONS[name]
    witness = None
    for n, k in indices(n_max):
        residual = _residual_text(op.apply(J(n, k)), expected(n, k))
        if residual is not None:
            witness = f"(n, k) = ({n}, {k}): {residual}"
            break
    return outcome(f"saction-{name}", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


def verify_sactions(n_max: int) -> List[VerificationReport]:
    """All six action formulas, one report each."""
    return [verify_saction(name, n_max) for name in S_ACTIONS]


def scalar_action_value(n: int, k: int) -> ParamPoly:
    """Eigenvalue of s2* s2 + s3* s3 - s2 - s3 on J_{n,k}."""
    return (
        -n * (n + _s + 2)
        + k * (k + _u + 1)
        + c * (b + 1)
        - (_s + a * b + a * c + b * c)
    )


def verify_scalar_action(n_max: int) -> VerificationReport:
    """(s2* s2 + s3* s3 - s2 - s3) J_{n,k} is a multiple of J_{n,k}."""
    watch = Stopwatch()
    s2, s3 = builtin("s2"), builtin("s3")
    op = builtin("s2s") * s2 + builtin("s3s") * s3 - s2 - s3
    witness = None
    for n, k in indices(n_max):
        poly = J(n, k)
        residual = op.apply(poly) - scalar_action_value(n, k) * poly
        if residual:
            witness = f"(n, k) = ({n}, {k}): {residual.to_text(compact=True)}"
            break
    return outcome("scalar-action", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


def verify_eigen_separation(n_max: int) -> VerificationReport:
    """Distinct lattice points carry distinct eigenvalue pairs as polynomials in a, b, c."""
    watch = Stopwatch()
    witness = None
    for first, second in combinations(list(indices(n_max)), 2):
        if eigenvalues(*first) == eigenvalues(*second):
            witness = f"{first} and {second} share eigenvalues"
            break
    return outcome("eigenvalue-separation", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


@dataclass
class GramMatrix:
    """Inner products of J_{n,k} in graded-lex index order, as text.

    Sampled matrices carry the parameter-degree bound of their cleared entries and the number of
    agreeing points on the sample line; symbolic ones leave both unset.
    """

    indices: List[Index]
    rows: List[List[str]]
    witness: Optional[str] = None
    degree_bound: Optional[int] = None
    samples: int = 0

    @property
    def passed(self) -> bool:
        """True when the matrix is diagonal with the expected norms."""
        return self.witness is None


def _gram_symbolic(order: List[Index]) -> GramMatrix:
    rows: List[List[str]] = []
    witness = None
    for i, row_index in enumerate(order):
        row = []
        for j, column_index in enumerate(order):
            if j < i:
                row.append(rows[j][i])
                continue
            value = inner(J(*row_index), J(*column_index))
            expected = norm_h(*row_index) if i == j else ParamFrac()
            if value != expected and witness is None:
                witness = f"{row_index} x {column_index}: {value.to_text(compact=True)}"
            row.append(value.to_text(compact=True) if i != j else expected.to_text(compact=True))
        rows.append(row)
    return GramMatrix(order, rows, witness)


def gram_degree_bound(order: Sequence[Index]) -> int:
    """Total degree in a, b, c of every Gram entry minus its expected value, once cleared.

    inner(J_i, J_j) sums coefficient products against moments over (a+b+c+3)_(n_i+n_j), so its
    numerator has degree at most deg J_i + deg J_j + n_i + n_j. On the diagonal the closed-form
    norm is brought over the same denominator.
    """
    degrees = {index: J(*index).total_degree(PARAMETER_NAMES) for index in order}
    bound = 0
    for i, row_index in enumerate(order):
        for column_index in order[i:]:
            moments = row_index[0] + column_index[0]
            entry = degrees[row_index] + degrees[column_index] + moments
            if row_index == column_index:
                norm = norm_h(*row_index)
                norm_den = sum(factor.total_degree() for factor in norm.factors)
                entry = max(entry + norm_den, norm.num.total_degree() + moments)
            bound = max(bound, entry)
    return bound


@lru_cache(maxsize=None)
def _xy_coefficients(n: int, k: int) -> Tuple[Tuple[Tuple[int, ...], ParamPoly], ...]:
    return tuple(J(n, k).coefficients(("x", "y")).items())


def gram_at(order: Sequence[Index], point: Dict[str, Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """Upper triangle of the Gram matrix at a rational parameter point.

    Inner products against monomials are formed once per row, so each entry costs one pass over
    the column polynomial. Raises DenominatorVanishes when a moment is undefined at the point.
    """
    top = max(n for n, _ in order)
    moments = {
        (m1, m2): triangle_moment(m1, m2).evaluate(point)
        for m1 in range(2 * top + 1)
        for m2 in range(2 * top + 1 - m1)
    }
    values = {
        index: [(monomial, value.evaluate(point)) for monomial, value in _xy_coefficients(*index)]
        for index in order
    }
    monomials = [(m1, degree - m1) for degree in range(top + 1) for m1 in range(degree + 1)]
    entries: Dict[Tuple[int, int], Fraction] = {}
    for i, row_index in enumerate(order):
        against = {
            (m1, m2): sum(
                (value * moments[(p1 + m1, p2 + m2)] for (p1, p2), value in values[row_index]),
                Fraction(0),
            )
            for m1, m2 in monomials
        }
        for j in range(i, len(order)):
            entries[(i, j)] = sum(
                (value * against[monomial] for monomial, value in values[order[j]]), Fraction(0)
            )
    return entries


def _gram_sampled(order: List[Index], samples: Optional[int], seed: int) -> GramMatrix:
    bound = gram_degree_bound(order)
    if samples is None:
        samples = bound + 1
    expected = {index: norm_h(*index) for index in order}
    failures: Dict[Tuple[int, int], str] = {}
    witness = None
    if samples <= bound:
        witness = f"{samples} samples do not exceed the degree bound {bound}"
    else:
        logger.info("sampling %d points on a line, degree bound %d", samples, bound)
        points = sample_line(seed, names=PARAMETER_NAMES)

        def evaluate(point: Dict[str, Fraction]):
            mismatches = {}
            for (i, j), value in gram_at(order, point).items():
                target = expected[order[i]].evaluate(point) if i == j else 0
                if value != target:
                    mismatches[(i, j)] = value
            return point, mismatches

        for _ in range(samples):
            point, mismatches = accept_sample(points, evaluate)
            for (i, j), value in mismatches.items():
                where = ", ".join(f"{name}={point[name]}" for name in PARAMETER_NAMES)
                failures.setdefault((i, j), f"{value} at {where}")
                if witness is None:
                    witness = f"degree bound {bound}: {order[i]} x {order[j]}: {value} at {where}"
    rows = []
    for i in range(len(order)):
        row = []
        for j in range(len(order)):
            key = (min(i, j), max(i, j))
            if key in failures:
                row.append(failures[key])
            else:
                row.append(expected[order[i]].to_text(compact=True) if i == j else "0")
        rows.append(row)
    return GramMatrix(order, rows, witness, bound, samples)


def gram(
    n_max: int, mode: str = SYMBOLIC, samples: Optional[int] = None, seed: int = 42
) -> GramMatrix:
    """Gram matrix up to n_max, exact in a, b, c or sampled along a line of parameters.

    The sampled mode proves each entry once more than gram_degree_bound points on the line
    agree; samples defaults to that many. The symbolic mode gets slow past n_max = 3.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    order = list(indices(n_max))
    logger.info("Gram matrix of %d polynomials (%s)", len(order), mode)
    warm_cache(n_max)
    if mode == SYMBOLIC:
        return _gram_symbolic(order)
    if mode == SAMPLED:
        return _gram_sampled(order, samples, seed)
    raise ValueError(f"unknown mode {mode!r}")


def verify_orthogonality(
    n_max: int, mode: str = SYMBOLIC, samples: Optional[int] = None, seed: int = 42
) -> VerificationReport:
    """The Gram matrix is diagonal with norm_h on the diagonal."""
    watch = Stopwatch()
    matrix = gram(n_max, mode, samples, seed)
    return outcome("orthogonality", VARIABLE, mode, matrix.witness, watch.elapsed_ms)


def bispectral_reports(n_max: int) -> List[VerificationReport]:
    """Eigen-equations and both recurrences up to n_max."""
    warm_cache(n_max + 1)
    return [
        verify_eigen(n_max),
        verify_recurrence("X1", n_max),
        verify_recurrence("X3", n_max),
        verify_eigen_separation(n_max),
    ]
