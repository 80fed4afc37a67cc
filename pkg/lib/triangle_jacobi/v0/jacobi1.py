"""Univariate Jacobi polynomials on [0, 1] and their classical identities.

J_n^(a,b)(x) = P_n^(a,b)(1 - 2x) is expanded exactly from the terminating hypergeometric sum

    J_n(x) = (a+1)_n / n! * sum_j (-n)_j (n+a+b+1)_j / ((a+1)_j j!) x^j

with the parameters left symbolic (or replaced by shifted polynomials such as b+c+2k+1). Inner
products use the Beta moments normalized by the weight integral, so no Gamma function appears.
"""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from triangle_jacobi.v0.exact import (
    ZERO,
    AlgebraError,
    ParamFrac,
    ParamPoly,
    Scalar,
    as_poly,
    pochhammer,
    symbols,
)
from triangle_jacobi.v0.report import SYMBOLIC, VARIABLE, Stopwatch, VerificationReport, outcome
from triangle_jacobi.v0.weyl import DiffOp, antibracket, bracket, builtin

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before tagging a release or reset
# to 0 if you are raising the major API version
LIBPATCH = 2

logger = logging.getLogger(__name__)

Parameter = Union[ParamPoly, Scalar]
Combination = Sequence[Tuple[ParamFrac, ParamPoly]]

x, a, b = symbols("x", "a", "b")


class UnknownIdentity(AlgebraError, LookupError):
    """Raised for an identity id outside IDENTITIES."""

    pass


class NegativeDegree(AlgebraError, ValueError):
    """Raised for a degree below -1."""

    pass


@dataclass(frozen=True)
class UniJacobi:
    """J_n^(a,b) as a polynomial in x with coefficients in the parameters."""

    n: int
    poly: ParamPoly

    @property
    def degree(self) -> int:
        """Degree in x, -1 for the zero polynomial."""
        return self.poly.degree("x") if self.poly else -1

    def value_at_zero(self) -> ParamPoly:
        """J_n(0), which equals (a+1)_n / n!."""
        return self.poly.substitute({"x": 0})


def rising_factors(base: Parameter, length: int) -> List[ParamPoly]:
    """The factors base, base+1, ..., base+length-1 of a Pochhammer symbol."""
    base = as_poly(base)
    return [base + i for i in range(length)]


@lru_cache(maxsize=4096)
def uni_coefficients(n: int, alpha: ParamPoly, beta: ParamPoly) -> Tuple[ParamPoly, ...]:
    """Coefficients of x^0, ..., x^n in J_n^(alpha,beta); empty for n = -1."""
    if n < -1:
        raise NegativeDegree(f"degree {n} is below -1")
    if n == -1:
        return ()
    coefficients = []
    for j in range(n + 1):
        weight = Fraction((-1) ** j * comb(n, j), factorial(n))
        coefficients.append(
            (pochhammer(n + alpha + beta + 1, j) * pochhammer(alpha + j + 1, n - j)).scale(weight)
        )
    return tuple(coefficients)


def uni_jacobi(n: int, alpha: Parameter = a, beta: Parameter = b) -> UniJacobi:
    """J_n^(alpha,beta)(x); n = -1 gives the zero polynomial."""
    coefficients = uni_coefficients(n, as_poly(alpha), as_poly(beta))
    poly = ZERO
    for power, coefficient in enumerate(coefficients):
        poly = poly + coefficient * ParamPoly.monomial({"x": power})
    return UniJacobi(n, poly)


def _family(da: int = 0, db: int = 0) -> Callable[[int], ParamPoly]:
    def family(n: int) -> ParamPoly:
        return uni_jacobi(n, a + da, b + db).poly

    return family


J = _family()


def uni_inner(p: ParamPoly, q: ParamPoly) -> ParamFrac:
    """Normalized inner product with weight x^a (1-x)^b on [0, 1]; uni_inner(1, 1) = 1.

    The moment of x^m is (a+1)_m / (a+b+2)_m.
    """
    product = p * q
    top = product.degree("x")
    if top < 0:
        return ParamFrac()
    numerator = ZERO
    for (power,), coefficient in product.coefficients(("x",)).items():
        tail = ParamPoly.constant(1)
        for factor in rising_factors(a + b + 2 + power, top - power):
            tail = tail * factor
        numerator = numerator + coefficient * pochhammer(a + 1, power) * tail
    return ParamFrac(numerator, rising_factors(a + b + 2, top)).cancel()


def uni_norm(n: int) -> ParamFrac:
    """uni_inner(J_n, J_n) in closed form: (a+1)_n (b+1)_n (a+b+1) / ((2n+a+b+1) n! (a+b+1)_n)."""
    numerator = pochhammer(a + 1, n) * pochhammer(b + 1, n) * (a + b + 1)
    return ParamFrac(
        numerator.scale(Fraction(1, factorial(n))),
        [2 * n + a + b + 1] + rising_factors(a + b + 1, n),
    ).cancel()


def _combine(terms: Combination) -> ParamFrac:
    total = ParamFrac()
    for coefficient, poly in terms:
        if poly:
            total = total + coefficient * poly
    return total


def _residual(lhs: Union[ParamPoly, ParamFrac], rhs: Combination) -> Optional[str]:
    difference = ParamFrac(lhs) if isinstance(lhs, ParamPoly) else lhs
    difference = difference - _combine(rhs)
    if difference.is_zero():
        return None
    return difference.num.to_text(compact=True)


def _frac(num: Parameter, *factors: Parameter) -> ParamFrac:
    return ParamFrac(as_poly(num), list(factors))


def _check_de(n: int) -> Optional[str]:
    return _residual(builtin("H").apply(J(n)), [(_frac(-n * (n + a + b + 1)), J(n))])


def _check_recurrence(n: int) -> Optional[str]:
    s = a + b
    return _residual(
        (1 - 2 * x) * J(n),
        [
            (_frac(2 * (n + 1) * (n + s + 1), 2 * n + s + 1, 2 * n + s + 2), J(n + 1)),
            (_frac(-(a - b) * s, 2 * n + s, 2 * n + s + 2), J(n)),
            (_frac(2 * (n + a) * (n + b), 2 * n + s, 2 * n + s + 1), J(n - 1)),
        ],
    )


def _check_shift_down(n: int) -> Optional[str]:
    return _residual(J(n).derive("x"), [(_frac(-(n + a + b + 1)), _family(1, 1)(n - 1))])


def _check_shift_up(n: int) -> Optional[str]:
    raising = DiffOp({(1, 0): x * (1 - x), (0, 0): a - (a + b) * x})
    return _residual(raising.apply(J(n)), [(_frac(n + 1), _family(-1, -1)(n + 1))])


def _check_structure(n: int) -> Optional[str]:
    width = 2 * n + a + b + 1
    return _residual(
        builtin("K3").apply(J(n)),
        [
            (_frac((n + 1) * (n + a + b + 1), width), J(n + 1)),
            (_frac(-(n + a) * (n + b), width), J(n - 1)),
        ],
    )


def _check_christoffel_a(n: int) -> Optional[str]:
    width = 2 * n + a + b + 1
    lowered = _family(-1, 0)
    return _residual(
        x * J(n), [(_frac(n + a, width), lowered(n)), (_frac(-(n + 1), width), lowered(n + 1))]
    )


def _check_geronimus_a(n: int) -> Optional[str]:
    width = 2 * n + a + b + 1
    raised = _family(1, 0)
    return _residual(
        J(n),
        [(_frac(n + a + b + 1, width), raised(n)), (_frac(-(n + b), width), raised(n - 1))],
    )


def _check_christoffel_b(n: int) -> Optional[str]:
    width = 2 * n + a + b + 1
    lowered = _family(0, -1)
    return _residual(
        (1 - x) * J(n), [(_frac(n + 1, width), lowered(n + 1)), (_frac(n + b, width), lowered(n))]
    )


def _check_geronimus_b(n: int) -> Optional[str]:
    width = 2 * n + a + b + 1
    raised = _family(0, 1)
    return _residual(
        J(n), [(_frac(n + a + b + 1, width), raised(n)), (_frac(n + a, width), raised(n - 1))]
    )


def _check_x_minus_one_derivative(n: int) -> Optional[str]:
    weight = _frac(n + a + b + 1)
    return _residual(
        (x - 1) * J(n).derive("x"), [(weight, _family(1, 0)(n)), (-weight, J(n))]
    )


def _check_x_derivative(n: int) -> Optional[str]:
    weight = _frac(n + a + b + 1)
    return _residual(x * J(n).derive("x"), [(weight, _family(0, 1)(n)), (-weight, J(n))])


def _check_five_term_lower(n: int) -> Optional[str]:
    return _residual(
        n * _family(0, -1)(n),
        [
            (_frac((n + a + b + 1) * (1 - x)), _family(1, 1)(n - 1)),
            (_frac(-(n * (1 - x) + b)), _family(1, 0)(n - 1)),
        ],
    )


def _check_five_term_upper(n: int) -> Optional[str]:
    return _residual(
        (n + a + 1) * _family(0, 1)(n),
        [(_frac(n + a + b + 2), _family(1, 1)(n)), (_frac(-(n + b + 1)), _family(1, 0)(n))],
    )


_CHECKS: Dict[str, Callable[[int], Optional[str]]] = {
    "de": _check_de,
    "recurrence": _check_recurrence,
    "shift-down": _check_shift_down,
    "shift-up": _check_shift_up,
    "structure": _check_structure,
    "christoffel-a": _check_christoffel_a,
    "geronimus-a": _check_geronimus_a,
    "christoffel-b": _check_christoffel_b,
    "geronimus-b": _check_geronimus_b,
    "x-minus-one-derivative": _check_x_minus_one_derivative,
    "x-derivative": _check_x_derivative,
    "five-term-lower": _check_five_term_lower,
    "five-term-upper": _check_five_term_upper,
}

IDENTITIES = tuple(_CHECKS) + ("orthogonality",)


def _orthogonality_witness(n_max: int) -> Optional[str]:
    for n in range(n_max + 1):
        for m in range(n + 1):
            value = uni_inner(J(n), J(m))
            expected = uni_norm(n) if n == m else ParamFrac()
            if value != expected:
                return f"(n, m) = ({n}, {m}): {value.to_text(compact=True)}"
    return None


def uni_verify(identity_id: str, n_max: int) -> VerificationReport:
    """Check one identity exactly in a and b for every n <= n_max."""
    if identity_id not in IDENTITIES:
        raise UnknownIdentity(f"unknown univariate identity {identity_id!r}")
    watch = Stopwatch()
    if identity_id == "orthogonality":
        witness = _orthogonality_witness(n_max)
    else:
        check = _CHECKS[identity_id]
        witness = None
        for n in range(n_max + 1):
            residual = check(n)
            if residual is not None:
                witness = f"n = {n}: {residual}"
                break
    return outcome(f"univariate-{identity_id}", VARIABLE, SYMBOLIC, witness, watch.elapsed_ms)


def uni_verify_all(n_max: int) -> List[VerificationReport]:
    """Run every identity in IDENTITIES up to n_max."""
    logger.info("verifying %d univariate identities up to n = %d", len(IDENTITIES), n_max)
    return [uni_verify(identity_id, n_max) for identity_id in IDENTITIES]


def rank1_witness(structure_n_max: int = 8) -> Optional[str]:
    """First failing rank-one Jacobi algebra relation for K1 = H, K2 = x, or None."""
    k1, k2 = builtin("K1"), builtin("K2")
    alpha_beta = a + b
    checks = {
        "[K1,[K1,K2]]": (
            bracket(k1, bracket(k1, k2)),
            -2 * antibracket(k1, k2)
            + 2 * k1
            + (alpha_beta * (alpha_beta + 2)) * k2
            - alpha_beta * (a + 1),
        ),
        "[K2,[K2,K1]]": (bracket(k2, bracket(k2, k1)), -2 * (k2 * k2) + 2 * k2),
        "[K1,K2] = K3": (bracket(k1, k2), builtin("K3")),
    }
    for name, (lhs, rhs) in checks.items():
        witness = (lhs - rhs).witness()
        if witness is not None:
            return f"{name}: {witness}"
    for n in range(structure_n_max + 1):
        residual = _check_structure(n)
        if residual is not None:
            return f"K3 on J_{n}: {residual}"
    return None


def rank1_verify() -> VerificationReport:
    """Both rank-one relations, K3 = [K1, K2] and the K3 structure relation for n <= 8."""
    watch = Stopwatch()
    return outcome(
        "rank-one-jacobi-algebra", VARIABLE, SYMBOLIC, rank1_witness(), watch.elapsed_ms
    )
