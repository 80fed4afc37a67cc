# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.
import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st
from parameterized import parameterized
from triangle_jacobi.v0.exact import (
    DenominatorVanishes,
    IncompleteAssignment,
    ParamFrac,
    ParamPoly,
    PolynomialSyntaxError,
    UnknownIndeterminate,
    frac_eq,
    grouped_text,
    pochhammer,
    symbols,
)

from .helpers import SMALL_NAMES, small_polys, small_scalars

x, y, a, b, c = symbols("x", "y", "a", "b", "c")

FACTORS = (a + 2, b + 1, a - b + 3, 2 * a + b + 1, x + y + 1)


def small_points() -> st.SearchStrategy:
    return st.fixed_dictionaries({name: small_scalars() for name in SMALL_NAMES})


class TestParamPoly(unittest.TestCase):
    @settings(max_examples=200, derandomize=True)
    @given(small_polys(), small_polys(), small_polys())
    def test_ring_axioms(self, p, q, r):
        self.assertEqual(p + q, q + p)
        self.assertEqual(p * q, q * p)
        self.assertEqual((p + q) + r, p + (q + r))
        self.assertEqual((p * q) * r, p * (q * r))
        self.assertEqual(p * (q + r), p * q + p * r)
        self.assertEqual(p - p, ParamPoly())

    @settings(max_examples=100, derandomize=True)
    @given(small_polys(), small_polys(), small_points())
    def test_evaluation_is_a_ring_homomorphism(self, p, q, point):
        self.assertEqual((p + q).evaluate(point), p.evaluate(point) + q.evaluate(point))
        self.assertEqual((p * q).evaluate(point), p.evaluate(point) * q.evaluate(point))
        self.assertEqual((-p).evaluate(point), -p.evaluate(point))
        self.assertEqual(ParamPoly.constant(1).evaluate(point), 1)

    @given(small_polys(), small_polys())
    def test_derivation_rule(self, p, q):
        for name in ("x", "a"):
            self.assertEqual((p * q).derive(name), p.derive(name) * q + p * q.derive(name))

    @given(small_polys())
    def test_text_parses_back(self, p):
        self.assertEqual(ParamPoly.parse(p.to_text()), p)
        self.assertEqual(ParamPoly.parse(p.to_text(compact=True)), p)

    def test_zero_coefficients_are_dropped(self):
        self.assertFalse(x - x)
        self.assertEqual((x + 1) * (x - 1), x**2 - 1)
        self.assertEqual(len((a + b - a).terms), 1)

    @parameterized.expand(
        [
            ("sum", b + c + 2, "b+c+2"),
            ("negative lead", -(b + 1), "-b-1"),
            ("fraction", a / 2 - Fraction(1, 3), "1/2*a-1/3"),
            ("power", x**2 * y, "x^2*y"),
            ("zero", ParamPoly(), "0"),
        ]
    )
    def test_compact_text(self, _, poly, expected):
        self.assertEqual(poly.to_text(compact=True), expected)

    def test_spaced_text(self):
        self.assertEqual((a - b + 1).to_text(), "a - b + 1")

    def test_evaluate(self):
        poly = x * a + Fraction(1, 2) * b
        self.assertEqual(poly.evaluate({"x": 2, "a": 3, "b": 1}), Fraction(13, 2))
        with self.assertRaises(IncompleteAssignment):
            poly.evaluate({"x": 2})

    def test_substitute(self):
        self.assertEqual((x + y).substitute({"y": 1 - x - y}), 1 - y)
        self.assertEqual((a * b).substitute({"a": 2}), 2 * b)

    def test_degrees(self):
        poly = x**2 * a + y
        self.assertEqual(poly.total_degree(), 3)
        self.assertEqual(poly.total_degree(("x", "y")), 2)
        self.assertEqual(poly.degree("a"), 1)
        self.assertEqual(ParamPoly().total_degree(), -1)

    def test_pochhammer(self):
        self.assertEqual(pochhammer(a, 0), 1)
        self.assertEqual(pochhammer(1, 3), 6)
        self.assertEqual(pochhammer(a, 2), a * a + a)
        with self.assertRaises(ValueError):
            pochhammer(a, -1)

    def test_unknown_indeterminate(self):
        with self.assertRaises(UnknownIndeterminate):
            ParamPoly.variable("z")
        with self.assertRaises(UnknownIndeterminate):
            ParamPoly.parse("z + 1")

    def test_syntax_error_position(self):
        with self.assertRaises(PolynomialSyntaxError) as raised:
            ParamPoly.parse("x +* y")
        self.assertEqual(raised.exception.position, 3)

        with self.assertRaises(PolynomialSyntaxError) as raised:
            ParamPoly.parse("x $ y")
        self.assertEqual(raised.exception.position, 2)

    def test_syntax_error_is_value_error(self):
        with self.assertRaises(ValueError):
            ParamPoly.parse("")

    def test_division_by_constant_only(self):
        self.assertEqual(ParamPoly.parse("x/2"), x / 2)
        with self.assertRaises(PolynomialSyntaxError):
            ParamPoly.parse("x/y")
        with self.assertRaises(DenominatorVanishes):
            x / 0


class TestParamFrac(unittest.TestCase):
    def test_equality_by_cross_multiplication(self):
        self.assertTrue(frac_eq(ParamFrac(a * a - 1, a - 1), a + 1))
        self.assertEqual(ParamFrac(2 * a, 2 * b), ParamFrac(a, b))
        self.assertFalse(frac_eq(ParamFrac(a, b), ParamFrac(b, a)))

    @settings(max_examples=100, derandomize=True)
    @given(
        small_polys(),
        small_polys(),
        st.sampled_from(FACTORS),
        st.sampled_from(FACTORS),
        st.sampled_from(FACTORS),
    )
    def test_frac_eq_is_an_equivalence(self, p, q, den, first, second):
        f = ParamFrac(p, den)
        g = ParamFrac(p * first, [den, first])
        h = ParamFrac(p * first * second, [second, den, first])
        other = ParamFrac(q, second)
        for value in (f, g, h, other):
            self.assertTrue(frac_eq(value, value))
        for left in (f, g, h):
            self.assertEqual(frac_eq(left, other), frac_eq(other, left))
        self.assertTrue(frac_eq(f, g) and frac_eq(g, h))
        self.assertTrue(frac_eq(f, h))
        if frac_eq(f, other):
            self.assertTrue(frac_eq(h, other))

    def test_cancel(self):
        frac = ParamFrac(a * a - 1, a - 1).cancel()
        self.assertEqual(frac.factors, ())
        self.assertEqual(frac.num, a + 1)

    def test_arithmetic(self):
        half = ParamFrac(1, a + 1)
        self.assertTrue(frac_eq(half + half, ParamFrac(2, a + 1)))
        self.assertTrue(frac_eq(half * (a + 1), 1))
        self.assertTrue(frac_eq(half - half, 0))

    def test_zero_denominator(self):
        with self.assertRaises(DenominatorVanishes):
            ParamFrac(1, 0)
        with self.assertRaises(DenominatorVanishes):
            ParamFrac(1, a - 1).evaluate({"a": 1})
        with self.assertRaises(ZeroDivisionError):
            ParamFrac(1, a - 1).substitute({"a": 1})

    def test_evaluate(self):
        self.assertEqual(ParamFrac(a, b + 1).evaluate({"a": 3, "b": 1}), Fraction(3, 2))


class TestGroupedText(unittest.TestCase):
    @parameterized.expand(
        [
            ("constant", ParamPoly.constant(1), "1"),
            ("zero", ParamPoly(), "0"),
            (
                "degree one",
                (b + 1) * (1 - x) - (b + c + 2) * y,
                "(b+1) - (b+1)*x - (b+c+2)*y",
            ),
            ("bare monomial", x * y, "x*y"),
        ]
    )
    def test_grouped_text(self, _, poly, expected):
        self.assertEqual(grouped_text(poly), expected)
