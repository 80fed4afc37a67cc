# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st
from parameterized import parameterized
from triangle_jacobi.v0.exact import ParamPoly, symbols
from triangle_jacobi.v0.weyl import (
    GENERATORS,
    DiffOp,
    NotSpecializable,
    UnknownGenerator,
    antibracket,
    bracket,
    builtin,
    conjugate_check,
    reflect,
    verify_factorizations,
)

from .helpers import small_polys, small_scalars

x, y, a, b, c = symbols("x", "y", "a", "b", "c")

OPERATOR_NAMES = ("L", "L1", "L3", "X1", "X3", "N1", "N3", "M3", "J1", "s2", "s3s")


class TestDiffOp(unittest.TestCase):
    def test_canonical_commutator(self):
        dx, dy = DiffOp.partial(1, 0), DiffOp.partial(0, 1)
        self.assertEqual(bracket(dx, DiffOp.multiplication(x)), DiffOp.identity())
        self.assertEqual(bracket(dy, DiffOp.multiplication(y)), DiffOp.identity())
        self.assertFalse(bracket(dx, DiffOp.multiplication(y)))
        self.assertFalse(bracket(dx, dy))

    def test_anticommutator(self):
        dx, mult = DiffOp.partial(1, 0), DiffOp.multiplication(x)
        self.assertEqual(antibracket(dx, mult), 2 * x * dx + DiffOp.identity())

    @settings(max_examples=100, derandomize=True)
    @given(st.sampled_from(OPERATOR_NAMES), st.sampled_from(OPERATOR_NAMES), small_polys())
    def test_composition_acts_as_composition(self, left, right, poly):
        first, second = builtin(left), builtin(right)
        self.assertEqual((first * second).apply(poly), first.apply(second.apply(poly)))

    @settings(max_examples=100, derandomize=True)
    @given(st.sampled_from(OPERATOR_NAMES), st.sampled_from(OPERATOR_NAMES))
    def test_bracket_is_antisymmetric(self, left, right):
        first, second = builtin(left), builtin(right)
        self.assertEqual(bracket(first, second), -bracket(second, first))

    @settings(max_examples=50, derandomize=True)
    @given(
        st.sampled_from(OPERATOR_NAMES),
        st.sampled_from(OPERATOR_NAMES),
        st.sampled_from(OPERATOR_NAMES),
        small_scalars(),
    )
    def test_bracket_is_bilinear(self, left, middle, right, scale):
        first, second, third = builtin(left), builtin(middle), builtin(right)
        self.assertEqual(
            bracket(first + scale * second, third),
            bracket(first, third) + scale * bracket(second, third),
        )
        self.assertEqual(
            bracket(third, first + scale * second),
            bracket(third, first) + scale * bracket(third, second),
        )

    @settings(max_examples=50, derandomize=True)
    @given(
        st.sampled_from(OPERATOR_NAMES),
        st.sampled_from(OPERATOR_NAMES),
        st.sampled_from(OPERATOR_NAMES),
    )
    def test_jacobi_identity(self, left, middle, right):
        first, second, third = builtin(left), builtin(middle), builtin(right)
        cyclic = (
            bracket(first, bracket(second, third))
            + bracket(second, bracket(third, first))
            + bracket(third, bracket(first, second))
        )
        self.assertFalse(cyclic)

    @given(st.sampled_from(OPERATOR_NAMES), small_polys(), small_polys())
    def test_operators_are_linear(self, name, p, q):
        op = builtin(name)
        self.assertEqual(op.apply(p + q), op.apply(p) + op.apply(q))

    def test_scalar_embedding(self):
        op = builtin("L1")
        self.assertEqual(op + 2, op + 2 * DiffOp.identity())
        self.assertEqual(a * op, DiffOp.multiplication(a) * op)

    def test_apply(self):
        self.assertEqual(builtin("X1").apply(y), x * y)
        self.assertEqual(builtin("s2").apply(x), x + a * x)
        self.assertEqual(builtin("L1").apply(1), ParamPoly())

    @parameterized.expand([(name,) for name in OPERATOR_NAMES])
    def test_text_parses_back(self, name):
        op = builtin(name)
        self.assertEqual(DiffOp.parse(op.to_text()), op)

    def test_witness(self):
        self.assertIsNone(DiffOp().witness())
        self.assertEqual(DiffOp.partial(1, 0).witness(), "(1)*dx")

    def test_with_coefficient(self):
        op = builtin("L").with_coefficient((1, 0), 0)
        self.assertEqual(op.coefficient(1, 0), ParamPoly())
        self.assertEqual(op.coefficient(0, 1), builtin("L").coefficient(0, 1))

    def test_substitute_parameters_only(self):
        op = builtin("s2").substitute({"a": 3})
        self.assertEqual(op.coefficient(0, 0), 3)
        with self.assertRaises(ValueError):
            builtin("s2").substitute({"x": 1})

    def test_specialize(self):
        self.assertEqual(builtin("X1").specialize("x", 1), DiffOp.identity())
        with self.assertRaises(NotSpecializable):
            builtin("L2").specialize("x", 1)

    def test_negative_order_rejected(self):
        with self.assertRaises(ValueError):
            DiffOp({(-1, 0): x})


class TestBuiltins(unittest.TestCase):
    def test_every_generator_builds(self):
        for name in GENERATORS:
            self.assertIsInstance(builtin(name), DiffOp)

    def test_unknown_generator(self):
        with self.assertRaises(UnknownGenerator):
            builtin("L4")

    def test_laplacian_is_the_sum(self):
        self.assertEqual(builtin("L"), builtin("L1") + builtin("L2") + builtin("L3"))

    def test_vanishing_generators(self):
        self.assertFalse(builtin("M1"))
        self.assertFalse(builtin("J3"))

    def test_defining_commutators(self):
        self.assertEqual(bracket(builtin("L"), builtin("X1")), builtin("N1"))
        self.assertEqual(bracket(builtin("L1"), builtin("X3")), builtin("M3"))
        self.assertEqual(bracket(builtin("L3"), builtin("X1")), builtin("J1"))


class TestReflect(unittest.TestCase):
    @parameterized.expand([(name,) for name in OPERATOR_NAMES])
    def test_involution(self, name):
        op = builtin(name)
        self.assertEqual(reflect(reflect(op)), op)

    def test_coordinates(self):
        self.assertEqual(reflect(builtin("X1")), builtin("X1"))
        self.assertEqual(reflect(builtin("X2")), builtin("X3"))

    def test_reflect_commutes_with_composition(self):
        left, right = builtin("L1"), builtin("N3")
        self.assertEqual(reflect(left * right), reflect(left) * reflect(right))


class TestOperatorIdentities(unittest.TestCase):
    def test_factorizations(self):
        reports = verify_factorizations()
        self.assertEqual(len(reports), 13)
        failed = [report for report in reports if not report.passed]
        self.assertEqual(failed, [])

    @parameterized.expand([(1,), (2,), (3,)])
    def test_conjugation(self, index):
        self.assertTrue(conjugate_check(index, degree=4))

    def test_conjugation_unknown_index(self):
        with self.assertRaises(UnknownGenerator):
            conjugate_check(4)
