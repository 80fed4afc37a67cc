# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.
import unittest
from fractions import Fraction
from itertools import islice
from unittest.mock import Mock

from hypothesis import given, settings
from hypothesis import strategies as st
from parameterized import parameterized
from triangle_jacobi.v0.exact import DenominatorVanishes, ParamFrac, frac_eq, symbols
from triangle_jacobi.v0.jacobi2 import J
from triangle_jacobi.v0.shiftalg import (
    DEGREE_GENERATORS,
    DegenerateSampleBudgetExceeded,
    DegreeOp,
    accept_sample,
    dapply,
    dbracket,
    dbuiltin,
    dcompose,
    in_cone,
    l3_from_hatted_relation,
    sample_line,
    sample_points,
    shift_label,
    verify_l3_reconstruction,
)
from triangle_jacobi.v0.weyl import UnknownGenerator

n, k, a, b, c = symbols("n", "k", "a", "b", "c")

COMPOSABLE = ("Lh", "L1h", "X1h", "N1h", "Sp", "Tm")


class TestDegreeOp(unittest.TestCase):
    def test_composition_moves_the_outer_coefficient(self):
        diagonal, step = DegreeOp.diagonal(n), DegreeOp.shift(1, 0)
        self.assertTrue(frac_eq(dcompose(diagonal, step).coefficient(1, 0), n + 1))
        self.assertTrue(frac_eq(dcompose(step, diagonal).coefficient(1, 0), n))
        self.assertEqual(dbracket(diagonal, step), DegreeOp.shift(1, 0))

    def test_shifts_commute(self):
        self.assertEqual(
            dcompose(DegreeOp.shift(1, 0), DegreeOp.shift(0, 1)), DegreeOp.shift(1, 1)
        )
        self.assertFalse(dbracket(dbuiltin("Sp"), dbuiltin("Tm")))

    @settings(max_examples=20, derandomize=True)
    @given(
        st.sampled_from(COMPOSABLE), st.sampled_from(COMPOSABLE), st.sampled_from(COMPOSABLE)
    )
    def test_composition_is_associative(self, left, middle, right):
        first, second, third = dbuiltin(left), dbuiltin(middle), dbuiltin(right)
        self.assertEqual(
            dcompose(dcompose(first, second), third), dcompose(first, dcompose(second, third))
        )

    def test_diagonal_generators_commute(self):
        self.assertFalse(dbracket(dbuiltin("Lh"), dbuiltin("L1h")))

    def test_multiplication_by_scalars(self):
        op = dbuiltin("X1h")
        self.assertEqual(2 * op, op + op)
        self.assertFalse(op - op)

    def test_with_coefficient(self):
        op = DegreeOp.identity().with_coefficient((1, 0), a)
        self.assertTrue(frac_eq(op.coefficient(1, 0), a))
        self.assertTrue(frac_eq(op.coefficient(0, 0), 1))
        self.assertTrue(op.coefficient(0, 1).is_zero())

    def test_row(self):
        point = {"a": 1, "b": 2, "c": 3, "n": 4, "k": 1}
        row = dbuiltin("Lh").row(point)
        self.assertEqual(row, {(0, 0): -4 * (4 + 6 + 2)})

    def test_witness(self):
        self.assertIsNone(DegreeOp().witness())
        self.assertEqual(DegreeOp.shift(1, -1).witness(), "S+T-: 1")

    def test_every_generator_builds(self):
        for name in DEGREE_GENERATORS:
            self.assertIsInstance(dbuiltin(name), DegreeOp)

    def test_unknown_generator(self):
        with self.assertRaises(UnknownGenerator):
            dbuiltin("L2h")


class TestLattice(unittest.TestCase):
    @parameterized.expand(
        [
            ((0, 0), True),
            ((3, 3), True),
            ((3, 1), True),
            ((1, 2), False),
            ((-1, 0), False),
            ((2, -1), False),
        ]
    )
    def test_in_cone(self, index, expected):
        self.assertEqual(in_cone(*index), expected)

    @parameterized.expand(
        [((0, 0), "I"), ((1, 0), "S+"), ((-1, 1), "S-T+"), ((0, -2), "T-^2"), ((2, 1), "S+^2T+")]
    )
    def test_shift_label(self, shift, expected):
        self.assertEqual(shift_label(shift), expected)

    def test_dapply_drops_out_of_cone_vectors(self):
        down = DegreeOp.shift(-1, 0)
        self.assertTrue(dapply(down, 0, 0, J).is_zero())
        self.assertTrue(frac_eq(dapply(down, 2, 1, J), J(1, 1)))

    def test_dapply_diagonal(self):
        value = dapply(dbuiltin("L1h"), 2, 1, J)
        self.assertTrue(frac_eq(value, -(b + c + 2) * J(2, 1)))


class TestSampling(unittest.TestCase):
    def test_points_are_deterministic(self):
        first = list(sample_points(42, 5))
        second = list(sample_points(42, 5))
        self.assertEqual(first, second)
        self.assertNotEqual(first, list(sample_points(43, 5)))

    def test_points_are_rational(self):
        for point in sample_points(7, 20, names=("a", "b")):
            self.assertEqual(set(point), {"a", "b"})
            for value in point.values():
                self.assertIsInstance(value, Fraction)

    def test_endless_stream(self):
        self.assertEqual(len(list(islice(sample_points(1), 30))), 30)

    def test_line_points_are_collinear(self):
        points = list(islice(sample_line(42, names=("a", "b", "c")), 4))
        self.assertEqual(points, list(islice(sample_line(42, names=("a", "b", "c")), 4)))
        steps = [
            {name: later[name] - earlier[name] for name in ("a", "b", "c")}
            for earlier, later in zip(points, points[1:])
        ]
        self.assertEqual(steps[0], steps[1])
        self.assertEqual(steps[1], steps[2])
        self.assertTrue(any(steps[0].values()))
        self.assertEqual(len({tuple(point.values()) for point in points}), 4)

    def test_accept_sample_redraws_degenerate_points(self):
        evaluate = Mock(side_effect=[DenominatorVanishes("x"), DenominatorVanishes("y"), 5])
        self.assertEqual(accept_sample(sample_points(42), evaluate), 5)
        self.assertEqual(evaluate.call_count, 3)

    def test_accept_sample_budget(self):
        evaluate = Mock(side_effect=DenominatorVanishes("always"))
        with self.assertRaises(DegenerateSampleBudgetExceeded):
            accept_sample(sample_points(42), evaluate, budget=4)
        self.assertEqual(evaluate.call_count, 4)

    def test_accept_sample_on_a_real_pole(self):
        def evaluate(point):
            return ParamFrac(1, a - point["a"]).evaluate(point)

        with self.assertRaises(DegenerateSampleBudgetExceeded):
            accept_sample(sample_points(3), evaluate)


class TestHattedRelations(unittest.TestCase):
    def test_l3_reconstruction(self):
        self.assertEqual(l3_from_hatted_relation(), dbuiltin("L3h"))
        self.assertTrue(verify_l3_reconstruction().passed)
