# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.
import unittest
from fractions import Fraction
from unittest.mock import patch

import pytest
from parameterized import parameterized
from triangle_jacobi.v0.exact import ParamFrac, frac_eq, grouped_text, symbols
from triangle_jacobi.v0.jacobi2 import (
    BoundaryFailure,
    J,
    bi_jacobi,
    bispectral_reports,
    check_recurrence,
    eigenvalues,
    gram,
    gram_at,
    gram_degree_bound,
    indices,
    inner,
    inner_at,
    norm_h,
    scalar_action_value,
    shifted_family,
    swapped_family,
    triangle_moment,
    verify_eigen,
    verify_orthogonality,
    verify_recurrence,
    verify_saction,
    verify_scalar_action,
)
from triangle_jacobi.v0.report import SAMPLED, SYMBOLIC
from triangle_jacobi.v0.weyl import builtin

x, y, a, b, c = symbols("x", "y", "a", "b", "c")
u, s = b + c, a + b + c


class TestBiJacobi(unittest.TestCase):
    def test_constant(self):
        self.assertEqual(J(0, 0), 1)

    def test_degree_one(self):
        self.assertEqual(J(1, 0), (a + 1) - (s + 3) * x)
        self.assertEqual(J(1, 1), (b + 1) * (1 - x) - (b + c + 2) * y)
        self.assertEqual(grouped_text(J(1, 1)), "(b+1) - (b+1)*x - (b+c+2)*y")

    @parameterized.expand([((1, 2),), ((-1, 0),), ((3, -1),)])
    def test_outside_the_cone_is_zero(self, index):
        self.assertFalse(J(*index))

    @parameterized.expand([((2, 0),), ((2, 1),), ((3, 2),), ((4, 4),)])
    def test_total_degree(self, index):
        self.assertEqual(bi_jacobi(*index).total_degree, index[0])
        self.assertEqual(J(*index).total_degree(("x", "y")), index[0])

    def test_indices(self):
        self.assertEqual(list(indices(1)), [(0, 0), (1, 0), (1, 1)])
        self.assertEqual(len(list(indices(6))), 28)

    def test_shifted_family(self):
        self.assertEqual(shifted_family(1, 0, 0)(1, 0), (a + 2) - (s + 4) * x)
        self.assertEqual(shifted_family()(2, 1), J(2, 1))

    def test_swapped_family(self):
        self.assertEqual(swapped_family(0, 0), 1)
        self.assertEqual(swapped_family(1, 0), (c + 1) - (s + 3) * (1 - x - y))

    def test_swapped_family_diagonalizes_l3(self):
        l3, laplacian = builtin("L3"), builtin("L")
        for n, k in indices(3):
            poly = swapped_family(n, k)
            self.assertEqual(l3.apply(poly), -k * (k + a + b + 1) * poly)
            self.assertEqual(laplacian.apply(poly), -n * (n + s + 2) * poly)


class TestInnerProduct(unittest.TestCase):
    def test_moments(self):
        self.assertTrue(frac_eq(triangle_moment(0, 0), 1))
        self.assertTrue(frac_eq(triangle_moment(1, 0), ParamFrac(a + 1, s + 3)))
        self.assertTrue(frac_eq(triangle_moment(0, 1), ParamFrac(b + 1, s + 3)))

    def test_normalized(self):
        self.assertTrue(frac_eq(inner(J(0, 0), J(0, 0)), 1))
        self.assertTrue(frac_eq(norm_h(0, 0), 1))

    def test_norms_in_closed_form(self):
        self.assertTrue(frac_eq(norm_h(1, 0), ParamFrac((u + 2) * (a + 1), s + 4)))
        self.assertTrue(
            frac_eq(norm_h(1, 1), ParamFrac((u + 2) * (b + 1) * (c + 1), [s + 3, s + 4]))
        )

    @parameterized.expand([((1, 0),), ((1, 1),), ((2, 1),)])
    def test_norm_matches_inner_product(self, index):
        self.assertTrue(frac_eq(inner(J(*index), J(*index)), norm_h(*index)))

    def test_orthogonal_pairs(self):
        self.assertTrue(inner(J(1, 0), J(1, 1)).is_zero())
        self.assertTrue(inner(J(2, 2), J(1, 0)).is_zero())

    def test_norm_outside_the_cone(self):
        with self.assertRaises(ValueError):
            norm_h(1, 2)

    def test_inner_at_a_point(self):
        point = {"a": 1, "b": 2, "c": 3}
        self.assertEqual(inner_at(J(1, 0), J(1, 0), point), norm_h(1, 0).evaluate(point))
        self.assertEqual(inner_at(J(1, 0), J(1, 1), point), 0)


class TestGram(unittest.TestCase):
    def test_single_entry(self):
        matrix = gram(0)
        self.assertEqual(matrix.rows, [["1"]])
        self.assertTrue(matrix.passed)

    def test_degree_one(self):
        matrix = gram(1)
        self.assertTrue(matrix.passed)
        self.assertEqual(matrix.indices, [(0, 0), (1, 0), (1, 1)])
        self.assertEqual(matrix.rows[1][1], norm_h(1, 0).to_text(compact=True))
        self.assertEqual(matrix.rows[2][2], norm_h(1, 1).to_text(compact=True))
        for i in range(3):
            for j in range(3):
                if i != j:
                    self.assertEqual(matrix.rows[i][j], "0")

    def test_sampled(self):
        matrix = gram(2, mode=SAMPLED, seed=42)
        self.assertTrue(matrix.passed, matrix.witness)
        self.assertEqual(matrix.samples, matrix.degree_bound + 1)
        self.assertEqual(matrix.rows[0][1], "0")

    def test_degree_bound(self):
        # J(1, 1) x J(1, 1): deg 1 + 1 + 2 moments, over the norm denominator (s+3)(s+4).
        self.assertEqual(gram_degree_bound([(0, 0), (1, 0), (1, 1)]), 6)
        self.assertEqual(gram(1, mode=SYMBOLIC).degree_bound, None)

    def test_too_few_samples(self):
        matrix = gram(1, mode=SAMPLED, samples=6)
        self.assertFalse(matrix.passed)
        self.assertEqual(matrix.witness, "6 samples do not exceed the degree bound 6")
        self.assertTrue(gram(1, mode=SAMPLED, samples=7).passed)

    def test_wrong_norm_is_caught(self):
        def shifted_norm(n, k):
            return norm_h(n, k) + (1 if (n, k) == (1, 1) else 0)

        with patch("triangle_jacobi.v0.jacobi2.norm_h", shifted_norm):
            matrix = gram(1, mode=SAMPLED)
        self.assertFalse(matrix.passed)
        self.assertTrue(matrix.witness.startswith("degree bound 6: (1, 1) x (1, 1): "))

    def test_gram_at_matches_inner_at(self):
        point = {"a": Fraction(1, 2), "b": Fraction(2), "c": Fraction(-1, 3)}
        entries = gram_at([(0, 0), (1, 0), (1, 1)], point)
        self.assertEqual(entries[(1, 2)], inner_at(J(1, 0), J(1, 1), point))
        self.assertEqual(entries[(1, 1)], norm_h(1, 0).evaluate(point))
        self.assertEqual(entries[(0, 0)], 1)

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            gram(-1)
        with self.assertRaises(ValueError):
            gram(1, mode="numeric")

    @pytest.mark.slow
    def test_orthogonality_to_degree_six(self):
        matrix = gram(6, mode=SAMPLED, seed=42)
        self.assertTrue(matrix.passed, matrix.witness)
        self.assertLessEqual(matrix.degree_bound, 64)
        self.assertGreater(matrix.samples, matrix.degree_bound)
        self.assertEqual(len(matrix.indices), 28)

    @pytest.mark.slow
    def test_orthogonality_report_to_degree_six(self):
        report = verify_orthogonality(6, SAMPLED, samples=50, seed=7)
        self.assertTrue(report.passed, report.witness)
        self.assertEqual(report.mode, SAMPLED)

    def test_orthogonality_report(self):
        report = verify_orthogonality(2, SYMBOLIC)
        self.assertEqual(report.relation, "orthogonality")
        self.assertTrue(report.passed, report.witness)


class TestBispectral(unittest.TestCase):
    def test_eigenvalues(self):
        on_l, on_l1 = eigenvalues(2, 1)
        self.assertEqual(on_l, -2 * (s + 4))
        self.assertEqual(on_l1, -(u + 2))

    def test_eigen_equations(self):
        self.assertTrue(verify_eigen(4).passed)

    @parameterized.expand([("X1",), ("X3",)])
    def test_recurrence(self, which):
        report = verify_recurrence(which, 4)
        self.assertEqual(report.relation, f"recurrence-{which}")
        self.assertTrue(report.passed, report.witness)

    def test_single_recurrence_step(self):
        check_recurrence("X1", 0, 0)
        check_recurrence("X3", 2, 2)

    def test_unknown_recurrence(self):
        with self.assertRaises(ValueError):
            verify_recurrence("X2", 2)

    def test_boundary_failure_carries_the_index(self):
        failure = BoundaryFailure(3, 1, "a+1")
        self.assertEqual((failure.n, failure.k), (3, 1))
        self.assertIn("a+1", str(failure))

    @parameterized.expand([(name,) for name in ("s1", "s1s", "s2", "s2s", "s3", "s3s")])
    def test_s_actions(self, name):
        report = verify_saction(name, 3)
        self.assertEqual(report.relation, f"saction-{name}")
        self.assertTrue(report.passed, report.witness)

    def test_scalar_action(self):
        self.assertEqual(
            scalar_action_value(0, 0), c * (b + 1) - (a + b + c + a * b + a * c + b * c)
        )
        self.assertTrue(verify_scalar_action(3).passed)

    @pytest.mark.slow
    def test_bispectral_suite(self):
        reports = bispectral_reports(6)
        self.assertEqual(
            [report.relation for report in reports],
            ["bispectral-eigen", "recurrence-X1", "recurrence-X3", "eigenvalue-separation"],
        )
        self.assertEqual([report for report in reports if not report.passed], [])
