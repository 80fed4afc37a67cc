# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.
import unittest

from parameterized import parameterized
from triangle_jacobi.v0.report import (
    BOTH,
    LIBAPI,
    LIBPATCH,
    DEGREE,
    FAIL,
    PASS,
    REPORT_VERSION,
    SAMPLED,
    SYMBOLIC,
    VARIABLE,
    InvalidReportError,
    Stopwatch,
    VerificationReport,
    build_document,
    outcome,
    reports_from_document,
    summarize,
    validate_document,
)

SHA = "0" * 64


class TestOutcome(unittest.TestCase):
    def test_pass_without_witness(self):
        report = outcome("L_X1", VARIABLE, SYMBOLIC, None, 1.23456)
        self.assertTrue(report.passed)
        self.assertEqual(report.status, PASS)
        self.assertEqual(report.elapsed_ms, 1.235)

    def test_fail_with_witness(self):
        with self.assertLogs("triangle_jacobi.v0.report", level="ERROR") as logs:
            report = outcome("L_X1", DEGREE, SAMPLED, "S+: 1")
        self.assertFalse(report.passed)
        self.assertEqual(report.status, FAIL)
        self.assertIn("S+: 1", logs.output[0])

    def test_without_timing(self):
        report = outcome("L_X1", BOTH, SYMBOLIC, None, 12.0)
        self.assertEqual(report.without_timing().elapsed_ms, 0)
        self.assertEqual(report.without_timing().relation, "L_X1")

    def test_field_order(self):
        report = outcome("L_X1", VARIABLE, SYMBOLIC, None)
        self.assertEqual(
            list(report.to_dict()),
            ["relation", "representation", "mode", "status", "witness", "elapsed_ms"],
        )

    def test_stopwatch(self):
        self.assertGreaterEqual(Stopwatch().elapsed_ms, 0)


class TestDocument(unittest.TestCase):
    def setUp(self):
        self.reports = [
            outcome("L_X1", VARIABLE, SYMBOLIC, None),
            outcome("L_X1", DEGREE, SAMPLED, None),
            outcome("L_X3", DEGREE, SAMPLED, "S+T-: 1"),
        ]

    def test_summary(self):
        self.assertEqual(summarize(self.reports), {"total": 3, "passed": 2, "failed": 1})
        self.assertEqual(summarize([]), {"total": 0, "passed": 0, "failed": 0})

    def test_build_document(self):
        document = build_document(self.reports, {"n_max": 3}, SHA)
        self.assertEqual(document["version"], REPORT_VERSION)
        self.assertEqual(document["catalogue_sha256"], SHA)
        self.assertEqual(document["config"], {"n_max": 3})
        self.assertEqual(document["summary"]["failed"], 1)
        self.assertEqual(len(document["reports"]), 3)

    def test_version_is_the_library_version(self):
        self.assertEqual(REPORT_VERSION, f"v{LIBAPI}.{LIBPATCH}")
        self.assertRegex(REPORT_VERSION, r"^v\d+\.\d+$")

    def test_reports_come_back(self):
        document = build_document(self.reports, {}, SHA)
        self.assertEqual(reports_from_document(document), self.reports)

    @parameterized.expand(
        [
            ("short digest", "catalogue_sha256", "abc"),
            ("missing summary", "summary", None),
            ("extra key", "extra", 1),
        ]
    )
    def test_invalid_document(self, _, key, value):
        document = build_document(self.reports, {}, SHA)
        if value is None:
            del document[key]
        else:
            document[key] = value
        with self.assertRaises(InvalidReportError):
            validate_document(document)

    def test_invalid_report_entry(self):
        document = build_document(self.reports, {}, SHA)
        document["reports"][0]["mode"] = "numeric"
        with self.assertRaises(InvalidReportError):
            reports_from_document(document)

    def test_build_rejects_a_bad_digest(self):
        with self.assertRaises(InvalidReportError):
            build_document(self.reports, {}, "not-a-digest")

    def test_report_type(self):
        document = build_document(self.reports[:1], {}, SHA)
        self.assertIsInstance(reports_from_document(document)[0], VerificationReport)
