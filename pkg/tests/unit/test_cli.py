# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.
import io
import json
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path
from unittest.mock import patch

import pytest
from triangle_jacobi.v0.report import SAMPLED, outcome, validate_document

import cli
from config import Config, load_run_config

from .helpers import CATALOGUE_PATH


def run_main(*argv):
    out = io.StringIO()
    with redirect_stdout(out):
        code = cli.main(list(argv))
    return code, out.getvalue()


class TestPoly(unittest.TestCase):
    def test_constant(self):
        self.assertEqual(run_main("poly", "0", "0"), (0, "1\n"))

    def test_grouped(self):
        code, out = run_main("poly", "1", "1")
        self.assertEqual(code, 0)
        self.assertEqual(out, "(b+1) - (b+1)*x - (b+c+2)*y\n")

    def test_outside_the_cone(self):
        code, out = run_main("poly", "1", "2")
        self.assertEqual(code, Config.ExitCode.USAGE)
        self.assertEqual(out, "")


class TestGram(unittest.TestCase):
    def test_single_entry(self):
        self.assertEqual(run_main("gram", "0"), (0, '[["1"]]\n'))

    def test_degree_one_is_diagonal(self):
        code, out = run_main("gram", "1")
        rows = json.loads(out)
        self.assertEqual(code, 0)
        self.assertEqual(len(rows), 3)
        self.assertEqual([rows[0][1], rows[0][2], rows[1][2]], ["0", "0", "0"])

    def test_negative_degree(self):
        code, out = run_main("gram", "-1")
        self.assertEqual(code, Config.ExitCode.USAGE)
        self.assertEqual(out, "")


class TestVerify(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.report = Path(self.tmp.name) / "report.json"

    def verify(self, *extra):
        code, _ = run_main(
            "verify", "--out", str(self.report), "--log-level", "WARNING", *extra
        )
        return code

    def test_missing_catalogue(self):
        code = self.verify("--catalogue", str(Path(self.tmp.name) / "missing.txt"))
        self.assertEqual(code, Config.ExitCode.USAGE)
        self.assertFalse(self.report.exists())

    def test_invalid_option(self):
        self.assertEqual(self.verify("--samples", "0"), Config.ExitCode.USAGE)

    def test_malformed_catalogue(self):
        catalogue = Path(self.tmp.name) / "bad.txt"
        catalogue.write_text("L_X1 [L,X1] = N1\n")
        self.assertEqual(self.verify("--catalogue", str(catalogue)), Config.ExitCode.USAGE)

    def test_report_document(self):
        code = self.verify("--suite", "jacobi-identity", "--catalogue", str(CATALOGUE_PATH))
        self.assertEqual(code, Config.ExitCode.PASSED)
        document = json.loads(self.report.read_text())
        validate_document(document)
        self.assertEqual(document["summary"], {"total": 1, "passed": 1, "failed": 0})
        self.assertEqual(document["config"]["suite"], "jacobi-identity")
        self.assertEqual(document["reports"][0]["elapsed_ms"], 0)
        self.assertFalse(self.report.with_name("report.json.tmp").exists())

    def test_reruns_are_byte_identical(self):
        self.verify("--suite", "jacobi-identity", "--seed", "7")
        first = self.report.read_bytes()
        self.verify("--suite", "jacobi-identity", "--seed", "7", "--workers", "2")
        self.assertEqual(self.report.read_bytes(), first)

    def test_failures_set_the_exit_status(self):
        failing = [outcome("broken", "variable", "symbolic", "x")]
        with patch.dict(cli.SUITES, {Config.Suites.SYMMETRY: lambda run, catalogue: failing}):
            code = self.verify("--suite", "symmetry")
        self.assertEqual(code, Config.ExitCode.FAILED)
        self.assertEqual(json.loads(self.report.read_text())["summary"]["failed"], 1)

    def test_no_report_file(self):
        code, _ = run_main("verify", "--suite", "jacobi-identity", "--out", "")
        self.assertEqual(code, Config.ExitCode.PASSED)

    def test_orthogonality_samples_reach_the_check(self):
        sampled = ("--suite", "orthogonality", "--nmax", "1", "--mode", "sampled")
        code = self.verify(*sampled, "--samples", "6")
        self.assertEqual(code, Config.ExitCode.FAILED)
        document = json.loads(self.report.read_text())
        self.assertEqual(document["config"]["samples"], 6)
        self.assertEqual(
            document["reports"][0]["witness"], "6 samples do not exceed the degree bound 6"
        )
        code = self.verify(*sampled, "--samples", "7")
        self.assertEqual(code, Config.ExitCode.PASSED)

    @pytest.mark.slow
    def test_appendix_a_suite(self):
        code, _ = run_main("verify", "--suite", "appendixA", "--nmax", "10", "--out", "")
        self.assertEqual(code, Config.ExitCode.PASSED)


class TestRunSuites(unittest.TestCase):
    def test_univariate_suite(self):
        run = load_run_config({"suite": "univariate", "nmax": 2, "out": ""})
        reports = cli.run_suites(run, [])
        self.assertTrue(all(report.passed for report in reports))
        self.assertEqual(reports[-1].relation, "rank-one-jacobi-algebra")
        self.assertEqual({report.elapsed_ms for report in reports}, {0})

    def test_appendix_a_selects_the_univariate_suite(self):
        run = load_run_config({"suite": "appendixA", "nmax": 1, "out": ""})
        self.assertEqual(run.suite, Config.Suites.UNIVARIATE)
        self.assertEqual(run.provenance()["suite"], "univariate")

    def test_orthogonality_gets_the_configured_samples(self):
        run = load_run_config({"suite": "orthogonality", "samples": 77, "out": ""})
        passing = outcome("orthogonality", "variable", SAMPLED, None)
        with patch.object(cli, "verify_orthogonality", return_value=passing) as check:
            cli.run_suites(run, [])
        check.assert_called_once_with(5, SAMPLED, 77, 42)

    def test_every_suite_is_registered(self):
        self.assertEqual(set(cli.SUITES), set(Config.Suites.ORDER))
