"""Tests for the verification suite registry and runner."""

from __future__ import annotations

import math
import os
import unittest
from concurrent.futures import ThreadPoolExecutor
from unittest.mock import patch

from fowler_core.errors import BracketNotFound, UnknownSuite
from fowler_core.suites import SUITES, Check, SuiteResult, run_suite, run_suites, suite_names

SLOW = os.environ.get("FOWLER_SLOW_TESTS") == "1"


class TestSuiteNames(unittest.TestCase):
    def test_all_in_registry_order(self) -> None:
        names = suite_names("all")
        self.assertEqual(names, list(SUITES))
        self.assertEqual(names[0], "sech-residual")
        self.assertEqual(len(names), 9)

    def test_normalization(self) -> None:
        self.assertEqual(suite_names("Three_Spheres"), ["three-spheres"])
        self.assertEqual(suite_names(" kelvin "), ["kelvin"])

    def test_unknown_suite(self) -> None:
        with self.assertRaises(UnknownSuite):
            suite_names("bogus")


class TestRunSuite(unittest.TestCase):
    def test_fast_suites_pass(self) -> None:
        for name in ("sech-residual", "kelvin", "three-spheres", "sobolev-identity"):
            result = run_suite(name)
            failing = [c.name for c in result.checks if not c.passed]
            self.assertTrue(result.passed, f"{name}: {failing}")
            self.assertGreater(len(result.checks), 0)

    def test_hamiltonian_suite(self) -> None:
        self.assertTrue(run_suite("hamiltonian").passed)

    def test_kelvin_identity_holds_for_the_bubble(self) -> None:
        checks = {c.name: c for c in run_suite("kelvin").checks}
        self.assertTrue(checks["kelvin_identity_bubble"].passed)
        self.assertLessEqual(checks["kelvin_identity_bubble"].value, 1e-4)

    def test_monitors_suite(self) -> None:
        result = run_suite("monitors")
        checks = {c.name: c for c in result.checks}
        self.assertLessEqual(checks["delaunay_drift_5_periods"].value, 1e-8)
        self.assertTrue(result.passed, [c.name for c in result.checks if not c.passed])

    def test_error_is_recorded_as_failed_check(self) -> None:
        def broken() -> list[Check]:
            raise BracketNotFound("no sign change")

        with patch.dict(SUITES, {"kelvin": broken}):
            with self.assertLogs("fowler_core.suites", level="ERROR"):
                result = run_suite("kelvin")
        self.assertFalse(result.passed)
        (check,) = result.checks
        self.assertEqual(check.name, "error:BracketNotFound")
        self.assertTrue(math.isnan(check.value))

    def test_runs_preserve_registry_order(self) -> None:
        def ok() -> list[Check]:
            return [Check("ok", 0.0, 1.0, True)]

        with patch.dict(SUITES, {name: ok for name in SUITES}):
            with ThreadPoolExecutor(max_workers=3) as pool:
                results = run_suites("all", executor=pool)
        self.assertEqual([r.name for r in results], list(SUITES))
        self.assertTrue(all(r.passed for r in results))

    def test_payload(self) -> None:
        result = SuiteResult("demo", [Check("x", 0.5, 1.0, True)], 0.25)
        payload = result.to_dict()
        self.assertEqual(list(payload), ["suite", "pass", "elapsed", "checks"])
        self.assertEqual(
            payload["checks"], [{"name": "x", "value": 0.5, "threshold": 1.0, "pass": True}]
        )
        self.assertFalse(SuiteResult("bad", [Check("y", 2.0, 1.0, False)]).passed)


@unittest.skipUnless(SLOW, "set FOWLER_SLOW_TESTS=1 to run the shooting-based suites")
class TestSlowSuites(unittest.TestCase):
    def test_shooting_suites_pass(self) -> None:
        for name in ("pohozaev", "shooting", "vector"):
            result = run_suite(name)
            failing = [c.name for c in result.checks if not c.passed]
            self.assertTrue(result.passed, f"{name}: {failing}")


if __name__ == "__main__":
    unittest.main()
