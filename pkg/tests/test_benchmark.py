"""Tests for the stepper benchmark script."""

from __future__ import annotations

import unittest

from benchmark_steppers import DEFAULT_RK4_STEPS, DEFAULT_TOLERANCES, build_cases, run_case
from fowler_core.model import derive_params
from fowler_core.ode.integrate import StepperConfig


class TestBenchmark(unittest.TestCase):
    def test_case_builder_covers_both_steppers(self) -> None:
        cases = build_cases(DEFAULT_RK4_STEPS, DEFAULT_TOLERANCES)
        self.assertEqual(len(cases), 7)
        methods = [cfg.method for _, cfg in cases]
        self.assertEqual(methods.count("rk4"), 4)
        self.assertEqual(methods.count("dopri45"), 3)
        self.assertEqual(cases[0][0], "rk4 dt=0.004")
        self.assertTrue(all(cfg.t_end == 0.0 for _, cfg in cases))

    def test_run_case_tracks_the_closed_form(self) -> None:
        cfg = StepperConfig(method="rk4", dt=1e-2, t_end=0.0, detect_events=False)
        row = run_case(derive_params(6), cfg, "coarse")
        self.assertEqual(row.label, "coarse")
        self.assertEqual(row.steps, 1000)
        self.assertLess(row.max_error, 1e-5)
        self.assertLess(row.drift, 1e-5)
        self.assertGreaterEqual(row.seconds, 0.0)


if __name__ == "__main__":
    unittest.main()
