"""Synthetic data generators for tests, suites and benchmarks."""
