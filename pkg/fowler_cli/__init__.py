"""Command-line surface of the fowler lab."""
