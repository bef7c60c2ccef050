"""Command-line frontend for gencalc."""
