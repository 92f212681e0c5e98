"""Seat-ordering benchmark: solvable-by-construction seating scenarios,
spatial and social constraint grading, reference solvers, and an interaction
protocol for external agents."""

__version__ = "1.0.0"
