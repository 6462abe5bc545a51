"""Regenerate the coefficient fixtures used by the test-suite.

    python3 scripts/make_fixtures.py

Runs the collocation solver for the first even form (t in (13.5, 14.0))
and the first odd form (t in (9.0, 9.9)) and writes L2-normalised
coefficient files with lambda(n) for n <= 1000.
"""
from pathlib import Path

from nodal_atlas.collocation import solve_collocation
from nodal_atlas.fileio import write_coefficients

HERE = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

for name, window, parity in [("even_13p78.mf", (13.5, 14.0), "even"), ("odd_9p53.mf", (9.0, 9.9), "odd")]:
    form = solve_collocation(window, parity, n_coeffs=1000)
    write_coefficients(HERE / name, form, norm="l2")
    print(name, form.t, form.info["collocation_residual"], form.info["seconds"])
