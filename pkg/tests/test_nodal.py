import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nodal_atlas.errors import ConsistencyError, DomainError, ResourceError
from nodal_atlas.nodal import (BS_CONSTANT, bs_prediction, classify_inert_split, components, courant_bound,
                               cusp_region_report, delta_zero_census, grid_from_function, sign_grid,
                               theorem21_check)


def synth(f, y_lo=1.0, y_hi=3.0, t=20.0, res=8.0, parity="even"):
    return components(grid_from_function(f, t, y_lo, y_hi, res, parity))


def bump(x, y, x0, y0, r):
    return np.exp(-((x - x0) ** 2 + (y - y0) ** 2) / r ** 2)


class TestSynthetic:
    def test_constant(self):
        g = grid_from_function(lambda x, y: np.ones_like(x), 20.0, 0.85, 3.0)
        assert np.all(g.signs[g.valid] == 1) and np.all(g.signs[~g.valid] == 0)
        d = components(g)
        assert (d.N, d.R, d.S_split) == (1, 1, 0)

    def test_horizontal_line(self):
        d = synth(lambda x, y: y - 2.013)
        assert (d.N, d.R, d.S_split) == (2, 2, 0) and d.consistent

    def test_symmetric_vertical_lines(self):
        # |x| < 0.2 around delta1, the rest joined across x = +-1/2
        d = synth(lambda x, y: np.abs(x) - 0.2013)
        assert (d.N, d.R, d.S_split) == (2, 2, 0)

    def test_checkerboard(self):
        d = synth(lambda x, y: np.cos(2 * np.pi * x) * (y - 2.013))
        assert d.N == 4 and d.R == 4

    def test_diagonal_not_connected(self):
        # a 2x2 checkerboard whose same-sign cells meet only at a corner
        g = grid_from_function(lambda x, y: np.ones_like(x), 20.0, 1.0, 3.0)
        g.signs[:] = 1
        j, i = 10, 5
        g.signs[j, i] = g.signs[j + 1, i + 1] = -1
        d = components(g)
        assert d.N == 3  # background and two separate negative cells

    def test_mirror_blobs(self):
        f = lambda x, y: 1 - 2 * (bump(x, y, 0.25, 2.0, 0.08) + bump(x, y, -0.25, 2.0, 0.08))  # noqa: E731
        d = synth(f)
        assert (d.N, d.R, d.S_split) == (3, 1, 1) and d.consistent
        blobs = [c for c in d.components if not c.touches_delta]
        assert blobs[0].partner == blobs[1].label and blobs[1].partner == blobs[0].label

    def test_unpaired_blob(self):
        d = synth(lambda x, y: 1 - 2 * bump(x, y, 0.25, 2.0, 0.08))
        assert not d.consistent
        with pytest.raises(ConsistencyError):
            classify_inert_split(d)
        assert classify_inert_split(d, strict=False) == (d.R, d.S_split)

    def test_top_component_inert(self):
        d = synth(lambda x, y: y - 2.013)
        top = [c for c in d.components if c.touches_top]
        assert len(top) == 1 and top[0].touches_delta

    def test_arc_gluing(self):
        # blobs centred on the arc at x = +-0.3; z -> -1/z identifies them there
        y0 = math.sqrt(1 - 0.09)
        f = lambda x, y: 1 - 2 * (bump(x, y, 0.3, y0, 0.06) + bump(x, y, -0.3, y0, 0.06))  # noqa: E731
        d = components(grid_from_function(f, 40.0, 0.85, 2.0))
        assert (d.N, d.R, d.S_split) == (2, 2, 0)
        # the same blobs lifted off the arc stay a split pair
        f2 = lambda x, y: 1 - 2 * (bump(x, y, 0.3, 1.3, 0.06) + bump(x, y, -0.3, 1.3, 0.06))  # noqa: E731
        d2 = components(grid_from_function(f2, 40.0, 0.85, 2.0))
        assert (d2.N, d2.R, d2.S_split) == (3, 1, 1)

    def test_odd_parity(self):
        f = lambda x, y: np.sin(2 * np.pi * x) * (1 + 0 * y)  # noqa: E731
        g = grid_from_function(f, 20.0, 1.0, 3.0, parity="odd")
        n = g.n_cols
        assert np.all(g.signs[:, [0, n // 2]] == 0)
        d = components(g)
        assert (d.N, d.R, d.S_split) == (2, 0, 1)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.15, 0.35), st.floats(1.2, 2.8), st.floats(0.03, 0.1))
    def test_mirror_pairs_always_split(self, x0, y0, r):
        # the negative blob has radius r sqrt(ln 2) < 0.09, clear of delta and of x = +-1/2
        f = lambda x, y: 1 - 2 * (bump(x, y, x0, y0, r) + bump(x, y, -x0, y0, r))  # noqa: E731
        d = synth(f)
        assert d.N == d.R + 2 * d.S_split
        assert d.R == 1

    def test_nested_arcs(self):
        # circles about 2i of radii 0.2 and 0.4 cross delta1 four times
        f = lambda x, y: (np.hypot(x, y - 2) - 0.2013) * (np.hypot(x, y - 2) - 0.4013)  # noqa: E731
        d = synth(f, y_hi=3.5)
        assert d.R == 3
        rep = theorem21_check(d, (4, 4))
        assert rep.ok and rep.lower == 3

    def test_degenerate_positive(self):
        d = synth(lambda x, y: np.ones_like(x))
        rep = theorem21_check(d, (0, 0))
        assert d.R == 1 and not rep.ok and rep.advice

    def test_resource_guard(self):
        with pytest.raises(ResourceError, match="resolution factor"):
            grid_from_function(lambda x, y: np.ones_like(x), 2000.0, 0.85, 300.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            grid_from_function(lambda x, y: np.ones_like(x), 20.0, 0.5, 3.0)


class TestFixture:
    @pytest.fixture(scope="class")
    @classmethod
    def grids(cls, even):
        g8 = sign_grid(even, 0.85, 6.0, 8)
        g12 = sign_grid(even, 0.85, 6.0, 12)
        return g8, components(g8), g12, components(g12)

    def test_mirror_symmetric(self, grids):
        g = grids[0]
        assert np.array_equal(g.signs[:, g.sigma_columns()], g.signs)

    def test_digest(self, grids):
        # recorded from a reference run; guards against silent changes
        assert grids[0].digest() == "5c48c985ae0217ff"

    def test_partition(self, grids):
        for d in (grids[1], grids[3]):
            assert d.consistent and d.N == d.R + 2 * d.S_split

    def test_refinement(self, grids):
        assert abs(grids[3].N - grids[1].N) <= 0.05 * grids[1].N

    def test_courant(self, even, grids):
        assert grids[1].N <= 1.2 * courant_bound(even.t)

    def test_theorem21(self, even, grids):
        census = delta_zero_census(even)
        assert census.n % 2 == 0 and census.n <= census.m
        assert theorem21_check(grids[1], census).ok

    def test_census_reproducible(self, even):
        a, b = delta_zero_census(even, spw=8), delta_zero_census(even, spw=12)
        assert (a.m, a.n) == (b.m, b.n)

    def test_cusp_component(self, grids):
        d = grids[1]
        top = [c for c in d.components if c.touches_top]
        assert all(c.touches_delta for c in top)

    def test_odd_fixture(self, odd):
        d = components(sign_grid(odd, 0.85, 4.0, 8))
        assert d.consistent and d.R == 0

    def test_census_even_only(self, odd):
        with pytest.raises(DomainError):
            delta_zero_census(odd)

    def test_cusp_region(self, even, grids):
        rep = cusp_region_report(even, grids[1], grids[0])
        assert rep.localized and rep.max_offset <= 1e-3
        assert rep.inert_high >= rep.inert_target


class TestCounts:
    def test_constant(self):
        assert BS_CONSTANT == pytest.approx(2 / math.pi * (3 * math.sqrt(3) - 5), rel=1e-15)
        assert BS_CONSTANT == pytest.approx(0.1248745107, abs=1e-10)

    def test_values(self):
        assert bs_prediction(125.523) == pytest.approx(82.0, abs=0.05)
        assert courant_bound(47.926) == pytest.approx(95.7, abs=0.05)

    @given(st.floats(10.0, 1e4))
    def test_scaling(self, t):
        assert bs_prediction(4 * t) / bs_prediction(t) == pytest.approx(16, rel=0.02)
        assert courant_bound(t * 1.01) > courant_bound(t)
