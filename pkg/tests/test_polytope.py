"""Tests for exact vertex enumeration of the state polytope."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmt_lab.errors import PolytopeTooLargeError
from gmt_lab.linear import LinearSystem
from gmt_lab.oracles import brute_force_vertices, simplex_start_vertices
from gmt_lab.polytope import affine_chart, chart_vertices, enumerate_vertices


@st.composite
def simplex_products(draw):
    """Products of probability simplices cut by a few extra equalities."""
    blocks = draw(st.lists(st.integers(1, 3), min_size=1, max_size=3))
    n = sum(blocks)
    system = LinearSystem([f"x{j}" for j in range(n)])
    start = 0
    for b, size in enumerate(blocks):
        system.add_row(f"block{b}", {j: Fraction(1) for j in range(start, start + size)}, Fraction(1))
        start += size
    extra = draw(
        st.lists(st.tuples(st.lists(st.integers(-1, 1), min_size=n, max_size=n), st.integers(0, 1)), max_size=2)
    )
    for i, (coeffs, rhs) in enumerate(extra):
        system.add_row(f"extra{i}", {j: Fraction(a) for j, a in enumerate(coeffs) if a}, Fraction(rhs))
    return system


def square():
    system = LinearSystem(["a0", "a1", "b0", "b1"])
    system.add_row("a", {0: Fraction(1), 1: Fraction(1)}, Fraction(1))
    system.add_row("b", {2: Fraction(1), 3: Fraction(1)}, Fraction(1))
    return system


class TestAffineChart:
    """Test the parametrization of the equality solutions."""

    def test_square(self):
        chart = affine_chart(square())
        assert chart.dimension == 2
        assert chart.free == [1, 3]
        assert chart.point((Fraction(1, 3), Fraction(1))) == (Fraction(2, 3), Fraction(1, 3), 0, 1)

    def test_halfspaces(self):
        chart = affine_chart(square())
        # two box rows per free variable, then one row per pivot variable
        rows = chart.halfspaces()
        assert len(rows) == 6
        assert rows[-1] == (Fraction(1), (Fraction(0), Fraction(-1)))

    def test_inconsistent(self):
        system = square()
        system.add_row("clash", {0: Fraction(1), 1: Fraction(1)}, Fraction(2))
        assert affine_chart(system) is None
        assert enumerate_vertices(system) == (None, [])


class TestEnumerateVertices:
    """Test the double description method against tight-set search."""

    def test_square_has_four_corners(self):
        _, points = enumerate_vertices(square())
        assert len(points) == 4
        assert all(set(p) <= {0, 1} for p in points)

    def test_cut_square(self):
        """Forcing a0 = b0 leaves the diagonal segment."""
        system = square()
        system.add_row("diag", {0: Fraction(1), 2: Fraction(-1)}, Fraction(0))
        _, points = enumerate_vertices(system)
        assert points == [(0, 1, 0, 1), (1, 0, 1, 0)]

    def test_single_point(self):
        system = square()
        system.add_row("a0", {0: Fraction(1)}, Fraction(1))
        system.add_row("b0", {2: Fraction(1)}, Fraction(0))
        chart, points = enumerate_vertices(system)
        assert chart.dimension == 0
        assert chart_vertices(chart) == [()]
        assert points == [(1, 0, 0, 1)]

    def test_negative_point(self):
        """Consistent equalities whose only solution leaves the orthant."""
        system = square()
        system.add_row("a0", {0: Fraction(2)}, Fraction(4))
        system.add_row("b0", {2: Fraction(1)}, Fraction(0))
        chart, points = enumerate_vertices(system)
        assert chart is not None
        assert points == []

    def test_cap(self):
        with pytest.raises(PolytopeTooLargeError):
            enumerate_vertices(square(), dimension_cap=1)

    @settings(max_examples=60, deadline=None)
    @given(simplex_products())
    def test_agrees_with_brute_force(self, system):
        _, points = enumerate_vertices(system)
        assert points == brute_force_vertices(system)

    @settings(max_examples=60, deadline=None)
    @given(simplex_products())
    def test_agrees_with_simplex_start(self, system):
        _, points = enumerate_vertices(system)
        assert points == simplex_start_vertices(system)
