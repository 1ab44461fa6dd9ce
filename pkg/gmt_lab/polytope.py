"""Exact vertex enumeration of {x >= 0 : A x = b} with cddlib's double description method.

The affine hull is parametrized by the free variables t of the reduced row echelon form. Every variable is a
probability, so the polytope sits in the box 0 <= t <= 1; cddlib receives that box together with the halfspaces
x_p >= 0 of the pivot variables, in exact rational arithmetic.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import cdd

from .errors import GmtLabError, PolytopeTooLargeError
from .linear import LinearSystem, reduced_rows

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]


@dataclass
class AffineChart:
    """x = base + sum_k t_k * directions[k] over the free variables."""

    base: Point
    directions: List[Point]
    free: List[int]
    pivot_rows: List[Tuple[int, Dict[int, Fraction], Fraction]]

    @property
    def dimension(self) -> int:
        return len(self.free)

    def point(self, t: Point) -> Point:
        x = list(self.base)
        for tk, direction in zip(t, self.directions):
            if tk:
                for j, v in enumerate(direction):
                    if v:
                        x[j] += tk * v
        return tuple(x)

    def halfspaces(self) -> List[Tuple[Fraction, Tuple[Fraction, ...]]]:
        """Rows (c, a) meaning c + a . t >= 0: the unit box, then x_p >= 0 for every pivot variable."""
        d = self.dimension
        rows = []
        for k in range(d):
            unit = tuple(Fraction(1) if j == k else Fraction(0) for j in range(d))
            rows.append((Fraction(0), unit))
            rows.append((Fraction(1), tuple(-a for a in unit)))
        free_index = {f: k for k, f in enumerate(self.free)}
        for _, coeffs, rhs in self.pivot_rows:
            # x_p = rhs - sum_f coeffs[f] * t_f
            a = [Fraction(0)] * d
            for j, c in coeffs.items():
                if j in free_index:
                    a[free_index[j]] = -c
            rows.append((rhs, tuple(a)))
        return rows


def affine_chart(system: LinearSystem) -> Optional[AffineChart]:
    """Parametrization of the solution space of the equalities; None if they are inconsistent."""
    rows = reduced_rows(system)
    if rows is None:
        return None
    n = system.n_vars
    pivots = {p for p, _, _ in rows}
    free = [j for j in range(n) if j not in pivots]
    base = [Fraction(0)] * n
    for p, _, rhs in rows:
        base[p] = rhs
    directions = []
    for f in free:
        d = [Fraction(0)] * n
        d[f] = Fraction(1)
        for p, coeffs, _ in rows:
            if f in coeffs:
                d[p] = -coeffs[f]
        directions.append(tuple(d))
    return AffineChart(tuple(base), directions, free, rows)


def chart_vertices(chart: AffineChart) -> List[Point]:
    """Vertices in t coordinates of the polytope cut out by the chart's halfspaces."""
    if chart.dimension == 0:
        return [()] if all(c >= 0 for c, _ in chart.halfspaces()) else []
    mat = cdd.Matrix([[c, *a] for c, a in chart.halfspaces()], number_type="fraction")
    mat.rep_type = cdd.RepType.INEQUALITY
    generators = cdd.Polyhedron(mat).get_generators()
    vertices = []
    for i in range(generators.row_size):
        row = generators[i]
        if row[0] != 1 or i in generators.lin_set:
            raise GmtLabError("State polytope is unbounded")
        vertices.append(tuple(Fraction(v) for v in row[1:]))
    logger.debug(f"Double description: {len(vertices)} vertices in dimension {chart.dimension}")
    return sorted(vertices)


def enumerate_vertices(system: LinearSystem, dimension_cap: int = 24) -> Tuple[Optional[AffineChart], List[Point]]:
    """Chart of the affine hull and the exact vertices of {x >= 0 : A x = b} in x coordinates."""
    chart = affine_chart(system)
    if chart is None:
        return None, []
    if chart.dimension > dimension_cap:
        raise PolytopeTooLargeError(
            f"Affine hull has dimension {chart.dimension}, above the cap of {dimension_cap}; "
            f"shrink the fragment (fewer generators or a smaller bound) or raise the cap"
        )
    points = [chart.point(t) for t in chart_vertices(chart)]
    for x in points:
        bad = system.residual(x)
        if bad:
            raise GmtLabError(f"Enumerated vertex violates {bad[:3]}")
    return chart, sorted(set(points))
