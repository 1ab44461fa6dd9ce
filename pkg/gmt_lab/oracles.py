"""Independent brute-force oracles used to cross-check the solvers on small instances."""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Sequence, Tuple

import sympy as sp

from .errors import GmtLabError
from .linear import LinearSystem
from .polytope import affine_chart

logger = logging.getLogger(__name__)

# a . x <= b
Inequality = Tuple[Tuple[Fraction, ...], Fraction]


def _normalize(coeffs: Sequence[Fraction], bound: Fraction) -> Inequality:
    """Scale so the first nonzero coefficient has absolute value 1."""
    lead = next((abs(a) for a in coeffs if a != 0), None)
    if lead is None:
        return tuple(coeffs), bound
    return tuple(a / lead for a in coeffs), bound / lead


def fourier_motzkin_feasible(system: LinearSystem, max_variables: int = 12) -> bool:
    """Decide {x >= 0 : A x = b} by eliminating every variable from the inequality form."""
    n = system.n_vars
    if n > max_variables:
        raise GmtLabError(f"Fourier-Motzkin oracle is limited to {max_variables} variables, got {n}")
    rows: Dict[Tuple[Fraction, ...], Fraction] = {}

    def add(coeffs: Sequence[Fraction], bound: Fraction) -> None:
        key, b = _normalize(coeffs, bound)
        if key not in rows or b < rows[key]:
            rows[key] = b

    for row in system.rows:
        a = [Fraction(0)] * n
        for j, v in row.coeffs:
            a[j] = v
        add(a, row.rhs)
        add([-v for v in a], -row.rhs)
    for j in range(n):
        add([Fraction(-1) if k == j else Fraction(0) for k in range(n)], Fraction(0))

    for j in range(n):
        pos = [(a, b) for a, b in rows.items() if a[j] > 0]
        neg = [(a, b) for a, b in rows.items() if a[j] < 0]
        rest = {a: b for a, b in rows.items() if a[j] == 0}
        rows = rest
        for (ap, bp), (an, bn) in itertools.product(pos, neg):
            sp_, sn = 1 / ap[j], -1 / an[j]
            coeffs = [sp_ * x + sn * y for x, y in zip(ap, an)]
            add(coeffs, sp_ * bp + sn * bn)
        logger.debug(f"Fourier-Motzkin: eliminated x{j}, {len(rows)} inequalities remain")
    return all(b >= 0 for b in rows.values())


def brute_force_vertices(system: LinearSystem, max_candidates: int = 200000) -> List[Tuple[Fraction, ...]]:
    """Vertices of {x >= 0 : A x = b} by trying every choice of tight nonnegativity constraints.

    The affine solution set is parametrized through sympy's exact reduced row echelon form; a vertex is a point
    where d linearly independent coordinates vanish, d being the dimension of the affine hull.
    """
    n = system.n_vars
    if not system.rows:
        augmented = sp.zeros(1, n + 1)
    else:
        augmented = sp.zeros(system.n_rows, n + 1)
        for i, row in enumerate(system.rows):
            for j, a in row.coeffs:
                augmented[i, j] = sp.Rational(a.numerator, a.denominator)
            augmented[i, n] = sp.Rational(row.rhs.numerator, row.rhs.denominator)
    rref, pivots = augmented.rref()
    if n in pivots:
        return []
    free = [j for j in range(n) if j not in pivots]
    d = len(free)

    # x = base + directions * t
    base = sp.zeros(n, 1)
    directions = sp.zeros(n, d)
    for r, p in enumerate(pivots):
        base[p] = rref[r, n]
        for k, f in enumerate(free):
            directions[p, k] = -rref[r, f]
    for k, f in enumerate(free):
        directions[f, k] = 1

    total = sp.binomial(n, d)
    if total > max_candidates:
        raise GmtLabError(f"Brute-force vertex oracle would try {total} candidate bases")

    found: List[Tuple[Fraction, ...]] = []
    seen = set()
    for tight in itertools.combinations(range(n), d):
        if d:
            sub = directions.extract(list(tight), list(range(d)))
            if sub.det() == 0:
                continue
            t = sub.LUsolve(-base.extract(list(tight), [0]))
            x = base + directions * t
        else:
            x = base
        if any(v < 0 for v in x):
            continue
        point = tuple(Fraction(int(sp.fraction(v)[0]), int(sp.fraction(v)[1])) for v in x)
        if point not in seen:
            seen.add(point)
            found.append(point)
    return sorted(found)


def ks_coloring_count(contexts: Sequence[Sequence[str]]) -> int:
    """Number of outcome choices, one per context, that mark every shared ray consistently.

    A choice is consistent when each ray is either chosen in all contexts containing it or in none.
    """
    occurrences: Dict[str, List[Tuple[int, int]]] = {}
    for i, ctx in enumerate(contexts):
        for a, ray in enumerate(ctx):
            occurrences.setdefault(ray, []).append((i, a))
    links = [(occ[0], other) for occ in occurrences.values() for other in occ[1:]]
    count = 0
    for choice in itertools.product(*[range(len(ctx)) for ctx in contexts]):
        if all((choice[i] == a) == (choice[j] == b) for (i, a), (j, b) in links):
            count += 1
    return count


@dataclass
class _DDVertex:
    t: Tuple[Fraction, ...]
    tight: FrozenSet[str] = field(default_factory=frozenset)


def _adjacent(u: _DDVertex, v: _DDVertex, vertices: List[_DDVertex], dim: int) -> bool:
    """Combinatorial adjacency: no third vertex is tight on every constraint u and v share."""
    shared = u.tight & v.tight
    if len(shared) < dim - 1:
        return False
    return not any(w is not u and w is not v and shared <= w.tight for w in vertices)


def simplex_start_vertices(system: LinearSystem) -> List[Tuple[Fraction, ...]]:
    """Vertices of {x >= 0 : A x = b} by a plain incremental double description in chart coordinates.

    The polytope lies in the box [0,1]^d of the free variables, hence in the simplex {t >= 0, sum t <= d}. That
    simplex is the starting polytope; the halfspaces x_p >= 0 of the pivot variables are added one at a time,
    each vertex keeping its set of tight constraints.
    """
    chart = affine_chart(system)
    if chart is None:
        return []
    d = chart.dimension
    lower = [f"lo:{k}" for k in range(d)]
    vertices = [_DDVertex(tuple(Fraction(0) for _ in range(d)), frozenset(lower))]
    for k in range(d):
        corner = tuple(Fraction(d) if j == k else Fraction(0) for j in range(d))
        vertices.append(_DDVertex(corner, frozenset(lower[:k] + lower[k + 1 :] + ["sum"])))
    free_index = {f: k for k, f in enumerate(chart.free)}
    for p, coeffs, rhs in chart.pivot_rows:
        normal = [Fraction(0)] * d
        for j, c in coeffs.items():
            if j in free_index:
                normal[free_index[j]] = -c
        name = f"x:{p}"
        values = [rhs + sum((a * tk for a, tk in zip(normal, v.t) if a), Fraction(0)) for v in vertices]
        plus = [v for v, h in zip(vertices, values) if h > 0]
        zero = [_DDVertex(v.t, v.tight | {name}) for v, h in zip(vertices, values) if h == 0]
        minus = [(v, h) for v, h in zip(vertices, values) if h < 0]
        created = []
        for u, hu in ((v, h) for v, h in zip(vertices, values) if h > 0):
            for w, hw in minus:
                if _adjacent(u, w, vertices, d):
                    lam = hu / (hu - hw)
                    t = tuple(ut + lam * (wt - ut) for ut, wt in zip(u.t, w.t))
                    created.append(_DDVertex(t, (u.tight & w.tight) | {name}))
        vertices = plus + zero + created
        logger.debug(f"Simplex-start double description: after {name}, {len(vertices)} vertices")
        if not vertices:
            return []
    return sorted({chart.point(v.t) for v in vertices})
