"""The general probabilistic theory of probabilistic states of a fragment.

States live in the product of R^X over carried measurements; the state set is the polytope cut out by the
normalization and naturality equalities. Each outcome x of a carried measurement alpha gives the evaluation
effect rho -> rho(alpha)(x), and alpha maps to the tuple of its evaluation effects.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .config import PolytopeConfig
from .errors import GmtLabError, SeparationError
from .fragment import Arrow, Fragment, Measurement
from .linear import LinearSystem
from .polytope import AffineChart, Point, enumerate_vertices
from .states import ProbabilisticState, build_probabilistic_system, check_probabilistic, variable_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Effect:
    """A linear functional sum_j coeffs[j] * x_j on the ambient space."""

    coeffs: Tuple[Tuple[int, Fraction], ...]

    @classmethod
    def axis(cls, j: int) -> "Effect":
        return cls(((j, Fraction(1)),))

    @classmethod
    def zero(cls) -> "Effect":
        return cls(())

    def __call__(self, point: Sequence[Fraction]) -> Fraction:
        return sum((a * point[j] for j, a in self.coeffs), Fraction(0))

    def __add__(self, other: "Effect") -> "Effect":
        total: Dict[int, Fraction] = dict(self.coeffs)
        for j, a in other.coeffs:
            total[j] = total.get(j, Fraction(0)) + a
        return Effect(tuple(sorted((j, a) for j, a in total.items() if a)))


@dataclass
class StatePolytope:
    """H- and V-representation of the probabilistic states of a fragment."""

    frag: Fragment
    system: LinearSystem
    axes: Dict[Tuple[Measurement, int], int]
    chart: Optional[AffineChart]
    vertices: List[Point]

    @property
    def ambient_dimension(self) -> int:
        return self.system.n_vars

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def axis(self, alpha: Measurement, x: int) -> int:
        self.frag.require(alpha)
        return self.axes[(alpha, x)]

    def state(self, vertex: Point) -> ProbabilisticState:
        return ProbabilisticState(
            {
                alpha: tuple(vertex[self.axes[(alpha, x)]] for x in range(alpha.arity))
                for alpha in self.frag.measurements()
            }
        )

    def affine_points(self) -> List[Point]:
        """Points spanning the affine solution space of the equalities (empty if they are inconsistent)."""
        if self.chart is None:
            return []
        base = self.chart.base
        return [base] + [tuple(b + d for b, d in zip(base, direction)) for direction in self.chart.directions]


def build_state_polytope(frag: Fragment, config: Optional[PolytopeConfig] = None) -> StatePolytope:
    """Assemble the probabilistic-state system and enumerate its vertices exactly."""
    config = config or PolytopeConfig()
    system = build_probabilistic_system(frag)
    position = {key: j for j, key in enumerate(system.variable_keys)}
    axes = {
        (alpha, x): position[variable_key(frag, alpha, x)]
        for alpha in frag.measurements()
        for x in range(alpha.arity)
    }
    chart, vertices = enumerate_vertices(system, config.resolved_dimension_cap())
    poly = StatePolytope(frag, system, axes, chart, vertices)
    for v in vertices:
        bad = check_probabilistic(frag, poly.state(v))
        if bad:
            raise GmtLabError(f"Vertex is not a probabilistic state: {bad[:3]}")
    logger.info(
        f"State polytope of {frag!r}: ambient dimension {system.n_vars}, "
        f"{len(vertices)} vertices"
    )
    return poly


def tr(poly: StatePolytope) -> Effect:
    """The unit effect rho -> rho(tau)(0)."""
    return Effect.axis(poly.axis(poly.frag.tau, 0))


def extract_effects(poly: StatePolytope, alpha: Measurement) -> List[Effect]:
    """The evaluation effects of alpha, checked to lie between 0 and tr on every vertex."""
    unit = tr(poly)
    effects = [Effect.axis(poly.axis(alpha, x)) for x in range(alpha.arity)]
    for v in poly.vertices:
        top = unit(v)
        for x, e in enumerate(effects):
            if not 0 <= e(v) <= top:
                raise GmtLabError(f"Effect {x} of {alpha!r} leaves [0, tr] at a vertex")
    return effects


def profile(poly: StatePolytope, alpha: Measurement) -> Tuple[Tuple[Fraction, ...], ...]:
    """Values of alpha's effects at every vertex."""
    axes = [poly.axis(alpha, x) for x in range(alpha.arity)]
    return tuple(tuple(v[j] for j in axes) for v in poly.vertices)


@dataclass
class SeparationReport:
    separated: bool
    witnesses: List[Tuple[Measurement, Measurement]] = field(default_factory=list)
    fragment_relative: bool = True


def check_separation(frag: Fragment, poly: StatePolytope) -> SeparationReport:
    """Distinct measurements over the same outcome set must differ at some vertex."""
    witnesses = []
    for n in sorted(frag.carrier):
        seen: Dict[Tuple[Tuple[Fraction, ...], ...], List[Measurement]] = {}
        for alpha in frag.over(n):
            seen.setdefault(profile(poly, alpha), []).append(alpha)
        for group in seen.values():
            witnesses.extend((group[i], group[j]) for i in range(len(group)) for j in range(i + 1, len(group)))
    if witnesses:
        logger.info(f"{frag!r} is not probabilistically separated: {len(witnesses)} witness pairs")
    return SeparationReport(not witnesses, witnesses)


@dataclass
class EffectTupleEmbedding:
    """alpha -> (evaluation effects of alpha), with the identities it was checked against."""

    poly: StatePolytope
    unit: Effect
    tuples: Dict[Measurement, Tuple[Effect, ...]]
    checked_points: int = 0

    def values(self, alpha: Measurement) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(tuple(e(v) for e in self.tuples[alpha]) for v in self.poly.vertices)


def embed(frag: Fragment, poly: StatePolytope) -> EffectTupleEmbedding:
    """Effect-tuple embedding of a separated fragment.

    Normalization sum_x e_x = tr and the pushforward law (f_*alpha)_y = sum over f(x) = y of alpha_x are
    verified exactly on every vertex and on points spanning the affine solution space.
    """
    separation = check_separation(frag, poly)
    if not separation.separated:
        a, b = separation.witnesses[0]
        raise SeparationError(f"{a!r} and {b!r} agree on every probabilistic state", witness=(a, b))

    unit = tr(poly)
    tuples = {alpha: tuple(extract_effects(poly, alpha)) for alpha in frag.measurements()}
    totals = {alpha: sum(effects, Effect.zero()) for alpha, effects in tuples.items()}
    pushed: Dict[Tuple[Measurement, Arrow], Tuple[Tuple[Effect, ...], Measurement]] = {}
    for alpha, (table, cod), beta in frag.entries():
        sums = [Effect.zero()] * cod
        for x, e in enumerate(tuples[alpha]):
            sums[table[x]] = sums[table[x]] + e
        pushed[(alpha, (table, cod))] = (tuple(sums), beta)

    points = list(poly.vertices) + poly.affine_points()
    for point in points:
        top = unit(point)
        for alpha, total in totals.items():
            if total(point) != top:
                raise GmtLabError(f"Effects of {alpha!r} do not sum to tr")
        for (alpha, (table, _)), (sums, beta) in pushed.items():
            if tuple(e(point) for e in sums) != tuple(e(point) for e in tuples[beta]):
                raise GmtLabError(f"Pushforward law fails for {alpha!r} along {list(table)}")
    logger.info(f"Embedded {frag!r} into a GPT with {len(poly.vertices)} extreme states")
    return EffectTupleEmbedding(poly, unit, tuples, checked_points=len(points))
