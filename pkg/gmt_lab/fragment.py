"""Finite, closure-complete fragments of a measurement theory and their law validation."""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import FragmentError
from .finset import FinFun, FinObj, Table, elementary_tables, function_tables, obj, permutation_tables

if TYPE_CHECKING:
    from .families import FamilyBackend

logger = logging.getLogger(__name__)

# A function between canonical objects, keyed by (table, codomain size)
Arrow = Tuple[Table, int]


@dataclass(frozen=True, order=True)
class Measurement:
    """An element of M(X): an outcome set together with a family payload in canonical form."""

    outcome_set: FinObj
    payload: Any

    @property
    def arity(self) -> int:
        return self.outcome_set.size

    def __repr__(self) -> str:
        return f"Measurement({self.arity}, {self.payload!r})"


def arrow_of(f: FinFun) -> Arrow:
    return (f.table, f.cod.size)


def arrow_fun(arrow: Arrow) -> FinFun:
    return FinFun.of(arrow[0], arrow[1])


class Fragment:
    """A post-processing-closed piece of a measurement theory on outcome sets of size <= bound.

    The pushforward table is fully materialized: for every carried measurement and every function out of
    its outcome set into a set of size <= bound, the image measurement is stored.
    """

    def __init__(
        self,
        family: "FamilyBackend",
        bound: int,
        table: Dict[Measurement, Dict[Arrow, Measurement]],
        complete: bool = False,
    ):
        self.family = family
        self.bound = bound
        self.table = table
        self.complete = complete
        by_size: Dict[int, List[Measurement]] = {n: [] for n in range(bound + 1)}
        for alpha in table:
            by_size.setdefault(alpha.arity, []).append(alpha)
        self.carrier: Dict[int, Tuple[Measurement, ...]] = {n: tuple(sorted(ms)) for n, ms in by_size.items()}
        self._ordered = tuple(m for n in sorted(self.carrier) for m in self.carrier[n])
        self._index = {m: i for i, m in enumerate(self._ordered)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fragment):
            return NotImplemented
        return self.family == other.family and self.bound == other.bound and self.table == other.table

    def __repr__(self) -> str:
        sizes = {n: len(ms) for n, ms in self.carrier.items()}
        return f"Fragment({self.family.kind}, bound={self.bound}, carrier={sizes})"

    @property
    def tau(self) -> Measurement:
        """The one-outcome measurement."""
        return Measurement(obj(1), self.family.trivial())

    def measurements(self) -> Tuple[Measurement, ...]:
        """All carried measurements in canonical order (outcome-set size, then payload)."""
        return self._ordered

    def over(self, n: int) -> Tuple[Measurement, ...]:
        return self.carrier.get(n, ())

    def index(self, alpha: Measurement) -> int:
        self.require(alpha)
        return self._index[alpha]

    def carries(self, alpha: Measurement) -> bool:
        return alpha in self.table

    def require(self, alpha: Measurement) -> None:
        if alpha not in self.table:
            raise FragmentError(f"{alpha!r} is not carried by {self!r}")

    def push(self, arrow: Arrow, alpha: Measurement) -> Measurement:
        self.require(alpha)
        if arrow[1] > self.bound:
            raise FragmentError(f"Codomain size {arrow[1]} exceeds fragment bound {self.bound}")
        return self.table[alpha][arrow]

    def entries(self) -> Iterator[Tuple[Measurement, Arrow, Measurement]]:
        """Every (alpha, f, f_*alpha) of the table."""
        for alpha in self._ordered:
            for arrow, beta in self.table[alpha].items():
                yield alpha, arrow, beta

    def elementary_entries(self) -> Iterator[Tuple[Measurement, Arrow, Measurement]]:
        """Table entries along generating functions only; naturality along these implies naturality."""
        for alpha in self._ordered:
            row = self.table[alpha]
            for arrow in elementary_tables(alpha.arity, self.bound):
                yield alpha, arrow, row[arrow]

    def size(self) -> int:
        return sum(len(row) for row in self.table.values())


def pushforward(frag: Fragment, f: FinFun, alpha: Measurement) -> Measurement:
    """f_*alpha, looked up in the materialized table."""
    if alpha.outcome_set != f.dom:
        raise FragmentError(f"{f!r} does not start at the outcome set of {alpha!r}")
    return frag.push(arrow_of(f), alpha)


def _check_generator(family: "FamilyBackend", alpha: Measurement, bound: int) -> Measurement:
    if alpha.arity > bound:
        raise FragmentError(f"Generator over {alpha.arity} outcomes exceeds bound {bound}")
    return Measurement(obj(alpha.arity), family.canonical(alpha.payload, alpha.arity))


def close(
    family: "FamilyBackend", generators: Sequence[Measurement], bound: int, complete: bool = False
) -> Fragment:
    """Smallest closure-complete fragment containing the generators and the one-outcome measurement."""
    if bound < 1:
        raise FragmentError(f"Bound must be at least 1, got {bound}")
    start = [Measurement(obj(1), family.trivial())]
    start.extend(_check_generator(family, g, bound) for g in generators)

    table: Dict[Measurement, Dict[Arrow, Measurement]] = {}
    queue = deque(start)
    seen = set(start)
    while queue:
        alpha = queue.popleft()
        row: Dict[Arrow, Measurement] = {}
        for m in range(bound + 1):
            cod = obj(m)
            for t in function_tables(alpha.arity, m):
                beta = Measurement(cod, family.pushforward(alpha.payload, t, m))
                row[(t, m)] = beta
                if beta not in seen:
                    seen.add(beta)
                    queue.append(beta)
        table[alpha] = row

    frag = Fragment(family, bound, table, complete=complete)
    logger.info(
        f"Closed {family.kind} fragment at bound {bound}: "
        f"{ {n: len(ms) for n, ms in frag.carrier.items()} } measurements, {frag.size()} table entries"
    )
    return frag


def full_fragment(family: "FamilyBackend", bound: int) -> Fragment:
    """Fragment carrying all of M(X) for |X| <= bound; the family must be enumerable."""
    if not family.enumerable:
        raise FragmentError(f"Family {family.kind} cannot be enumerated")
    generators = [Measurement(obj(n), p) for n in range(bound + 1) for p in family.enumerate(n)]
    return close(family, generators, bound, complete=True)


@dataclass
class Violation:
    """One failed law instance."""

    law: str
    detail: str
    alpha: Optional[Measurement] = None
    f: Optional[Arrow] = None
    g: Optional[Arrow] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "law": self.law,
            "detail": self.detail,
            "alpha": repr(self.alpha) if self.alpha is not None else None,
            "f": list(self.f[0]) if self.f is not None else None,
            "g": list(self.g[0]) if self.g is not None else None,
        }


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(frag: Fragment) -> ValidationReport:
    """Check the singleton, identity, closure and functoriality laws on every table entry.

    Functoriality g_*(f_*a) = (g.f)_*a is checked for every entry (f, a) against every generating g out of the
    codomain of f. Every function factors through generators within the bound, so this detects any
    single altered entry.
    """
    report = ValidationReport()
    ones = frag.over(1)
    if len(ones) != 1:
        report.violations.append(Violation("singleton", f"M(1) has {len(ones)} carried measurements"))

    for alpha in frag.measurements():
        row = frag.table[alpha]
        n = alpha.arity
        for m in range(frag.bound + 1):
            for t in function_tables(n, m):
                if (t, m) not in row:
                    report.violations.append(Violation("closure", f"missing entry for {list(t)}", alpha, (t, m)))
        identity = (tuple(range(n)), n)
        if row.get(identity, alpha) != alpha:
            report.violations.append(Violation("identity", f"id_* sends it to {row[identity]!r}", alpha, identity))

    for alpha, arrow, beta in frag.entries():
        if beta.arity != arrow[1]:
            report.violations.append(Violation("closure", f"value {beta!r} has the wrong arity", alpha, arrow))
            continue
        if not frag.carries(beta):
            report.violations.append(Violation("closure", f"value {beta!r} is not carried", alpha, arrow))
            continue
        row = frag.table[alpha]
        for g_arrow in elementary_tables(arrow[1], frag.bound):
            g_table, k = g_arrow
            composite = (tuple(g_table[x] for x in arrow[0]), k)
            lhs = frag.table[beta].get(g_arrow)
            rhs = row.get(composite)
            if lhs != rhs:
                report.violations.append(
                    Violation("functoriality", f"g_*(f_*a) = {lhs!r} but (g.f)_*a = {rhs!r}", alpha, arrow, g_arrow)
                )

    if report.violations:
        logger.warning(f"Validation found {len(report.violations)} law violations in {frag!r}")
    return report


def trivial_and_delta(frag: Fragment, x_obj: FinObj, x: int) -> Measurement:
    """delta_X(x) = x_*tau."""
    x_obj.check_element(x)
    return pushforward(frag, FinFun.element(obj(x_obj.size), x), frag.tau)


def strength(frag: Fragment, x_obj: FinObj, x: int, alpha: Measurement) -> Measurement:
    """s(x, alpha) = iota_*alpha with iota(y) = (x, y) in X x Y."""
    x_obj.check_element(x)
    y = alpha.arity
    if x_obj.size * y > frag.bound:
        raise FragmentError(f"Product of sizes {x_obj.size} and {y} exceeds fragment bound {frag.bound}")
    iota = FinFun.of(tuple(x * y + j for j in range(y)), x_obj.size * y)
    return pushforward(frag, iota, alpha)


def marginalize(frag: Fragment, alpha: Measurement, x_obj: FinObj, y_obj: FinObj) -> Tuple[Measurement, Measurement]:
    """The two projection pushforwards of a measurement over X x Y."""
    if alpha.arity != x_obj.size * y_obj.size:
        raise FragmentError(f"{alpha!r} is not over a product of sizes {x_obj.size} and {y_obj.size}")
    frag.require(alpha)
    p = alpha.arity
    pi_x = (tuple(i // y_obj.size for i in range(p)), x_obj.size)
    pi_y = (tuple(i % y_obj.size for i in range(p)), y_obj.size)
    return frag.push(pi_x, alpha), frag.push(pi_y, alpha)


def stabilizer(frag: Fragment, alpha: Measurement) -> List[Table]:
    """Non-identity permutations sigma of the outcome set with sigma_*alpha = alpha."""
    n = alpha.arity
    return [p for p in permutation_tables(n) if frag.push((p, n), alpha) == alpha]


def generated_by(frag: Fragment, seeds: Iterable[Measurement]) -> FrozenSet[Measurement]:
    """Carried measurements reachable from the seeds by post-processing."""
    reached = set()
    queue = deque(seeds)
    while queue:
        alpha = queue.popleft()
        if alpha in reached:
            continue
        frag.require(alpha)
        reached.add(alpha)
        queue.extend(b for b in frag.table[alpha].values() if b not in reached)
    return frozenset(reached)


def replace_entry(frag: Fragment, f: FinFun, alpha: Measurement, beta: Measurement) -> Fragment:
    """Copy of the fragment with one table entry overwritten. The copy need not be lawful."""
    frag.require(alpha)
    table = {a: dict(row) for a, row in frag.table.items()}
    table[alpha][arrow_of(f)] = beta
    return Fragment(frag.family, frag.bound, table, complete=frag.complete)
