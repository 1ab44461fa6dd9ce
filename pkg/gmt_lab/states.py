"""Deterministic, probabilistic and possibilistic states of a fragment.

A state assigns to every carried measurement an outcome, a distribution or a nonempty outcome subset,
commuting with every pushforward in the table. Naturality along the generating functions implies naturality
along all functions, so searches and linear systems use the generating entries only; results are re-checked
against the full table.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .config import SolverConfig
from .errors import CertificateError
from .finset import elementary_tables
from .fragment import Arrow, Fragment, Measurement, generated_by, stabilizer
from .linear import FarkasCertificate, LinearSystem, find_feasible_point, lift_certificate, verify_farkas
from .utils import format_table

logger = logging.getLogger(__name__)


class DeterministicState:
    """A natural assignment of one outcome to every carried measurement."""

    def __init__(self, measurements: Sequence[Measurement], outcomes: Sequence[int]):
        self.measurements = tuple(measurements)
        self.outcomes = tuple(outcomes)
        self._index = {m: i for i, m in enumerate(self.measurements)}

    def __getitem__(self, alpha: Measurement) -> int:
        return self.outcomes[self._index[alpha]]

    def as_dict(self) -> Dict[Measurement, int]:
        return dict(zip(self.measurements, self.outcomes))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DeterministicState) and self.outcomes == other.outcomes

    def __lt__(self, other: "DeterministicState") -> bool:
        return self.outcomes < other.outcomes

    def __hash__(self) -> int:
        return hash(self.outcomes)

    def __repr__(self) -> str:
        return f"DeterministicState({list(self.outcomes)})"


class PossibilisticState:
    """A natural assignment of a nonempty outcome subset to every carried measurement."""

    def __init__(self, measurements: Sequence[Measurement], subsets: Sequence[Tuple[int, ...]]):
        self.measurements = tuple(measurements)
        self.subsets = tuple(subsets)
        self._index = {m: i for i, m in enumerate(self.measurements)}

    def __getitem__(self, alpha: Measurement) -> Tuple[int, ...]:
        return self.subsets[self._index[alpha]]

    def is_singleton(self) -> bool:
        return all(len(s) == 1 for s in self.subsets)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PossibilisticState) and self.subsets == other.subsets

    def __hash__(self) -> int:
        return hash(self.subsets)

    def __repr__(self) -> str:
        return f"PossibilisticState({[list(s) for s in self.subsets]})"


@dataclass
class ProbabilisticState:
    assignment: Dict[Measurement, Tuple[Fraction, ...]]

    def __getitem__(self, alpha: Measurement) -> Tuple[Fraction, ...]:
        return self.assignment[alpha]


@dataclass
class ProbabilisticOutcome:
    """Either a state or a verified certificate against `system`."""

    system: LinearSystem
    state: Optional[ProbabilisticState] = None
    certificate: Optional[FarkasCertificate] = None
    seed: Optional[Measurement] = None
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.state is not None


def _mask_image(table: Tuple[int, ...], mask: int) -> int:
    out = 0
    x = 0
    while mask:
        if mask & 1:
            out |= 1 << table[x]
        mask >>= 1
        x += 1
    return out


def _mask_elements(mask: int) -> Tuple[int, ...]:
    return tuple(x for x in range(mask.bit_length()) if mask >> x & 1)


class NaturalitySearch:
    """Backtracking with arc consistency over functional constraints v(beta) = f(v(alpha)).

    Each variable is a carried measurement; its candidate values are either outcomes (deterministic states) or
    nonempty outcome masks (possibilistic states). Domains are bitmasks over value indices.
    """

    def __init__(self, frag: Fragment, possibilistic: bool):
        self.frag = frag
        self.possibilistic = possibilistic
        self.variables = frag.measurements()
        index = {m: i for i, m in enumerate(self.variables)}
        self.values: List[List[int]] = []
        for m in self.variables:
            n = m.arity
            self.values.append(list(range(1, 1 << n)) if possibilistic else list(range(n)))
        self.constraints: List[Tuple[int, List[int], int]] = []
        self.touching: List[List[int]] = [[] for _ in self.variables]
        for alpha, arrow, beta in frag.elementary_entries():
            a, b = index[alpha], index[beta]
            self.constraints.append((a, self._value_map(arrow, a, b), b))
            cid = len(self.constraints) - 1
            self.touching[a].append(cid)
            if b != a:
                self.touching[b].append(cid)
        self.degree = [len(t) for t in self.touching]

    def _value_map(self, arrow: Arrow, a: int, b: int) -> List[int]:
        """For each value index of a, the value index of b it forces."""
        table = arrow[0]
        target = {v: k for k, v in enumerate(self.values[b])}
        if self.possibilistic:
            return [target[_mask_image(table, mask)] for mask in self.values[a]]
        return [target[table[x]] for x in self.values[a]]

    def _revise(self, domains: List[int], cid: int) -> Tuple[bool, bool]:
        """Returns (changed_a, changed_b)."""
        a, mapping, b = self.constraints[cid]
        dom_a, dom_b = domains[a], domains[b]
        if a == b:
            fixed = 0
            for k, target in enumerate(mapping):
                if dom_a >> k & 1 and target == k:
                    fixed |= 1 << k
            domains[a] = fixed
            return fixed != dom_a, False
        allowed_b = 0
        new_a = 0
        k = 0
        rest = dom_a
        while rest:
            if rest & 1:
                target = 1 << mapping[k]
                if dom_b & target:
                    new_a |= 1 << k
                    allowed_b |= target
            rest >>= 1
            k += 1
        new_b = dom_b & allowed_b
        domains[a], domains[b] = new_a, new_b
        return new_a != dom_a, new_b != dom_b

    def propagate(self, domains: List[int], start: Optional[Sequence[int]] = None) -> bool:
        """AC-3 over the constraints touching the start variables (all constraints if none); False on wipe-out."""
        if start is None:
            queue = deque(range(len(self.constraints)))
        else:
            queue = deque(c for v in start for c in self.touching[v])
        queued = set(queue)
        while queue:
            cid = queue.popleft()
            queued.discard(cid)
            changed_a, changed_b = self._revise(domains, cid)
            a, _, b = self.constraints[cid]
            for var, changed in ((a, changed_a), (b, changed_b)):
                if not changed:
                    continue
                if domains[var] == 0:
                    return False
                for other in self.touching[var]:
                    if other != cid and other not in queued:
                        queued.add(other)
                        queue.append(other)
        return True

    def _choose(self, domains: List[int]) -> Optional[int]:
        """Most constrained unassigned variable, ties by descending degree then canonical order."""
        best = None
        best_key: Optional[Tuple[int, int, int]] = None
        for v, dom in enumerate(domains):
            size = bin(dom).count("1")
            if size <= 1:
                continue
            key = (size, -self.degree[v], v)
            if best_key is None or key < best_key:
                best, best_key = v, key
        return best

    def solutions(self, limit: Optional[int] = None) -> Iterator[List[int]]:
        """Yield value assignments in search order."""
        domains = [(1 << len(vals)) - 1 for vals in self.values]
        if any(d == 0 for d in domains) or not self.propagate(domains):
            return
        stack = [domains]
        found = 0
        nodes = 0
        while stack:
            domains = stack.pop()
            nodes += 1
            var = self._choose(domains)
            if var is None:
                yield [self.values[v][domains[v].bit_length() - 1] for v in range(len(domains))]
                found += 1
                if limit is not None and found >= limit:
                    break
                continue
            children = []
            dom = domains[var]
            k = 0
            while dom:
                if dom & 1:
                    child = list(domains)
                    child[var] = 1 << k
                    if self.propagate(child, [var]):
                        children.append(child)
                dom >>= 1
                k += 1
            stack.extend(reversed(children))
        logger.debug(f"Naturality search visited {nodes} nodes, found {found} solutions")


def enumerate_deterministic_states(frag: Fragment, limit: Optional[int] = None) -> List[DeterministicState]:
    """All natural outcome assignments (or the first `limit`), in search order."""
    search = NaturalitySearch(frag, possibilistic=False)
    states = [DeterministicState(search.variables, values) for values in search.solutions(limit)]
    logger.info(f"Found {len(states)} deterministic states on {frag!r}")
    return states


def enumerate_possibilistic_states(frag: Fragment, limit: Optional[int] = None) -> List[PossibilisticState]:
    """Natural nonempty-subset assignments under image-naturality f(A(alpha)) = A(f_*alpha)."""
    search = NaturalitySearch(frag, possibilistic=True)
    states = [
        PossibilisticState(search.variables, [_mask_elements(mask) for mask in values])
        for values in search.solutions(limit)
    ]
    logger.info(f"Found {len(states)} possibilistic states on {frag!r}")
    return states


def check_deterministic(frag: Fragment, state: DeterministicState) -> List[str]:
    """Violations of naturality against the full table (empty when the state is natural)."""
    bad = []
    for alpha, (table, _), beta in frag.entries():
        if table[state[alpha]] != state[beta]:
            bad.append(f"{alpha!r} along {list(table)}")
    return bad


def check_possibilistic(frag: Fragment, state: PossibilisticState) -> List[str]:
    bad = []
    for alpha, (table, _), beta in frag.entries():
        subset = state[alpha]
        if not subset or tuple(sorted({table[x] for x in subset})) != state[beta]:
            bad.append(f"{alpha!r} along {list(table)}")
    return bad


def check_probabilistic(frag: Fragment, state: ProbabilisticState) -> List[str]:
    bad = []
    for alpha in frag.measurements():
        dist = state[alpha]
        if len(dist) != alpha.arity or any(p < 0 for p in dist) or sum(dist) != 1:
            bad.append(f"{alpha!r} is not assigned a distribution")
    for alpha, (table, cod), beta in frag.entries():
        pushed = [Fraction(0)] * cod
        for x, p in enumerate(state[alpha]):
            pushed[table[x]] += p
        if tuple(pushed) != state[beta]:
            bad.append(f"{alpha!r} along {list(table)}")
    return bad


def point_mass_lift(frag: Fragment, state: DeterministicState) -> ProbabilisticState:
    """alpha -> point mass at s(alpha)."""
    return ProbabilisticState(
        {
            alpha: tuple(Fraction(1) if x == state[alpha] else Fraction(0) for x in range(alpha.arity))
            for alpha in frag.measurements()
        }
    )


def variable_key(frag: Fragment, alpha: Measurement, x: int) -> str:
    return f"m{frag.index(alpha)}:{x}"


def build_probabilistic_system(frag: Fragment, measurements: Optional[Set[Measurement]] = None) -> LinearSystem:
    """Normalization and naturality equalities over rho(alpha)(x) >= 0.

    Variables follow the canonical measurement order, outcomes ascending. Keys depend only on the fragment, so
    the system of a measurement subset shares row keys with the full system.
    """
    chosen = [m for m in frag.measurements() if measurements is None or m in measurements]
    offsets: Dict[Measurement, int] = {}
    keys: List[str] = []
    for alpha in chosen:
        offsets[alpha] = len(keys)
        keys.extend(variable_key(frag, alpha, x) for x in range(alpha.arity))
    system = LinearSystem(keys)
    for alpha in chosen:
        base = offsets[alpha]
        system.add_row(f"norm:m{frag.index(alpha)}", {base + x: Fraction(1) for x in range(alpha.arity)}, Fraction(1))
    for alpha in chosen:
        base = offsets[alpha]
        for arrow in elementary_tables(alpha.arity, frag.bound):
            beta = frag.table[alpha][arrow]
            table, cod = arrow
            for y in range(cod):
                coeffs: Dict[int, Fraction] = {}
                for x in range(alpha.arity):
                    if table[x] == y:
                        coeffs[base + x] = coeffs.get(base + x, Fraction(0)) + 1
                target = offsets[beta] + y
                coeffs[target] = coeffs.get(target, Fraction(0)) - 1
                system.add_row(f"nat:m{frag.index(alpha)}:{format_table(table)}:{cod}:{y}", coeffs, Fraction(0))
    return system


def _state_from_point(frag: Fragment, system: LinearSystem, point: List[Fraction]) -> ProbabilisticState:
    values = dict(zip(system.variable_keys, point))
    return ProbabilisticState(
        {
            alpha: tuple(values[variable_key(frag, alpha, x)] for x in range(alpha.arity))
            for alpha in frag.measurements()
        }
    )


def seed_measurements(frag: Fragment, limit: int) -> List[Measurement]:
    """Carried measurements with the largest stabilizers, then the largest outcome sets."""
    ranked = []
    for alpha in frag.measurements():
        stab = stabilizer(frag, alpha)
        if stab:
            ranked.append((-len(stab), -alpha.arity, frag.index(alpha), alpha))
    ranked.sort(key=lambda r: r[:3])
    return [r[3] for r in ranked[:limit]]


def find_probabilistic_state(frag: Fragment, config: Optional[SolverConfig] = None) -> ProbabilisticOutcome:
    """Decide whether a probabilistic state exists; return one or a verified Farkas certificate.

    Principal sub-fragments generated by the most symmetric measurements are solved first: an infeasible
    sub-system certifies infeasibility of the full system with zero multipliers elsewhere.
    """
    config = config or SolverConfig()
    full = build_probabilistic_system(frag)
    stats = {"variables": full.n_vars, "rows": full.n_rows, "seeds_tried": 0}
    everything = set(frag.measurements())
    tried: List[Set[Measurement]] = []
    for seed in seed_measurements(frag, config.seed_limit):
        sub_ms = set(generated_by(frag, [seed]))
        if sub_ms == everything or sub_ms in tried:
            continue
        tried.append(sub_ms)
        stats["seeds_tried"] += 1
        sub = build_probabilistic_system(frag, sub_ms)
        result = find_feasible_point(sub)
        logger.debug(f"Seed {seed!r}: {len(sub_ms)} measurements, feasible={result.feasible}")
        if not result.feasible and result.certificate is not None:
            try:
                cert = lift_certificate(sub, result.certificate, full)
            except CertificateError as e:
                logger.debug(f"Could not lift seed certificate: {e}")
                continue
            logger.info(f"No probabilistic state on {frag!r}: certificate from the sub-fragment of {seed!r}")
            return ProbabilisticOutcome(full, certificate=cert, seed=seed, stats=stats)

    result = find_feasible_point(full)
    stats["pivots"] = result.pivots
    if result.feasible and result.point is not None:
        logger.info(f"Found a probabilistic state on {frag!r}")
        return ProbabilisticOutcome(full, state=_state_from_point(frag, full, result.point), stats=stats)
    logger.info(f"No probabilistic state on {frag!r}")
    return ProbabilisticOutcome(full, certificate=result.certificate, stats=stats)


def verify_certificate(frag: Fragment, cert: FarkasCertificate) -> bool:
    """Replay a certificate against the fragment's probabilistic system."""
    return verify_farkas(build_probabilistic_system(frag), cert)
