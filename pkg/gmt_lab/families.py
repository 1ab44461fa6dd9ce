"""Payload semantics for the concrete measurement theories.

Each backend knows how to push a payload forward along a function table, how to put a payload in canonical
form, and (for enumerable families) how to list M(X). Payloads are hashable, totally ordered tuples so that
measurements compare bit-exactly.
"""

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, TypeVar

from .errors import EffectAlgebraError, FragmentError, PayloadError
from .finset import Table, function_tables
from .utils import format_rational, parse_rational

logger = logging.getLogger(__name__)

T = TypeVar("T")


def image_pushforward(f: Callable[[T], T], values: Iterable[T]) -> Tuple[T, ...]:
    """The nonempty-power-set functor on a finite subset: the sorted image f(A)."""
    return tuple(sorted({f(v) for v in values}))  # type: ignore[type-var]


def push_distribution(dist: Sequence[Fraction], table: Table, cod: int) -> Tuple[Fraction, ...]:
    """Delta(f): the pushforward of a distribution, summing weights over preimages."""
    out = [Fraction(0)] * cod
    for x, p in enumerate(dist):
        out[table[x]] += p
    return tuple(out)


def _check_table(raw: Any, length: int, n: int) -> Table:
    if not isinstance(raw, (list, tuple)) or len(raw) != length:
        raise PayloadError(f"Expected a function table of length {length}, got {raw!r}")
    for entry in raw:
        if isinstance(entry, bool) or not isinstance(entry, int) or not 0 <= entry < n:
            raise PayloadError(f"Table entry {entry!r} out of range for {n} outcomes")
    return tuple(raw)


def _check_distribution(raw: Any, n: int) -> Tuple[Fraction, ...]:
    if not isinstance(raw, (list, tuple)) or len(raw) != n:
        raise PayloadError(f"Expected {n} probabilities, got {raw!r}")
    dist = tuple(parse_rational(p) for p in raw)
    if any(p < 0 for p in dist):
        raise PayloadError(f"Negative probability in {raw!r}")
    if sum(dist) != 1:
        raise PayloadError(f"Probabilities {[format_rational(p) for p in dist]} do not sum to 1")
    return dist


class FamilyBackend(ABC):
    """Uniform handle over a measurement theory: pushforward, canonical form and optional enumeration."""

    kind: str = ""
    enumerable: bool = False

    @abstractmethod
    def trivial(self) -> Any:
        """Payload of the unique one-outcome measurement."""

    @abstractmethod
    def pushforward(self, payload: Any, table: Table, cod: int) -> Any:
        """Payload of f_*alpha for f given by `table` into a set of size `cod`."""

    @abstractmethod
    def canonical(self, payload: Any, n: int) -> Any:
        """Validate a payload over n outcomes and return its canonical form. Raises PayloadError."""

    @abstractmethod
    def dump_payload(self, payload: Any) -> Any:
        """JSON-ready form of a canonical payload."""

    def parse_payload(self, raw: Any, n: int) -> Any:
        return self.canonical(raw, n)

    def enumerate(self, n: int) -> Iterator[Any]:
        raise FragmentError(f"Family {self.kind} is not enumerable")

    def count(self, n: int) -> int:
        """|M(n)| for enumerable families."""
        return sum(1 for _ in self.enumerate(n))

    def effects(self, payload: Any, n: int) -> Tuple[Any, ...]:
        """The outcome-indexed tuple of effects of a measurement."""
        raise PayloadError(f"Family {self.kind} has no effect view")

    def effect_name(self, effect: Any) -> Any:
        """JSON-ready display of one effect."""
        return effect

    def outcome_labels(self, payload: Any, n: int) -> Optional[List[str]]:
        """Display names of the n outcomes, if the family has any."""
        return None

    def params(self) -> Dict[str, Any]:
        return {}

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.params() == other.params()  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((type(self).__name__, repr(sorted(self.params().items()))))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params()})"


class ClassicalBackend(FamilyBackend):
    """M(X) = X^S: outcomes depend deterministically on the state."""

    kind = "classical"
    enumerable = True

    def __init__(self, states: int):
        if states < 0:
            raise PayloadError(f"State count must be nonnegative, got {states}")
        self.states = states

    def params(self) -> Dict[str, Any]:
        return {"states": self.states}

    def trivial(self) -> Table:
        return (0,) * self.states

    def pushforward(self, payload: Table, table: Table, cod: int) -> Table:
        return tuple(table[v] for v in payload)

    def canonical(self, payload: Any, n: int) -> Table:
        return _check_table(payload, self.states, n)

    def dump_payload(self, payload: Table) -> List[int]:
        return list(payload)

    def enumerate(self, n: int) -> Iterator[Table]:
        return iter(function_tables(self.states, n))

    def count(self, n: int) -> int:
        return n**self.states

    def effects(self, payload: Table, n: int) -> Tuple[FrozenSet[int], ...]:
        return tuple(frozenset(s for s, v in enumerate(payload) if v == x) for x in range(n))


class BooleanBackend(ClassicalBackend):
    """Partitions of unity in the Boolean algebra of subsets of W, stored as the block map W -> X."""

    kind = "boolean"

    def __init__(self, atoms: int):
        super().__init__(atoms)

    @property
    def atoms(self) -> int:
        return self.states

    def params(self) -> Dict[str, Any]:
        return {"atoms": self.states}

    def blocks(self, payload: Table, n: int) -> Tuple[FrozenSet[int], ...]:
        """The X-indexed partition of W."""
        return self.effects(payload, n)

    def from_blocks(self, blocks: Sequence[FrozenSet[int]]) -> Table:
        """Inverse of `blocks`; the blocks must partition W."""
        table: List[Optional[int]] = [None] * self.atoms
        for x, block in enumerate(blocks):
            for w in block:
                if table[w] is not None:
                    raise PayloadError(f"Atom {w} lies in two blocks")
                table[w] = x
        if any(v is None for v in table):
            raise PayloadError("Blocks do not cover every atom")
        return tuple(v for v in table if v is not None)


@dataclass(frozen=True)
class EffectAlgebra:
    """A finite effect algebra given by its partial sum table over named elements."""

    names: Tuple[str, ...]
    zero: int
    one: int
    sums: Tuple[Tuple[Tuple[int, int], int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_sum", dict(self.sums))

    def add(self, a: int, b: int) -> Optional[int]:
        """a (+) b, or None where undefined."""
        return self._sum.get((a, b))  # type: ignore[attr-defined]

    def total(self, elements: Iterable[int]) -> Optional[int]:
        acc: Optional[int] = self.zero
        for e in elements:
            if acc is None:
                return None
            acc = self.add(acc, e)
        return acc

    def supplement(self, a: int) -> int:
        return next(b for b in range(len(self.names)) if self.add(a, b) == self.one)

    @property
    def size(self) -> int:
        return len(self.names)


def check_effect_algebra(algebra: EffectAlgebra) -> None:
    """Raise EffectAlgebraError naming the first failing axiom instance."""
    k = algebra.size
    elements = range(k)
    for a in elements:
        for b in elements:
            if algebra.add(a, b) != algebra.add(b, a):
                raise EffectAlgebraError("Partial sum is not commutative", instance=(a, b))
    for a, b, c in itertools.product(elements, repeat=3):
        ab = algebra.add(a, b)
        if ab is None or algebra.add(ab, c) is None:
            continue
        bc = algebra.add(b, c)
        if bc is None or algebra.add(a, bc) != algebra.add(ab, c):
            raise EffectAlgebraError("Partial sum is not associative", instance=(a, b, c))
    for a in elements:
        complements = [b for b in elements if algebra.add(a, b) == algebra.one]
        if len(complements) != 1:
            raise EffectAlgebraError(
                f"Element {algebra.names[a]} has {len(complements)} orthosupplements", instance=(a, complements)
            )
        if algebra.add(a, algebra.one) is not None and a != algebra.zero:
            raise EffectAlgebraError(f"{algebra.names[a]} (+) 1 is defined", instance=(a, algebra.one))


def effect_algebra_from_table(
    names: Sequence[str], zero: str, one: str, sums: Iterable[Tuple[str, str, str]]
) -> EffectAlgebra:
    """Build and check an effect algebra. Sums with 0 are filled in; each listed sum is taken symmetrically."""
    index = {name: i for i, name in enumerate(names)}
    if len(index) != len(names):
        raise EffectAlgebraError("Element names must be distinct", instance=list(names))
    try:
        z, o = index[zero], index[one]
        table: Dict[Tuple[int, int], int] = {}
        for a, b, c in sums:
            for key in ((index[a], index[b]), (index[b], index[a])):
                if key in table and table[key] != index[c]:
                    raise EffectAlgebraError(f"Conflicting sums for {a} (+) {b}", instance=(a, b))
                table[key] = index[c]
    except KeyError as e:
        raise EffectAlgebraError(f"Unknown element {e.args[0]}", instance=e.args[0]) from e
    for a in range(len(names)):
        table.setdefault((z, a), a)
        table.setdefault((a, z), a)
    algebra = EffectAlgebra(tuple(names), z, o, tuple(sorted(table.items())))
    check_effect_algebra(algebra)
    return algebra


class EffectAlgebraBackend(FamilyBackend):
    """M_E(X): X-indexed tuples of effects summing to 1."""

    kind = "effect_algebra"
    enumerable = True

    def __init__(self, algebra: EffectAlgebra):
        self.algebra = algebra

    def params(self) -> Dict[str, Any]:
        return {"names": self.algebra.names, "zero": self.algebra.zero, "sums": self.algebra.sums}

    def trivial(self) -> Tuple[int, ...]:
        return (self.algebra.one,)

    def pushforward(self, payload: Tuple[int, ...], table: Table, cod: int) -> Tuple[int, ...]:
        out = []
        for y in range(cod):
            value = self.algebra.total(payload[x] for x in range(len(table)) if table[x] == y)
            if value is None:
                raise PayloadError(f"Coarse-graining of {payload} along {list(table)} is undefined")
            out.append(value)
        return tuple(out)

    def canonical(self, payload: Any, n: int) -> Tuple[int, ...]:
        if not isinstance(payload, (list, tuple)) or len(payload) != n:
            raise PayloadError(f"Expected {n} effects, got {payload!r}")
        index = {name: i for i, name in enumerate(self.algebra.names)}
        values = []
        for e in payload:
            if isinstance(e, str) and e in index:
                values.append(index[e])
            elif isinstance(e, int) and not isinstance(e, bool) and 0 <= e < self.algebra.size:
                values.append(e)
            else:
                raise PayloadError(f"Unknown effect {e!r}")
        if self.algebra.total(values) != self.algebra.one:
            raise PayloadError(f"Effects {payload!r} do not sum to 1")
        return tuple(values)

    def dump_payload(self, payload: Tuple[int, ...]) -> List[str]:
        return [self.algebra.names[e] for e in payload]

    def enumerate(self, n: int) -> Iterator[Tuple[int, ...]]:
        for values in itertools.product(range(self.algebra.size), repeat=n):
            if self.algebra.total(values) == self.algebra.one:
                yield values

    def effects(self, payload: Tuple[int, ...], n: int) -> Tuple[int, ...]:
        return payload

    def effect_name(self, effect: int) -> str:
        return self.algebra.names[effect]


class DeltaBackend(FamilyBackend):
    """Delta(X): exact rational probability distributions."""

    kind = "delta"

    def trivial(self) -> Tuple[Fraction, ...]:
        return (Fraction(1),)

    def pushforward(self, payload: Tuple[Fraction, ...], table: Table, cod: int) -> Tuple[Fraction, ...]:
        return push_distribution(payload, table, cod)

    def canonical(self, payload: Any, n: int) -> Tuple[Fraction, ...]:
        return _check_distribution(payload, n)

    def dump_payload(self, payload: Tuple[Fraction, ...]) -> List[str]:
        return [format_rational(p) for p in payload]

    def effects(self, payload: Tuple[Fraction, ...], n: int) -> Tuple[Fraction, ...]:
        return payload


class ProbMeasBackend(FamilyBackend):
    """Delta(X)^S: classical measurements with random outcomes."""

    kind = "prob_meas"

    def __init__(self, states: int):
        if states < 0:
            raise PayloadError(f"State count must be nonnegative, got {states}")
        self.states = states

    def params(self) -> Dict[str, Any]:
        return {"states": self.states}

    def trivial(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return ((Fraction(1),),) * self.states

    def pushforward(self, payload: Tuple[Tuple[Fraction, ...], ...], table: Table, cod: int) -> Any:
        return tuple(push_distribution(d, table, cod) for d in payload)

    def canonical(self, payload: Any, n: int) -> Tuple[Tuple[Fraction, ...], ...]:
        if not isinstance(payload, (list, tuple)) or len(payload) != self.states:
            raise PayloadError(f"Expected one distribution per state ({self.states}), got {payload!r}")
        return tuple(_check_distribution(d, n) for d in payload)

    def dump_payload(self, payload: Tuple[Tuple[Fraction, ...], ...]) -> List[List[str]]:
        return [[format_rational(p) for p in d] for d in payload]

    def effects(self, payload: Tuple[Tuple[Fraction, ...], ...], n: int) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(tuple(d[x] for d in payload) for x in range(n))


class RandomFunctionsBackend(FamilyBackend):
    """Delta(X^S): probability distributions over functions, stored sparsely as sorted (table, weight) pairs."""

    kind = "random_functions"

    def __init__(self, states: int):
        if states < 0:
            raise PayloadError(f"State count must be nonnegative, got {states}")
        self.states = states

    def params(self) -> Dict[str, Any]:
        return {"states": self.states}

    def trivial(self) -> Tuple[Tuple[Table, Fraction], ...]:
        return (((0,) * self.states, Fraction(1)),)

    @staticmethod
    def _normal(weights: Dict[Table, Fraction]) -> Tuple[Tuple[Table, Fraction], ...]:
        return tuple(sorted((t, w) for t, w in weights.items() if w != 0))

    def pushforward(self, payload: Tuple[Tuple[Table, Fraction], ...], table: Table, cod: int) -> Any:
        weights: Dict[Table, Fraction] = {}
        for t, w in payload:
            image = tuple(table[v] for v in t)
            weights[image] = weights.get(image, Fraction(0)) + w
        return self._normal(weights)

    def canonical(self, payload: Any, n: int) -> Tuple[Tuple[Table, Fraction], ...]:
        if not isinstance(payload, (list, tuple)) or not payload:
            raise PayloadError(f"Expected a nonempty list of weighted functions, got {payload!r}")
        weights: Dict[Table, Fraction] = {}
        for item in payload:
            if isinstance(item, dict):
                raw_table, raw_weight = item.get("map"), item.get("weight")
            elif isinstance(item, (list, tuple)) and len(item) == 2:
                raw_table, raw_weight = item
            else:
                raise PayloadError(f"Malformed weighted function {item!r}")
            t = _check_table(raw_table, self.states, n)
            w = parse_rational(raw_weight)
            if w < 0:
                raise PayloadError(f"Negative weight {raw_weight!r}")
            weights[t] = weights.get(t, Fraction(0)) + w
        if sum(weights.values()) != 1:
            raise PayloadError("Weights do not sum to 1")
        return self._normal(weights)

    def dump_payload(self, payload: Tuple[Tuple[Table, Fraction], ...]) -> List[Dict[str, Any]]:
        return [{"map": list(t), "weight": format_rational(w)} for t, w in payload]


class UnknownFunctionsBackend(FamilyBackend):
    """P(X^S): nonempty sets of functions, pushed forward by taking images."""

    kind = "unknown_functions"
    enumerable = True

    def __init__(self, states: int):
        if states < 0:
            raise PayloadError(f"State count must be nonnegative, got {states}")
        self.states = states

    def params(self) -> Dict[str, Any]:
        return {"states": self.states}

    def trivial(self) -> Tuple[Table, ...]:
        return ((0,) * self.states,)

    def pushforward(self, payload: Tuple[Table, ...], table: Table, cod: int) -> Tuple[Table, ...]:
        return image_pushforward(lambda t: tuple(table[v] for v in t), payload)

    def canonical(self, payload: Any, n: int) -> Tuple[Table, ...]:
        if not isinstance(payload, (list, tuple)) or not payload:
            raise PayloadError(f"Expected a nonempty list of functions, got {payload!r}")
        return tuple(sorted({_check_table(t, self.states, n) for t in payload}))

    def dump_payload(self, payload: Tuple[Table, ...]) -> List[List[int]]:
        return [list(t) for t in payload]

    def enumerate(self, n: int) -> Iterator[Tuple[Table, ...]]:
        tables = function_tables(self.states, n)
        for r in range(1, len(tables) + 1):
            yield from itertools.combinations(tables, r)

    def count(self, n: int) -> int:
        return 2 ** (n**self.states) - 1


class WeirdBackend(FamilyBackend):
    """M(X) = {tau_X} + 3-element subsets of X; a subset collapses to tau when its image shrinks."""

    kind = "weird"
    enumerable = True

    def trivial(self) -> Tuple[int, ...]:
        return ()

    def pushforward(self, payload: Tuple[int, ...], table: Table, cod: int) -> Tuple[int, ...]:
        if not payload:
            return ()
        image = image_pushforward(table.__getitem__, payload)
        return image if len(image) == 3 else ()

    def canonical(self, payload: Any, n: int) -> Tuple[int, ...]:
        if not isinstance(payload, (list, tuple)):
            raise PayloadError(f"Expected [] or a 3-element subset, got {payload!r}")
        values = sorted(set(payload))
        if len(payload) not in (0, 3) or len(values) != len(payload):
            raise PayloadError(f"Expected [] or 3 distinct outcomes, got {payload!r}")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < n:
                raise PayloadError(f"Outcome {v!r} out of range for {n} outcomes")
        return tuple(values)

    def dump_payload(self, payload: Tuple[int, ...]) -> List[int]:
        return list(payload)

    def enumerate(self, n: int) -> Iterator[Tuple[int, ...]]:
        yield ()
        yield from itertools.combinations(range(n), 3)

    def count(self, n: int) -> int:
        return 1 + comb(n, 3)


def boolean_meet(backend: BooleanBackend, payloads: Sequence[Table], sizes: Sequence[int]) -> Table:
    """The joint over X_1 x ... x X_n whose (x_1..x_n) block is the meet of the x_i blocks."""
    block_lists = [backend.blocks(p, n) for p, n in zip(payloads, sizes)]
    joint_blocks = []
    for combo in itertools.product(*[range(n) for n in sizes]):
        meet = frozenset(range(backend.atoms))
        for blocks, x in zip(block_lists, combo):
            meet &= blocks[x]
        joint_blocks.append(meet)
    return backend.from_blocks(joint_blocks)


def make_classical(states: int) -> ClassicalBackend:
    return ClassicalBackend(states)


def make_boolean(atoms: int) -> BooleanBackend:
    return BooleanBackend(atoms)


def make_effect_algebra(
    names: Sequence[str], zero: str, one: str, sums: Iterable[Tuple[str, str, str]]
) -> EffectAlgebraBackend:
    return EffectAlgebraBackend(effect_algebra_from_table(names, zero, one, sums))


def make_delta() -> DeltaBackend:
    return DeltaBackend()


def make_prob_meas(states: int) -> ProbMeasBackend:
    return ProbMeasBackend(states)


def make_random_functions(states: int) -> RandomFunctionsBackend:
    return RandomFunctionsBackend(states)


def make_unknown_functions(states: int) -> UnknownFunctionsBackend:
    return UnknownFunctionsBackend(states)


def make_weird() -> WeirdBackend:
    return WeirdBackend()


def boolean_algebra_two() -> Tuple[List[str], str, str, List[Tuple[str, str, str]]]:
    """The two-element effect algebra {0, 1}."""
    return ["0", "1"], "0", "1", [("0", "0", "0"), ("0", "1", "1")]


def chain_effect_algebra(steps: int) -> Tuple[List[str], str, str, List[Tuple[str, str, str]]]:
    """The chain {0, 1/steps, ..., 1} with i/steps (+) j/steps defined when i + j <= steps."""
    names = [format_rational(Fraction(i, steps)) for i in range(steps + 1)]
    sums = [(names[i], names[j], names[i + j]) for i in range(steps + 1) for j in range(steps + 1 - i)]
    return names, names[0], names[-1], sums
