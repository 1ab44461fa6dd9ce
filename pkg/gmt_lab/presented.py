"""Presented families: free post-processings of named generators modulo user relations.

An element is a pair (generator, f) standing for f_*gen. Relations f_*gen_i = g_*gen_j are saturated by a
union-find congruence closure: whenever two elements are merged, their images under every function out of the
common codomain are merged too. Every one-outcome element is merged with tau.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Deque, Dict, List, Optional, Sequence, Tuple

from .errors import FinSetError, FragmentError, PayloadError, PresentationError
from .families import FamilyBackend
from .finset import FinObj, Table, function_tables, obj
from .fragment import Measurement

logger = logging.getLogger(__name__)

TAU = "tau"

# (generator index, table, codomain size)
Element = Tuple[int, Table, int]


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size; roots hold their negated class size."""

    def __init__(self) -> None:
        self.parents: List[int] = []

    def add(self) -> int:
        self.parents.append(-1)
        return len(self.parents) - 1

    def find(self, ind: int) -> int:
        root = ind
        while self.parents[root] >= 0:
            root = self.parents[root]
        while self.parents[ind] >= 0:
            self.parents[ind], ind = root, self.parents[ind]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the classes of a and b; False if they were already merged."""
        aroot, broot = self.find(a), self.find(b)
        if aroot == broot:
            return False
        if -self.parents[aroot] > -self.parents[broot]:
            aroot, broot = broot, aroot
        self.parents[broot] += self.parents[aroot]
        self.parents[aroot] = broot
        return True

    def __len__(self) -> int:
        return len(self.parents)


@dataclass(frozen=True)
class Generator:
    name: str
    outcomes: int
    labels: Tuple[str, ...] = ()

    def outcome_set(self) -> FinObj:
        """The generator's outcome set, labelled when labels were given."""
        return FinObj(self.outcomes, self.labels or None)


@dataclass(frozen=True)
class Relation:
    """left_map_* left = right_map_* right."""

    left: str
    left_map: Table
    right: str
    right_map: Table
    cod: int


class PresentedBackend(FamilyBackend):
    """Measurements are congruence classes of (generator, function) pairs; payload is the least pair."""

    kind = "presented"

    def __init__(self, generators: Sequence[Generator], relations: Sequence[Relation], bound: int):
        self.generators = (Generator(TAU, 1),) + tuple(generators)
        self.relations = tuple(relations)
        self.bound = bound
        self._names = {g.name: i for i, g in enumerate(self.generators)}
        if len(self._names) != len(self.generators):
            raise PresentationError("Generator names must be distinct and must not be 'tau'")
        for g in generators:
            if not 1 <= g.outcomes <= bound:
                raise PresentationError(f"Generator {g.name} has {g.outcomes} outcomes; need 1..{bound}")
            try:
                g.outcome_set()
            except FinSetError as e:
                raise PresentationError(f"Generator {g.name}: {e}") from e
        self._rep = self._saturate()

    def params(self) -> Dict[str, Any]:
        return {"generators": self.generators, "relations": self.relations, "bound": self.bound}

    def _gen_index(self, name: str) -> int:
        if name not in self._names:
            raise PresentationError(f"Unknown generator {name!r}")
        return self._names[name]

    def _saturate(self) -> Dict[Element, Tuple[int, Table]]:
        elements: List[Element] = []
        ids: Dict[Element, int] = {}
        uf = UnionFind()
        for gi, gen in enumerate(self.generators):
            for m in range(self.bound + 1):
                for t in function_tables(gen.outcomes, m):
                    ids[(gi, t, m)] = uf.add()
                    elements.append((gi, t, m))

        pending: Deque[Tuple[Element, Element]] = deque()
        tau = (0, (0,), 1)
        for gi, gen in enumerate(self.generators):
            pending.append(((gi, (0,) * gen.outcomes, 1), tau))
        for rel in self.relations:
            li, ri = self._gen_index(rel.left), self._gen_index(rel.right)
            if len(rel.left_map) != self.generators[li].outcomes or len(rel.right_map) != self.generators[ri].outcomes:
                raise PresentationError(f"Relation maps do not start at the outcome sets of {rel.left}, {rel.right}")
            if not 0 <= rel.cod <= self.bound or any(not 0 <= v < rel.cod for v in rel.left_map + rel.right_map):
                raise PresentationError(f"Relation between {rel.left} and {rel.right} has an invalid codomain")
            pending.append(((li, rel.left_map, rel.cod), (ri, rel.right_map, rel.cod)))

        unions = 0
        while pending:
            a, b = pending.popleft()
            if not uf.union(ids[a], ids[b]):
                continue
            unions += 1
            m = a[2]
            for k in range(self.bound + 1):
                for h in function_tables(m, k):
                    pending.append(((a[0], tuple(h[v] for v in a[1]), k), (b[0], tuple(h[v] for v in b[1]), k)))
        logger.debug(f"Saturated presentation: {len(elements)} elements, {unions} unions")

        for m in range(self.bound + 1):
            points = [uf.find(ids[(0, (x,), m)]) for x in range(m)]
            if len(set(points)) != m:
                raise PresentationError(f"Relations identify distinct point measurements over {m} outcomes")

        least: Dict[int, Tuple[int, Table]] = {}
        for e in elements:
            root = uf.find(ids[e])
            key = (e[0], e[1])
            if root not in least or key < least[root]:
                least[root] = key
        return {e: least[uf.find(ids[e])] for e in elements}

    def classes(self, n: int) -> List[Tuple[int, Table]]:
        """Canonical payloads of all classes over n outcomes."""
        return sorted({rep for e, rep in self._rep.items() if e[2] == n})

    def generator_measurements(self) -> List[Measurement]:
        return [
            Measurement(obj(g.outcomes), self._rep[(gi, tuple(range(g.outcomes)), g.outcomes)])
            for gi, g in enumerate(self.generators)
            if gi > 0
        ]

    def generator_measurement(self, name: str) -> Measurement:
        gi = self._gen_index(name)
        size = self.generators[gi].outcomes
        return Measurement(obj(size), self._rep[(gi, tuple(range(size)), size)])

    def trivial(self) -> Tuple[int, Table]:
        return (0, (0,))

    def pushforward(self, payload: Tuple[int, Table], table: Table, cod: int) -> Tuple[int, Table]:
        if cod > self.bound:
            raise FragmentError(f"Presentation was saturated up to {self.bound} outcomes, not {cod}")
        gi, t = payload
        return self._rep[(gi, tuple(table[v] for v in t), cod)]

    def canonical(self, payload: Any, n: int) -> Tuple[int, Table]:
        if isinstance(payload, dict):
            name, raw_map = payload.get("generator"), payload.get("map")
            if not isinstance(name, str):
                raise PayloadError(f"Expected a generator name, got {name!r}")
            try:
                gi = self._gen_index(name)
            except PresentationError as e:
                raise PayloadError(str(e)) from e
        elif isinstance(payload, (list, tuple)) and len(payload) == 2:
            gi, raw_map = payload
            if not isinstance(gi, int) or not 0 <= gi < len(self.generators):
                raise PayloadError(f"Unknown generator index {gi!r}")
        else:
            raise PayloadError(f"Expected {{generator, map}}, got {payload!r}")
        if raw_map is None:
            raw_map = list(range(self.generators[gi].outcomes))
        t = tuple(raw_map)
        key = (gi, t, n)
        if key not in self._rep:
            raise PayloadError(f"Map {list(t)} does not send generator {self.generators[gi].name} into {n} outcomes")
        return self._rep[key]

    def dump_payload(self, payload: Tuple[int, Table]) -> Dict[str, Any]:
        gi, t = payload
        return {"generator": self.generators[gi].name, "map": list(t)}

    def outcome_labels(self, payload: Tuple[int, Table], n: int) -> Optional[List[str]]:
        """Each outcome y is labelled by the generator outcomes the class's map sends to y, joined by "+"."""
        gi, t = payload
        gen = self.generators[gi]
        if not gen.labels:
            return None
        source = gen.outcome_set()
        return ["+".join(source.label(x) for x in range(len(t)) if t[x] == y) or "-" for y in range(n)]


def make_presented(generators: Sequence[Generator], relations: Sequence[Relation], bound: int) -> PresentedBackend:
    return PresentedBackend(generators, relations, bound)
