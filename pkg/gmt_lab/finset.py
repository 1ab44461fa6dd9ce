"""Canonical finite sets and functions: the base category for every fragment.

Elements of a set of size n are the integers 0..n-1. Labels are display-only and never take part in
equality or hashing. Products use row-major pairing: (x, y) in X x Y is the element x * |Y| + y.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .errors import FinSetError

Table = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class FinObj:
    """A finite set {0, ..., size-1} with optional display labels."""

    size: int
    labels: Optional[Tuple[str, ...]] = field(default=None, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.size < 0:
            raise FinSetError(f"Finite set size must be nonnegative, got {self.size}")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise FinSetError(f"Expected {self.size} labels, got {len(self.labels)}")
            if len(set(self.labels)) != self.size:
                raise FinSetError(f"Labels must be distinct: {list(self.labels)}")

    def elements(self) -> range:
        return range(self.size)

    def label(self, x: int) -> str:
        """Display name of element x."""
        self.check_element(x)
        return self.labels[x] if self.labels is not None else str(x)

    def check_element(self, x: int) -> None:
        if not 0 <= x < self.size:
            raise FinSetError(f"Element {x} out of range for a set of size {self.size}")

    def __repr__(self) -> str:
        return f"FinObj({self.size})"


@lru_cache(maxsize=None)
def obj(size: int) -> FinObj:
    """Canonical unlabeled object of the given size."""
    return FinObj(size)


@dataclass(frozen=True)
class FinFun:
    """A total function dom -> cod given by its table."""

    dom: FinObj
    cod: FinObj
    table: Table

    def __post_init__(self) -> None:
        if len(self.table) != self.dom.size:
            raise FinSetError(f"Table length {len(self.table)} does not match domain size {self.dom.size}")
        for entry in self.table:
            if not 0 <= entry < self.cod.size:
                raise FinSetError(f"Table entry {entry} out of range for codomain of size {self.cod.size}")

    @classmethod
    def of(cls, table: Sequence[int], cod: int) -> "FinFun":
        """Build a function between canonical objects from a table and a codomain size."""
        return cls(obj(len(table)), obj(cod), tuple(table))

    @classmethod
    def identity(cls, x: FinObj) -> "FinFun":
        return cls(x, x, tuple(range(x.size)))

    @classmethod
    def constant(cls, dom: FinObj, cod: FinObj, y: int) -> "FinFun":
        cod.check_element(y)
        return cls(dom, cod, (y,) * dom.size)

    @classmethod
    def element(cls, cod: FinObj, x: int) -> "FinFun":
        """The map 1 -> cod picking out x."""
        return cls.constant(obj(1), cod, x)

    @classmethod
    def terminal(cls, dom: FinObj) -> "FinFun":
        """The unique map dom -> 1."""
        return cls(dom, obj(1), (0,) * dom.size)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def image(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.table)))

    def preimage(self, y: int) -> Tuple[int, ...]:
        return tuple(x for x, fx in enumerate(self.table) if fx == y)

    def is_identity(self) -> bool:
        return self.dom == self.cod and self.table == tuple(range(self.dom.size))

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.cod.size

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __repr__(self) -> str:
        return f"FinFun({list(self.table)} -> {self.cod.size})"


def compose(g: FinFun, f: FinFun) -> FinFun:
    """Return g . f."""
    if f.cod != g.dom:
        raise FinSetError(f"Cannot compose: codomain of f has size {f.cod.size}, domain of g has size {g.dom.size}")
    return FinFun(f.dom, g.cod, tuple(g.table[x] for x in f.table))


@lru_cache(maxsize=None)
def function_tables(m: int, n: int) -> Tuple[Table, ...]:
    """All tables of functions from a size-m set into a size-n set, in lexicographic order."""
    return tuple(itertools.product(range(n), repeat=m))


def enumerate_functions(x: FinObj, y: FinObj) -> List[FinFun]:
    """Every function X -> Y exactly once, in lexicographic table order."""
    return [FinFun(x, y, table) for table in function_tables(x.size, y.size)]


def pair_index(x: int, y: int, y_size: int) -> int:
    return x * y_size + y


def product(x: FinObj, y: FinObj) -> Tuple[FinObj, FinFun, FinFun]:
    """Product object with its two projections (row-major pairing)."""
    p = obj(x.size * y.size)
    pi_x = FinFun(p, x, tuple(i // y.size for i in range(p.size)))
    pi_y = FinFun(p, y, tuple(i % y.size for i in range(p.size)))
    return p, pi_x, pi_y


def product_of(objs: Sequence[FinObj]) -> Tuple[FinObj, List[FinFun]]:
    """Iterated row-major product of several objects with all projections.

    The element (x_1, ..., x_n) sits at index ((x_1 * |X_2| + x_2) * |X_3| + x_3) ... and the empty product
    is the one-element set.
    """
    size = 1
    for o in objs:
        size *= o.size
    p = obj(size)
    projections = []
    stride = size
    for o in objs:
        stride = stride // o.size if o.size else 0
        if o.size == 0 or size == 0:
            table: Table = ()
        else:
            table = tuple((i // stride) % o.size for i in range(size))
        projections.append(FinFun(p, o, table))
    return p, projections


def tupling(fs: Sequence[FinFun]) -> FinFun:
    """The unique map (f_1, ..., f_n): Z -> X_1 x ... x X_n."""
    if not fs:
        raise FinSetError("Tupling needs at least one function")
    dom = fs[0].dom
    if any(f.dom != dom for f in fs):
        raise FinSetError("Tupling requires a common domain")
    p, _ = product_of([f.cod for f in fs])
    table = []
    for z in range(dom.size):
        index = 0
        for f in fs:
            index = index * f.cod.size + f.table[z]
        table.append(index)
    return FinFun(dom, p, tuple(table))


def equalizer(f: FinFun, g: FinFun) -> Tuple[FinObj, FinFun]:
    """The subset S = {x | f(x) = g(x)} with its order-preserving inclusion into f.dom."""
    if f.dom != g.dom or f.cod != g.cod:
        raise FinSetError("Equalizer requires parallel functions")
    members = tuple(x for x in range(f.dom.size) if f.table[x] == g.table[x])
    s = obj(len(members))
    return s, FinFun(s, f.dom, members)


@lru_cache(maxsize=None)
def permutation_tables(n: int) -> Tuple[Table, ...]:
    """Non-identity permutations of a size-n set."""
    identity = tuple(range(n))
    return tuple(p for p in itertools.permutations(range(n)) if p != identity)


@lru_cache(maxsize=None)
def elementary_tables(n: int, bound: int) -> Tuple[Tuple[Table, int], ...]:
    """Generators of all functions out of a size-n set, up to the bound.

    Adjacent transpositions, the merge of the last two elements (n -> n-1) and the inclusion n -> n+1.
    Every function between sets of size <= bound is a composite of these through sets of size <= bound.
    """
    gens: List[Tuple[Table, int]] = []
    for i in range(n - 1):
        t = list(range(n))
        t[i], t[i + 1] = t[i + 1], t[i]
        gens.append((tuple(t), n))
    if n >= 2:
        gens.append((tuple(range(n - 1)) + (n - 2,), n - 1))
    if n + 1 <= bound:
        gens.append((tuple(range(n)), n + 1))
    return tuple(gens)
