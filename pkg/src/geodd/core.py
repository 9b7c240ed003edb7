"""Predicate vocabulary, interned points, and canonical facts.

Every stored fact is the lexicographically smallest member of its orbit
under the predicate's argument-symmetry group, so structurally equal
geometric statements collapse to one representative.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

from . import _kernels

__all__ = [
    "ARITY",
    "PREDICATES",
    "GeometryError",
    "PointTable",
    "Fact",
    "Symmetries",
    "make_symmetries",
    "DEFAULT_SYMMETRIES",
    "make_fact",
    "canon",
    "orbit",
    "orbit_tuples",
    "is_reflexive_trivial",
]

ARITY = {
    "coll": 3,
    "para": 4,
    "perp": 4,
    "cong": 4,
    "rightangle": 4,
    "eqangle": 8,
    "simtri": 6,
    "contri": 6,
    "parallelogram": 4,
    "rectangle": 4,
}

PREDICATES = tuple(ARITY)
_KIND_INDEX = {k: i for i, k in enumerate(PREDICATES)}

# Argument positions that form one slot (a line, a segment, a vertex triple,
# a quadrilateral). Points inside a slot must be pairwise distinct.
_SLOTS = {
    "coll": ((0, 1, 2),),
    "para": ((0, 1), (2, 3)),
    "perp": ((0, 1), (2, 3)),
    "cong": ((0, 1), (2, 3)),
    "rightangle": ((0, 1), (2, 3)),
    "eqangle": ((0, 1), (2, 3), (4, 5), (6, 7)),
    "simtri": ((0, 1, 2), (3, 4, 5)),
    "contri": ((0, 1, 2), (3, 4, 5)),
    "parallelogram": ((0, 1, 2, 3),),
    "rectangle": ((0, 1, 2, 3),),
}


class GeometryError(ValueError):
    """Invalid predicate application (bad arity, degenerate slot, ...)."""


class PointTable:
    """Bijective interning of point labels to dense ids starting at 0."""

    def __init__(self) -> None:
        self._ids: dict[str, int] = {}
        self._names: list[str] = []

    def intern(self, name: str) -> int:
        pid = self._ids.get(name)
        if pid is None:
            pid = len(self._names)
            self._ids[name] = pid
            self._names.append(name)
        return pid

    def id_of(self, name: str) -> int | None:
        return self._ids.get(name)

    def name_of(self, pid: int) -> str:
        return self._names[pid]

    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._ids


class Fact:
    """A predicate applied to interned points. Not necessarily canonical.

    Plain class with a precomputed hash: facts are hashed in every database
    lookup, which dominates the join loops.
    """

    __slots__ = ("kind", "points", "_hash")

    def __init__(self, kind: str, points: tuple[int, ...]):
        self.kind = kind
        self.points = points
        self._hash = hash((kind, points))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other or (
            isinstance(other, Fact) and self.kind == other.kind and self.points == other.points
        )

    def __repr__(self) -> str:
        return f"Fact({self.kind!r}, {self.points!r})"

    def sort_key(self) -> tuple:
        return (_KIND_INDEX[self.kind], self.points)


def make_fact(kind: str, points) -> Fact:
    pts = tuple(points)
    if kind not in ARITY:
        raise GeometryError(f"unknown predicate {kind!r}")
    if len(pts) != ARITY[kind]:
        raise GeometryError(f"{kind} expects {ARITY[kind]} points, got {len(pts)}")
    for slot in _SLOTS[kind]:
        seen = [pts[i] for i in slot]
        if len(set(seen)) != len(seen):
            raise GeometryError(f"degenerate {kind} slot: repeated point in {pts}")
    return Fact(kind, pts)


def _close_generators(generators, arity: int) -> tuple[tuple[int, ...], ...]:
    """Group closure of index permutations; identity always included."""
    identity = tuple(range(arity))
    group = {identity}
    frontier = [identity]
    gens = [tuple(g) for g in generators]
    while frontier:
        base = frontier.pop()
        for g in gens:
            composed = tuple(base[i] for i in g)
            if composed not in group:
                group.add(composed)
                frontier.append(composed)
    return tuple(sorted(group))


def _generators(kind: str, eqangle_exchange: bool):
    pair_swap = [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)]
    if kind == "coll":
        return [(1, 0, 2), (0, 2, 1)]
    if kind in ("para", "perp", "cong", "rightangle"):
        return pair_swap
    if kind == "eqangle":
        gens = [
            (1, 0, 2, 3, 4, 5, 6, 7),  # reverse line 1
            (0, 1, 3, 2, 4, 5, 6, 7),  # reverse line 2
            (0, 1, 2, 3, 5, 4, 6, 7),  # reverse line 3
            (0, 1, 2, 3, 4, 5, 7, 6),  # reverse line 4
            (4, 5, 6, 7, 0, 1, 2, 3),  # swap the two angles
            (2, 3, 0, 1, 6, 7, 4, 5),  # reverse both angles together
        ]
        if eqangle_exchange:
            gens.append((0, 1, 4, 5, 2, 3, 6, 7))  # exchange inner lines
        return gens
    if kind in ("simtri", "contri"):
        gens = [(3, 4, 5, 0, 1, 2)]  # swap the two triangles
        for perm in permutations(range(3)):
            gens.append(tuple(perm) + tuple(p + 3 for p in perm))
        return gens
    if kind in ("parallelogram", "rectangle"):
        return [(1, 2, 3, 0), (0, 3, 2, 1)]
    raise GeometryError(f"unknown predicate {kind!r}")


class Symmetries:
    """Per-predicate symmetry groups (closed) plus kernel tables."""

    def __init__(self, eqangle_exchange: bool = False) -> None:
        self.eqangle_exchange = eqangle_exchange
        self.groups: dict[str, tuple[tuple[int, ...], ...]] = {}
        self._tables: dict[str, object] = {}
        for kind, arity in ARITY.items():
            group = _close_generators(_generators(kind, eqangle_exchange), arity)
            self.groups[kind] = group
            self._tables[kind] = _kernels.make_table(group)

    def table(self, kind: str):
        return self._tables[kind]

    def group(self, kind: str) -> tuple[tuple[int, ...], ...]:
        return self.groups[kind]


@lru_cache(maxsize=4)
def make_symmetries(eqangle_exchange: bool = False) -> Symmetries:
    return Symmetries(eqangle_exchange)


DEFAULT_SYMMETRIES = make_symmetries(False)


def canon(fact: Fact, syms: Symmetries = DEFAULT_SYMMETRIES) -> Fact:
    """Lexicographically minimal symmetry variant (idempotent)."""
    pts = _kernels.min_permuted(syms.table(fact.kind), fact.points)
    return fact if pts == fact.points else Fact(fact.kind, pts)


def canon_tuple(kind: str, points: tuple[int, ...], syms: Symmetries = DEFAULT_SYMMETRIES) -> tuple[int, ...]:
    return _kernels.min_permuted(syms.table(kind), points)


@lru_cache(maxsize=65536)
def _orbit_cached(kind: str, points: tuple[int, ...], syms: Symmetries) -> tuple[tuple[int, ...], ...]:
    return tuple(_kernels.all_permuted(syms.table(kind), points))


def orbit_tuples(fact: Fact, syms: Symmetries = DEFAULT_SYMMETRIES) -> tuple[tuple[int, ...], ...]:
    """All distinct argument tuples in the fact's orbit, sorted."""
    return _orbit_cached(fact.kind, fact.points, syms)


@lru_cache(maxsize=65536)
def orbit_keyed(kind: str, points: tuple[int, ...], syms: Symmetries, keyorder: tuple[int, ...]):
    """Orbit variants sorted by a permuted slot order, with the sort keys.

    Lets the matcher bisect on whatever slot subset is already bound,
    regardless of slot positions.
    """
    variants = _orbit_cached(kind, points, syms)
    keyed = sorted((tuple(v[i] for i in keyorder), v) for v in variants)
    return tuple(k for k, _ in keyed), tuple(v for _, v in keyed)


def orbit(fact: Fact, syms: Symmetries = DEFAULT_SYMMETRIES) -> set[Fact]:
    return {Fact(fact.kind, pts) for pts in orbit_tuples(fact, syms)}


def is_reflexive_trivial(fact: Fact) -> bool:
    """True for facts that hold by pure reflexivity.

    cong(X,Y,X,Y): the same segment on both sides; eqangle with both angles
    equal as line pairs; simtri/contri with the identity correspondence.
    para/perp have no reflexive reading here (a line is never perpendicular
    to itself, and self-parallelism is not injected).
    """
    p = fact.points
    if fact.kind == "cong":
        return {p[0], p[1]} == {p[2], p[3]}
    if fact.kind == "eqangle":
        return {p[0], p[1]} == {p[4], p[5]} and {p[2], p[3]} == {p[6], p[7]}
    if fact.kind in ("simtri", "contri"):
        return p[0:3] == p[3:6]
    return False


def format_fact(fact: Fact, points: PointTable) -> str:
    args = ",".join(points.name_of(p) for p in fact.points)
    return f"{fact.kind}({args})"
