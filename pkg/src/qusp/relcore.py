"""Exact relation algebra on finite labeled ground sets.

Relations are stored row-major as bit rows: bit ``j`` of ``rows[i]`` is set
when element ``i`` relates to element ``j``.  Subsets of the ground set are
plain integer bit masks over label indices.

Composition convention, fixed once for the whole package:
``compose(r, s)`` relates x to z when some y satisfies (x, y) in r and
(y, z) in s, i.e. r is applied first.  In the usual "after" notation this
relation would be written s o r; formulas from the literature are
translated to this argument order at the call site.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

MAX_SMALL_COVER_SIZE = 12


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class GroundSet:
    """A finite ground set given by an ordered tuple of distinct labels."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("ground set must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("ground set labels must be pairwise distinct")
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in ground set") from None

    def mask_of(self, labels: Iterable[str]) -> int:
        mask = 0
        for lab in labels:
            mask |= 1 << self.index(lab)
        return mask

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in iter_bits(mask))


def ground(*labels: str) -> GroundSet:
    return GroundSet(tuple(labels))


@dataclass(frozen=True)
class Relation:
    """A binary relation over a ground set, one bit row per element."""

    ground: GroundSet
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        n = self.ground.size
        if len(self.rows) != n:
            raise ValueError("row count does not match ground size")
        full = self.ground.full_mask
        for row in self.rows:
            if row < 0 or row & ~full:
                raise ValueError("row bits outside ground set")

    @classmethod
    def identity(cls, g: GroundSet) -> "Relation":
        return cls(g, tuple(1 << i for i in range(g.size)))

    @classmethod
    def full(cls, g: GroundSet) -> "Relation":
        return cls(g, (g.full_mask,) * g.size)

    @classmethod
    def from_pairs(
        cls, g: GroundSet, pairs: Iterable[tuple[str, str]], reflexive: bool = False
    ) -> "Relation":
        rows = [1 << i if reflexive else 0 for i in range(g.size)]
        for a, b in pairs:
            rows[g.index(a)] |= 1 << g.index(b)
        return cls(g, tuple(rows))

    def has(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def relates(self, a: str, b: str) -> bool:
        return self.has(self.ground.index(a), self.ground.index(b))

    def pairs(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self.rows):
            for j in iter_bits(row):
                yield i, j

    def is_reflexive(self) -> bool:
        return all(row >> i & 1 for i, row in enumerate(self.rows))

    def __and__(self, other: "Relation") -> "Relation":
        _check_same_ground(self, other)
        return Relation(self.ground, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: "Relation") -> "Relation":
        _check_same_ground(self, other)
        return Relation(self.ground, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: "Relation") -> bool:
        _check_same_ground(self, other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def to_json(self) -> dict:
        n = self.ground.size
        return {
            "n": n,
            "labels": list(self.ground.labels),
            "rows": ["".join("1" if row >> j & 1 else "0" for j in range(n)) for row in self.rows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Relation":
        g = GroundSet(tuple(data["labels"]))
        if data.get("n") != g.size:
            raise ValueError("relation JSON: n does not match label count")
        rows = []
        for text in data["rows"]:
            if len(text) != g.size or set(text) - {"0", "1"}:
                raise ValueError("relation JSON: malformed row string")
            rows.append(sum(1 << j for j, ch in enumerate(text) if ch == "1"))
        return cls(g, tuple(rows))


def _check_same_ground(r: Relation, s: Relation) -> None:
    if r.ground != s.ground:
        raise ValueError("relations live on different ground sets")


def compose(r: Relation, s: Relation) -> Relation:
    """First r, then s: (x, z) related iff some y has (x, y) in r, (y, z) in s."""
    _check_same_ground(r, s)
    rows = []
    for row in r.rows:
        acc = 0
        for y in iter_bits(row):
            acc |= s.rows[y]
        rows.append(acc)
    return Relation(r.ground, tuple(rows))


def inverse(r: Relation) -> Relation:
    """Swap the roles of both coordinates."""
    n = r.ground.size
    rows = [0] * n
    for i, row in enumerate(r.rows):
        for j in iter_bits(row):
            rows[j] |= 1 << i
    return Relation(r.ground, tuple(rows))


def image(r: Relation, subset: int) -> int:
    """All elements reachable from ``subset`` through r, as a bit mask."""
    acc = 0
    for x in iter_bits(subset):
        acc |= r.rows[x]
    return acc


def is_preorder(r: Relation) -> bool:
    """Reflexive and transitive (compose(r, r) contained in r)."""
    return r.is_reflexive() and compose(r, r) <= r


@dataclass(frozen=True)
class NormalSequence:
    """Levels of reflexive relations where each level squared sits in the one above."""

    ground: GroundSet
    levels: tuple[Relation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ValueError("not a normal sequence: no levels")
        for k, lvl in enumerate(self.levels):
            if lvl.ground != self.ground:
                raise ValueError("not a normal sequence: level ground mismatch")
            if not lvl.is_reflexive():
                raise ValueError(f"not a normal sequence: level {k} is not reflexive")
        for k in range(len(self.levels) - 1):
            nxt = self.levels[k + 1]
            if not compose(nxt, nxt) <= self.levels[k]:
                raise ValueError(
                    f"not a normal sequence: level {k + 1} squared escapes level {k}"
                )

    @property
    def depth(self) -> int:
        return len(self.levels)


def _maximal_cliques(adj: list[int], n: int) -> list[int]:
    """Bron-Kerbosch with pivoting; ``adj`` may carry self bits, ignored here."""
    nbr = [adj[i] & ~(1 << i) for i in range(n)]
    out: list[int] = []

    def bk(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            out.append(r)
            return
        pool = p | x
        pivot = max(iter_bits(pool), key=lambda v: (nbr[v] & p).bit_count())
        for v in iter_bits(p & ~nbr[pivot]):
            bit = 1 << v
            bk(r | bit, p & nbr[v], x & nbr[v])
            p &= ~bit
            x |= bit

    bk(0, (1 << n) - 1, 0)
    return sorted(out)


def min_small_cover(u: Relation) -> tuple[int, tuple[int, ...]]:
    """Smallest cover of the ground set by parts A with A x A inside u.

    A part is u-small exactly when it is a clique of the symmetric part of u,
    so this is an exact minimum clique cover, found by branch and bound over
    maximal cliques.  Exhaustive; capped at ground size 12.
    """
    n = u.ground.size
    if n > MAX_SMALL_COVER_SIZE:
        raise ValueError(f"min_small_cover is exact only; ground size capped at {MAX_SMALL_COVER_SIZE}")
    if not u.is_reflexive():
        raise ValueError("relation is not reflexive: some singleton is not small")
    inv = inverse(u)
    adj = [u.rows[i] & inv.rows[i] for i in range(n)]
    cliques = _maximal_cliques(adj, n)
    by_vertex: list[list[int]] = [[] for _ in range(n)]
    for c in cliques:
        for v in iter_bits(c):
            by_vertex[v].append(c)
    for v in range(n):
        by_vertex[v].sort(key=lambda c: (-c.bit_count(), c))

    full = (1 << n) - 1
    best_parts: list[int] = [1 << i for i in range(n)]
    best_count = n

    def search(covered: int, chosen: list[int]) -> None:
        nonlocal best_parts, best_count
        if covered == full:
            if len(chosen) < best_count:
                best_count = len(chosen)
                best_parts = list(chosen)
            return
        if len(chosen) + 1 >= best_count:
            return
        v = next(iter_bits(~covered & full))
        for c in by_vertex[v]:
            chosen.append(c)
            search(covered | c, chosen)
            chosen.pop()

    search(0, [])
    return best_count, tuple(sorted(best_parts))
