"""Finite quasi-uniformities as principal filters of preorders.

Every quasi-uniformity on a finite set is the up-filter of a unique
preorder, its minimum entourage: the filter axioms force the intersection
of all entourages to be reflexive, and on a finite set the "half of a half"
axiom can only bottom out on a transitive relation.  All filter-level
notions are therefore evaluated on minimum entourages, which makes each of
them decidable and canonical.

Finite topologies correspond bijectively to preorders through the
specialization order (x below y iff every open set containing x contains
y), so topologies are stored by that preorder and their open families are
only materialized on demand for small grounds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .relcore import (
    GroundSet,
    Relation,
    image,
    inverse,
    is_preorder,
    min_small_cover,
)

MAX_OPENS_GROUND = 16


@dataclass(frozen=True)
class FiniteQuasiUniformity:
    """The up-filter {U : U contains min_entourage} of a preorder."""

    ground: GroundSet
    min_entourage: Relation

    def __post_init__(self) -> None:
        if self.min_entourage.ground != self.ground:
            raise ValueError("minimum entourage ground mismatch")
        if not is_preorder(self.min_entourage):
            raise ValueError("minimum entourage must be a preorder")

    @classmethod
    def discrete(cls, g: GroundSet) -> "FiniteQuasiUniformity":
        return cls(g, Relation.identity(g))

    @classmethod
    def indiscrete(cls, g: GroundSet) -> "FiniteQuasiUniformity":
        return cls(g, Relation.full(g))

    def to_json(self) -> dict:
        return {"min": self.min_entourage.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteQuasiUniformity":
        rel = Relation.from_json(data["min"])
        return cls(rel.ground, rel)


@dataclass(frozen=True)
class FiniteTopology:
    """A finite topology, stored by its specialization preorder."""

    ground: GroundSet
    specialization: Relation

    def __post_init__(self) -> None:
        if self.specialization.ground != self.ground:
            raise ValueError("specialization ground mismatch")
        if not is_preorder(self.specialization):
            raise ValueError("specialization must be a preorder")

    def is_open(self, subset: int) -> bool:
        return image(self.specialization, subset) & ~subset == 0

    def opens(self) -> tuple[int, ...]:
        """All open sets as bit masks.  Guarded: the family has up to 2^n members."""
        n = self.ground.size
        if n > MAX_OPENS_GROUND:
            raise ValueError(f"opens only materialized for ground size <= {MAX_OPENS_GROUND}")
        return tuple(m for m in range(1 << n) if self.is_open(m))

    def is_coarser_than(self, other: "FiniteTopology") -> bool:
        """Every open of self is open in other; equivalent to a specialization containment."""
        if self.ground != other.ground:
            raise ValueError("topologies live on different ground sets")
        return other.specialization <= self.specialization


def from_base(base: list[Relation]) -> FiniteQuasiUniformity:
    """Quasi-uniformity generated by reflexive relations, when one exists.

    The generated filter has minimum equal to the intersection of the base;
    it is a quasi-uniformity exactly when that intersection is a preorder,
    since no strictly smaller relation is available to halve it.
    """
    if not base:
        raise ValueError("base must be nonempty")
    acc = base[0]
    for rel in base[1:]:
        acc = acc & rel
    for rel in base:
        if not rel.is_reflexive():
            raise ValueError("not a quasi-uniformity base: a base relation is not reflexive")
    if not is_preorder(acc):
        raise ValueError("not a quasi-uniformity base: intersection is not transitive")
    return FiniteQuasiUniformity(acc.ground, acc)


def conjugate(q: FiniteQuasiUniformity) -> FiniteQuasiUniformity:
    return FiniteQuasiUniformity(q.ground, inverse(q.min_entourage))


def symmetrize(q: FiniteQuasiUniformity) -> FiniteQuasiUniformity:
    sym = q.min_entourage & inverse(q.min_entourage)
    return FiniteQuasiUniformity(q.ground, sym)


def topology_of(q: FiniteQuasiUniformity) -> FiniteTopology:
    """Topology whose neighbourhood filter at x is generated by min_entourage(x).

    Open sets are exactly the up-sets of the minimum entourage, whose
    specialization preorder is that entourage itself.
    """
    return FiniteTopology(q.ground, q.min_entourage)


def join_topologies(t1: FiniteTopology, t2: FiniteTopology) -> FiniteTopology:
    """Coarsest topology refining both: intersect specialization preorders."""
    if t1.ground != t2.ground:
        raise ValueError("topologies live on different ground sets")
    return FiniteTopology(t1.ground, t1.specialization & t2.specialization)


def is_uniformly_connected(q: FiniteQuasiUniformity) -> tuple[bool, int | None]:
    """No proper nonempty subset is fixed by the minimum entourage's image.

    A subset is uniformly isolated iff it is a proper nonempty up-set of the
    minimum entourage (image is monotone in the relation, so the minimum is
    the hardest entourage to escape).  A proper up-set exists iff some
    principal up-set row(x) is proper, which doubles as the witness.
    """
    full = q.ground.full_mask
    for x in range(q.ground.size):
        row = q.min_entourage.rows[x]
        if row != full:
            return False, row
    return True, None


def ll(a: int, b: int, q: FiniteQuasiUniformity) -> bool:
    """Some entourage maps a into b; on principal filters, test the minimum."""
    return image(q.min_entourage, a) & ~b == 0


def boundedness_number(q: FiniteQuasiUniformity) -> int:
    """One more than the minimum small-cover size of the minimum entourage.

    Smallness is monotone in the entourage, so the minimum entourage needs
    the most parts; the "+1" keeps the count a strict bound.
    """
    count, _ = min_small_cover(q.min_entourage)
    return count + 1
