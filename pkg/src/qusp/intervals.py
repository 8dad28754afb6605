"""Exact rational interval sets inside the open unit interval.

A `RationalIntervalSet` is a normalized finite union of rational-endpoint
intervals: sorted, pairwise disjoint, never mergeable across a shared
endpoint, and clamped to (0, 1), which is the ambient ground for the whole
countable layer.  Membership is membership of a rational in one of the
listed intervals.

Endpoint bookkeeping uses three-valued cuts (value, tweak) with tweak in
{-1, 0, +1}, ordered lexicographically: the closed endpoint v is the cut
(v, 0), an open lower endpoint starts just above its value at (v, +1), an
open upper endpoint stops just below at (v, -1).  Two intervals merge
exactly when no rational cut fits strictly between the first upper cut and
the second lower cut; over the dense rationals that happens only when the
cuts share their value and the missing tweak pattern leaves no room, e.g.
(a, b) followed by [b, c] merges while (a, b) followed by (b, c) leaves
the single rational b out and must stay split.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .serialize import frac_str, parse_frac

Cut = tuple[Fraction, int]

GROUND_LOWER: Cut = (Fraction(0), 1)
GROUND_UPPER: Cut = (Fraction(1), -1)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self) -> None:
        lo = Fraction(self.lo)
        hi = Fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo < 0 or hi > 1:
            raise ValueError("interval endpoints must lie within [0, 1]")
        if lo > hi:
            raise ValueError("interval lower endpoint exceeds upper endpoint")

    @property
    def lower_cut(self) -> Cut:
        return (self.lo, 1 if self.lo_open else 0)

    @property
    def upper_cut(self) -> Cut:
        return (self.hi, -1 if self.hi_open else 0)

    def to_json(self) -> dict:
        return {
            "lo": frac_str(self.lo),
            "hi": frac_str(self.hi),
            "lo_open": self.lo_open,
            "hi_open": self.hi_open,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Interval":
        return cls(parse_frac(data["lo"]), parse_frac(data["hi"]), data["lo_open"], data["hi_open"])

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo},{self.hi}{right}"


def _cut_interval(lower: Cut, upper: Cut) -> Interval:
    return Interval(lower[0], upper[0], lo_open=lower[1] == 1, hi_open=upper[1] == -1)


def _mergeable(upper: Cut, lower: Cut) -> bool:
    """No rational sits strictly between the cuts, so the pieces join up."""
    if lower <= upper:
        return True
    if lower[0] != upper[0]:
        return False
    return (upper[1], lower[1]) in {(-1, 0), (0, 1)}


def _flip_up(cut: Cut) -> Cut:
    """Lower cut of the region just above an upper cut."""
    return (cut[0], cut[1] + 1)


def _flip_down(cut: Cut) -> Cut:
    """Upper cut of the region just below a lower cut."""
    return (cut[0], cut[1] - 1)


@dataclass(frozen=True)
class RationalIntervalSet:
    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @classmethod
    def of(cls, *intervals: Interval) -> "RationalIntervalSet":
        return cls(tuple(intervals))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def inf_cut(self) -> Cut | None:
        return self.intervals[0].lower_cut if self.intervals else None

    @property
    def sup_cut(self) -> Cut | None:
        return self.intervals[-1].upper_cut if self.intervals else None

    def measure(self) -> Fraction:
        return sum((iv.hi - iv.lo for iv in self.intervals), Fraction(0))

    def __contains__(self, q: Fraction) -> bool:
        cut = (Fraction(q), 0)
        return any(iv.lower_cut <= cut <= iv.upper_cut for iv in self.intervals)

    def __or__(self, other: "RationalIntervalSet") -> "RationalIntervalSet":
        return RationalIntervalSet(self.intervals + other.intervals)

    def __and__(self, other: "RationalIntervalSet") -> "RationalIntervalSet":
        pieces = []
        for a in self.intervals:
            for b in other.intervals:
                lower = max(a.lower_cut, b.lower_cut)
                upper = min(a.upper_cut, b.upper_cut)
                if lower <= upper:
                    pieces.append(_cut_interval(lower, upper))
        return RationalIntervalSet(tuple(pieces))

    def complement(self) -> "RationalIntervalSet":
        """Complement within the ground (0, 1)."""
        pieces = []
        cursor = GROUND_LOWER
        for iv in self.intervals:
            upper = _flip_down(iv.lower_cut)
            if cursor <= upper:
                pieces.append(_cut_interval(cursor, upper))
            cursor = _flip_up(iv.upper_cut)
        if cursor <= GROUND_UPPER:
            pieces.append(_cut_interval(cursor, GROUND_UPPER))
        return RationalIntervalSet(tuple(pieces))

    def __sub__(self, other: "RationalIntervalSet") -> "RationalIntervalSet":
        return self & other.complement()

    def __le__(self, other: "RationalIntervalSet") -> bool:
        return (self - other).is_empty

    def proper_subset_of(self, other: "RationalIntervalSet") -> bool:
        return self <= other and self != other

    def pick_point(self) -> Fraction:
        """A canonical member: endpoint when closed, midpoint otherwise."""
        if self.is_empty:
            raise ValueError("cannot pick a point from the empty set")
        iv = self.intervals[0]
        if not iv.lo_open:
            return iv.lo
        return (iv.lo + iv.hi) / 2

    def point_near_inf(self, margin: Fraction) -> Fraction:
        """A member within ``margin`` above the infimum."""
        if self.is_empty:
            raise ValueError("empty set has no points")
        iv = self.intervals[0]
        if not iv.lo_open:
            return iv.lo
        step = min(margin, iv.hi - iv.lo) / 2
        if step <= 0:
            raise ValueError("margin must be positive")
        return iv.lo + step

    def point_near_sup(self, margin: Fraction) -> Fraction:
        """A member within ``margin`` below the supremum."""
        if self.is_empty:
            raise ValueError("empty set has no points")
        iv = self.intervals[-1]
        if not iv.hi_open:
            return iv.hi
        step = min(margin, iv.hi - iv.lo) / 2
        if step <= 0:
            raise ValueError("margin must be positive")
        return iv.hi - step

    def grid_members(self, grid: Iterable[Fraction]) -> Iterator[Fraction]:
        for q in grid:
            if q in self:
                yield q

    def to_json(self) -> dict:
        return {"intervals": [iv.to_json() for iv in self.intervals]}

    @classmethod
    def from_json(cls, data: dict) -> "RationalIntervalSet":
        return cls(tuple(Interval.from_json(item) for item in data["intervals"]))

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        return " u ".join(str(iv) for iv in self.intervals)


def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    clamped: list[tuple[Cut, Cut]] = []
    for iv in intervals:
        lower = max(iv.lower_cut, GROUND_LOWER)
        upper = min(iv.upper_cut, GROUND_UPPER)
        if lower <= upper:
            clamped.append((lower, upper))
    clamped.sort()
    merged: list[tuple[Cut, Cut]] = []
    for lower, upper in clamped:
        if merged and _mergeable(merged[-1][1], lower):
            prev_lower, prev_upper = merged[-1]
            merged[-1] = (prev_lower, max(prev_upper, upper))
        else:
            merged.append((lower, upper))
    return tuple(_cut_interval(lower, upper) for lower, upper in merged)


EMPTY = RationalIntervalSet(())
GROUND = RationalIntervalSet((Interval(Fraction(0), Fraction(1)),))


def iv(lo, hi, lo_open: bool = True, hi_open: bool = True) -> RationalIntervalSet:
    """One-interval set; endpoints accept ints, strings, or Fractions."""
    return RationalIntervalSet((Interval(Fraction(lo), Fraction(hi), lo_open, hi_open),))


def point(q) -> RationalIntervalSet:
    q = Fraction(q)
    return RationalIntervalSet((Interval(q, q, lo_open=False, hi_open=False),))


def rational_grid(count: int) -> tuple[Fraction, ...]:
    """Evenly spaced rationals i / (count + 1) strictly inside (0, 1)."""
    return tuple(Fraction(i, count + 1) for i in range(1, count + 1))
