"""Ordered value families the propagation state is built from.

Three component kinds are provided, plus their Cartesian product:

* ``PowersetValue`` -- a finite subset of a fixed base set, ordered by
  *reverse* inclusion (smaller set = more information).  The least element
  is the full base set and the join of two subsets is their intersection.
* ``GridInterval`` -- an interval whose endpoints are drawn from a fixed
  finite grid of bounds (all integers of a range, or an explicit point set
  that may include +/-inf).  Ordered by reverse inclusion; join is
  intersection; the least element is the full ``[min..max]`` interval.
* ``GrowSetValue`` -- a set of opaque items that only ever grows from a
  fixed seed (used for accumulating derived linear inequalities).  Ordered
  by direct inclusion of the item sets; join is union.

All values are immutable and hashable; equality is structural, which is
what the engine's change detection relies on.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable

from .errors import ConfigError, DataError


def atom_key(a):
    """Total order over mixed atom types, used only for canonical printing."""
    if isinstance(a, bool):
        return (0, float(a), repr(a))
    if isinstance(a, (int, float)):
        return (0, float(a), repr(a))
    if isinstance(a, str):
        return (1, 0.0, a)
    if isinstance(a, tuple):
        return (2, float(len(a)), tuple(atom_key(x) for x in a))
    return (3, 0.0, repr(a))


# ---------------------------------------------------------------------------
# Powerset components


@dataclass(frozen=True)
class PowersetValue:
    """A subset of ``base`` under the reverse-inclusion order."""

    base: frozenset
    elements: frozenset

    def __post_init__(self):
        object.__setattr__(self, "base", frozenset(self.base))
        object.__setattr__(self, "elements", frozenset(self.elements))
        if not self.elements <= self.base:
            raise ConfigError("powerset value has elements outside its base set")

    @classmethod
    def bottom(cls, base: Iterable) -> "PowersetValue":
        base = frozenset(base)
        return cls(base, base)

    @property
    def is_empty(self) -> bool:
        return not self.elements

    def with_elements(self, elements: Iterable) -> "PowersetValue":
        return PowersetValue(self.base, frozenset(elements))


# ---------------------------------------------------------------------------
# Grid intervals


@dataclass(frozen=True)
class IntGrid:
    """The grid of all integers in ``[lo..hi]``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ConfigError(f"integer grid [{self.lo}..{self.hi}] is empty")

    @property
    def min(self) -> int:
        return self.lo

    @property
    def max(self) -> int:
        return self.hi

    def __contains__(self, p) -> bool:
        return isinstance(p, int) and self.lo <= p <= self.hi

    def snap_down(self, x):
        """Largest grid point <= x, or None when x is below the grid."""
        p = math.floor(x)
        if p < self.lo:
            return None
        return min(p, self.hi)

    def snap_up(self, x):
        """Smallest grid point >= x, or None when x is above the grid."""
        p = math.ceil(x)
        if p > self.hi:
            return None
        return max(p, self.lo)


@dataclass(frozen=True)
class PointGrid:
    """An explicit finite set of bounds; may include -inf and +inf."""

    points: tuple

    def __post_init__(self):
        pts = tuple(sorted(set(self.points)))
        if not pts:
            raise ConfigError("point grid needs at least one bound")
        object.__setattr__(self, "points", pts)

    @property
    def min(self):
        return self.points[0]

    @property
    def max(self):
        return self.points[-1]

    def __contains__(self, p) -> bool:
        i = bisect_left(self.points, p)
        return i < len(self.points) and self.points[i] == p

    def snap_down(self, x):
        i = bisect_right(self.points, x)
        return self.points[i - 1] if i else None

    def snap_up(self, x):
        i = bisect_left(self.points, x)
        return self.points[i] if i < len(self.points) else None


@dataclass(frozen=True)
class GridInterval:
    """An interval with endpoints on ``grid``; ``lo=hi=None`` is the one
    canonical empty interval, so structural equality is sound for fixpoint
    detection."""

    grid: IntGrid | PointGrid
    lo: object = None
    hi: object = None

    def __post_init__(self):
        if (self.lo is None) != (self.hi is None):
            raise ConfigError("interval endpoints must both be set or both be None")
        if self.lo is not None:
            if self.lo not in self.grid or self.hi not in self.grid:
                raise ConfigError("interval endpoints must lie on the grid")
            if self.hi < self.lo:
                object.__setattr__(self, "lo", None)
                object.__setattr__(self, "hi", None)

    @classmethod
    def full(cls, grid) -> "GridInterval":
        return cls(grid, grid.min, grid.max)

    @classmethod
    def empty(cls, grid) -> "GridInterval":
        return cls(grid, None, None)

    @property
    def is_empty(self) -> bool:
        return self.lo is None

    def __contains__(self, x) -> bool:
        return not self.is_empty and self.lo <= x <= self.hi

    def members(self) -> list:
        """Enumerate the integer members; only defined over integer grids."""
        if not isinstance(self.grid, IntGrid):
            raise ConfigError("only intervals over integer grids are enumerable")
        if self.is_empty:
            return []
        return list(range(self.lo, self.hi + 1))


def interval_intersect(a: GridInterval, b: GridInterval) -> GridInterval:
    """Intersection of two intervals over the same grid, normalized so that
    an empty result is the canonical empty interval."""
    if a.grid != b.grid:
        raise ConfigError("cannot intersect intervals over different grids")
    if a.is_empty or b.is_empty:
        return GridInterval.empty(a.grid)
    return GridInterval(a.grid, max(a.lo, b.lo), min(a.hi, b.hi))


def interval_hull(xs: Iterable, grid) -> GridInterval:
    """The smallest interval with endpoints on ``grid`` containing ``xs``."""
    xs = list(xs)
    if not xs:
        return GridInterval.empty(grid)
    lo = grid.snap_down(min(xs))
    hi = grid.snap_up(max(xs))
    if lo is None or hi is None:
        raise DataError("point outside the grid range")
    return GridInterval(grid, lo, hi)


# ---------------------------------------------------------------------------
# Growing item sets


@dataclass(frozen=True)
class GrowSetValue:
    """A set of opaque items that accumulates on top of a fixed seed.

    Unlike the other families this one is ordered by *direct* inclusion
    (more items = more information) and has no finite-chain guarantee.
    """

    seed: frozenset
    items: frozenset

    def __post_init__(self):
        object.__setattr__(self, "seed", frozenset(self.seed))
        object.__setattr__(self, "items", frozenset(self.items))
        if not self.seed <= self.items:
            raise ConfigError("grow-set items must contain the seed")

    @classmethod
    def bottom(cls, seed: Iterable) -> "GrowSetValue":
        seed = frozenset(seed)
        return cls(seed, seed)

    def with_items(self, items: Iterable) -> "GrowSetValue":
        return GrowSetValue(self.seed, frozenset(items))


# ---------------------------------------------------------------------------
# Products and generic operations


@dataclass(frozen=True)
class ProductValue:
    """Componentwise product of lattice values (mixed kinds allowed)."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def __len__(self) -> int:
        return len(self.components)

    def component(self, i: int):
        """1-based component access."""
        return self.components[i - 1]

    def replace(self, updates: dict) -> "ProductValue":
        """New product with 1-based components replaced per ``updates``."""
        comps = list(self.components)
        for i, v in updates.items():
            comps[i - 1] = v
        return ProductValue(tuple(comps))


LatticeValue = PowersetValue | GridInterval | GrowSetValue | ProductValue


def _pair_kind(a, b, kind):
    return isinstance(a, kind) and isinstance(b, kind)


def leq(a: LatticeValue, b: LatticeValue) -> bool:
    """The component order: does ``b`` carry at least as much information?"""
    if _pair_kind(a, b, PowersetValue):
        if a.base != b.base:
            raise ConfigError("cannot compare powerset values over different bases")
        return a.elements >= b.elements
    if _pair_kind(a, b, GridInterval):
        if a.grid != b.grid:
            raise ConfigError("cannot compare intervals over different grids")
        if b.is_empty:
            return True
        if a.is_empty:
            return False
        return a.lo <= b.lo and b.hi <= a.hi
    if _pair_kind(a, b, GrowSetValue):
        if a.seed != b.seed:
            raise ConfigError("cannot compare grow-sets with different seeds")
        return a.items <= b.items
    if _pair_kind(a, b, ProductValue):
        if len(a) != len(b):
            raise ConfigError("cannot compare products of different lengths")
        return all(leq(x, y) for x, y in zip(a.components, b.components))
    raise ConfigError(
        f"cannot compare {type(a).__name__} with {type(b).__name__}"
    )


def join(a: LatticeValue, b: LatticeValue) -> LatticeValue:
    """Least upper bound of two values from the same component structure."""
    if _pair_kind(a, b, PowersetValue):
        if a.base != b.base:
            raise ConfigError("cannot join powerset values over different bases")
        return PowersetValue(a.base, a.elements & b.elements)
    if _pair_kind(a, b, GridInterval):
        return interval_intersect(a, b)
    if _pair_kind(a, b, GrowSetValue):
        if a.seed != b.seed:
            raise ConfigError("cannot join grow-sets with different seeds")
        return GrowSetValue(a.seed, a.items | b.items)
    if _pair_kind(a, b, ProductValue):
        if len(a) != len(b):
            raise ConfigError("cannot join products of different lengths")
        return ProductValue(tuple(join(x, y) for x, y in zip(a.components, b.components)))
    raise ConfigError(f"cannot join {type(a).__name__} with {type(b).__name__}")


def bottom_like(v: LatticeValue) -> LatticeValue:
    """The least element of the component structure ``v`` belongs to."""
    if isinstance(v, PowersetValue):
        return PowersetValue.bottom(v.base)
    if isinstance(v, GridInterval):
        return GridInterval.full(v.grid)
    if isinstance(v, GrowSetValue):
        return GrowSetValue.bottom(v.seed)
    if isinstance(v, ProductValue):
        return ProductValue(tuple(bottom_like(c) for c in v.components))
    raise ConfigError(f"no bottom for {type(v).__name__}")


def is_empty_value(v: LatticeValue) -> bool:
    """True when a component denotes the empty set of concrete values."""
    if isinstance(v, PowersetValue):
        return v.is_empty
    if isinstance(v, GridInterval):
        return v.is_empty
    return False


def has_finite_chains(v: LatticeValue) -> bool:
    """Whether every strictly increasing chain from ``v``'s structure is finite."""
    if isinstance(v, (PowersetValue, GridInterval)):
        return True
    if isinstance(v, GrowSetValue):
        return False
    if isinstance(v, ProductValue):
        return all(has_finite_chains(c) for c in v.components)
    raise ConfigError(f"unknown lattice value {type(v).__name__}")
