"""Generic fixpoint iteration over products of ordered components.

A ``ReductionFunction`` is an inflationary, monotonic transformer on the
components named by its scheme.  ``run`` drives a set of such functions to a
common fixpoint using one of four worklist disciplines:

* ``ci``   -- pending set, the applied function is removed before the
              change test (so it re-enters when it changed its own inputs);
* ``cii``  -- pending set, removal after the change test (appropriate for
              idempotent functions: never immediately re-applied);
* ``ciq``  -- FIFO queue with duplicates, dequeue before the change test;
* ``ciiq`` -- FIFO queue, dequeue after the change test.

On a change, exactly the functions depending on a changed component are woken
up.  Termination is guaranteed on finite-chain components; a step cap guards
against the general case, where infinite executions exist.
"""

from __future__ import annotations

import enum
import random
import zlib
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .csp import Scheme
from .errors import ConfigError, ProbeRejectionError, ResourceLimitError
from . import lattice
from .lattice import (
    GridInterval, GrowSetValue, IntGrid, PowersetValue, ProductValue,
)

DEFAULT_STEP_CAP = 10**6

MODES = ("ci", "cii", "ciq", "ciiq")


@dataclass(frozen=True)
class ReductionFunction:
    """A named, scheme-tagged transformer on the product of its components.

    ``apply`` takes and returns one value per scheme position.  ``idempotent``
    is a declared property (the engine can verify it by sampling but never
    assumes it except in the ``cii``/``ciiq`` disciplines, which are only
    appropriate for idempotent functions).  ``group`` keys block scheduling.
    """

    fid: str
    scheme: Scheme
    apply: Callable[[tuple], tuple]
    idempotent: bool = True
    group: str | None = None


class Outcome(enum.Enum):
    CONVERGED = "converged"
    STEP_LIMIT = "step-limit"
    EMPTY_COMPONENT = "empty-component"


@dataclass(frozen=True)
class TraceStep:
    fid: str
    changed: bool
    changed_components: tuple[int, ...]


@dataclass
class RunTrace:
    steps: list[TraceStep] = field(default_factory=list)
    total_applications: int = 0
    outcome: Outcome = Outcome.CONVERGED


@dataclass
class FixpointResult:
    value: ProductValue
    trace: RunTrace

    @property
    def converged(self) -> bool:
        return self.trace.outcome is Outcome.CONVERGED


# ---------------------------------------------------------------------------
# Scheduling strategies


class Strategy:
    """Resolves the nondeterminism left open by the iteration loops: which
    pending function a set mode picks next, and in what order a batch of
    woken functions enters a queue."""

    name = "base"

    def reset(self, functions: Sequence[ReductionFunction]) -> None:
        pass

    def choose(self, pending: Sequence[ReductionFunction]) -> ReductionFunction:
        raise NotImplementedError

    def batch(self, functions: Sequence[ReductionFunction]) -> list[ReductionFunction]:
        raise NotImplementedError


class DetStrategy(Strategy):
    """Deterministic: lowest function id first."""

    name = "det"

    def choose(self, pending):
        return min(pending, key=lambda f: f.fid)

    def batch(self, functions):
        return sorted(functions, key=lambda f: f.fid)


class SeededStrategy(Strategy):
    """Pseudo-random with a fixed seed; reproducible across runs."""

    name = "seeded"

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def reset(self, functions):
        self._rng = random.Random(self.seed)

    def choose(self, pending):
        return self._rng.choice(sorted(pending, key=lambda f: f.fid))

    def batch(self, functions):
        out = sorted(functions, key=lambda f: f.fid)
        self._rng.shuffle(out)
        return out


class LifoStrategy(Strategy):
    """Most recently woken function first."""

    name = "lifo"

    def choose(self, pending):
        return pending[-1]

    def batch(self, functions):
        return sorted(functions, key=lambda f: f.fid, reverse=True)


class RoundRobinStrategy(Strategy):
    """Cycles through the registered ids, taking the next one pending."""

    name = "roundrobin"

    def __init__(self):
        self._order: list[str] = []
        self._pos = 0

    def reset(self, functions):
        self._order = sorted(f.fid for f in functions)
        self._pos = 0

    def choose(self, pending):
        have = {f.fid: f for f in pending}
        k = len(self._order)
        for off in range(k):
            fid = self._order[(self._pos + off) % k]
            if fid in have:
                self._pos = (self._pos + off + 1) % k
                return have[fid]
        raise ConfigError("round-robin strategy saw an unregistered function")

    def batch(self, functions):
        return sorted(functions, key=lambda f: f.fid)


class BlockStrategy(Strategy):
    """Keeps the functions of one group (typically one constraint) together."""

    name = "block"

    @staticmethod
    def _key(f):
        return (f.group or f.fid, f.fid)

    def choose(self, pending):
        return min(pending, key=self._key)

    def batch(self, functions):
        return sorted(functions, key=self._key)


def make_strategy(name: str, seed: int = 0) -> Strategy:
    if name == "det":
        return DetStrategy()
    if name == "seeded":
        return SeededStrategy(seed)
    if name == "lifo":
        return LifoStrategy()
    if name == "roundrobin":
        return RoundRobinStrategy()
    if name == "block":
        return BlockStrategy()
    raise ConfigError(f"unknown strategy {name!r}")


# ---------------------------------------------------------------------------
# Canonical extension and application


def extend(f: ReductionFunction, arity: int) -> Callable[[ProductValue], ProductValue]:
    """Lift ``f`` to the full product: apply it to its scheme's components
    and copy every other component unchanged."""
    if any(i < 1 or i > arity for i in f.scheme):
        raise ConfigError(
            f"function {f.fid!r} has scheme {f.scheme.indices} outside 1..{arity}")

    def extended(d: ProductValue) -> ProductValue:
        if len(d) != arity:
            raise ConfigError(f"expected a product of {arity} components")
        out = f.apply(tuple(d.component(i) for i in f.scheme))
        return d.replace(dict(zip(f.scheme.indices, out)))

    return extended


def apply_step(f: ReductionFunction, d: ProductValue):
    """Apply ``f`` in place of its scheme; returns (new product, changed idxs)."""
    args = tuple(d.component(i) for i in f.scheme)
    out = tuple(f.apply(args))
    if len(out) != len(args):
        raise ConfigError(f"function {f.fid!r} returned {len(out)} components "
                          f"for a {len(args)}-ary scheme")
    changed = []
    updates = {}
    for i, old, new in zip(f.scheme.indices, args, out):
        if new != old:
            if not lattice.leq(old, new):
                raise ProbeRejectionError(f.fid, "produced a non-inflationary step")
            changed.append(i)
            updates[i] = new
    return (d.replace(updates) if updates else d), tuple(changed)


# ---------------------------------------------------------------------------
# Registration probes


def _random_value_like(v, rng: random.Random):
    if isinstance(v, PowersetValue):
        return v.with_elements(a for a in v.base if rng.random() < 0.6)
    if isinstance(v, GridInterval):
        if rng.random() < 0.15:
            return GridInterval.empty(v.grid)
        if isinstance(v.grid, IntGrid):
            a = rng.randint(v.grid.lo, v.grid.hi)
            b = rng.randint(v.grid.lo, v.grid.hi)
        else:
            a = rng.choice(v.grid.points)
            b = rng.choice(v.grid.points)
        return GridInterval(v.grid, min(a, b), max(a, b))
    if isinstance(v, GrowSetValue):
        return GrowSetValue.bottom(v.seed)
    raise ConfigError(f"cannot sample values of kind {type(v).__name__}")


def _random_above(v, rng: random.Random):
    """A random value >= v in the component order."""
    if isinstance(v, PowersetValue):
        return v.with_elements(a for a in v.elements if rng.random() < 0.7)
    if isinstance(v, GridInterval):
        if v.is_empty or rng.random() < 0.15:
            return GridInterval.empty(v.grid)
        if isinstance(v.grid, IntGrid):
            a = rng.randint(v.lo, v.hi)
            b = rng.randint(v.lo, v.hi)
            return GridInterval(v.grid, min(a, b), max(a, b))
        pts = [p for p in v.grid.points if v.lo <= p <= v.hi]
        a, b = rng.choice(pts), rng.choice(pts)
        return GridInterval(v.grid, min(a, b), max(a, b))
    if isinstance(v, GrowSetValue):
        return v
    raise ConfigError(f"cannot sample values of kind {type(v).__name__}")


def probe_function(f: ReductionFunction, start: ProductValue,
                   samples: int = 6, seed: int = 0) -> None:
    """Spot-check that ``f`` is inflationary and monotonic on random inputs
    drawn from its components; raises ``ProbeRejectionError`` on failure."""
    rng = random.Random(zlib.crc32(f.fid.encode()) ^ seed)
    bottoms = tuple(start.component(i) for i in f.scheme)
    for _ in range(samples):
        x = tuple(_random_value_like(b, rng) for b in bottoms)
        fx = tuple(f.apply(x))
        if len(fx) != len(x):
            raise ProbeRejectionError(f.fid, "wrong output arity")
        if not all(lattice.leq(a, b) for a, b in zip(x, fx)):
            raise ProbeRejectionError(f.fid, "failed the inflation probe")
        y = tuple(_random_above(c, rng) for c in x)
        fy = tuple(f.apply(y))
        if not all(lattice.leq(a, b) for a, b in zip(fx, fy)):
            raise ProbeRejectionError(f.fid, "failed the monotonicity probe")


# ---------------------------------------------------------------------------
# The iteration loops


def run(functions: Iterable[ReductionFunction], start: ProductValue,
        mode: str = "ci", strategy: Strategy | None = None,
        step_cap: int = DEFAULT_STEP_CAP, early_exit: bool = False,
        validate: bool = True, probe_samples: int = 6) -> FixpointResult:
    """Iterate ``functions`` from ``start`` until no application changes the
    state (a common fixpoint) or a limit is hit.

    Started from the bottom product, a converged run yields the least common
    fixpoint of the extended functions, independent of mode and strategy.
    """
    functions = list(functions)
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    n = len(start)
    fids = [f.fid for f in functions]
    if len(set(fids)) != len(fids):
        raise ConfigError("duplicate function ids in one run")
    for f in functions:
        if any(i < 1 or i > n for i in f.scheme):
            raise ConfigError(
                f"function {f.fid!r} has scheme {f.scheme.indices} outside 1..{n}")
    if validate:
        for f in functions:
            probe_function(f, start, samples=probe_samples)

    strategy = strategy or DetStrategy()
    strategy.reset(functions)
    trace = RunTrace()
    d = start

    def emptied(idxs) -> int | None:
        for i in idxs:
            if lattice.is_empty_value(d.component(i)):
                return i
        return None

    if early_exit and emptied(range(1, n + 1)) is not None:
        trace.outcome = Outcome.EMPTY_COMPONENT
        return FixpointResult(d, trace)

    by_fid = {f.fid: f for f in functions}

    def wake_set(changed):
        cs = set(changed)
        return [f for f in functions if cs.intersection(f.scheme.indices)]

    if mode in ("ci", "cii"):
        pending: dict[str, ReductionFunction] = {}
        for f in strategy.batch(functions):
            pending[f.fid] = f
        while pending:
            if trace.total_applications >= step_cap:
                trace.outcome = Outcome.STEP_LIMIT
                return FixpointResult(d, trace)
            g = strategy.choose(list(pending.values()))
            if mode == "ci":
                del pending[g.fid]
            d2, changed = apply_step(g, d)
            trace.total_applications += 1
            trace.steps.append(TraceStep(g.fid, bool(changed), changed))
            if changed:
                for f in strategy.batch(wake_set(changed)):
                    pending.setdefault(f.fid, f)
                d = d2
            if mode == "cii":
                pending.pop(g.fid, None)
            if early_exit and changed and emptied(changed) is not None:
                trace.outcome = Outcome.EMPTY_COMPONENT
                return FixpointResult(d, trace)
    else:
        queue: deque[str] = deque(f.fid for f in strategy.batch(functions))
        while queue:
            if trace.total_applications >= step_cap:
                trace.outcome = Outcome.STEP_LIMIT
                return FixpointResult(d, trace)
            g = by_fid[queue[0]]
            if mode == "ciq":
                queue.popleft()
            d2, changed = apply_step(g, d)
            trace.total_applications += 1
            trace.steps.append(TraceStep(g.fid, bool(changed), changed))
            if changed:
                queue.extend(f.fid for f in strategy.batch(wake_set(changed)))
                d = d2
            if mode == "ciiq":
                queue.popleft()
            if early_exit and changed and emptied(changed) is not None:
                trace.outcome = Outcome.EMPTY_COMPONENT
                return FixpointResult(d, trace)

    trace.outcome = Outcome.CONVERGED
    return FixpointResult(d, trace)


# ---------------------------------------------------------------------------
# Idempotent closure and limit comparison


def closure_star(f: ReductionFunction, step_cap: int = DEFAULT_STEP_CAP) -> ReductionFunction:
    """The function iterating ``f`` on its own components to a local fixpoint.

    On finite-chain components the result is idempotent; if the cap is hit
    before a local fixpoint is reached, the application fails loudly.
    """

    def star(args: tuple) -> tuple:
        cur = tuple(args)
        for _ in range(step_cap):
            nxt = tuple(f.apply(cur))
            if nxt == cur:
                return cur
            cur = nxt
        raise ResourceLimitError(
            f"closure of {f.fid!r} did not reach a fixpoint within {step_cap} steps")

    return ReductionFunction(
        fid=f.fid + "*", scheme=f.scheme, apply=star, idempotent=True, group=f.group)


@dataclass(frozen=True)
class LimitComparison:
    """Componentwise order between two fixpoints: ``relation`` is one of
    ``less`` (the first carries less information), ``equal``, ``greater``,
    ``incomparable`` or ``inconclusive`` (some run hit its cap)."""

    relation: str
    left: ProductValue | None
    right: ProductValue | None


def compare_limits(fs: Iterable[ReductionFunction], gs: Iterable[ReductionFunction],
                   start: ProductValue, mode: str = "ci",
                   strategy: Strategy | None = None,
                   step_cap: int = DEFAULT_STEP_CAP,
                   validate: bool = True) -> LimitComparison:
    """Run both function sets from the same start and compare the limits."""
    a = run(fs, start, mode=mode, strategy=strategy or DetStrategy(),
            step_cap=step_cap, validate=validate)
    b = run(gs, start, mode=mode, strategy=strategy or DetStrategy(),
            step_cap=step_cap, validate=validate)
    if not (a.converged and b.converged):
        return LimitComparison("inconclusive",
                               a.value if a.converged else None,
                               b.value if b.converged else None)
    below = lattice.leq(a.value, b.value)
    above = lattice.leq(b.value, a.value)
    if below and above:
        rel = "equal"
    elif below:
        rel = "less"
    elif above:
        rel = "greater"
    else:
        rel = "incomparable"
    return LimitComparison(rel, a.value, b.value)
