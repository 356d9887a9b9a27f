"""Shared helpers: random problem generation, brute-force oracles, and the
divergent three-function fixture used by the non-termination tests."""

import itertools
import random

import pytest

from propeng.csp import CSP, Constraint, ExtensionalBody, Scheme, SetDomain
from propeng.engine import ReductionFunction, Strategy
from propeng.lattice import GridInterval, IntGrid, PowersetValue, ProductValue


def random_set_csp(rng: random.Random, max_vars=4, max_atoms=3, max_constraints=4,
                   min_vars=2) -> CSP:
    """A random extensional problem over small finite set domains."""
    n = rng.randint(min_vars, max_vars)
    domains = tuple(
        SetDomain(frozenset(range(rng.randint(1, max_atoms)))) for _ in range(n))
    constraints = []
    for ci in range(rng.randint(1, max_constraints)):
        arity = rng.randint(1, min(3, n))
        scheme = Scheme(tuple(rng.sample(range(1, n + 1), arity)))
        space = list(itertools.product(*(domains[i - 1].members() for i in scheme)))
        tuples = frozenset(t for t in space if rng.random() < 0.6)
        constraints.append(Constraint(f"c{ci + 1}", scheme, ExtensionalBody(tuples)))
    return CSP(domains, tuple(constraints))


def random_binary_constraint(rng: random.Random, left, right, cid="c1",
                             scheme=(1, 2)) -> Constraint:
    space = list(itertools.product(sorted(left), sorted(right)))
    tuples = frozenset(t for t in space if rng.random() < 0.6)
    return Constraint(cid, Scheme(scheme), ExtensionalBody(tuples))


def brute_force_join(csp: CSP, members) -> frozenset:
    """Tuples over the union scheme whose restrictions lie in every member,
    by plain enumeration over the declared domains."""
    from propeng.csp import scheme_union
    union = scheme_union([c.scheme for c in members])
    out = set()
    for combo in itertools.product(*(csp.domain_members(i) for i in union)):
        at = dict(zip(union.indices, combo))
        if all(tuple(at[i] for i in c.scheme) in c.tuples for c in members):
            out.add(combo)
    return frozenset(out)


def all_subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from (frozenset(c) for c in itertools.combinations(items, r))


def powerset_states(bases):
    """Every product state over powerset components with the given bases."""
    per = [[PowersetValue(b, s) for s in all_subsets(b)] for b in bases]
    for combo in itertools.product(*per):
        yield ProductValue(tuple(combo))


def brute_force_least_fixpoint(functions, states, start):
    """The unique minimal common fixpoint above nothing in particular,
    located by scanning every state of a (small) product lattice."""
    from propeng import engine, lattice
    fixpoints = []
    for s in states:
        if all(engine.apply_step(f, s)[1] == () for f in functions):
            fixpoints.append(s)
    least = [s for s in fixpoints
             if all(lattice.leq(s, other) for other in fixpoints)]
    assert len(least) == 1, "expected a unique least common fixpoint"
    return least[0]


def union_of_arc_consistent_boxes(csp: CSP):
    """Componentwise union of every arc-consistent sub-box of the domains."""
    n = csp.arity
    bases = [frozenset(csp.domain_members(i)) for i in range(1, n + 1)]
    best = [set() for _ in range(n)]
    for box in itertools.product(*(list(all_subsets(b)) for b in bases)):
        ok = True
        for c in csp.constraints:
            live = [t for t in c.tuples
                    if all(x in box[i - 1] for i, x in zip(c.scheme, t))]
            for k, i in enumerate(c.scheme):
                if box[i - 1] - {t[k] for t in live}:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for k in range(n):
                best[k] |= box[k]
    return [frozenset(b) for b in best]


# ---------------------------------------------------------------------------
# The divergent counter fixture: a counter that two functions keep bumping
# and a third sends straight to the top sentinel value.

OMEGA = 2000


class AlternatingStrategy(Strategy):
    """Always picks f1, f2, f1, f2, ... ignoring the third function."""

    name = "alternating"

    def reset(self, functions):
        self._next = "f1"

    def choose(self, pending):
        pick = next(f for f in pending if f.fid == self._next)
        self._next = "f2" if self._next == "f1" else "f1"
        return pick

    def batch(self, functions):
        return sorted(functions, key=lambda f: f.fid)


@pytest.fixture
def counter_fixture():
    """(functions, start): f1 bumps even counters, f2 bumps odd ones, f0
    jumps to the sentinel; alternating f1,f2 never converges."""
    grid = IntGrid(0, OMEGA)

    def bump(parity):
        def apply(args):
            (v,) = args
            if not v.is_empty and v.lo % 2 == parity and v.lo < OMEGA:
                return (GridInterval(grid, v.lo + 1, OMEGA),)
            return (v,)
        return apply

    def jump(args):
        return (GridInterval(grid, OMEGA, OMEGA),)

    fns = [
        ReductionFunction("f0", Scheme((1,)), jump),
        ReductionFunction("f1", Scheme((1,)), bump(0)),
        ReductionFunction("f2", Scheme((1,)), bump(1)),
    ]
    start = ProductValue((GridInterval.full(grid),))
    return fns, start


# ---------------------------------------------------------------------------
# Recurring example problems


@pytest.fixture
def eq_ne_csp():
    """Equality and inequality over the 0-1 domain: arc consistent but has
    no solutions."""
    d = SetDomain(frozenset({0, 1}))
    eq = Constraint("eq", Scheme((1, 2)), ExtensionalBody(frozenset({(0, 0), (1, 1)})))
    ne = Constraint("ne", Scheme((1, 2)), ExtensionalBody(frozenset({(0, 1), (1, 0)})))
    return CSP((d, d), (eq, ne))


@pytest.fixture
def chain_csp():
    """Two overlapping constraints over {0,1}^3 whose joint solutions prune
    one tuple of the first."""
    d = SetDomain(frozenset({0, 1}))
    c1 = Constraint("c1", Scheme((1, 2)), ExtensionalBody(frozenset({(0, 0), (1, 1)})))
    c2 = Constraint("c2", Scheme((2, 3)), ExtensionalBody(frozenset({(0, 1)})))
    return CSP((d, d, d), (c1, c2))
