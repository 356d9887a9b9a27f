"""Consistency predicates and the drivers that achieve them.

``achieve`` turns a consistency goal into a set of reduction functions, feeds
them to the generic engine (or, for the directional goals, applies them in a
single ordered pass) and returns the problem determined by the fixpoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .csp import (
    CSP, Constraint, DEFAULT_ENUM_CAP, ExtensionalBody, Scheme,
    join_constraints, reselect, scheme_union,
)
from .engine import (
    DEFAULT_STEP_CAP, Outcome, ReductionFunction, RunTrace, Strategy,
    TraceStep, apply_step, run,
)
from .errors import ConfigError, ResourceLimitError
from .reducers import (
    ConstraintSpace, ExtComponent, domain_bottom,
    csp_from_domain_state, make_binary_projections, make_full_projection,
    make_path_reducer, make_relational_reducer, universal_constraint,
)

DEFAULT_FN_CAP = 20_000


@dataclass(frozen=True)
class ConsistencyGoal:
    """What to enforce: ``arc``, ``path``, ``rel`` (with ``m``), or the
    directional variants carrying a total order over the domain indices."""

    kind: str
    order: tuple[int, ...] | None = None
    m: int | None = None


def parse_goal(text: str) -> ConsistencyGoal:
    if text == "arc":
        return ConsistencyGoal("arc")
    if text == "path":
        return ConsistencyGoal("path")
    if text.startswith("dir-arc:") or text.startswith("dir-path:"):
        kind, _, rest = text.partition(":")
        try:
            order = tuple(int(x) for x in rest.split(","))
        except ValueError:
            raise ConfigError(f"bad index order in goal {text!r}")
        return ConsistencyGoal(kind, order=order)
    if text.startswith("rel:"):
        try:
            m = int(text.partition(":")[2])
        except ValueError:
            raise ConfigError(f"bad arity in goal {text!r}")
        return ConsistencyGoal("rel", m=m)
    raise ConfigError(f"unknown goal {text!r}")


# ---------------------------------------------------------------------------
# Predicates


def is_arc_consistent(csp: CSP) -> bool:
    """Every value of every domain a constraint touches participates in some
    tuple of that constraint."""
    for c in csp.constraints:
        if not c.is_extensional:
            raise ConfigError(f"constraint {c.cid!r} is not extensional; unsupported")
        for k, i in enumerate(c.scheme):
            seen = {t[k] for t in c.tuples}
            if any(a not in seen for a in csp.domain_members(i)):
                return False
    return True


def _subsequence_positions(length: int):
    for r in range(1, length + 1):
        yield from itertools.combinations(range(length), r)


def _merge_same_scheme(csp: CSP) -> list[Constraint]:
    """Replace the constraints sharing a scheme by their intersection."""
    order: list[tuple] = []
    groups: dict[tuple, list[Constraint]] = {}
    for c in csp.constraints:
        if not c.is_extensional:
            raise ConfigError(f"constraint {c.cid!r} is not extensional; unsupported")
        if c.scheme.indices not in groups:
            order.append(c.scheme.indices)
        groups.setdefault(c.scheme.indices, []).append(c)
    out = []
    for key in order:
        cs = groups[key]
        if len(cs) == 1:
            out.append(cs[0])
        else:
            tuples = frozenset.intersection(*(c.tuples for c in cs))
            cid = "&".join(c.cid for c in cs)
            out.append(Constraint(cid, cs[0].scheme, ExtensionalBody(tuples)))
    return out


def is_relationally_m_consistent(csp: CSP, m: int, cap: int = DEFAULT_ENUM_CAP) -> bool:
    """Exhaustively check that every consistent tuple over a subscheme of any
    ``m`` distinct constraints extends into their joint solutions."""
    if m < 1:
        raise ConfigError("relational consistency needs m >= 1")
    merged = _merge_same_scheme(csp)
    by_scheme = {c.scheme.indices: c for c in merged}
    join_cache: dict[frozenset, Constraint] = {}
    work = 0
    for sel in itertools.permutations(range(len(merged)), m):
        members = [merged[i] for i in sel]
        key = frozenset(sel)
        if key not in join_cache:
            join_cache[key] = join_constraints(members, cap=cap)
        joined = join_cache[key]
        u = scheme_union([c.scheme for c in members])
        for positions in _subsequence_positions(len(u)):
            t = Scheme(tuple(u.indices[p] for p in positions))
            proj = reselect(joined.scheme, joined.tuples, t)
            filters = []
            for sub in _subsequence_positions(len(t)):
                s = tuple(t.indices[p] for p in sub)
                c = by_scheme.get(s)
                if c is not None:
                    filters.append((sub, c.tuples))
            size = 1
            for i in t:
                size *= len(csp.domain_members(i))
            work += size
            if work > cap:
                raise ResourceLimitError(
                    f"relational consistency check exceeds the {cap}-tuple cap")
            for d in itertools.product(*(csp.domain_members(i) for i in t)):
                consistent = all(tuple(d[p] for p in sub) in tuples
                                 for sub, tuples in filters)
                if consistent and d not in proj:
                    return False
    return True


# ---------------------------------------------------------------------------
# Achieve drivers


def achieve(csp: CSP, goal: ConsistencyGoal, mode: str = "ci",
            strategy: Strategy | None = None, step_cap: int = DEFAULT_STEP_CAP,
            early_exit: bool = False, cap: int = DEFAULT_ENUM_CAP,
            fn_cap: int = DEFAULT_FN_CAP) -> tuple[CSP, RunTrace]:
    """Enforce ``goal`` on ``csp``; returns the reduced, equivalent problem
    and the realized run trace."""
    if goal.kind == "arc":
        return _achieve_arc(csp, mode, strategy, step_cap, early_exit)
    if goal.kind == "path":
        return _achieve_path(csp, mode, strategy, step_cap, early_exit, cap)
    if goal.kind == "rel":
        if goal.m is None:
            raise ConfigError("relational goal needs its arity m")
        return _achieve_relational(csp, goal.m, mode, strategy, step_cap,
                                   early_exit, cap, fn_cap)
    if goal.kind == "dir-arc":
        return _achieve_directional_arc(csp, goal.order)
    if goal.kind == "dir-path":
        return _achieve_directional_path(csp, goal.order, cap)
    raise ConfigError(f"unknown goal kind {goal.kind!r}")


def _achieve_arc(csp, mode, strategy, step_cap, early_exit):
    fns = [make_full_projection(c) for c in csp.constraints]
    result = run(fns, domain_bottom(csp), mode=mode, strategy=strategy,
                 step_cap=step_cap, early_exit=early_exit, validate=False)
    return csp_from_domain_state(csp, result.value), result.trace


def _binary_pair_space(csp: CSP, cap: int) -> ConstraintSpace:
    """Unique binary constraint per ordered index pair, universal ones filled in."""
    for c in csp.constraints:
        if not c.is_extensional or len(c.scheme) != 2:
            raise ConfigError(
                f"constraint {c.cid!r} is not binary extensional; incompatible goal")
    merged = _merge_same_scheme(csp)
    base = CSP(csp.domains, tuple(merged))
    comps = [ExtComponent(c) for c in merged]
    have = {c.scheme.indices for c in merged}
    n = csp.arity
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and (i, j) not in have:
                comps.append(ExtComponent(
                    universal_constraint(base, Scheme((i, j)), cap=cap), synthetic=True))
    return ConstraintSpace(base, comps, cap=cap)


def _achieve_path(csp, mode, strategy, step_cap, early_exit, cap):
    space = _binary_pair_space(csp, cap)
    n = csp.arity
    fns = [make_path_reducer(space, k, l, m)
           for k, l, m in itertools.permutations(range(1, n + 1), 3)]
    result = run(fns, space.bottom(), mode=mode, strategy=strategy,
                 step_cap=step_cap, early_exit=early_exit, validate=False)
    return space.rebuild(result.value), result.trace


def _scheme_count(n: int) -> int:
    total = 0
    for length in range(1, n + 1):
        p = 1
        for q in range(n, n - length, -1):
            p *= q
        total += p
    return total


def _achieve_relational(csp, m, mode, strategy, step_cap, early_exit, cap, fn_cap):
    if m < 1:
        raise ConfigError("relational goal needs m >= 1")
    merged = _merge_same_scheme(csp)
    base = CSP(csp.domains, tuple(merged))
    n = csp.arity
    if _scheme_count(n) > fn_cap:
        raise ResourceLimitError(
            f"{_scheme_count(n)} schemes over {n} variables exceed the cap {fn_cap}")
    comps = [ExtComponent(c) for c in merged]
    have = {c.scheme.indices for c in merged}
    for length in range(1, n + 1):
        for idx in itertools.permutations(range(1, n + 1), length):
            if idx not in have:
                comps.append(ExtComponent(
                    universal_constraint(base, Scheme(idx), cap=cap), synthetic=True))
    space = ConstraintSpace(base, comps, cap=cap)

    fns: list[ReductionFunction] = []
    seen_fids: set[str] = set()
    k = len(comps)
    subsets = itertools.combinations(range(k), m) if m <= k else iter(())
    for subset in subsets:
        member_keys = [comps[i].key for i in subset]
        targets: set[tuple] = set()
        for perm in itertools.permutations(subset):
            u = scheme_union([comps[i].scheme for i in perm])
            for positions in _subsequence_positions(len(u)):
                targets.add(tuple(u.indices[p] for p in positions))
        for t in sorted(targets):
            fid = "rel@" + ",".join(map(str, t)) + ";" + ",".join(member_keys)
            if fid in seen_fids:
                continue
            seen_fids.add(fid)
            fns.append(make_relational_reducer(space, Scheme(t), member_keys, fid=fid))
            if len(fns) > fn_cap:
                raise ResourceLimitError(
                    f"relational goal needs more than {fn_cap} functions")
    result = run(fns, space.bottom(), mode=mode, strategy=strategy,
                 step_cap=step_cap, early_exit=early_exit, validate=False)
    return space.rebuild(result.value), result.trace


def _check_order(csp: CSP, order) -> dict[int, int]:
    n = csp.arity
    if order is None or sorted(order) != list(range(1, n + 1)):
        raise ConfigError(f"directional goals need a permutation of 1..{n}, got {order}")
    return {idx: pos for pos, idx in enumerate(order)}


def _single_pass(fns, state):
    trace = RunTrace()
    for f in fns:
        state, changed = apply_step(f, state)
        trace.total_applications += 1
        trace.steps.append(TraceStep(f.fid, bool(changed), changed))
    trace.outcome = Outcome.CONVERGED
    return state, trace


def _achieve_directional_arc(csp, order):
    rank = _check_order(csp, order)
    for c in csp.constraints:
        if not c.is_extensional or len(c.scheme) != 2:
            raise ConfigError(
                f"constraint {c.cid!r} is not binary extensional; incompatible goal")
    chosen = []
    for c in csp.constraints:
        i, j = c.scheme.indices
        if rank[i] < rank[j]:
            chosen.append((c, make_binary_projections(c)[0]))
    # later variables first, so one pass suffices
    chosen.sort(key=lambda pair: (-rank[pair[0].scheme.indices[1]], pair[0].cid))
    state, trace = _single_pass([f for _, f in chosen], domain_bottom(csp))
    return csp_from_domain_state(csp, state), trace


def _achieve_directional_path(csp, order, cap):
    rank = _check_order(csp, order)
    space = _binary_pair_space(csp, cap)
    n = csp.arity
    fns = []
    for k, l, m in itertools.permutations(range(1, n + 1), 3):
        if rank[k] < rank[m] and rank[l] < rank[m]:
            fns.append((m, make_path_reducer(space, k, l, m)))
    fns.sort(key=lambda pair: (-rank[pair[0]], pair[1].fid))
    state, trace = _single_pass([f for _, f in fns], space.bottom())
    return space.rebuild(state), trace
