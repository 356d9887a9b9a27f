"""The reduction-function catalogue and the state spaces it acts on.

Two state spaces are used.  The *domain space* has one component per
variable, holding either a powerset of the declared atoms or a grid interval;
domain reducers (projections, interval hulls, linear-equality narrowing)
shrink variables there.  The *constraint space* has one component per
constraint, holding the constraint's current tuple set (or a growing set of
linear inequalities for cutting planes); constraint reducers shrink those.
Domain reducers can be embedded into the constraint space by treating the
domains as extra unary constraints.

Every constructor returns an engine ``ReductionFunction``; all of them
preserve the solution set of the problem they were built from.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .csp import (
    CSP, Constraint, DEFAULT_ENUM_CAP, ExtensionalBody, IntDomain,
    LinearEqBody, LinearIneqBody, Scheme, SetDomain, join_constraints,
    reselect, scheme_union,
)
from .engine import ReductionFunction
from .errors import ConfigError, DataError, ResourceLimitError
from .lattice import (
    GridInterval, GrowSetValue, IntGrid, PointGrid, PowersetValue,
    ProductValue, interval_hull,
)


# ---------------------------------------------------------------------------
# Domain space


def domain_bottom(csp: CSP) -> ProductValue:
    """The least element of the domain space: the declared domains themselves."""
    comps = []
    for d in csp.domains:
        if isinstance(d, SetDomain):
            comps.append(PowersetValue.bottom(d.values))
        else:
            if d.is_empty:
                comps.append(GridInterval.empty(IntGrid(0, 0)))
            else:
                comps.append(GridInterval.full(IntGrid(d.lo, d.hi)))
    return ProductValue(tuple(comps))


def _value_contains(v, atom) -> bool:
    if isinstance(v, PowersetValue):
        return atom in v.elements
    if isinstance(v, GridInterval):
        return atom in v
    raise ConfigError(f"component kind {type(v).__name__} has no membership test")


def csp_from_domain_state(csp: CSP, state: ProductValue) -> CSP:
    """The problem determined by ``csp`` and the reduced domain box: new
    domains, with every extensional constraint restricted to them."""
    if len(state) != csp.arity:
        raise ConfigError("domain state arity does not match the problem")
    domains = []
    for comp in state.components:
        if isinstance(comp, PowersetValue):
            domains.append(SetDomain(comp.elements))
        elif isinstance(comp, GridInterval):
            domains.append(IntDomain(1, 0) if comp.is_empty
                           else IntDomain(comp.lo, comp.hi))
        else:
            raise ConfigError(f"unexpected component kind {type(comp).__name__}")
    constraints = []
    for c in csp.constraints:
        if c.is_extensional:
            comps = [state.component(i) for i in c.scheme]
            kept = frozenset(
                t for t in c.tuples
                if all(_value_contains(v, x) for v, x in zip(comps, t)))
            constraints.append(Constraint(c.cid, c.scheme, ExtensionalBody(kept)))
        else:
            constraints.append(c)
    return CSP(tuple(domains), tuple(constraints))


# ---------------------------------------------------------------------------
# Domain reduction functions


def make_binary_projections(c: Constraint) -> tuple[ReductionFunction, ReductionFunction]:
    """The two support projections of a binary constraint: each keeps, on one
    side, only the values that some pair of the constraint supports."""
    if not c.is_extensional or len(c.scheme) != 2:
        raise ConfigError(f"constraint {c.cid!r} is not a binary extensional constraint")
    tuples = c.tuples

    def first(args):
        x, y = args
        if not isinstance(x, PowersetValue) or not isinstance(y, PowersetValue):
            raise ConfigError("support projections need powerset components")
        kept = {a for a, b in tuples if a in x.elements and b in y.elements}
        return (x.with_elements(kept), y)

    def second(args):
        x, y = args
        if not isinstance(x, PowersetValue) or not isinstance(y, PowersetValue):
            raise ConfigError("support projections need powerset components")
        kept = {b for a, b in tuples if a in x.elements and b in y.elements}
        return (x, y.with_elements(kept))

    pi1 = ReductionFunction(f"pi1@{c.cid}", c.scheme, first, idempotent=True, group=c.cid)
    pi2 = ReductionFunction(f"pi2@{c.cid}", c.scheme, second, idempotent=True, group=c.cid)
    return pi1, pi2


def _fit_projection(value, points):
    """Fit a projected coordinate set back into the component's family."""
    if isinstance(value, PowersetValue):
        return value.with_elements(points)
    if isinstance(value, GridInterval):
        return interval_hull(points, value.grid)
    raise ConfigError(f"cannot project onto component kind {type(value).__name__}")


def make_full_projection(c: Constraint) -> ReductionFunction:
    """Shrink every component of the constraint's scheme to the projection of
    the tuples that survive the current box (hulled on interval components)."""
    if not c.is_extensional:
        raise ConfigError(f"constraint {c.cid!r} is not extensional")
    tuples = c.tuples

    def apply(args):
        live = [t for t in tuples
                if all(_value_contains(v, x) for v, x in zip(args, t))]
        return tuple(_fit_projection(v, {t[k] for t in live})
                     for k, v in enumerate(args))

    return ReductionFunction(f"piC@{c.cid}", c.scheme, apply, idempotent=True, group=c.cid)


def make_interval_hull_projection(c: Constraint,
                                  grids: Sequence[IntGrid | PointGrid] | None = None
                                  ) -> ReductionFunction:
    """Projection followed by the smallest enclosing grid interval, per
    coordinate.  ``grids``, when given, lets construction reject tuples that
    fall outside the representable range."""
    if not c.is_extensional:
        raise ConfigError(f"constraint {c.cid!r} is not extensional")
    if grids is not None:
        if len(grids) != len(c.scheme):
            raise ConfigError("one grid per scheme position is required")
        for t in c.tuples:
            for x, g in zip(t, grids):
                if not (g.min <= x <= g.max):
                    raise DataError(
                        f"constraint {c.cid!r} has point {x!r} outside the grid range")
    tuples = c.tuples

    def apply(args):
        if not all(isinstance(v, GridInterval) for v in args):
            raise ConfigError("interval hull projection needs interval components")
        live = [t for t in tuples if all(x in v for v, x in zip(args, t))]
        return tuple(interval_hull({t[k] for t in live}, v.grid)
                     for k, v in enumerate(args))

    return ReductionFunction(f"hull@{c.cid}", c.scheme, apply, idempotent=True, group=c.cid)


def linear_eq_narrow(eq: LinearEqBody, box: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """One bound-tightening application for an integer linear equality over
    integer interval bounds.

    Returns one ``(lo, hi)`` pair per position; a pair with ``hi < lo``
    denotes an emptied interval.  The function is deliberately a single
    application: iterating it can tighten further.
    """
    if len(box) != len(eq.coeffs):
        raise ConfigError("one interval per coefficient is required")
    if any(a == 0 for a in eq.coeffs):
        raise ConfigError("zero coefficient in linear equality")
    pos = [(k, a) for k, a in enumerate(eq.coeffs) if a > 0]
    neg = [(k, -a) for k, a in enumerate(eq.coeffs) if a < 0]
    ls = [lo for lo, _ in box]
    hs = [hi for _, hi in box]
    b = eq.constant
    sum_pos_l = sum(a * ls[k] for k, a in pos)
    sum_pos_h = sum(a * hs[k] for k, a in pos)
    sum_neg_l = sum(a * ls[k] for k, a in neg)
    sum_neg_h = sum(a * hs[k] for k, a in neg)
    out = list(box)
    for k, a in pos:
        alpha = Fraction(b - (sum_pos_l - a * ls[k]) + sum_neg_h, a)
        gamma = Fraction(b - (sum_pos_h - a * hs[k]) + sum_neg_l, a)
        out[k] = (max(ls[k], math.ceil(gamma)), min(hs[k], math.floor(alpha)))
    for k, a in neg:
        beta = Fraction(-b + sum_pos_l - (sum_neg_h - a * hs[k]), a)
        delta = Fraction(-b + sum_pos_h - (sum_neg_l - a * ls[k]), a)
        out[k] = (max(ls[k], math.ceil(beta)), min(hs[k], math.floor(delta)))
    return out


def make_linear_eq_narrowing(c: Constraint) -> ReductionFunction:
    """Package the equality narrowing as a (non-idempotent) reduction function
    over integer grid intervals."""
    if not isinstance(c.body, LinearEqBody):
        raise ConfigError(f"constraint {c.cid!r} is not a linear equality")
    body = c.body

    def apply(args):
        if not all(isinstance(v, GridInterval) and isinstance(v.grid, IntGrid)
                   for v in args):
            raise ConfigError("equality narrowing needs integer interval components")
        if any(v.is_empty for v in args):
            # an emptied coordinate means the whole box denotes no points
            return tuple(GridInterval.empty(v.grid) for v in args)
        narrowed = linear_eq_narrow(body, [(v.lo, v.hi) for v in args])
        return tuple(
            GridInterval(v.grid, lo, hi) if lo <= hi else GridInterval.empty(v.grid)
            for v, (lo, hi) in zip(args, narrowed))

    return ReductionFunction(f"lineq@{c.cid}", c.scheme, apply,
                             idempotent=False, group=c.cid)


# ---------------------------------------------------------------------------
# Constraint space


@dataclass(frozen=True)
class ExtComponent:
    """A component holding an extensional constraint's current tuple set."""

    constraint: Constraint
    synthetic: bool = False

    @property
    def key(self) -> str:
        return self.constraint.cid

    @property
    def scheme(self) -> Scheme:
        return self.constraint.scheme


@dataclass(frozen=True)
class DomainComponent:
    """A variable's domain embedded into the constraint space as a unary
    constraint (the component value stays in the domain family)."""

    var: int

    @property
    def key(self) -> str:
        return f"~dom{self.var}"


@dataclass(frozen=True)
class IneqComponent:
    """A group of integer linear inequalities treated as one constraint whose
    value is the growing set of inequalities derived for it."""

    gid: str
    members: tuple[Constraint, ...]

    @property
    def key(self) -> str:
        return self.gid


def _ineq_record(c: Constraint) -> tuple:
    """Normalize an inequality constraint to a hashable, scheme-free record."""
    if not isinstance(c.body, LinearIneqBody):
        raise ConfigError(f"constraint {c.cid!r} is not a linear inequality")
    pairs = sorted((i, a) for i, a in zip(c.scheme, c.body.coeffs) if a != 0)
    return (tuple(i for i, _ in pairs), tuple(a for _, a in pairs), c.body.constant)


def _record_constraint(record: tuple, cid: str) -> Constraint:
    variables, coeffs, bound = record
    if not variables:
        raise ConfigError("cannot rebuild a constraint from a variable-free record")
    return Constraint(cid, Scheme(variables), LinearIneqBody(coeffs, bound))


class ConstraintSpace:
    """One product component per constraint (plus optional embedded domains);
    builds the start state and rebuilds a problem from any reached state."""

    def __init__(self, csp: CSP, components: Sequence, cap: int = DEFAULT_ENUM_CAP):
        self.csp = csp
        self.components = tuple(components)
        self.cap = cap
        self._by_key: dict[str, int] = {}
        self._by_scheme: dict[tuple, list[int]] = {}
        for pos, comp in enumerate(self.components, start=1):
            if comp.key in self._by_key:
                raise ConfigError(f"duplicate constraint-space component {comp.key!r}")
            self._by_key[comp.key] = pos
            if isinstance(comp, ExtComponent):
                self._by_scheme.setdefault(comp.scheme.indices, []).append(pos)
        self.domains_nonempty = all(not d.is_empty for d in csp.domains)

    def position(self, key: str) -> int:
        if key not in self._by_key:
            raise ConfigError(f"no constraint-space component {key!r}")
        return self._by_key[key]

    def position_of_scheme(self, scheme: Scheme) -> int:
        hits = self._by_scheme.get(scheme.indices, [])
        if not hits:
            raise ConfigError(f"no constraint with scheme {scheme.indices}")
        if len(hits) > 1:
            raise ConfigError(
                f"several constraints share scheme {scheme.indices}; normalize first")
        return hits[0]

    def bottom(self) -> ProductValue:
        vals = []
        for comp in self.components:
            if isinstance(comp, ExtComponent):
                vals.append(PowersetValue.bottom(comp.constraint.tuples))
            elif isinstance(comp, DomainComponent):
                vals.append(PowersetValue.bottom(
                    self.csp.domain_members(comp.var)))
            else:
                vals.append(GrowSetValue.bottom(
                    _ineq_record(m) for m in comp.members))
        return ProductValue(tuple(vals))

    def tuple_view(self, pos: int, value) -> tuple[Scheme, frozenset]:
        """A component's current contents as (scheme, tuple set), for joins."""
        comp = self.components[pos - 1]
        if isinstance(comp, ExtComponent):
            return comp.scheme, value.elements
        if isinstance(comp, DomainComponent):
            return Scheme((comp.var,)), frozenset((a,) for a in value.elements)
        raise ConfigError(f"component {comp.key!r} has no tuple view")

    def rebuild(self, state: ProductValue) -> CSP:
        """The problem determined by the base problem and ``state``: reduced
        constraints (synthetic ones only while they say something), domains
        folded back from embedded components."""
        if len(state) != len(self.components):
            raise ConfigError("state arity does not match the space")
        domains = list(self.csp.domains)
        for pos, comp in enumerate(self.components, start=1):
            if isinstance(comp, DomainComponent):
                elements = state.component(pos).elements
                old = domains[comp.var - 1]
                if isinstance(old, IntDomain) and elements:
                    lo, hi = min(elements), max(elements)
                    if len(elements) == hi - lo + 1:
                        domains[comp.var - 1] = IntDomain(lo, hi)
                        continue
                if isinstance(old, IntDomain) and not elements:
                    domains[comp.var - 1] = IntDomain(1, 0)
                    continue
                domains[comp.var - 1] = SetDomain(elements)

        def in_domains(scheme, t):
            return all(x in _domain_value_set(domains[i - 1]) for i, x in zip(scheme, t))

        constraints: list[Constraint] = []
        handled: set[str] = set()
        for pos, comp in enumerate(self.components, start=1):
            value = state.component(pos)
            if isinstance(comp, ExtComponent):
                handled.add(comp.constraint.cid)
                kept = frozenset(t for t in value.elements
                                 if in_domains(comp.scheme, t))
                if comp.synthetic:
                    full = frozenset(t for t in comp.constraint.tuples
                                     if in_domains(comp.scheme, t))
                    if kept == full:
                        continue
                constraints.append(Constraint(comp.constraint.cid, comp.scheme,
                                              ExtensionalBody(kept)))
            elif isinstance(comp, IneqComponent):
                base = set()
                for m in comp.members:
                    handled.add(m.cid)
                    constraints.append(m)
                    base.add(_ineq_record(m))
                extras = sorted(state.component(pos).items - base)
                for k, rec in enumerate(extras, start=1):
                    if rec[0]:
                        constraints.append(_record_constraint(rec, f"{comp.gid}#cut{k}"))
                    else:
                        # a variable-free infeasible cut: no tuple satisfies it
                        v = comp.members[0].scheme.indices[0]
                        constraints.append(Constraint(
                            f"{comp.gid}#cut{k}", Scheme((v,)),
                            ExtensionalBody(frozenset())))
        # constraints that never became components pass through unchanged
        out = []
        for c in self.csp.constraints:
            if c.cid in handled:
                out.extend(x for x in constraints if x.cid == c.cid)
                constraints = [x for x in constraints if x.cid != c.cid]
            elif c.cid not in self._by_key:
                out.append(c)
        out.extend(constraints)
        return CSP(tuple(domains), tuple(out))


def _domain_value_set(d) -> frozenset:
    if isinstance(d, SetDomain):
        return d.values
    return frozenset(range(d.lo, d.hi + 1))


def universal_constraint(csp: CSP, scheme: Scheme, cid: str | None = None,
                         cap: int = DEFAULT_ENUM_CAP) -> Constraint:
    """The full product of the domains along ``scheme``, as a constraint."""
    size = 1
    for i in scheme:
        size *= len(csp.domain_members(i))
        if size > cap:
            raise ResourceLimitError(
                f"universal constraint over {scheme.indices} exceeds {cap} tuples")
    tuples = frozenset(itertools.product(*(csp.domain_members(i) for i in scheme)))
    name = cid if cid is not None else "u(" + ",".join(map(str, scheme)) + ")"
    return Constraint(name, scheme, ExtensionalBody(tuples))


# ---------------------------------------------------------------------------
# Constraint reduction functions


def make_solution_projection(space: ConstraintSpace, member_keys: Sequence[str],
                             fid: str | None = None) -> ReductionFunction:
    """Replace every member constraint by the projection, onto its scheme, of
    the joint solutions of all the members (the strongest constraint reducer
    over those components)."""
    positions = [space.position(k) for k in member_keys]
    if len(set(positions)) != len(positions):
        raise ConfigError("member constraints must be distinct")
    if not positions:
        raise ConfigError("at least one member constraint is required")
    schemes = []
    for p in positions:
        comp = space.components[p - 1]
        if isinstance(comp, IneqComponent):
            raise ConfigError(f"component {comp.key!r} is not joinable")
        schemes.append(comp.scheme if isinstance(comp, ExtComponent)
                       else Scheme((comp.var,)))
    name = fid or ("rho@" + ",".join(member_keys))

    def apply(args):
        if not space.domains_nonempty:
            return tuple(v.with_elements(()) for v in args)
        views = []
        for k, (p, v) in enumerate(zip(positions, args)):
            s, ts = space.tuple_view(p, v)
            views.append(Constraint(f"m{k}", s, ExtensionalBody(ts)))
        joined = join_constraints(views, cap=space.cap)
        out = []
        for v, (p, s) in zip(args, zip(positions, schemes)):
            proj = reselect(joined.scheme, joined.tuples, s)
            comp = space.components[p - 1]
            if isinstance(comp, DomainComponent):
                out.append(v.with_elements(t[0] for t in proj))
            else:
                out.append(v.with_elements(proj))
        return tuple(out)

    return ReductionFunction(name, Scheme(tuple(positions)), apply,
                             idempotent=True, group=name)


def _make_join_intersection(space: ConstraintSpace, target_pos: int,
                            member_positions: Sequence[int], t: Scheme,
                            fid: str, group: str | None) -> ReductionFunction:
    """Intersect the target component with the projection onto ``t`` of the
    join of the member components (shared core of the path-style and
    relational reducers)."""
    target = space.components[target_pos - 1]
    if not isinstance(target, ExtComponent):
        raise ConfigError(f"component {target.key!r} cannot be a reduction target")
    members = list(member_positions)
    if len(set(members)) != len(members) or not members:
        raise ConfigError("member constraints must be distinct and nonempty")
    union = scheme_union([
        space.components[p - 1].scheme if isinstance(space.components[p - 1], ExtComponent)
        else Scheme((space.components[p - 1].var,))
        for p in members])
    if not all(i in union for i in t):
        raise ConfigError(
            f"target scheme {t.indices} is not covered by the members' scheme {union.indices}")
    scheme_positions = (target_pos,) + tuple(p for p in members if p != target_pos)
    slot = {p: k for k, p in enumerate(scheme_positions)}

    def apply(args):
        views = []
        for k, p in enumerate(members):
            s, ts = space.tuple_view(p, args[slot[p]])
            views.append(Constraint(f"m{k}", s, ExtensionalBody(ts)))
        joined = join_constraints(views, cap=space.cap)
        proj = reselect(joined.scheme, joined.tuples, t)
        tgt = args[0]
        return (tgt.with_elements(tgt.elements & proj),) + tuple(args[1:])

    return ReductionFunction(fid, Scheme(scheme_positions), apply,
                             idempotent=True, group=group)


def make_path_reducer(space: ConstraintSpace, k: int, l: int, m: int) -> ReductionFunction:
    """Shrink the constraint on ``(k,l)`` by composing the constraints on
    ``(k,m)`` and ``(m,l)`` through the third index."""
    if len({k, l, m}) != 3:
        raise ConfigError("path reduction needs three distinct indices")
    target = space.position_of_scheme(Scheme((k, l)))
    via1 = space.position_of_scheme(Scheme((k, m)))
    via2 = space.position_of_scheme(Scheme((m, l)))
    return _make_join_intersection(
        space, target, [via1, via2], Scheme((k, l)),
        fid=f"path@{k},{l},{m}", group=space.components[target - 1].key)


def make_relational_reducer(space: ConstraintSpace, t: Scheme,
                            member_keys: Sequence[str],
                            fid: str | None = None) -> ReductionFunction:
    """Intersect the constraint with scheme ``t`` with the projection of the
    join of the named member constraints."""
    target = space.position_of_scheme(t)
    members = [space.position(k) for k in member_keys]
    name = fid or ("rel@" + ",".join(map(str, t)) + ";" + ",".join(member_keys))
    return _make_join_intersection(space, target, members, t, fid=name,
                                   group=space.components[target - 1].key)


def embed_domain_as_constraint(space: ConstraintSpace, f: ReductionFunction,
                               cid: str) -> ReductionFunction:
    """Lift a domain reducer built for constraint ``cid`` into the constraint
    space: the constraint component is copied, the embedded domain components
    are transformed exactly as the domain reducer would."""
    target = space.position(cid)
    dpos = tuple(space.position(DomainComponent(i).key) for i in f.scheme)
    scheme = Scheme((target,) + dpos)

    def apply(args):
        return (args[0],) + tuple(f.apply(tuple(args[1:])))

    return ReductionFunction(f"embed({f.fid})", scheme, apply,
                             idempotent=f.idempotent, group=f.group)


# ---------------------------------------------------------------------------
# Cutting planes


def cutting_plane(ineqs: Sequence[Constraint],
                  multipliers: Sequence[Fraction | int]) -> Constraint:
    """Combine integer linear inequalities with nonnegative rational
    multipliers and floor the right-hand side.

    Every combined coefficient must come out integral; otherwise the
    combination is rejected naming the offending variable.
    """
    if len(ineqs) != len(multipliers):
        raise ConfigError("one multiplier per inequality is required")
    if not ineqs:
        raise ConfigError("at least one inequality is required")
    mults = [Fraction(m) for m in multipliers]
    if any(m < 0 for m in mults):
        raise ConfigError("multipliers must be nonnegative")
    combined: dict[int, Fraction] = {}
    rhs = Fraction(0)
    for c, m in zip(ineqs, mults):
        if not isinstance(c.body, LinearIneqBody):
            raise ConfigError(f"constraint {c.cid!r} is not a linear inequality")
        for i, a in zip(c.scheme, c.body.coeffs):
            combined[i] = combined.get(i, Fraction(0)) + m * a
        rhs += m * c.body.constant
    for i in sorted(combined):
        if combined[i].denominator != 1:
            raise DataError(
                f"combined coefficient of x{i} is {combined[i]}, not an integer")
    variables = tuple(i for i in sorted(combined) if combined[i] != 0)
    coeffs = tuple(int(combined[i]) for i in variables)
    cid = "cut(" + ",".join(c.cid for c in ineqs) + ")"
    return Constraint(cid, Scheme(variables), LinearIneqBody(coeffs, math.floor(rhs)))


def make_cut_reducer(space: ConstraintSpace, gid: str,
                     multipliers: Sequence[Fraction | int]) -> ReductionFunction:
    """Append the cutting plane derived from the group's inequalities to the
    group's inequality set (trivial ``0 <= b`` cuts are discarded)."""
    pos = space.position(gid)
    comp = space.components[pos - 1]
    if not isinstance(comp, IneqComponent):
        raise ConfigError(f"component {gid!r} is not an inequality group")
    cut = cutting_plane(comp.members, multipliers)
    record = _ineq_record(cut)
    trivial = not record[0] and record[2] >= 0

    def apply(args):
        (v,) = args
        if trivial:
            return (v,)
        return (v.with_items(v.items | {record}),)

    mult_txt = ",".join(str(Fraction(m)) for m in multipliers)
    return ReductionFunction(f"cut@{gid};{mult_txt}", Scheme((pos,)), apply,
                             idempotent=False, group=gid)


# ---------------------------------------------------------------------------
# Named reducer registry (the CLI addressing scheme)

_DOMAIN_KINDS = ("pi1", "pi2", "piC", "hull", "lineq")
_CONSTRAINT_KINDS = ("rho", "path", "rel", "cut")


@dataclass
class RunSetup:
    """Everything needed to run a reducer list: the start state, the
    functions, and how to turn a reached state back into a problem."""

    kind: str                       # "domain" | "constraint"
    start: ProductValue
    functions: list[ReductionFunction]
    space: ConstraintSpace | None

    def rebuild(self, csp: CSP, state: ProductValue) -> CSP:
        if self.kind == "domain":
            return csp_from_domain_state(csp, state)
        return self.space.rebuild(state)


def _parse_name(text: str) -> tuple[str, str]:
    if "@" not in text:
        raise ConfigError(f"malformed reducer name {text!r} (expected kind@args)")
    kind, _, rest = text.partition("@")
    if kind not in _DOMAIN_KINDS + _CONSTRAINT_KINDS:
        raise ConfigError(f"unknown reducer kind {kind!r}")
    return kind, rest


def _domain_function(kind: str, cid: str, csp: CSP) -> ReductionFunction:
    c = csp.constraint(cid)
    if kind in ("pi1", "pi2"):
        for i in c.scheme:
            if not isinstance(csp.domains[i - 1], SetDomain):
                raise ConfigError(f"{kind}@{cid} needs finite set domains")
        return make_binary_projections(c)[0 if kind == "pi1" else 1]
    if kind == "piC":
        return make_full_projection(c)
    if kind == "hull":
        for i in c.scheme:
            if not isinstance(csp.domains[i - 1], IntDomain):
                raise ConfigError(f"hull@{cid} needs integer interval domains")
        return make_interval_hull_projection(c)
    for i in c.scheme:
        if not isinstance(csp.domains[i - 1], IntDomain):
            raise ConfigError(f"lineq@{cid} needs integer interval domains")
    return make_linear_eq_narrowing(c)


def build_named_reducers(csp: CSP, names: Sequence[str],
                         cap: int = DEFAULT_ENUM_CAP) -> RunSetup:
    """Resolve reducer names like ``pi1@c1``, ``rho@c1,c2``, ``path@1,2,3``,
    ``rel@1,3;c1,c2`` or ``cut@c3,c4;1/2,1/2`` against a problem."""
    parsed = [(s,) + _parse_name(s) for s in names]
    if not parsed:
        raise ConfigError("no reducers given")
    constraint_side = [p for p in parsed if p[1] in _CONSTRAINT_KINDS]

    if not constraint_side:
        fns = [_domain_function(kind, rest, csp) for _, kind, rest in parsed]
        _check_unique([f.fid for f in fns])
        return RunSetup("domain", domain_bottom(csp), fns, None)

    # constraint space: interval narrowing cannot be embedded there
    for _, kind, rest in parsed:
        if kind in ("hull", "lineq"):
            raise ConfigError(
                f"{kind}@{rest} runs on interval domains and cannot be mixed "
                "with constraint-space reducers")
        if kind in ("pi1", "pi2", "piC"):
            for i in csp.constraint(rest).scheme:
                if not isinstance(csp.domains[i - 1], SetDomain):
                    raise ConfigError(
                        f"{kind}@{rest} can only be embedded over finite set domains")

    cut_groups: dict[tuple, list] = {}
    for _, kind, rest in parsed:
        if kind != "cut":
            continue
        cids_txt, _, mults_txt = rest.partition(";")
        cids = tuple(x.strip() for x in cids_txt.split(",") if x.strip())
        mults = [Fraction(x.strip()) for x in mults_txt.split(",") if x.strip()]
        if not cids or len(cids) != len(mults):
            raise ConfigError(f"cut@{rest}: need the same number of ids and multipliers")
        cut_groups.setdefault(cids, []).append(mults)
    grouped_cids: set[str] = set()
    for cids in cut_groups:
        for cid in cids:
            if cid in grouped_cids:
                raise ConfigError(f"constraint {cid!r} appears in two cut groups")
            grouped_cids.add(cid)

    components: list = []
    for c in csp.constraints:
        if c.is_extensional:
            components.append(ExtComponent(c))
    for cids in sorted(cut_groups):
        members = tuple(csp.constraint(cid) for cid in cids)
        components.append(IneqComponent("cutset(" + ",".join(cids) + ")", members))

    # relational targets may need a universal constraint materialized
    have_schemes = {c.scheme.indices for c in csp.constraints if c.is_extensional}
    for _, kind, rest in parsed:
        if kind != "rel":
            continue
        t_txt, _, _ = rest.partition(";")
        t = Scheme(tuple(int(x) for x in t_txt.split(",") if x.strip()))
        if t.indices not in have_schemes:
            components.append(ExtComponent(
                universal_constraint(csp, t, cap=cap), synthetic=True))
            have_schemes.add(t.indices)

    needs_domains = any(kind in ("pi1", "pi2", "piC") for _, kind, _ in parsed)
    if needs_domains:
        for i in range(1, csp.arity + 1):
            components.append(DomainComponent(i))

    space = ConstraintSpace(csp, components, cap=cap)
    fns: list[ReductionFunction] = []
    for _, kind, rest in parsed:
        if kind in ("pi1", "pi2", "piC"):
            fns.append(embed_domain_as_constraint(
                space, _domain_function(kind, rest, csp), rest))
        elif kind == "rho":
            cids = [x.strip() for x in rest.split(",") if x.strip()]
            fns.append(make_solution_projection(space, cids))
        elif kind == "path":
            k, l, m = (int(x) for x in rest.split(","))
            fns.append(make_path_reducer(space, k, l, m))
        elif kind == "rel":
            t_txt, _, cids_txt = rest.partition(";")
            t = Scheme(tuple(int(x) for x in t_txt.split(",") if x.strip()))
            cids = [x.strip() for x in cids_txt.split(",") if x.strip()]
            fns.append(make_relational_reducer(space, t, cids))
        else:
            cids_txt, _, mults_txt = rest.partition(";")
            cids = tuple(x.strip() for x in cids_txt.split(",") if x.strip())
            mults = [Fraction(x.strip()) for x in mults_txt.split(",")]
            fns.append(make_cut_reducer(space, "cutset(" + ",".join(cids) + ")", mults))
    _check_unique([f.fid for f in fns])
    return RunSetup("constraint", space.bottom(), fns, space)


def _check_unique(fids: Sequence[str]) -> None:
    seen = set()
    for fid in fids:
        if fid in seen:
            raise ConfigError(f"reducer {fid!r} listed twice")
        seen.add(fid)
