"""The problem model: scheme algebra, joins, projections, the solutions
oracle and equivalence."""

import itertools
import random

import pytest

from conftest import brute_force_join, random_set_csp
from propeng.csp import (
    CSP, Constraint, ExtensionalBody, IntDomain, LinearEqBody, Scheme,
    SetDomain, equivalent, join_constraints, project, reselect, scheme_union,
    solutions, tuple_restrict, validate,
)
from propeng.errors import ConfigError, ResourceLimitError


def ext(cid, scheme, tuples):
    return Constraint(cid, Scheme(scheme), ExtensionalBody(frozenset(tuples)))


D01 = SetDomain(frozenset({0, 1}))


class TestSchemeUnion:
    def test_worked_example(self):
        got = scheme_union([Scheme((3, 7, 2)), Scheme((4, 3, 7, 5)), Scheme((3, 5, 8))])
        assert got.indices == (3, 7, 2, 4, 5, 8)

    def test_single(self):
        assert scheme_union([Scheme((1, 2))]).indices == (1, 2)

    def test_later_duplicates_dropped(self):
        assert scheme_union([Scheme((2, 1)), Scheme((1, 2))]).indices == (2, 1)

    def test_duplicate_index_rejected(self):
        with pytest.raises(ConfigError):
            Scheme((1, 1, 2))


class TestJoin:
    def test_worked_example(self):
        c1 = ext("c1", (1, 2), {(0, 0), (1, 1)})
        c2 = ext("c2", (2, 3), {(0, 1)})
        got = join_constraints([c1, c2])
        assert got.scheme.indices == (1, 2, 3)
        assert got.tuples == frozenset({(0, 0, 1)})

    def test_single_input_is_identity(self):
        c = ext("c", (2, 3), {(0, 1), (1, 0)})
        got = join_constraints([c])
        assert got.scheme == c.scheme and got.tuples == c.tuples

    def test_empty_member_empties_join(self):
        c1 = ext("c1", (1, 2), {(0, 0)})
        c2 = ext("c2", (2, 3), set())
        assert join_constraints([c1, c2]).tuples == frozenset()

    def test_matches_enumeration_oracle(self):
        rng = random.Random(5)
        for _ in range(40):
            csp = random_set_csp(rng, max_vars=3, max_atoms=3, max_constraints=3)
            got = join_constraints(csp.constraints)
            assert got.tuples == brute_force_join(csp, csp.constraints)

    def test_join_then_project_shrinks_members(self):
        rng = random.Random(9)
        for _ in range(40):
            csp = random_set_csp(rng, max_vars=3, max_atoms=3, max_constraints=3)
            joined = join_constraints(csp.constraints)
            for c in csp.constraints:
                assert reselect(joined.scheme, joined.tuples, c.scheme) <= c.tuples


class TestProject:
    def test_worked_example(self):
        c = ext("c", (1, 2, 3), {(0, 0, 1), (1, 0, 0)})
        assert project(c, Scheme((2,))).tuples == frozenset({(0,)})

    def test_identity_projection(self):
        c = ext("c", (1, 2), {(0, 1)})
        assert project(c, c.scheme).tuples == c.tuples

    def test_empty(self):
        assert project(ext("c", (1, 2), set()), Scheme((1,))).tuples == frozenset()

    def test_non_subsequence_rejected(self):
        with pytest.raises(ValueError):
            project(ext("c", (1, 2, 3), {(0, 0, 0)}), Scheme((2, 1)))


class TestSolutions:
    def test_arc_consistent_but_inconsistent(self, eq_ne_csp):
        assert solutions(eq_ne_csp) == frozenset()

    def test_no_constraints(self):
        assert len(solutions(CSP((D01, D01), ()))) == 4

    def test_linear_equality(self):
        csp = CSP((IntDomain(0, 9), IntDomain(1, 8)),
                  (Constraint("e", Scheme((1, 2)), LinearEqBody((3, -5), 4)),))
        assert solutions(csp) == frozenset({(3, 1), (8, 4)})

    def test_enumeration_cap(self):
        csp = CSP((IntDomain(0, 999), IntDomain(0, 999)), ())
        with pytest.raises(ResourceLimitError):
            solutions(csp, cap=1000)

    def test_join_formula_agrees(self):
        # solutions == join of the constraints and the untouched domains
        rng = random.Random(17)
        checked = 0
        while checked < 30:
            csp = random_set_csp(rng, max_vars=3, max_atoms=3, max_constraints=3)
            size = 1
            for d in csp.domains:
                size *= len(d.members())
            if size > 4096:
                continue
            checked += 1
            covered = scheme_union([c.scheme for c in csp.constraints])
            members = list(csp.constraints)
            for i in range(1, csp.arity + 1):
                if i not in covered:
                    members.append(ext(f"d{i}", (i,),
                                       {(a,) for a in csp.domain_members(i)}))
            joined = join_constraints(members)
            expect = {
                tuple(dict(zip(joined.scheme.indices, t))[i]
                      for i in range(1, csp.arity + 1))
                for t in joined.tuples}
            assert solutions(csp) == frozenset(expect)

    def test_solutions_restrict_to_subsequences(self):
        rng = random.Random(23)
        for _ in range(30):
            csp = random_set_csp(rng, max_vars=3, max_atoms=3, max_constraints=3)
            sols = solutions(csp)
            for r in range(1, len(csp.constraints) + 1):
                for sub in itertools.combinations(csp.constraints, r):
                    u = scheme_union([c.scheme for c in sub])
                    joint = brute_force_join(csp, list(sub))
                    for d in sols:
                        assert tuple_restrict(d, u) in joint


class TestEquivalent:
    def test_reflexive(self, chain_csp):
        assert equivalent(chain_csp, chain_csp)

    def test_narrowed_bounds_preserve_solutions(self):
        body = LinearEqBody((3, -5), 4)
        p = CSP((IntDomain(0, 9), IntDomain(1, 8)),
                (Constraint("e", Scheme((1, 2)), body),))
        q = CSP((IntDomain(3, 9), IntDomain(1, 4)),
                (Constraint("e", Scheme((1, 2)), body),))
        assert equivalent(p, q)

    def test_excluding_a_solution_breaks_equivalence(self):
        p = CSP((D01, D01), (ext("c", (1, 2), {(0, 0), (1, 1)}),))
        q = CSP((D01, D01), (ext("c", (1, 2), {(0, 0), (1, 1)}),
                             ext("d", (1,), {(0,)})))
        assert solutions(q) < solutions(p)
        assert not equivalent(p, q)

    def test_arity_mismatch_rejected(self):
        with pytest.raises(ValueError):
            equivalent(CSP((D01,), ()), CSP((D01, D01), ()))


class TestValidate:
    def test_clean(self, chain_csp):
        assert validate(chain_csp) == []

    def test_tuple_outside_domain(self):
        csp = CSP((D01, D01), (ext("c", (1, 2), {(0, 7)}),))
        assert any("outside domain" in p for p in validate(csp))

    def test_scheme_outside_arity(self):
        csp = CSP((D01,), (ext("c", (1, 3), {(0, 0)}),))
        assert any("outside domains" in p for p in validate(csp))

    def test_linear_over_set_domain(self):
        csp = CSP((D01, D01),
                  (Constraint("e", Scheme((1, 2)), LinearEqBody((1, 1), 1)),))
        assert any("non-integer domain" in p for p in validate(csp))

    def test_zero_coefficient(self):
        csp = CSP((IntDomain(0, 3), IntDomain(0, 3)),
                  (Constraint("e", Scheme((1, 2)), LinearEqBody((1, 0), 1)),))
        assert any("zero coefficient" in p for p in validate(csp))
