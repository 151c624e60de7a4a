"""Consistency checkers and solution-preserving enforcement.

Two routes decide k-consistency: the definitional sweep (try every
value of the new variable on every consistent instantiation) and the
extension-set route (intersect the extension sets of all relevant
constraints).  They are equivalent and the test suite holds them to
exact agreement on randomized inputs.

Enforcement forbids, one at a time, the consistent instantiations that
cannot be extended, by tightening the constraint on exactly the
instantiated variables (adding one, started from the universal
relation, when no constraint covers that scope yet).  Forbidden
instantiations never take part in any solution, so the solution set is
preserved exactly, and since tuples only ever disappear the sweep
terminates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InputError
from .model import (
    Constraint,
    ConstraintNetwork,
    enumerate_instantiations,
    extension_set,
    project,
    satisfied_within,
)


@dataclass
class Witness:
    instantiation: dict[str, str] | None = None
    variable: str | None = None
    constraints: tuple[str, ...] | None = None
    level: int | None = None


@dataclass
class ConsistencyVerdict:
    kind: str
    parameter: int
    holds: bool
    witness: Witness | None = None


def _names(net: ConstraintNetwork) -> list[str]:
    return [v.name for v in net.variables]


def _check_k(net: ConstraintNetwork, k: int) -> None:
    if not 1 <= k <= net.n:
        raise InputError(f"k must be in [1, {net.n}], got {k}")


def is_k_consistent(net: ConstraintNetwork, k: int) -> ConsistencyVerdict:
    """Definitional k-consistency check by exhaustive sweep.

    Every consistent instantiation of every k-1 distinct variables must
    extend to every new variable.  The first failure in lexicographic
    sweep order is reported as the witness.
    """
    _check_k(net, k)
    names = _names(net)
    for subset in itertools.combinations(names, k - 1):
        inside = set(subset)
        for a in enumerate_instantiations(net, subset, only_consistent=True):
            for x in names:
                if x in inside:
                    continue
                if _extend_value(net, a, x) is None:
                    return ConsistencyVerdict(
                        "k-consistency", k, False, Witness(dict(a), x)
                    )
    return ConsistencyVerdict("k-consistency", k, True)


def _extend_value(net: ConstraintNetwork, a: Mapping[str, str], x: str):
    for u in net.domain(x):
        b = dict(a)
        b[x] = u
        if satisfied_within(net, b):
            return u
    return None


def is_k_consistent_via_lifting(
    net: ConstraintNetwork, k: int
) -> ConsistencyVerdict:
    """k-consistency via extension sets: the new variable is extensible
    iff the extension sets of all relevant constraints intersect.

    Must agree with is_k_consistent on every input; with no relevant
    constraints the extension is vacuously possible.
    """
    _check_k(net, k)
    names = _names(net)
    for subset in itertools.combinations(names, k - 1):
        inside = set(subset)
        for a in enumerate_instantiations(net, subset, only_consistent=True):
            for x in names:
                if x in inside:
                    continue
                joint = set(net.domain(x))
                for c in net.constraints:
                    if x in c.scope_set and (c.scope_set - {x}) <= inside:
                        joint &= extension_set(net, c, a, x)
                        if not joint:
                            break
                if not joint:
                    return ConsistencyVerdict(
                        "k-consistency", k, False, Witness(dict(a), x)
                    )
    return ConsistencyVerdict("k-consistency", k, True)


def is_strongly_k_consistent(net: ConstraintNetwork, k: int) -> ConsistencyVerdict:
    """j-consistency for every j up to k; witness of the first failing j."""
    _check_k(net, k)
    for j in range(1, k + 1):
        verdict = is_k_consistent(net, j)
        if not verdict.holds:
            witness = verdict.witness
            witness.level = j
            return ConsistencyVerdict("strong-k-consistency", k, False, witness)
    return ConsistencyVerdict("strong-k-consistency", k, True)


def is_globally_consistent(net: ConstraintNetwork) -> ConsistencyVerdict:
    """Strong n-consistency; the brute-force global oracle."""
    verdict = is_strongly_k_consistent(net, net.n)
    return ConsistencyVerdict("global-consistency", net.n, verdict.holds, verdict.witness)


def _constraint_subsets(constraints, sizes):
    for j in sizes:
        yield from itertools.combinations(constraints, j)


def _relational_violation(net: ConstraintNetwork, sizes) -> tuple | None:
    """First (combo, x, a) where a consistent instantiation of the
    combined scopes minus x has no x-value satisfying all chosen
    constraints, in deterministic sweep order."""
    for combo in _constraint_subsets(net.constraints, sizes):
        shared = frozenset.intersection(*(c.scope_set for c in combo))
        if not shared:
            continue  # no shared variable, no obligation
        union = set().union(*(c.scope_set for c in combo))
        for x in net.sort_by_declaration(shared):
            rest = net.sort_by_declaration(union - {x})
            for a in enumerate_instantiations(net, rest, only_consistent=True):
                ok = False
                for u in net.domain(x):
                    b = dict(a)
                    b[x] = u
                    if all(project(b, c.scope) in c.tuples for c in combo):
                        ok = True
                        break
                if not ok:
                    return combo, x, a
    return None


def is_relationally_m_consistent(
    net: ConstraintNetwork, m: int
) -> ConsistencyVerdict:
    """Every m distinct constraints sharing a variable x must agree on an
    extension to x for every consistent instantiation of their combined
    scopes minus x.  Constraint subsets with no shared variable impose
    nothing."""
    if not 1 <= m <= len(net.constraints):
        raise InputError(
            f"m must be in [1, {len(net.constraints)}], got {m}"
        )
    hit = _relational_violation(net, (m,))
    if hit is None:
        return ConsistencyVerdict("relational-consistency", m, True)
    combo, x, a = hit
    return ConsistencyVerdict(
        "relational-consistency",
        m,
        False,
        Witness(dict(a), x, tuple(c.name for c in combo)),
    )


def is_strongly_relationally_m_consistent(
    net: ConstraintNetwork, m: int
) -> ConsistencyVerdict:
    """Relationally j-consistent for every j up to m."""
    if not 1 <= m <= len(net.constraints):
        raise InputError(
            f"m must be in [1, {len(net.constraints)}], got {m}"
        )
    for j in range(1, m + 1):
        verdict = is_relationally_m_consistent(net, j)
        if not verdict.holds:
            verdict.witness.level = j
            return ConsistencyVerdict(
                "strong-relational-consistency", m, False, verdict.witness
            )
    return ConsistencyVerdict("strong-relational-consistency", m, True)


# -- enforcement --------------------------------------------------------


def _fresh_name(used: set[str], scope: tuple[str, ...]) -> str:
    name = "x_" + "_".join(scope)
    while name in used:
        name += "_"
    used.add(name)
    return name


class _Editor:
    """Mutable view of a network's constraints during enforcement.

    Surviving constraints keep their declaration order; constraints
    added by enforcement are kept sorted by scope key after them.
    """

    def __init__(self, net: ConstraintNetwork):
        self.base = net
        self.original: list[tuple[str, tuple[str, ...], set]] = [
            (c.name, c.scope, set(c.tuples)) for c in net.constraints
        ]
        self.added: list[tuple[str, tuple[str, ...], set]] = []
        self.used = {c.name for c in net.constraints}

    def network(self) -> ConstraintNetwork:
        cons = [
            Constraint(name, scope, frozenset(tuples))
            for name, scope, tuples in self.original + self.added
        ]
        return self.base.with_constraints(cons)

    def forbid(self, scope: tuple[str, ...], a: Mapping[str, str]) -> None:
        """Remove the instantiation `a` (over exactly `scope`) from the
        constraint on that scope, introducing the constraint as the
        universal relation first when the scope is new."""
        want = frozenset(scope)
        for entry in itertools.chain(self.original, self.added):
            _name, escope, tuples = entry
            if frozenset(escope) == want:
                tuples.discard(project(a, escope))
                return
        universal = set(
            itertools.product(*(self.base.domain(v) for v in scope))
        )
        universal.discard(project(a, scope))
        entry = (_fresh_name(self.used, scope), scope, universal)
        key = self.base.scope_key(scope)
        at = len(self.added)
        for i, (_n, s, _t) in enumerate(self.added):
            if self.base.scope_key(s) > key:
                at = i
                break
        self.added.insert(at, entry)


def _first_k_violation(net: ConstraintNetwork, k: int):
    names = _names(net)
    for subset in itertools.combinations(names, k - 1):
        inside = set(subset)
        for a in enumerate_instantiations(net, subset, only_consistent=True):
            for x in names:
                if x not in inside and _extend_value(net, a, x) is None:
                    return subset, a
    return None


def enforce_k_consistency(net: ConstraintNetwork, k: int) -> ConstraintNetwork:
    """Tighten the network to k-consistency without changing solutions.

    While some consistent instantiation of k-1 variables fails to
    extend to some new variable, that instantiation is forbidden on its
    own variable set.  Already k-consistent networks come back intact.
    """
    if not 2 <= k <= net.n:
        raise InputError(f"k must be in [2, {net.n}], got {k}")
    editor = _Editor(net)
    current = net
    while True:
        hit = _first_k_violation(current, k)
        if hit is None:
            return current
        subset, a = hit
        editor.forbid(subset, a)
        current = editor.network()


def enforce_relational_m_consistency(
    net: ConstraintNetwork, m: int, strong: bool = False
) -> ConstraintNetwork:
    """Tighten to relational m-consistency (all j <= m when strong).

    Each violating consistent instantiation is forbidden on the union
    of the chosen scopes minus the shared variable.  A violation whose
    target scope would be empty (a single unary constraint with an
    empty relation) cannot be represented and is left in place; it only
    arises on unsatisfiable networks.
    """
    if not 1 <= m <= len(net.constraints):
        raise InputError(
            f"m must be in [1, {len(net.constraints)}], got {m}"
        )
    editor = _Editor(net)
    current = net
    while True:
        sizes = range(1, m + 1) if strong else (m,)
        hit = _next_fixable_relational_violation(current, sizes)
        if hit is None:
            return current
        scope, a = hit
        editor.forbid(scope, a)
        current = editor.network()


def _next_fixable_relational_violation(net: ConstraintNetwork, sizes):
    for combo in _constraint_subsets(net.constraints, sizes):
        shared = frozenset.intersection(*(c.scope_set for c in combo))
        if not shared:
            continue
        union = set().union(*(c.scope_set for c in combo))
        for x in net.sort_by_declaration(shared):
            rest = net.sort_by_declaration(union - {x})
            if not rest:
                continue  # nothing to tighten; unsatisfiable unary relation
            for a in enumerate_instantiations(net, rest, only_consistent=True):
                ok = False
                for u in net.domain(x):
                    b = dict(a)
                    b[x] = u
                    if all(project(b, c.scope) in c.tuples for c in combo):
                        ok = True
                        break
                if not ok:
                    return rest, a
    return None
