"""Variable orderings: width, adaptive and dually adaptive consistency,
and the two solvers (backtrack-free and chronological backtracking).

Under a total variable ordering, the directionally relevant
constraints DR(x) of a variable x are those covering x and otherwise
only earlier variables; width(x) = |DR(x)|.  Adaptive consistency asks
that every consistent instantiation of the DR(x) variables (minus x)
extend to x; it guarantees a backtrack-free left-to-right search.

Dually adaptive consistency weakens this per variable using the
tightest DR constraint c_x (properly m_x-tight w.r.t. x): when
width(x) <= m_x the full obligation stays; otherwise only the joint
extensibility of c_x with every m_x other DR constraints is required.
The small-set intersection property then still yields a common
extension value, so backtrack-free search remains guaranteed.  Both
clauses quantify over consistent instantiations of the full DR(x)
variable set, which makes dual adaptivity a clause-wise weakening of
adaptive consistency.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InputError, UnconstrainedVariableError
from .model import (
    Constraint,
    ConstraintNetwork,
    enumerate_instantiations,
    extension_set,
    project,
    satisfied_within,
)
from .tightness import constraint_tightness


class OrderedNetworkView:
    """A network paired with a total variable ordering.

    The ordering defaults to the one attached to the network, then to
    declaration order.  DR sets are precomputed; the view is read-only.
    """

    def __init__(self, net: ConstraintNetwork, ordering: Sequence[str] | None = None):
        self.network = net
        if ordering is None:
            ordering = net.ordering or tuple(v.name for v in net.variables)
        self.ordering: tuple[str, ...] = tuple(ordering)
        if sorted(self.ordering) != sorted(v.name for v in net.variables):
            raise InputError("ordering is not a permutation of the variables")
        self._pos = {name: i for i, name in enumerate(self.ordering)}
        self._dr: dict[str, tuple[Constraint, ...]] = {}
        for x in self.ordering:
            px = self._pos[x]
            self._dr[x] = tuple(
                c
                for c in net.constraints
                if x in c.scope_set
                and all(self._pos[v] <= px for v in c.scope)
            )

    def dr(self, x: str) -> tuple[Constraint, ...]:
        try:
            return self._dr[x]
        except KeyError:
            raise InputError(f"unknown variable {x!r}") from None

    def position(self, x: str) -> int:
        self.dr(x)
        return self._pos[x]


def width(view: OrderedNetworkView, x: str) -> int:
    """Number of directionally relevant constraints on x."""
    return len(view.dr(x))


def dr_consistent_on(
    view: OrderedNetworkView, constraints: Iterable[Constraint], x: str
) -> tuple[bool, dict[str, str] | None]:
    """Are the given DR constraints consistent on x?

    Every consistent instantiation of the constraints' own variables
    minus x must extend to x satisfying all of them.  Returns the
    verdict with the first stranded instantiation as witness.
    """
    net = view.network
    chosen = tuple(constraints)
    drx = set(view.dr(x))
    for c in chosen:
        if c not in drx:
            raise InputError(
                f"constraint {c.name} is not directionally relevant on {x}"
            )
    if not chosen:
        return True, None
    union = set().union(*(c.scope_set for c in chosen))
    rest = net.sort_by_declaration(union - {x})
    for a in enumerate_instantiations(net, rest, only_consistent=True):
        if _joint_extension(net, chosen, a, x) is None:
            return False, a
    return True, None


def _joint_extension(net, constraints, a: Mapping[str, str], x: str):
    for u in net.domain(x):
        b = dict(a)
        b[x] = u
        if all(project(b, c.scope) in c.tuples for c in constraints):
            return u
    return None


@dataclass
class OrderedWitness:
    variable: str
    instantiation: dict[str, str]
    constraints: tuple[str, ...] | None = None  # None means all of DR(x)


@dataclass
class AdaptiveVerdict:
    holds: bool
    witness: OrderedWitness | None = None
    unconstrained: tuple[str, ...] = ()


def is_adaptively_consistent(view: OrderedNetworkView) -> AdaptiveVerdict:
    """DR(x) must be consistent on x for every variable x."""
    for x in view.ordering:
        ok, stranded = dr_consistent_on(view, view.dr(x), x)
        if not ok:
            return AdaptiveVerdict(False, OrderedWitness(x, stranded))
    return AdaptiveVerdict(True)


def tightest_dr_constraint(
    view: OrderedNetworkView, x: str, strict: bool = False
) -> tuple[Constraint, int]:
    """The DR constraint with the smallest proper tightness w.r.t. x
    (over the whole scope when strict), ties broken by declaration
    order.  Raises UnconstrainedVariableError when DR(x) is empty."""
    drx = view.dr(x)
    if not drx:
        raise UnconstrainedVariableError(
            f"variable {x!r} has no directionally relevant constraints"
        )
    net = view.network
    best = None
    best_m = None
    for c in drx:  # declaration order, so ties keep the first
        if strict:
            m = max(
                constraint_tightness(net, c, v).properly_m_tight
                for v in c.scope
            )
        else:
            m = constraint_tightness(net, c, x).properly_m_tight
        if best_m is None or m < best_m:
            best, best_m = c, m
    return best, best_m


def is_dually_adaptively_consistent(
    view: OrderedNetworkView, strict: bool = False
) -> AdaptiveVerdict:
    """Per-variable weakening of adaptive consistency by tightness.

    For each x with DR(x) non-empty, let c_x be the tightest DR
    constraint (properly m_x-tight w.r.t. x).  When width(x) <= m_x the
    whole DR(x) must be consistent on x; otherwise, for every
    consistent instantiation of the DR(x) variables minus x, the
    extension set under c_x must meet the joint extension sets of every
    m_x other DR constraints.  Variables with empty DR are trivially
    satisfied and reported in `unconstrained`.
    """
    net = view.network
    unconstrained = []
    for x in view.ordering:
        drx = view.dr(x)
        if not drx:
            unconstrained.append(x)
            continue
        c_x, m_x = tightest_dr_constraint(view, x, strict)
        others = [c for c in drx if c is not c_x]
        w = len(drx)
        union = set().union(*(c.scope_set for c in drx))
        rest = net.sort_by_declaration(union - {x})
        for a in enumerate_instantiations(net, rest, only_consistent=True):
            if w <= m_x:
                if _joint_extension(net, drx, a, x) is None:
                    return AdaptiveVerdict(
                        False,
                        OrderedWitness(x, a),
                        tuple(unconstrained),
                    )
            else:
                ext_x = extension_set(net, c_x, a, x)
                exts = [extension_set(net, c, a, x) for c in others]
                for combo in itertools.combinations(range(len(others)), m_x):
                    joint = ext_x.intersection(*(exts[i] for i in combo))
                    if not joint:
                        picked = (c_x.name,) + tuple(
                            others[i].name for i in combo
                        )
                        return AdaptiveVerdict(
                            False,
                            OrderedWitness(x, a, picked),
                            tuple(unconstrained),
                        )
    return AdaptiveVerdict(True, None, tuple(unconstrained))


# -- enforcement --------------------------------------------------------


def _forbid(net: ConstraintNetwork, scope: tuple[str, ...], rows: set) -> ConstraintNetwork:
    """Drop the given rows (tuples over `scope`) from the constraint on
    that scope, adding it as the universal relation first if missing."""
    existing = net.constraint_on(scope)
    constraints = list(net.constraints)
    if existing is not None:
        reorder = [scope.index(v) for v in existing.scope]
        drop = {tuple(row[i] for i in reorder) for row in rows}
        at = constraints.index(existing)
        constraints[at] = Constraint(
            existing.name, existing.scope, existing.tuples - drop
        )
        return net.with_constraints(constraints)
    universal = set(itertools.product(*(net.domain(v) for v in scope)))
    universal -= rows
    used = {c.name for c in constraints}
    name = "x_" + "_".join(scope)
    while name in used:
        name += "_"
    constraints.append(Constraint(name, scope, frozenset(universal)))
    return net.with_constraints(constraints)


def enforce_adaptive_consistency(view: OrderedNetworkView) -> ConstraintNetwork:
    """One reverse sweep of join-and-project elimination.

    For each variable x from last to first, every consistent
    instantiation of the DR(x) variables minus x that cannot extend to
    x is forbidden on exactly those variables.  The result is
    adaptively consistent under the same ordering and has the same
    solutions; an already consistent network comes back unchanged.
    """
    net = view.network
    for x in reversed(view.ordering):
        current = OrderedNetworkView(net, view.ordering)
        drx = current.dr(x)
        if not drx:
            continue
        union = set().union(*(c.scope_set for c in drx))
        rest = net.sort_by_declaration(union - {x})
        if not rest:
            continue  # only unary constraints on x; nothing to record
        stranded = {
            project(a, rest)
            for a in enumerate_instantiations(net, rest, only_consistent=True)
            if _joint_extension(net, drx, a, x) is None
        }
        if stranded:
            net = _forbid(net, rest, stranded)
    return net


def enforce_dually_adaptive(view: OrderedNetworkView, strict: bool = False) -> ConstraintNetwork:
    """Reverse sweep enforcing the dually adaptive obligations.

    Violated obligations are forbidden on the obligation's own variable
    set minus x; tightness and width are re-derived after every change.
    Solution sets are preserved exactly.
    """
    net = view.network
    for x in reversed(view.ordering):
        while True:
            current = OrderedNetworkView(net, view.ordering)
            drx = current.dr(x)
            if not drx:
                break
            c_x, m_x = tightest_dr_constraint(current, x, strict)
            others = [c for c in drx if c is not c_x]
            w = len(drx)
            union = set().union(*(c.scope_set for c in drx))
            rest = net.sort_by_declaration(union - {x})
            if not rest:
                break
            fix = None
            for a in enumerate_instantiations(net, rest, only_consistent=True):
                if w <= m_x:
                    if _joint_extension(net, drx, a, x) is None:
                        fix = (rest, project(a, rest))
                        break
                else:
                    ext_x = extension_set(net, c_x, a, x)
                    exts = [extension_set(net, c, a, x) for c in others]
                    for combo in itertools.combinations(range(len(others)), m_x):
                        if not ext_x.intersection(*(exts[i] for i in combo)):
                            chosen = [c_x] + [others[i] for i in combo]
                            sub = set().union(*(c.scope_set for c in chosen))
                            target = net.sort_by_declaration(sub - {x})
                            fix = (target, project(a, target))
                            break
                    if fix:
                        break
            if fix is None:
                break
            net = _forbid(net, fix[0], {fix[1]})
    return net


# -- solvers ------------------------------------------------------------


@dataclass
class SearchTrace:
    solution: dict[str, str] | None
    backtracks: int
    nodes_visited: int
    stuck_variable: str | None = None
    prefix: dict[str, str] | None = None


def backtrack_free_solve(view: OrderedNetworkView) -> SearchTrace:
    """Assign variables in order, taking the first domain value that
    satisfies all DR constraints; never retracts.

    On an adaptively (or dually adaptively) consistent view this finds
    a full solution with zero backtracks; otherwise it may stop, in
    which case the stuck variable and the partial assignment are
    reported.
    """
    net = view.network
    a: dict[str, str] = {}
    nodes = 0
    for x in view.ordering:
        drx = view.dr(x)
        placed = None
        for u in net.domain(x):
            nodes += 1
            a[x] = u
            if all(project(a, c.scope) in c.tuples for c in drx):
                placed = u
                break
        if placed is None:
            del a[x]
            return SearchTrace(None, 0, nodes, stuck_variable=x, prefix=a)
        a[x] = placed
    return SearchTrace(a, 0, nodes)


def backtracking_solve(
    net: ConstraintNetwork, ordering: Sequence[str] | None = None
) -> SearchTrace:
    """Complete chronological backtracking; the satisfiability oracle.

    Finds a solution iff one exists.  `backtracks` counts retreats from
    an exhausted variable, `nodes_visited` counts attempted values.
    """
    view = OrderedNetworkView(net, ordering)
    order = view.ordering
    check = [view.dr(x) for x in order]
    a: dict[str, str] = {}
    choice = [0] * len(order)
    i = 0
    nodes = 0
    backtracks = 0
    while 0 <= i < len(order):
        x = order[i]
        dom = net.domain(x)
        placed = False
        for j in range(choice[i], len(dom)):
            nodes += 1
            a[x] = dom[j]
            if all(project(a, c.scope) in c.tuples for c in check[i]):
                choice[i] = j + 1
                placed = True
                break
            del a[x]
        if placed:
            i += 1
        else:
            choice[i] = 0
            i -= 1
            backtracks += 1
            if i >= 0:
                a.pop(order[i], None)
    if i < 0:
        return SearchTrace(None, backtracks, nodes)
    return SearchTrace(a, backtracks, nodes)
