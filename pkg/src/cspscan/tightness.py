"""Constraint tightness measures and weak tightness of a network.

For a constraint c and a scope variable x, every instantiation of the
remaining scope variables allows some set of x-values (its extension
set).  The tightness figures summarize extension set sizes:

* properly m-tight w.r.t. x: every extension set has at most m values;
* m-tight w.r.t. x: every extension set has at most m values or is the
  whole domain of x (full sets are exempt).

A network is weakly m-tight at level k when every extension situation
with k instantiated variables offers at least one properly m-tight
relevant constraint.  Checking sets of size exactly k suffices because
relevant-constraint sets only grow with the instantiated set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import InputError
from .model import (
    Constraint,
    ConstraintNetwork,
    enumerate_instantiations,
    extension_set,
)


@dataclass(frozen=True)
class ConstraintTightness:
    """Minimal tightness figures of one constraint w.r.t. one variable."""

    m_tight: int
    properly_m_tight: int
    domain_size: int


def constraint_tightness(
    net: ConstraintNetwork, c: Constraint, x: str
) -> ConstraintTightness:
    """Smallest m such that c is m-tight (resp. properly m-tight) w.r.t. x.

    Scans every instantiation of scope(c) - {x}, consistent or not; the
    constraint is m-tight (properly m-tight) w.r.t. x for exactly the
    values at or above the returned minima.
    """
    if x not in c.scope_set:
        raise InputError(f"variable {x!r} is not in the scope of {c.name}")
    dom_size = len(net.domain(x))
    rest = [v for v in c.scope if v != x]
    proper = 0
    plain = 0
    for a in enumerate_instantiations(net, rest):
        size = len(extension_set(net, c, a, x))
        proper = max(proper, size)
        if size < dom_size:
            plain = max(plain, size)
    return ConstraintTightness(plain, proper, dom_size)


@dataclass
class TightnessReport:
    """Per (constraint, variable) tightness figures for a whole network."""

    entries: dict[tuple[str, str], ConstraintTightness] = field(
        default_factory=dict
    )

    def properly_m_tight(self, constraint: str, variable: str) -> int:
        return self.entries[(constraint, variable)].properly_m_tight

    def constraint_properly_m_tight(self, constraint: str) -> int:
        """Whole-constraint figure: max over the scope variables."""
        values = [
            t.properly_m_tight
            for (c, _x), t in self.entries.items()
            if c == constraint
        ]
        return max(values)

    def network_properly_m_tight(self) -> int:
        """Smallest m making every constraint properly m-tight."""
        if not self.entries:
            return 0
        return max(t.properly_m_tight for t in self.entries.values())


def tightness_report(net: ConstraintNetwork) -> TightnessReport:
    report = TightnessReport()
    for c in net.constraints:
        for x in c.scope:
            report.entries[(c.name, x)] = constraint_tightness(net, c, x)
    return report


def is_properly_m_tight(
    net: ConstraintNetwork, c: Constraint, m: int
) -> bool:
    """True iff c is properly m-tight w.r.t. every variable of its scope."""
    return all(
        constraint_tightness(net, c, x).properly_m_tight <= m for x in c.scope
    )


@dataclass
class WeakTightnessVerdict:
    m: int
    level: int
    holds: bool
    counterexample: tuple[tuple[str, ...], str] | None = None
    unconstrained: tuple[tuple[tuple[str, ...], str], ...] = ()


def is_weakly_m_tight(
    net: ConstraintNetwork, m: int, level: int, strict: bool = False
) -> WeakTightnessVerdict:
    """Is the network weakly m-tight at the given level?

    For every variable set Y with level <= |Y| < n and every new
    variable x, some relevant constraint on x w.r.t. Y must be properly
    m-tight.  By default the requirement is proper m-tightness w.r.t. x
    (what the extension argument consumes); `strict=True` demands the
    whole constraint be properly m-tight.

    Pairs (Y, x) with no relevant constraints at all do not fail the
    check (extension is vacuously possible); they are reported in
    `unconstrained` since degree-based sufficient conditions assume a
    constraint between every two variables.  Because of that vacuous
    pass, every size from `level` up to n-1 is scanned: a vacuous pass
    at one size carries no tight constraint up to its supersets.
    """
    if not 1 <= level < net.n:
        raise InputError(f"level must be in [1, {net.n - 1}], got {level}")
    if m < 0:
        raise InputError("m must be non-negative")
    report = tightness_report(net)

    def tight_enough(c: Constraint, x: str) -> bool:
        if strict:
            return report.constraint_properly_m_tight(c.name) <= m
        return report.properly_m_tight(c.name, x) <= m

    names = [v.name for v in net.variables]
    unconstrained: list[tuple[tuple[str, ...], str]] = []
    for size in range(level, net.n):
        for subset in itertools.combinations(names, size):
            inside = set(subset)
            for x in names:
                if x in inside:
                    continue
                relevant = [
                    c
                    for c in net.constraints
                    if x in c.scope_set and (c.scope_set - {x}) <= inside
                ]
                if not relevant:
                    unconstrained.append((subset, x))
                    continue
                if not any(tight_enough(c, x) for c in relevant):
                    return WeakTightnessVerdict(
                        m, level, False, (subset, x), tuple(unconstrained)
                    )
    return WeakTightnessVerdict(m, level, True, None, tuple(unconstrained))


def complete_with_universal_binaries(net: ConstraintNetwork) -> ConstraintNetwork:
    """Add a universal binary constraint for every unconstrained pair."""
    constraints = list(net.constraints)
    used = {c.name for c in constraints}
    names = [v.name for v in net.variables]
    for x, y in itertools.combinations(names, 2):
        if net.constraint_on((x, y)) is not None:
            continue
        name = f"u_{x}_{y}"
        while name in used:
            name += "_"
        used.add(name)
        tuples = set(itertools.product(net.domain(x), net.domain(y)))
        constraints.append(Constraint(name, (x, y), frozenset(tuples)))
    return net.with_constraints(constraints)


def weak_tightness_sufficient_by_degree(
    net: ConstraintNetwork, m: int, level: int
) -> bool:
    """Degree-based sufficient condition for weak m-tightness at `level`.

    Requires a binary constraint between every pair of variables (use
    complete_with_universal_binaries first if needed).  True iff every
    variable takes part in at least n - level properly m-tight binary
    constraints; a true answer implies is_weakly_m_tight holds, a false
    answer implies nothing.
    """
    names = [v.name for v in net.variables]
    for x, y in itertools.combinations(names, 2):
        if net.constraint_on((x, y)) is None:
            raise InputError(
                f"no binary constraint between {x} and {y}; the degree "
                "condition assumes a complete binary graph"
            )
    need = net.n - level
    for x in names:
        degree = sum(
            1
            for c in net.constraints
            if c.arity == 2
            and x in c.scope_set
            and is_properly_m_tight(net, c, m)
        )
        if degree < need:
            return False
    return True


def minimum_tight_count(n: int) -> int:
    """Minimum number of properly m-tight binary/ternary constraints a
    weakly m-tight (at level 2) network on n variables can have."""
    if n < 3:
        raise InputError(f"n must be at least 3, got {n}")
    if n % 3 in (0, 1):
        return n * (n - 1) // 2 - 2 * (n // 3)
    return (n - 2) * (3 * n - 1) // 6
