"""Core data model for finite constraint networks.

Variables take values from finite, explicitly enumerated domains.  A
constraint is an extensional relation: an ordered scope of distinct
variables plus the set of allowed value tuples.  Values are opaque
string tokens; two domains may share tokens, and equality is exact
token equality.

Networks are immutable once constructed and every operation in this
module is a pure function, so a network can be shared freely between
threads.  Iteration order is deterministic everywhere: variables in
declaration order, domain values in declared order, constraints in
declaration order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import InputError

_FORBIDDEN_CHARS = set(" \t\r\n\f\v,()#")


def check_token(token: str, what: str = "value") -> str:
    """Validate a value/name token (non-empty, no whitespace , ( ) #)."""
    if not isinstance(token, str) or not token:
        raise InputError(f"empty {what} token")
    if any(ch in _FORBIDDEN_CHARS for ch in token):
        raise InputError(f"invalid {what} token {token!r}")
    return token


@dataclass(frozen=True)
class Variable:
    """A named variable with a non-empty, duplicate-free ordered domain."""

    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        check_token(self.name, "variable name")
        if not self.domain:
            raise InputError(f"variable {self.name}: domain is empty")
        seen = set()
        for value in self.domain:
            check_token(value)
            if value in seen:
                raise InputError(
                    f"variable {self.name}: duplicate domain value {value!r}"
                )
            seen.add(value)


@dataclass(frozen=True)
class Constraint:
    """An extensional relation over an ordered scope of distinct variables."""

    name: str
    scope: tuple[str, ...]
    tuples: frozenset[tuple[str, ...]]

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(
            self, "tuples", frozenset(tuple(t) for t in self.tuples)
        )
        check_token(self.name, "constraint name")
        if not self.scope:
            raise InputError(f"constraint {self.name}: scope is empty")
        if len(set(self.scope)) != len(self.scope):
            raise InputError(f"constraint {self.name}: repeated scope variable")
        for t in self.tuples:
            if len(t) != len(self.scope):
                raise InputError(
                    f"constraint {self.name}: tuple {t} does not match arity "
                    f"{len(self.scope)}"
                )
        object.__setattr__(self, "_scope_set", frozenset(self.scope))

    @property
    def arity(self) -> int:
        return len(self.scope)

    @property
    def scope_set(self) -> frozenset[str]:
        return self._scope_set  # type: ignore[attr-defined]


class ConstraintNetwork:
    """A set of variables, constraints with unique scopes, and optional
    value tree / variable ordering attached to the instance.

    Scopes are unique as sets: two constraints never cover exactly the
    same variables.  An attached tree must span the union of all domain
    values; an attached ordering must be a permutation of the variables.
    """

    def __init__(self, variables, constraints=(), tree=None, ordering=None):
        self.variables: tuple[Variable, ...] = tuple(variables)
        self.constraints: tuple[Constraint, ...] = tuple(constraints)
        self.tree = tree
        self.ordering: tuple[str, ...] | None = (
            tuple(ordering) if ordering is not None else None
        )

        if not self.variables:
            raise InputError("network has no variables")
        self._var: dict[str, Variable] = {}
        self._var_pos: dict[str, int] = {}
        for i, v in enumerate(self.variables):
            if v.name in self._var:
                raise InputError(f"duplicate variable name {v.name!r}")
            self._var[v.name] = v
            self._var_pos[v.name] = i
        self._dom_pos: dict[str, dict[str, int]] = {
            v.name: {val: i for i, val in enumerate(v.domain)}
            for v in self.variables
        }

        self._by_scope: dict[frozenset[str], Constraint] = {}
        names = set()
        for c in self.constraints:
            if c.name in names:
                raise InputError(f"duplicate constraint name {c.name!r}")
            names.add(c.name)
            for x in c.scope:
                if x not in self._var:
                    raise InputError(
                        f"constraint {c.name}: unknown variable {x!r}"
                    )
            if c.scope_set in self._by_scope:
                other = self._by_scope[c.scope_set].name
                raise InputError(
                    f"constraints {other} and {c.name} share the same scope"
                )
            self._by_scope[c.scope_set] = c
            for t in c.tuples:
                for x, val in zip(c.scope, t):
                    if val not in self._dom_pos[x]:
                        raise InputError(
                            f"constraint {c.name}: value {val!r} not in the "
                            f"domain of {x}"
                        )

        if self.ordering is not None:
            if sorted(self.ordering) != sorted(self._var):
                raise InputError(
                    "ordering is not a permutation of the variables"
                )

        if self.tree is not None:
            if set(self.tree.universe) != set(self.value_universe()):
                raise InputError(
                    "attached tree does not span the union of all domains"
                )

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.variables)

    def variable(self, name: str) -> Variable:
        try:
            return self._var[name]
        except KeyError:
            raise InputError(f"unknown variable {name!r}") from None

    def domain(self, name: str) -> tuple[str, ...]:
        return self.variable(name).domain

    def domain_index(self, name: str) -> dict[str, int]:
        self.variable(name)
        return self._dom_pos[name]

    def variable_position(self, name: str) -> int:
        self.variable(name)
        return self._var_pos[name]

    def constraint(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise InputError(f"unknown constraint {name!r}")

    def constraint_on(self, scope: Iterable[str]) -> Constraint | None:
        """The unique constraint whose scope equals the given variable set."""
        return self._by_scope.get(frozenset(scope))

    def scope_key(self, scope: Iterable[str]) -> tuple[int, ...]:
        """Canonical sort key for a scope: sorted declaration positions."""
        return tuple(sorted(self._var_pos[x] for x in scope))

    def sort_by_declaration(self, names: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(names, key=self._var_pos.__getitem__))

    def value_universe(self) -> tuple[str, ...]:
        """Union of all domains, ordered by first appearance."""
        seen: dict[str, None] = {}
        for v in self.variables:
            for val in v.domain:
                seen.setdefault(val)
        return tuple(seen)

    def with_constraints(self, constraints, ordering=None) -> "ConstraintNetwork":
        """A copy of this network carrying a different constraint list."""
        return ConstraintNetwork(
            self.variables,
            constraints,
            tree=self.tree,
            ordering=self.ordering if ordering is None else ordering,
        )


def project(a: Mapping[str, str], scope: Iterable[str]) -> tuple[str, ...]:
    """Restrict an instantiation to a scope, reordered to scope order."""
    return tuple(a[x] for x in scope)


def validate_instantiation(net: ConstraintNetwork, a: Mapping[str, str]) -> None:
    for name, value in a.items():
        var = net.variable(name)
        if value not in net._dom_pos[name]:
            raise InputError(
                f"value {value!r} not in the domain of variable {var.name}"
            )


def satisfied_within(net: ConstraintNetwork, a: Mapping[str, str]) -> bool:
    """Unvalidated core of is_consistent_instantiation (internal)."""
    bound = a.keys()
    for c in net.constraints:
        if c.scope_set <= bound:
            if project(a, c.scope) not in c.tuples:
                return False
    return True


def is_consistent_instantiation(
    net: ConstraintNetwork, a: Mapping[str, str]
) -> bool:
    """True iff `a` satisfies every constraint falling entirely inside
    its instantiated variable set.

    Constraints that mention any variable outside the instantiated set
    impose nothing; the empty instantiation is always consistent.
    """
    validate_instantiation(net, a)
    return satisfied_within(net, a)


def relevant_constraints(
    net: ConstraintNetwork, instantiated: Iterable[str], x: str
) -> list[Constraint]:
    """Constraints that cover x using only variables from `instantiated`.

    Returned in network declaration order.  A unary constraint on x is
    relevant with respect to any set.
    """
    y = set(instantiated)
    for name in y:
        net.variable(name)
    net.variable(x)
    if x in y:
        raise InputError(f"new variable {x!r} is already instantiated")
    return [
        c
        for c in net.constraints
        if x in c.scope_set and (c.scope_set - {x}) <= y
    ]


def extension_set(
    net: ConstraintNetwork, c: Constraint, a: Mapping[str, str], x: str
) -> set[str]:
    """Values of x compatible with `a` under the single constraint `c`.

    `a` must bind at least scope(c) - {x}; extra bindings (including a
    binding of x itself) are ignored, i.e. `a` is restricted to the
    constraint's own scope first.
    """
    if x not in c.scope_set:
        raise InputError(f"variable {x!r} is not in the scope of {c.name}")
    validate_instantiation(net, a)
    missing = c.scope_set - {x} - a.keys()
    if missing:
        raise InputError(
            f"instantiation does not bind {sorted(missing)} from the scope "
            f"of {c.name}"
        )
    pos = c.scope.index(x)
    row = [a[v] if v != x else None for v in c.scope]
    out = set()
    for b in net.domain(x):
        row[pos] = b
        if tuple(row) in c.tuples:
            out.add(b)
    return out


def enumerate_instantiations(
    net: ConstraintNetwork,
    variables: Iterable[str],
    only_consistent: bool = False,
) -> Iterator[dict[str, str]]:
    """All instantiations of the given variables, lexicographic by
    (declaration order, domain order).  Yields the empty instantiation
    for an empty variable set."""
    names = net.sort_by_declaration(set(variables))
    for name in names:
        net.variable(name)
    domains = [net.domain(name) for name in names]
    for combo in itertools.product(*domains):
        a = dict(zip(names, combo))
        if only_consistent and not satisfied_within(net, a):
            continue
        yield a


def solutions(net: ConstraintNetwork) -> Iterator[dict[str, str]]:
    """All full consistent instantiations, in deterministic order."""
    return enumerate_instantiations(
        net, (v.name for v in net.variables), only_consistent=True
    )
