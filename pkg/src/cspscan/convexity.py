"""Tree convexity and row convexity of constraints and networks.

A constraint is tree convex w.r.t. a scope variable x under a tree
when every non-trivial (non-empty) extension set to x is a subtree.  A
network is tree convex when one tree over the union of all domains
works for every constraint and every scope variable.  Row convexity is
the special case where the tree is a path (a total ordering of the
values).

Recognition is exact: candidate trees (or total orders) are enumerated
exhaustively at desk scale and the search refuses loudly above the
size bound instead of approximating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CapabilityError, InputError
from .model import Constraint, ConstraintNetwork, enumerate_instantiations, extension_set
from .valuetree import (
    EXACT_TREE_LIMIT,
    ValueTree,
    is_subtree,
    labeled_trees,
    total_order_tree,
)


@dataclass
class ConvexityCounterexample:
    constraint: str
    variable: str
    instantiation: dict[str, str]
    extension: tuple[str, ...]


@dataclass
class ConvexityVerdict:
    kind: str  # "tree" or "total-order"
    holds: bool
    tree: ValueTree | None = None
    counterexample: ConvexityCounterexample | None = None
    source: str = "given"  # "given" or "search"


def _extension_sets(net: ConstraintNetwork, c: Constraint, x: str):
    rest = [v for v in c.scope if v != x]
    for a in enumerate_instantiations(net, rest):
        ext = extension_set(net, c, a, x)
        if ext:  # trivial (empty) extension sets are exempt
            yield a, ext


def is_tree_convex_constraint(
    net: ConstraintNetwork,
    c: Constraint,
    x: str,
    tree: ValueTree,
    kind: str = "tree",
) -> ConvexityVerdict:
    """Is every non-trivial extension set of c to x a subtree of `tree`?

    The tree universe must cover the domain of x.
    """
    if x not in c.scope_set:
        raise InputError(f"variable {x!r} is not in the scope of {c.name}")
    missing = set(net.domain(x)) - set(tree.universe)
    if missing:
        raise InputError(
            f"tree universe does not cover the domain of {x}: "
            f"missing {sorted(missing)}"
        )
    for a, ext in _extension_sets(net, c, x):
        if not is_subtree(tree, ext).is_subtree:
            bad = ConvexityCounterexample(
                c.name, x, a, tuple(sorted(ext, key=tree._pos.__getitem__))
            )
            return ConvexityVerdict(kind, False, tree, bad)
    return ConvexityVerdict(kind, True, tree)


def is_tree_convex_network(
    net: ConstraintNetwork, tree: ValueTree, kind: str = "tree"
) -> ConvexityVerdict:
    """Is every constraint tree convex w.r.t. every scope variable under
    one tree spanning the union of all domains?"""
    if set(tree.universe) != set(net.value_universe()):
        raise InputError(
            "tree universe must equal the union of all variable domains"
        )
    for c in net.constraints:
        for x in c.scope:
            verdict = is_tree_convex_constraint(net, c, x, tree, kind)
            if not verdict.holds:
                return verdict
    return ConvexityVerdict(kind, True, tree)


def find_convexity_tree(
    net: ConstraintNetwork, mode: str = "tree"
) -> ConvexityVerdict:
    """Search for a witness tree (mode="tree") or a witness total order
    (mode="total-order") making the whole network convex.

    Exhausts all labeled trees via Prufer sequences, or all value
    permutations, over the union of the domains; the first success in
    enumeration order is returned.  Refuses universes larger than
    EXACT_TREE_LIMIT values.
    """
    if mode not in ("tree", "total-order"):
        raise InputError(f"unknown search mode {mode!r}")
    universe = net.value_universe()
    if len(universe) > EXACT_TREE_LIMIT:
        raise CapabilityError(
            f"exact {mode} search supports at most {EXACT_TREE_LIMIT} "
            f"values, network has {len(universe)}"
        )
    # Extension sets do not depend on the candidate, so collect them once.
    family: list[set[str]] = []
    seen: set[frozenset[str]] = set()
    for c in net.constraints:
        for x in c.scope:
            for _a, ext in _extension_sets(net, c, x):
                key = frozenset(ext)
                if key not in seen:
                    seen.add(key)
                    family.append(ext)
    if mode == "tree":
        candidates = labeled_trees(universe)
    else:
        candidates = (
            total_order_tree(perm)
            for perm in itertools.permutations(universe)
        )
    for t in candidates:
        if all(is_subtree(t, s).is_subtree for s in family):
            return ConvexityVerdict(mode, True, t, source="search")
    return ConvexityVerdict(mode, False, None, source="search")
