"""Rooted trees over value universes and subtree set algebra.

A set of values is "tree convex" under a tree when it induces a
connected subgraph (a subtree).  Families of such sets have a Helly
style intersection property: pairwise intersection implies global
intersection, witnessed by the deepest subtree root.  This module also
carries the cardinality-based companion result: if one member of a
family has at most m elements and meets every choice of m other
members jointly, the whole family intersects.

Exhaustive "does any tree exist" questions are answered by enumerating
all labeled trees through Prufer sequences, and refuse above
EXACT_TREE_LIMIT vertices rather than guessing.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import CapabilityError, InputError

EXACT_TREE_LIMIT = 8


class ValueTree:
    """A rooted tree over an ordered universe of value tokens.

    `parent` maps every non-root value to its parent; the relation must
    connect all values to the root without cycles.
    """

    def __init__(self, universe: Iterable[str], root: str, parent: dict[str, str]):
        self.universe: tuple[str, ...] = tuple(universe)
        self.root = root
        self.parent: dict[str, str] = dict(parent)

        if len(set(self.universe)) != len(self.universe) or not self.universe:
            raise InputError("tree universe must be non-empty and duplicate-free")
        members = set(self.universe)
        if root not in members:
            raise InputError(f"root {root!r} is not in the universe")
        if set(self.parent) != members - {root}:
            raise InputError(
                "parent map must cover exactly the non-root values"
            )
        for child, par in self.parent.items():
            if par not in members:
                raise InputError(f"parent {par!r} of {child!r} not in universe")

        self._pos = {v: i for i, v in enumerate(self.universe)}
        self._depth: dict[str, int] = {root: 0}
        for v in self.universe:
            trail = []
            w = v
            while w not in self._depth:
                trail.append(w)
                w = self.parent[w]
                if w in trail:
                    raise InputError("parent relation contains a cycle")
            base = self._depth[w]
            for i, u in enumerate(reversed(trail), start=1):
                self._depth[u] = base + i

        self._children: dict[str, list[str]] = {v: [] for v in self.universe}
        for child in self.universe:
            if child != root:
                self._children[self.parent[child]].append(child)
        for v in self._children:
            self._children[v].sort(key=self._pos.__getitem__)

    def depth(self, v: str) -> int:
        try:
            return self._depth[v]
        except KeyError:
            raise InputError(f"value {v!r} not in tree universe") from None

    def children(self, v: str) -> tuple[str, ...]:
        self.depth(v)
        return tuple(self._children[v])

    def edges(self) -> tuple[tuple[str, str], ...]:
        """(parent, child) pairs sorted by universe position."""
        pairs = [(self.parent[c], c) for c in self.universe if c != self.root]
        pairs.sort(key=lambda e: (self._pos[e[0]], self._pos[e[1]]))
        return tuple(pairs)

    def path(self, u: str, v: str) -> list[str]:
        """The unique path between two values, endpoints included."""
        self.depth(u), self.depth(v)
        up, vp = u, v
        left, right = [], []
        while self._depth[up] > self._depth[vp]:
            left.append(up)
            up = self.parent[up]
        while self._depth[vp] > self._depth[up]:
            right.append(vp)
            vp = self.parent[vp]
        while up != vp:
            left.append(up)
            right.append(vp)
            up = self.parent[up]
            vp = self.parent[vp]
        return left + [up] + list(reversed(right))

    def re_rooted(self, new_root: str) -> "ValueTree":
        """The same undirected tree, rooted at a different value."""
        self.depth(new_root)
        adj: dict[str, list[str]] = {v: [] for v in self.universe}
        for par, child in self.edges():
            adj[par].append(child)
            adj[child].append(par)
        parent: dict[str, str] = {}
        seen = {new_root}
        queue = [new_root]
        while queue:
            v = queue.pop(0)
            for w in sorted(adj[v], key=self._pos.__getitem__):
                if w not in seen:
                    seen.add(w)
                    parent[w] = v
                    queue.append(w)
        return ValueTree(self.universe, new_root, parent)

    def __repr__(self) -> str:
        edges = " ".join(f"{p}:{c}" for p, c in self.edges())
        return f"ValueTree(root={self.root} {edges})"


@dataclass(frozen=True)
class SubtreeWitness:
    values: frozenset[str]
    is_subtree: bool
    disconnected_pair: tuple[str, str] | None = None


def _component_roots(t: ValueTree, values: set[str]) -> list[str]:
    """Members whose parent lies outside the set (or that are the root),
    i.e. one per connected component of the induced subgraph."""
    roots = [
        v for v in values if v == t.root or t.parent[v] not in values
    ]
    roots.sort(key=t._pos.__getitem__)
    return roots


def is_subtree(t: ValueTree, values: Iterable[str]) -> SubtreeWitness:
    """Do the given values induce a connected subgraph of the tree?

    The empty set counts as a (trivial) subtree.  When the answer is
    no, the witness carries two values whose connecting path leaves the
    set.
    """
    vals = set(values)
    stray = vals - set(t.universe)
    if stray:
        raise InputError(f"values {sorted(stray)} not in tree universe")
    if not vals:
        return SubtreeWitness(frozenset(), True)
    roots = _component_roots(t, vals)
    if len(roots) == 1:
        return SubtreeWitness(frozenset(vals), True)
    # Any two component roots are disconnected within the set.
    return SubtreeWitness(frozenset(vals), False, (roots[0], roots[1]))


def subtree_root(t: ValueTree, values: Iterable[str]) -> str:
    """The unique member of a non-empty subtree nearest the tree root."""
    vals = set(values)
    if not vals:
        raise InputError("subtree_root: empty set")
    w = is_subtree(t, vals)
    if not w.is_subtree:
        raise InputError("subtree_root: set is not a subtree")
    return min(vals, key=lambda v: (t.depth(v), t._pos[v]))


def subtree_intersection(
    t: ValueTree, a: Iterable[str], b: Iterable[str]
) -> set[str]:
    """Intersection of two subtrees; itself always a subtree."""
    aset, bset = set(a), set(b)
    for s in (aset, bset):
        if not is_subtree(t, s).is_subtree:
            raise InputError("subtree_intersection: argument is not a subtree")
    return aset & bset


def pairwise_nonempty(family: Sequence[Iterable[str]]) -> bool:
    """True iff every pair of members has a non-empty intersection."""
    sets = [set(m) for m in family]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if not (sets[i] & sets[j]):
                return False
    return True


def tree_convex_family_intersection(
    t: ValueTree, family: Sequence[Iterable[str]]
) -> set[str]:
    """Intersection of a family of non-empty subtrees of one tree.

    Emptiness is decided by the deepest-root argument: pick the member
    whose subtree root lies deepest; the whole family intersects iff
    that root belongs to every member.
    """
    sets = [set(m) for m in family]
    if not sets:
        raise InputError("family must be non-empty")
    roots = []
    for s in sets:
        if not s:
            raise InputError("family members must be non-empty")
        if not is_subtree(t, s).is_subtree:
            raise InputError("family member is not a subtree")
        roots.append(subtree_root(t, s))
    r_max = max(roots, key=lambda v: (t.depth(v), -t._pos[v]))
    nonempty = all(r_max in s for s in sets)
    out = set.intersection(*sets)
    # The deepest-root argument and plain intersection must agree.
    assert nonempty == bool(out)
    return out


@dataclass(frozen=True)
class SmallSetIntersection:
    intersection: frozenset[str]
    hypothesis_holds: bool
    small_member_index: int


def small_set_family_intersection(
    family: Sequence[Iterable[str]], m: int
) -> SmallSetIntersection:
    """Global intersection of a family with a designated small member.

    Requires more than m members, one of which has at most m elements
    (the first such member is designated).  `hypothesis_holds` reports
    whether the small member meets every choice of m other members
    jointly; when it does, the global intersection is non-empty.
    """
    sets = [set(s) for s in family]
    if m < 1:
        raise InputError("m must be positive")
    if len(sets) <= m:
        raise InputError("family must have more than m members")
    small = next((i for i, s in enumerate(sets) if len(s) <= m), None)
    if small is None:
        raise InputError(f"no family member has at most {m} elements")
    e1 = sets[small]
    others = sets[:small] + sets[small + 1 :]
    hypothesis = all(
        e1.intersection(*combo)
        for combo in itertools.combinations(others, m)
    )
    out = set.intersection(*sets)
    if hypothesis:
        assert out, "small-set hypothesis held but intersection is empty"
    return SmallSetIntersection(frozenset(out), hypothesis, small)


# -- exhaustive tree enumeration ---------------------------------------


def _prufer_edges(seq: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for a in seq:
        degree[a] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for a in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, a))
        degree[a] -= 1
        if degree[a] == 1:
            heapq.heappush(leaves, a)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def tree_from_edges(
    universe: Sequence[str], edges: Iterable[tuple[str, str]], root: str
) -> ValueTree:
    """Build a rooted ValueTree from an undirected edge list."""
    adj: dict[str, list[str]] = {v: [] for v in universe}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    pos = {v: i for i, v in enumerate(universe)}
    parent: dict[str, str] = {}
    seen = {root}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for w in sorted(adj[v], key=pos.__getitem__):
            if w not in seen:
                seen.add(w)
                parent[w] = v
                queue.append(w)
    if len(seen) != len(tuple(universe)):
        raise InputError("edge list does not connect the universe")
    return ValueTree(universe, root, parent)


def labeled_trees(universe: Sequence[str]) -> Iterator[ValueTree]:
    """Every labeled tree on the universe, rooted at its first value.

    There are n**(n-2) of them for n >= 2 (one for n in {1, 2}),
    enumerated in lexicographic Prufer-sequence order.
    """
    uni = tuple(universe)
    n = len(uni)
    if n == 0:
        raise InputError("universe must be non-empty")
    if n == 1:
        yield ValueTree(uni, uni[0], {})
        return
    if n == 2:
        yield ValueTree(uni, uni[0], {uni[1]: uni[0]})
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        edges = [(uni[a], uni[b]) for a, b in _prufer_edges(seq, n)]
        yield tree_from_edges(uni, edges, uni[0])


def total_order_tree(order: Sequence[str]) -> ValueTree:
    """A total ordering of values read as a path tree (each node has at
    most one child)."""
    vals = tuple(order)
    if not vals:
        raise InputError("order must be non-empty")
    parent = {vals[i]: vals[i - 1] for i in range(1, len(vals))}
    return ValueTree(vals, vals[0], parent)


def _check_exact_limit(n: int) -> None:
    if n > EXACT_TREE_LIMIT:
        raise CapabilityError(
            f"exact search supports at most {EXACT_TREE_LIMIT} values, "
            f"got {n}"
        )


def find_tree_for_family(
    family: Sequence[Iterable[str]], universe: Sequence[str]
) -> ValueTree | None:
    """First labeled tree (enumeration order) under which every family
    member is a subtree, or None after exhausting all of them.

    Refuses universes above EXACT_TREE_LIMIT values.
    """
    uni = tuple(universe)
    _check_exact_limit(len(uni))
    sets = [set(s) for s in family]
    members = set(uni)
    for s in sets:
        if not s <= members:
            raise InputError("family member leaves the universe")
    for t in labeled_trees(uni):
        if all(is_subtree(t, s).is_subtree for s in sets):
            return t
    return None
