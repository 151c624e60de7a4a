"""Acceptance suite: one test per criterion, fixed seeds, printed
PASS/FAIL lines (run with -s to see them on success).

Every randomized criterion runs at least its stated instance count;
expected values are either taken from the worked fixtures or computed
by the independent brute-force oracles in netgen.py.
"""

import itertools
import random
from contextlib import contextmanager

import pytest

from cspscan import (
    Constraint,
    ConstraintNetwork,
    Variable,
    backtrack_free_solve,
    enforce_adaptive_consistency,
    enforce_dually_adaptive,
    enforce_k_consistency,
    enforce_relational_m_consistency,
    extension_set,
    find_convexity_tree,
    find_tree_for_family,
    format_network,
    is_adaptively_consistent,
    is_consistent_instantiation,
    is_dually_adaptively_consistent,
    is_globally_consistent,
    is_k_consistent,
    is_k_consistent_via_lifting,
    is_relationally_m_consistent,
    is_strongly_k_consistent,
    is_tree_convex_constraint,
    is_weakly_m_tight,
    labeled_trees,
    minimum_tight_count,
    pairwise_nonempty,
    relevant_constraints,
    small_set_family_intersection,
    solutions,
    total_order_tree,
    tree_convex_family_intersection,
    constraint_tightness,
    OrderedNetworkView,
)
from cspscan.cli import main as cli_main
from nets import (
    PARTIAL_ORDER_FAMILY,
    accessibility,
    complete5,
    leq_net,
    n1,
    n2,
    star_at_b,
)
from netgen import random_network, random_subtree, random_tree, raw_solutions


@contextmanager
def criterion(cid, description):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {cid} FAIL: {description}")
        raise
    print(f"ACCEPTANCE {cid} PASS: {description}")


def write_net(tmp_path, net, name):
    path = tmp_path / name
    path.write_text(format_network(net))
    return str(path)


def test_criterion_01_first_fixture_exactness(tmp_path):
    with criterion(1, "five-variable fixture: extension sets, relevant "
                      "constraints, check k 4"):
        net = n1()
        a = {"x1": "a", "x2": "b", "x4": "a"}
        assert extension_set(net, net.constraint("cS1"), a, "x3") == {"d", "a"}
        assert extension_set(net, net.constraint("cS2"), a, "x3") == {"d", "b"}
        assert extension_set(net, net.constraint("cS3"), a, "x3") == {"d", "c"}
        rel = relevant_constraints(net, {"x1", "x2", "x4"}, "x3")
        assert [c.name for c in rel] == ["cS1", "cS2", "cS3"]
        assert "cS4" not in [c.name for c in rel]
        path = write_net(tmp_path, net, "n1.cn")
        code = cli_main(["check", "k", "4", path])
        assert code == 0, (
            f"check k 4 exited {code}: the fixture as printed is not "
            "4-consistent (x3=a is consistent on {x1,x3,x4} but has no "
            "support in cS2/cS3 toward x2)"
        )


def test_criterion_02_alldifferent_fixture(tmp_path):
    with criterion(2, "all-different fixture: strong 3, failing 4 with the "
                      "1,2,3 witness, enforcement, solution preservation"):
        net = n2()
        assert is_strongly_k_consistent(net, 3).holds
        verdict = is_k_consistent(net, 4)
        assert not verdict.holds
        assert verdict.witness.instantiation == {"x1": "1", "x2": "2", "x": "3"}
        assert verdict.witness.variable == "x3"

        path = write_net(tmp_path, net, "n2.cn")
        code = cli_main(["check", "k", "4", path])
        assert code == 1

        sols = raw_solutions(net)
        assert len(sols) == 6
        names = [v.name for v in net.variables]
        xi = names.index("x")
        assert all(s[xi] == "4" for s in sols)

        enforced = enforce_k_consistency(net, 4)
        assert is_k_consistent(enforced, 4).holds
        tern = enforced.constraint_on(("x1", "x2", "x"))
        assert tern is not None
        stranded = tuple({"x1": "1", "x2": "2", "x": "3"}[v] for v in tern.scope)
        assert stranded not in tern.tuples
        assert raw_solutions(enforced) == sols


def test_criterion_03_lifting_equivalence():
    with criterion(3, "definitional and extension-set k-consistency agree "
                      "on 500 random networks"):
        rng = random.Random(20240501)
        for i in range(500):
            net = random_network(rng, max_vars=4, max_dom=3, max_cons=5)
            for k in range(1, net.n + 1):
                a = is_k_consistent(net, k)
                b = is_k_consistent_via_lifting(net, k)
                assert a.holds == b.holds, (i, k)
                if not a.holds:
                    assert a.witness.instantiation == b.witness.instantiation
                    assert a.witness.variable == b.witness.variable


def test_criterion_04_tree_convex_intersection_lemma():
    with criterion(4, "pairwise vs global intersection on 1000 subtree "
                      "families, plus the partial-order counterexample"):
        rng = random.Random(20240502)
        for i in range(1000):
            universe = [str(j) for j in range(rng.randint(2, 7))]
            t = random_tree(rng, universe)
            fam = [random_subtree(rng, t) for _ in range(rng.randint(1, 5))]
            inter = tree_convex_family_intersection(t, fam)
            brute = set.intersection(*map(set, fam))
            assert inter == brute, i
            assert pairwise_nonempty(fam) == bool(inter), i

        assert set.intersection(*PARTIAL_ORDER_FAMILY) == set()
        assert pairwise_nonempty(PARTIAL_ORDER_FAMILY)
        assert sum(1 for _ in labeled_trees(list("abcdef"))) == 1296
        assert find_tree_for_family(PARTIAL_ORDER_FAMILY, list("abcdef")) is None


def test_criterion_05_small_set_lemma():
    with criterion(5, "small-set hypothesis forces non-empty intersection "
                      "on 1000 random families"):
        rng = random.Random(20240503)
        universe = [str(i) for i in range(8)]
        for i in range(1000):
            m = rng.randint(1, 3)
            count = rng.randint(m + 1, m + 4)
            small = set(rng.sample(universe, rng.randint(1, m)))
            fam = [small]
            for _ in range(count - 1):
                fam.append(set(rng.sample(universe,
                                          rng.randint(1, len(universe)))))
            rng.shuffle(fam)
            res = small_set_family_intersection(fam, m)
            brute = set.intersection(*fam)
            assert set(res.intersection) == brute, i
            if res.hypothesis_holds:
                assert brute, i


def _universal_pairs(dom):
    return set(itertools.product(dom, dom))


def _enforce_strong_3(net):
    for _ in range(50):
        changed = False
        for k in (2, 3):
            if k <= net.n and not is_k_consistent(net, k).holds:
                net = enforce_k_consistency(net, k)
                changed = True
        if not changed:
            return net
    raise AssertionError("strong-3 enforcement did not settle")


def test_criterion_06_tree_convexity_theorem():
    with criterion(6, "100 tree convex, strongly 3-consistent binary "
                      "networks are globally consistent"):
        rng = random.Random(20240504)
        accepted = 0
        attempts = 0
        while accepted < 100:
            attempts += 1
            assert attempts < 2000, f"only {accepted} instances accepted"
            usize = rng.choice((3, 3, 4))
            universe = tuple(str(i) for i in range(usize))
            nv = rng.choice((3, 4))
            variables = [Variable(f"v{i}", universe) for i in range(nv)]
            names = [v.name for v in variables]
            cons = []
            pairs = list(itertools.combinations(names, 2))
            rng.shuffle(pairs)
            for x, y in pairs[: rng.randint(1, 3)]:
                p = rng.uniform(0.55, 0.95)
                tuples = {t for t in _universal_pairs(universe)
                          if rng.random() < p}
                cons.append(Constraint(f"c{len(cons)}", (x, y),
                                       frozenset(tuples)))
            net = ConstraintNetwork(variables, cons)
            if not raw_solutions(net):
                continue
            net = _enforce_strong_3(net)
            if not is_strongly_k_consistent(net, 3).holds:
                continue
            r = max(c.arity for c in net.constraints)
            assert r <= 2
            searched = find_convexity_tree(net, "tree")
            if not searched.holds:
                continue
            accepted += 1
            assert is_globally_consistent(net).holds, attempts


def _matching_relation(rng, dom, pin):
    """Random partial matching over dom x dom containing `pin`."""
    perm = list(dom)
    rng.shuffle(perm)
    pairs = dict(zip(dom, perm))
    # force the pinned pair into the matching
    other = None
    for a, b in pairs.items():
        if b == pin[1]:
            other = a
            break
    pairs[other] = pairs[pin[0]]
    pairs[pin[0]] = pin[1]
    rel = {pin}
    for a, b in pairs.items():
        if rng.random() < 0.7:
            rel.add((a, b))
    return rel


def _weakly_tight_instance(rng):
    """A complete binary network on 4 variables with a planted solution,
    weakly 1-tight at level 3; returns None when the loosened variant
    misses weak tightness."""
    dom = tuple(str(i) for i in range(rng.choice((2, 3))))
    names = [f"v{i}" for i in range(4)]
    variables = [Variable(x, dom) for x in names]
    style = rng.random()
    cons = []
    if style < 0.4:
        # coherent permutation network: strongly consistent at all levels
        sigma = {x: list(dom) for x in names}
        for x in names:
            rng.shuffle(sigma[x])
        for x, y in itertools.combinations(names, 2):
            rel = {(sigma[x][t], sigma[y][t]) for t in range(len(dom))}
            cons.append(Constraint(f"c_{x}_{y}", (x, y), frozenset(rel)))
        return ConstraintNetwork(variables, cons)
    planted = {x: rng.choice(dom) for x in names}
    loosen = rng.random() < 0.5
    loose_pairs = set()
    if loosen:
        all_pairs = list(itertools.combinations(names, 2))
        rng.shuffle(all_pairs)
        loose_pairs = set(all_pairs[: rng.randint(1, 2)])
    for x, y in itertools.combinations(names, 2):
        pin = (planted[x], planted[y])
        if (x, y) in loose_pairs:
            rel = {t for t in _universal_pairs(dom) if rng.random() < 0.8}
            rel.add(pin)
        else:
            rel = _matching_relation(rng, dom, pin)
        cons.append(Constraint(f"c_{x}_{y}", (x, y), frozenset(rel)))
    net = ConstraintNetwork(variables, cons)
    if not is_weakly_m_tight(net, 1, 3).holds:
        return None
    return net


def test_criterion_07_weak_tightness_theorems():
    with criterion(7, "100 weakly 1-tight networks: strong-3 implies "
                      "global; relational enforcement yields global and "
                      "keeps weak tightness"):
        rng = random.Random(20240505)
        accepted = 0
        attempts = 0
        strong_cases = 0
        while accepted < 100:
            attempts += 1
            assert attempts < 1500, f"only {accepted} instances accepted"
            net = _weakly_tight_instance(rng)
            if net is None:
                continue
            accepted += 1
            level = 3  # (m+1)(r-1)+1 with m=1, r=2
            assert is_weakly_m_tight(net, 1, level).holds
            if is_strongly_k_consistent(net, level).holds:
                strong_cases += 1
                assert is_globally_consistent(net).holds, attempts
            enforced = enforce_relational_m_consistency(net, 2, strong=True)
            assert raw_solutions(enforced) == raw_solutions(net)
            assert is_weakly_m_tight(enforced, 1, level).holds, attempts
            assert is_globally_consistent(enforced).holds, attempts
        assert strong_cases >= 20, strong_cases


def test_criterion_08_ordered_search_theorems():
    with criterion(8, "200 network/ordering pairs: adaptive implies dual "
                      "implies backtrack-free; enforcement passes its own "
                      "check and preserves solutions"):
        rng = random.Random(20240506)
        from netgen import planted_network

        adaptive_hits = 0
        for i in range(200):
            net = planted_network(rng, max_vars=4, max_dom=3, max_cons=5)
            names = [v.name for v in net.variables]
            order = rng.sample(names, len(names))
            view = OrderedNetworkView(net, order)

            adaptive = is_adaptively_consistent(view).holds
            dual = is_dually_adaptively_consistent(view).holds
            if adaptive:
                adaptive_hits += 1
                assert dual, i
            if dual:
                trace = backtrack_free_solve(view)
                assert trace.solution is not None, i
                assert trace.backtracks == 0
                assert is_consistent_instantiation(net, trace.solution)

            sols = raw_solutions(net)
            adapted = enforce_adaptive_consistency(view)
            aview = OrderedNetworkView(adapted, order)
            assert is_adaptively_consistent(aview).holds, i
            assert is_dually_adaptively_consistent(aview).holds, i
            assert raw_solutions(adapted) == sols, i
            trace = backtrack_free_solve(aview)
            assert trace.solution is not None and trace.backtracks == 0, i
            assert is_consistent_instantiation(adapted, trace.solution)

            dualed = enforce_dually_adaptive(view)
            dview = OrderedNetworkView(dualed, order)
            assert is_dually_adaptively_consistent(dview).holds, i
            assert raw_solutions(dualed) == sols, i
            trace = backtrack_free_solve(dview)
            assert trace.solution is not None and trace.backtracks == 0, i

        assert adaptive_hits >= 5, adaptive_hits

        # implication chain also on unrestricted (possibly unsatisfiable)
        # networks
        for i in range(100):
            net = random_network(rng, max_vars=4, max_dom=3, max_cons=5)
            names = [v.name for v in net.variables]
            order = rng.sample(names, len(names))
            view = OrderedNetworkView(net, order)
            if is_adaptively_consistent(view).holds:
                assert is_dually_adaptively_consistent(view).holds, i
                trace = backtrack_free_solve(view)
                assert trace.solution is not None and trace.backtracks == 0, i


def test_criterion_09_accessibility_fixture():
    with criterion(9, "accessibility table: tree convex under the star at "
                      "b, row convex under none of the 24 orders"):
        net = accessibility()
        c = net.constraint("grants")
        assert is_tree_convex_constraint(net, c, "access", star_at_b()).holds
        for perm in itertools.permutations(("r", "w", "f", "b")):
            verdict = is_tree_convex_constraint(
                net, c, "access", total_order_tree(perm), kind="total-order")
            assert not verdict.holds, perm


def test_criterion_10_tightness_fixtures():
    with criterion(10, "tightness figures, relevant-constraint table, and "
                       "the minimum tight count formula"):
        net = leq_net()
        t = constraint_tightness(net, net.constraint("le"), "x")
        assert (t.m_tight, t.properly_m_tight) == (9, 10)

        table = complete5()
        rows = {
            ("1", "2", "3", "4"): ("5", {"125", "135", "145", "235", "245",
                                         "345", "15", "25", "35", "45"}),
            ("2", "3", "4", "5"): ("1", {"231", "241", "251", "341", "351",
                                         "451", "21", "31", "41", "51"}),
            ("3", "4", "5", "1"): ("2", {"132", "142", "152", "342", "352",
                                         "452", "12", "32", "42", "52"}),
            ("4", "5", "1", "2"): ("3", {"123", "143", "153", "243", "253",
                                         "453", "13", "23", "43", "53"}),
            ("5", "1", "2", "3"): ("4", {"124", "134", "154", "234", "254",
                                         "354", "14", "24", "34", "54"}),
        }
        for inside, (x, expected) in rows.items():
            rel = relevant_constraints(table, {f"v{i}" for i in inside},
                                       f"v{x}")
            got = {frozenset(c.scope) for c in rel}
            want = {frozenset(f"v{ch}" for ch in entry) for entry in expected}
            assert got == want, (inside, x)

        assert minimum_tight_count(5) == 7
        assert minimum_tight_count(6) == 11
        assert minimum_tight_count(7) == 17
