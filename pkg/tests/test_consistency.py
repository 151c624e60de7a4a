import itertools
import random

import pytest

from cspscan import (
    InputError,
    enforce_k_consistency,
    enforce_relational_m_consistency,
    format_network,
    is_globally_consistent,
    is_k_consistent,
    is_k_consistent_via_lifting,
    is_relationally_m_consistent,
    is_strongly_k_consistent,
    is_strongly_relationally_m_consistent,
    is_weakly_m_tight,
)
from nets import equality_net, mk_net, n1, n2
from netgen import planted_network, random_network, raw_solutions


def test_n2_strongly_path_consistent_but_not_4_consistent():
    net = n2()
    assert is_strongly_k_consistent(net, 3).holds
    verdict = is_k_consistent(net, 4)
    assert not verdict.holds
    assert verdict.witness.instantiation == {"x1": "1", "x2": "2", "x": "3"}
    assert verdict.witness.variable == "x3"
    assert not is_strongly_k_consistent(net, 4).holds


def test_k1_consistency_depends_on_unary_support():
    net = mk_net([("x", ["0", "1"])], [("ux", ("x",), [("1",)])])
    assert is_k_consistent(net, 1).holds
    empty = mk_net([("x", ["0", "1"])], [("ux", ("x",), [])])
    assert not is_k_consistent(empty, 1).holds


def test_k_range_validation():
    net = n2()
    for bad in (0, 5):
        with pytest.raises(InputError):
            is_k_consistent(net, bad)
        with pytest.raises(InputError):
            is_k_consistent_via_lifting(net, bad)


def test_lifting_worked_example_joint_extension():
    from cspscan import extension_set

    net = n1()
    a = {"x1": "a", "x2": "b", "x4": "a"}
    joint = (
        extension_set(net, net.constraint("cS1"), a, "x3")
        & extension_set(net, net.constraint("cS2"), a, "x3")
        & extension_set(net, net.constraint("cS3"), a, "x3")
    )
    assert joint == {"d"}


def test_lifting_checker_agrees_on_fixture_networks():
    for net in (n1(), n2(), equality_net()):
        for k in range(1, net.n + 1):
            a = is_k_consistent(net, k)
            b = is_k_consistent_via_lifting(net, k)
            assert a.holds == b.holds
            if not a.holds:
                assert a.witness.instantiation == b.witness.instantiation
                assert a.witness.variable == b.witness.variable


def test_lifting_equivalence_on_random_networks():
    rng = random.Random(71)
    for _ in range(150):
        net = random_network(rng)
        for k in range(1, net.n + 1):
            a = is_k_consistent(net, k)
            b = is_k_consistent_via_lifting(net, k)
            assert a.holds == b.holds


def test_network_without_constraints_is_consistent_at_every_level():
    net = mk_net([("x", ["0", "1"]), ("y", ["0"])], [])
    for k in (1, 2):
        assert is_k_consistent(net, k).holds
        assert is_k_consistent_via_lifting(net, k).holds
    assert is_globally_consistent(net).holds


def test_globally_consistent_single_variable():
    net = mk_net([("x", ["0", "1"])], [])
    assert is_globally_consistent(net).holds


def test_n2_not_globally_consistent():
    assert not is_globally_consistent(n2()).holds


def test_relational_consistency_examples():
    net = n2()
    assert is_relationally_m_consistent(net, 1).holds

    empty = mk_net([("x", ["0", "1"]), ("y", ["0", "1"])],
                   [("c", ("x", "y"), [])])
    assert not is_relationally_m_consistent(empty, 1).holds

    # the pair {cS1, cS3} agrees on x3 for the single consistent
    # instantiation of {x1, x2}
    from cspscan import enumerate_instantiations, extension_set

    net1 = n1()
    pair = (net1.constraint("cS1"), net1.constraint("cS3"))
    insts = list(
        enumerate_instantiations(net1, {"x1", "x2"}, only_consistent=True)
    )
    assert insts == [{"x1": "a", "x2": "b"}]
    joint = set.intersection(
        *(extension_set(net1, c, insts[0], "x3") for c in pair)
    )
    assert joint == {"d"}

    eq = equality_net(3)
    assert is_strongly_relationally_m_consistent(eq, 2).holds


def test_relational_m_range_validation():
    net = n2()
    with pytest.raises(InputError):
        is_relationally_m_consistent(net, 0)
    with pytest.raises(InputError):
        is_relationally_m_consistent(net, len(net.constraints) + 1)


def test_relational_subsets_without_shared_variable_are_skipped():
    dom = ("0", "1")
    net = mk_net(
        [("a", dom), ("b", dom), ("c", dom), ("d", dom)],
        [("ab", ("a", "b"), [("0", "0")]), ("cd", ("c", "d"), [("0", "0")])],
    )
    assert is_relationally_m_consistent(net, 2).holds


def test_enforce_k_on_n2_removes_stranded_triple():
    net = n2()
    out = enforce_k_consistency(net, 4)
    assert is_k_consistent(out, 4).holds
    tern = out.constraint_on(("x1", "x2", "x"))
    assert tern is not None
    reorder = [tern.scope.index(v) for v in ("x1", "x2", "x")]
    assert len(reorder) == 3
    packed = tuple(
        {"x1": "1", "x2": "2", "x": "3"}[v] for v in tern.scope
    )
    assert packed not in tern.tuples
    assert raw_solutions(out) == raw_solutions(net)


def test_enforce_k_is_identity_on_consistent_network():
    net = equality_net(3)
    for k in (2, 3):
        out = enforce_k_consistency(net, k)
        assert format_network(out) == format_network(net)


def test_enforce_k_preserves_solutions_on_random_networks():
    rng = random.Random(73)
    for _ in range(40):
        net = random_network(rng, max_vars=4, max_dom=3, max_cons=4)
        if net.n < 2:
            continue
        k = rng.randint(2, net.n)
        out = enforce_k_consistency(net, k)
        assert is_k_consistent(out, k).holds
        assert raw_solutions(out) == raw_solutions(net)
        # monotone: surviving scopes only lost tuples
        before = {c.scope_set: c for c in net.constraints}
        for c in out.constraints:
            if c.scope_set in before:
                assert c.tuples <= before[c.scope_set].tuples


def test_enforce_relational_fixpoint_and_preservation():
    rng = random.Random(79)
    for _ in range(30):
        net = planted_network(rng, max_vars=4, max_dom=3, max_cons=5)
        m = rng.randint(1, min(2, len(net.constraints)))
        strong = rng.random() < 0.5
        out = enforce_relational_m_consistency(net, m, strong=strong)
        assert raw_solutions(out) == raw_solutions(net)
        if strong:
            assert is_strongly_relationally_m_consistent(
                out, min(m, len(out.constraints))).holds
        else:
            assert is_relationally_m_consistent(
                out, min(m, len(out.constraints))).holds


def test_enforce_relational_identity_when_already_consistent():
    net = equality_net(3)
    out = enforce_relational_m_consistency(net, 2, strong=True)
    assert format_network(out) == format_network(net)


def test_enforcement_preserves_weak_tightness():
    rng = random.Random(83)
    checked = 0
    for _ in range(40):
        net = planted_network(rng, max_vars=4, max_dom=3, max_cons=6)
        if net.n < 3 or not net.constraints:
            continue
        verdict = is_weakly_m_tight(net, 1, net.n - 1)
        if not verdict.holds:
            continue
        out = enforce_relational_m_consistency(
            net, min(2, len(net.constraints)), strong=True)
        assert is_weakly_m_tight(out, 1, net.n - 1).holds
        checked += 1
    assert checked >= 5
