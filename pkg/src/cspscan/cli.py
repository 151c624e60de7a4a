"""Command-line front end.

Exit codes: 0 when the checked property holds (or the command simply
succeeded), 1 when the property fails (a machine-parseable WITNESS
line is printed), 2 on usage, parse, or capability errors.  All output
is deterministic.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import engine, netfile
from .consistency import (
    ConsistencyVerdict,
    Witness,
    enforce_k_consistency,
    enforce_relational_m_consistency,
    is_globally_consistent,
    is_k_consistent,
    is_relationally_m_consistent,
    is_strongly_k_consistent,
    is_strongly_relationally_m_consistent,
)
from .convexity import ConvexityVerdict, find_convexity_tree, is_tree_convex_network
from .errors import CapabilityError, CspscanError, NetworkFormatError
from .figures import render_constraint_graph, render_value_tree
from .model import ConstraintNetwork, solutions
from .ordered import (
    OrderedNetworkView,
    backtrack_free_solve,
    backtracking_solve,
    enforce_adaptive_consistency,
    enforce_dually_adaptive,
)
from .tightness import is_weakly_m_tight, minimum_tight_count, tightness_report


def _ordered_items(net: ConstraintNetwork, a: dict[str, str]):
    names = net.sort_by_declaration(a.keys())
    return names, [a[x] for x in names]


def _witness_line(net: ConstraintNetwork, w: Witness) -> str:
    parts = []
    if w.instantiation is not None:
        names, values = _ordered_items(net, w.instantiation)
        parts.append("vars=" + ",".join(names))
        parts.append("values=" + ",".join(values))
    if w.variable is not None:
        parts.append("new=" + w.variable)
    if w.constraints is not None:
        parts.append("constraints=" + ",".join(w.constraints))
    if w.level is not None:
        parts.append("level=" + str(w.level))
    return "WITNESS " + " ".join(parts)


def _emit_verdict(net: ConstraintNetwork, label: str, v: ConsistencyVerdict) -> int:
    print(f"RESULT {label} holds={'yes' if v.holds else 'no'}")
    if v.holds:
        return 0
    if v.witness is not None:
        print(_witness_line(net, v.witness))
    return 1


def _load(path: str) -> ConstraintNetwork:
    return netfile.parse_file(path)


# -- command handlers ----------------------------------------------------


def _cmd_print(args) -> int:
    net = _load(args.file)
    sys.stdout.write(netfile.format_network(net))
    return 0


def _cmd_check_k(args) -> int:
    net = _load(args.file)
    if args.strong:
        verdict = is_strongly_k_consistent(net, args.k)
        return _emit_verdict(net, f"strong-k-consistency k={args.k}", verdict)
    verdict = is_k_consistent(net, args.k)
    return _emit_verdict(net, f"k-consistency k={args.k}", verdict)


def _cmd_check_relational(args) -> int:
    net = _load(args.file)
    if args.strong:
        verdict = is_strongly_relationally_m_consistent(net, args.m)
        return _emit_verdict(
            net, f"strong-relational-consistency m={args.m}", verdict
        )
    verdict = is_relationally_m_consistent(net, args.m)
    return _emit_verdict(net, f"relational-consistency m={args.m}", verdict)


def _cmd_check_global(args) -> int:
    net = _load(args.file)
    verdict = is_globally_consistent(net)
    return _emit_verdict(net, f"global-consistency n={net.n}", verdict)


def _cmd_tightness(args) -> int:
    net = _load(args.file)
    report = tightness_report(net)
    print("constraint\tvariable\tdomain_size\tm_tight\tproperly_m_tight")
    for (cname, var), t in report.entries.items():
        print(f"{cname}\t{var}\t{t.domain_size}\t{t.m_tight}\t{t.properly_m_tight}")
    return 0


def _cmd_weak_tightness(args) -> int:
    net = _load(args.file)
    verdict = is_weakly_m_tight(net, args.m, args.level)
    print(
        f"RESULT weak-tightness m={args.m} level={args.level} "
        f"holds={'yes' if verdict.holds else 'no'}"
    )
    for subset, x in verdict.unconstrained:
        print(f"NOTE unconstrained vars={','.join(subset)} new={x}")
    if verdict.holds:
        return 0
    subset, x = verdict.counterexample
    print(f"WITNESS vars={','.join(subset)} new={x}")
    return 1


def _convexity_exit(net: ConstraintNetwork, verdict: ConvexityVerdict, label: str) -> int:
    print(f"RESULT {label} source={verdict.source} holds={'yes' if verdict.holds else 'no'}")
    if verdict.holds:
        if verdict.tree is not None:
            if verdict.kind == "total-order":
                print("VALUE-ORDER " + " ".join(verdict.tree.universe))
            else:
                edges = " ".join(f"{p}:{c}" for p, c in verdict.tree.edges())
                print(("TREE root=" + verdict.tree.root + " " + edges).rstrip())
        return 0
    bad = verdict.counterexample
    if bad is not None:
        names, values = _ordered_items(net, bad.instantiation)
        print(
            f"WITNESS constraint={bad.constraint} variable={bad.variable} "
            f"vars={','.join(names)} values={','.join(values)} "
            f"extension={','.join(bad.extension)}"
        )
    return 1


def _cmd_tree_convex(args) -> int:
    net = _load(args.file)
    if not args.search and net.tree is not None:
        return _convexity_exit(net, is_tree_convex_network(net, net.tree), "tree-convexity")
    return _convexity_exit(net, find_convexity_tree(net, "tree"), "tree-convexity")


def _cmd_row_convex(args) -> int:
    net = _load(args.file)
    return _convexity_exit(net, find_convexity_tree(net, "total-order"), "row-convexity")


def _write_enforced(args, before: ConstraintNetwork, after: ConstraintNetwork, label: str) -> int:
    before_scopes = {c.scope_set: c for c in before.constraints}
    added = sum(1 for c in after.constraints if c.scope_set not in before_scopes)
    removed = sum(
        len(before_scopes[c.scope_set].tuples) - len(c.tuples)
        for c in after.constraints
        if c.scope_set in before_scopes
    )
    print(f"RESULT {label} added={added} removed-tuples={removed}")
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(netfile.format_network(after))
    print(f"WROTE {args.out}")
    return 0


def _cmd_enforce_k(args) -> int:
    net = _load(args.file)
    return _write_enforced(
        args, net, enforce_k_consistency(net, args.k), f"enforce-k k={args.k}"
    )


def _cmd_enforce_relational(args) -> int:
    net = _load(args.file)
    after = enforce_relational_m_consistency(net, args.m, strong=args.strong)
    strong = "yes" if args.strong else "no"
    return _write_enforced(
        args, net, after, f"enforce-relational m={args.m} strong={strong}"
    )


def _cmd_enforce_adaptive(args) -> int:
    net = _load(args.file)
    after = enforce_adaptive_consistency(OrderedNetworkView(net))
    return _write_enforced(args, net, after, "enforce-adaptive")


def _cmd_enforce_dual(args) -> int:
    net = _load(args.file)
    after = enforce_dually_adaptive(OrderedNetworkView(net))
    return _write_enforced(args, net, after, "enforce-dual")


def _cmd_solve(args) -> int:
    net = _load(args.file)
    if args.count:
        count = sum(1 for _ in solutions(net))
        print(f"COUNT {count}")
        return 0 if count else 1
    if args.backtrack_free:
        trace = backtrack_free_solve(OrderedNetworkView(net))
    else:
        trace = backtracking_solve(net)
    if trace.solution is not None:
        names, values = _ordered_items(net, trace.solution)
        print("SOLUTION " + " ".join(f"{x}={v}" for x, v in zip(names, values)))
        print(f"STATS backtracks={trace.backtracks} nodes={trace.nodes_visited}")
        return 0
    print("NO-SOLUTION")
    print(f"STATS backtracks={trace.backtracks} nodes={trace.nodes_visited}")
    if trace.stuck_variable is not None:
        names, values = _ordered_items(net, trace.prefix or {})
        print(
            f"WITNESS stuck={trace.stuck_variable} "
            f"vars={','.join(names)} values={','.join(values)}"
        )
    else:
        print("WITNESS exhausted=yes")
    return 1


def _cmd_analyze(args) -> int:
    net = _load(args.file)
    report = engine.analyze(net, m_values=args.m or None)
    print(
        f"ANALYZE variables={report.variables} constraints={report.constraints} "
        f"max-arity={report.max_arity} m={','.join(map(str, report.m_values))}"
    )
    for (cname, var), t in report.tightness.entries.items():
        print(
            f"TIGHTNESS constraint={cname} variable={var} domain={t.domain_size} "
            f"m-tight={t.m_tight} properly-m-tight={t.properly_m_tight}"
        )
    for v in report.convexity:
        print(
            f"CONVEXITY kind={v.kind} source={v.source} "
            f"holds={'yes' if v.holds else 'no'}"
        )
    for w in report.weak_tightness:
        line = (
            f"WEAK-TIGHTNESS m={w.m} level={w.level} "
            f"holds={'yes' if w.holds else 'no'}"
        )
        if w.counterexample is not None:
            subset, x = w.counterexample
            line += f" witness-vars={','.join(subset)} witness-new={x}"
        print(line)
    for note in report.notes:
        print(f"NOTE {note}")
    for line in report.guarantees:
        pre = "; ".join(f"{p.name}={p.status}" for p in line.preconditions)
        text = (
            f"GUARANTEE theorem={line.theorem}"
            + (f" m={line.m}" if line.m is not None else "")
            + f" fires={'yes' if line.fires else 'no'}"
            + f" conclusion={line.conclusion.replace(' ', '-')}"
            + (f" oracle={line.oracle}" if line.oracle else "")
            + f' pre="{pre}"'
        )
        print(text)
    if report.oracle_global is not None:
        print(f"ORACLE global-consistency={'yes' if report.oracle_global else 'no'}")
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        m = report.m_values[0]
        graph = os.path.join(args.figures, "constraint-graph.png")
        render_constraint_graph(net, m, graph)
        print(f"FIGURE {graph}")
        tree = net.tree
        if tree is None:
            for v in report.convexity:
                if v.holds and v.tree is not None:
                    tree = v.tree
                    break
        if tree is not None:
            tree_path = os.path.join(args.figures, "value-tree.png")
            render_value_tree(tree, tree_path)
            print(f"FIGURE {tree_path}")
    return 0


def _cmd_min_tight_count(args) -> int:
    print(minimum_tight_count(args.n))
    return 0


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspscan",
        description="Analyze finite constraint networks: consistency levels, "
        "tightness, convexity, and backtrack-free search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("print", help="parse and re-emit the canonical file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_print)

    check = sub.add_parser("check", help="consistency checks")
    check_sub = check.add_subparsers(dest="check_kind", required=True)
    p = check_sub.add_parser("k", help="k-consistency")
    p.add_argument("k", type=int)
    p.add_argument("file")
    p.add_argument("--strong", action="store_true")
    p.set_defaults(func=_cmd_check_k)
    p = check_sub.add_parser("relational", help="relational m-consistency")
    p.add_argument("m", type=int)
    p.add_argument("file")
    p.add_argument("--strong", action="store_true")
    p.set_defaults(func=_cmd_check_relational)
    p = check_sub.add_parser("global", help="global consistency (brute force)")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check_global)

    p = sub.add_parser("tightness", help="per-constraint tightness table")
    p.add_argument("file")
    p.set_defaults(func=_cmd_tightness)

    p = sub.add_parser("weak-tightness", help="weak m-tightness at a level")
    p.add_argument("file")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=_cmd_weak_tightness)

    p = sub.add_parser("tree-convex", help="tree convexity of the network")
    p.add_argument("file")
    p.add_argument("--search", action="store_true",
                   help="search for a witness tree even when one is declared")
    p.set_defaults(func=_cmd_tree_convex)

    p = sub.add_parser("row-convex", help="row convexity of the network")
    p.add_argument("file")
    p.add_argument("--search", action="store_true")
    p.set_defaults(func=_cmd_row_convex)

    enforce = sub.add_parser("enforce", help="solution-preserving enforcement")
    enforce_sub = enforce.add_subparsers(dest="enforce_kind", required=True)
    p = enforce_sub.add_parser("k", help="enforce k-consistency")
    p.add_argument("k", type=int)
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_enforce_k)
    p = enforce_sub.add_parser("relational", help="enforce relational m-consistency")
    p.add_argument("m", type=int)
    p.add_argument("file")
    p.add_argument("--strong", action="store_true")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_enforce_relational)
    p = enforce_sub.add_parser("adaptive", help="enforce adaptive consistency")
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_enforce_adaptive)
    p = enforce_sub.add_parser("dual", help="enforce dually adaptive consistency")
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_enforce_dual)

    p = sub.add_parser("solve", help="find a solution")
    p.add_argument("file")
    p.add_argument("--backtrack-free", action="store_true")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("analyze", help="run every guarantee check")
    p.add_argument("file")
    p.add_argument("--m", type=int, action="append")
    p.add_argument("--figures", metavar="DIR",
                   help="also render constraint-graph and value-tree figures")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("min-tight-count",
                       help="minimum count of tight constraints for weak tightness")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_min_tight_count)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except NetworkFormatError as exc:
        print(f"ERROR line {exc.line}: {exc.args[0]}", file=sys.stderr)
        return 2
    except CapabilityError as exc:
        print(f"ERROR capability: {exc}", file=sys.stderr)
        return 2
    except CspscanError as exc:
        print(f"ERROR input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ERROR io: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
