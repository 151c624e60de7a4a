"""Theorem engine: check every global-consistency guarantee on a network.

The engine only checks preconditions; it never enforces anything.
Each guarantee line records its machine-checked preconditions and may
claim a conclusion only when all of them verified true.  Whenever a
line fires, its conclusion is cross-validated against the brute-force
oracle and a disagreement raises SoundnessError (such a disagreement
means a bug, not a property of the input).

Guarantees evaluated, in fixed order:

* tree-convexity-k: tree convex and strongly (2(r-1)+1)-consistent
  implies globally consistent.
* weak-tightness-k (per m): weakly m-tight at level (m+1)(r-1)+1 and
  strongly consistent at that level implies globally consistent.
* weak-tightness-relational (per m): weakly m-tight at that level and
  strongly relationally (m+1)-consistent implies globally consistent.
  This also covers the enforcement route: enforcing strong relational
  (m+1)-consistency first (see the CLI) preserves weak tightness, so
  the enforced network fires this line.
* tree-convexity-relational: tree convex and strongly relationally
  path consistent (level 2) implies globally consistent.
* dually-adaptive: dually adaptively consistent under the attached
  ordering guarantees a backtrack-free search (its own oracle is the
  backtrack-free solver, since this conclusion is about search, not
  global consistency).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .consistency import (
    is_globally_consistent,
    is_relationally_m_consistent,
    is_strongly_k_consistent,
)
from .convexity import ConvexityVerdict, find_convexity_tree, is_tree_convex_network
from .errors import CapabilityError
from .model import ConstraintNetwork, is_consistent_instantiation
from .ordered import (
    OrderedNetworkView,
    backtrack_free_solve,
    is_dually_adaptively_consistent,
)
from .tightness import TightnessReport, WeakTightnessVerdict, is_weakly_m_tight, tightness_report
from .valuetree import ValueTree
from .errors import SoundnessError


@dataclass
class Precondition:
    name: str
    status: str  # "yes", "no", or "skip: <reason>"


@dataclass
class GuaranteeLine:
    theorem: str
    m: int | None
    preconditions: tuple[Precondition, ...]
    fires: bool
    conclusion: str  # "globally consistent" | "backtrack-free search" | "not established"
    oracle: str | None = None  # "agrees" once cross-validated


@dataclass
class AnalysisReport:
    variables: int
    constraints: int
    max_arity: int
    m_values: tuple[int, ...]
    tightness: TightnessReport
    convexity: tuple[ConvexityVerdict, ...]
    weak_tightness: tuple[WeakTightnessVerdict, ...]
    guarantees: tuple[GuaranteeLine, ...]
    oracle_global: bool | None = None
    notes: tuple[str, ...] = ()


def _strongly_relationally(net: ConstraintNetwork, m: int) -> bool:
    """Strong relational m-consistency, treating levels above the
    number of constraints as vacuously satisfied."""
    top = min(m, len(net.constraints))
    for j in range(1, top + 1):
        if not is_relationally_m_consistent(net, j).holds:
            return False
    return True


def default_m_values(net: ConstraintNetwork, report: TightnessReport) -> tuple[int, ...]:
    """Largest per-pair proper tightness minimum, capped at the largest
    domain size; the m making every constraint properly m-tight."""
    cap = max(len(v.domain) for v in net.variables)
    if not report.entries:
        return (1,)
    return (max(1, min(report.network_properly_m_tight(), cap)),)


def analyze(
    net: ConstraintNetwork,
    m_values: Sequence[int] | None = None,
    tree: ValueTree | None = None,
    ordering: Sequence[str] | None = None,
) -> AnalysisReport:
    notes: list[str] = []
    report = tightness_report(net)
    r = max((c.arity for c in net.constraints), default=1)
    if m_values is None:
        m_values = default_m_values(net, report)
    m_values = tuple(m_values)

    # Tree convexity: verify a declared tree first, search as fallback.
    convexity: list[ConvexityVerdict] = []
    tree = tree if tree is not None else net.tree
    tree_convex: bool | None = None  # None = could not be decided
    if tree is not None:
        verdict = is_tree_convex_network(net, tree)
        convexity.append(verdict)
        if verdict.holds:
            tree_convex = True
    if tree_convex is None:
        try:
            searched = find_convexity_tree(net, "tree")
            convexity.append(searched)
            tree_convex = searched.holds
        except CapabilityError as exc:
            notes.append(f"tree search unavailable: {exc}")

    # Weak tightness verdicts at the level each theorem consumes.
    weak: dict[int, tuple[WeakTightnessVerdict | None, bool]] = {}
    for m in m_values:
        level = (m + 1) * (r - 1) + 1
        if level >= net.n:
            # No variable set of that size has a new variable left over.
            weak[m] = (None, True)
            notes.append(
                f"weak tightness at level {level} is vacuous (n={net.n})"
            )
        else:
            verdict = is_weakly_m_tight(net, m, level)
            weak[m] = (verdict, verdict.holds)

    lines: list[GuaranteeLine] = []
    needs_global_oracle = False

    def status(flag: bool | None, skip_reason: str | None = None) -> str:
        if flag is None:
            return f"skip: {skip_reason}"
        return "yes" if flag else "no"

    # tree-convexity-k
    level_tc = 2 * (r - 1) + 1
    strong_tc = is_strongly_k_consistent(net, min(level_tc, net.n)).holds
    fires = bool(tree_convex) and strong_tc
    lines.append(
        GuaranteeLine(
            "tree-convexity-k",
            None,
            (
                Precondition("tree convex", status(tree_convex, "universe too large")),
                Precondition(f"strongly {level_tc}-consistent", status(strong_tc)),
            ),
            fires,
            "globally consistent" if fires else "not established",
        )
    )

    # weak-tightness-k and weak-tightness-relational, per requested m
    for m in m_values:
        verdict, wt_holds = weak[m]
        level = (m + 1) * (r - 1) + 1
        strong_here = is_strongly_k_consistent(net, min(level, net.n)).holds
        fires = wt_holds and strong_here
        lines.append(
            GuaranteeLine(
                "weak-tightness-k",
                m,
                (
                    Precondition(f"weakly {m}-tight at level {level}", status(wt_holds)),
                    Precondition(f"strongly {level}-consistent", status(strong_here)),
                ),
                fires,
                "globally consistent" if fires else "not established",
            )
        )
        rel_holds = _strongly_relationally(net, m + 1)
        fires_rel = wt_holds and rel_holds
        lines.append(
            GuaranteeLine(
                "weak-tightness-relational",
                m,
                (
                    Precondition(f"weakly {m}-tight at level {level}", status(wt_holds)),
                    Precondition(
                        f"strongly relationally {m + 1}-consistent",
                        status(rel_holds),
                    ),
                ),
                fires_rel,
                "globally consistent" if fires_rel else "not established",
            )
        )

    # tree-convexity-relational
    rel2 = _strongly_relationally(net, 2)
    fires = bool(tree_convex) and rel2
    lines.append(
        GuaranteeLine(
            "tree-convexity-relational",
            None,
            (
                Precondition("tree convex", status(tree_convex, "universe too large")),
                Precondition("strongly relationally path consistent", status(rel2)),
            ),
            fires,
            "globally consistent" if fires else "not established",
        )
    )

    needs_global_oracle = any(
        line.fires and line.conclusion == "globally consistent" for line in lines
    )

    # dually-adaptive: a search guarantee, validated by the solver itself
    ordering = ordering if ordering is not None else net.ordering
    if ordering is None:
        lines.append(
            GuaranteeLine(
                "dually-adaptive",
                None,
                (Precondition("ordering attached", "skip: no ordering"),),
                False,
                "not established",
            )
        )
    else:
        view = OrderedNetworkView(net, ordering)
        dual = is_dually_adaptively_consistent(view)
        line = GuaranteeLine(
            "dually-adaptive",
            None,
            (Precondition("dually adaptively consistent", status(dual.holds)),),
            dual.holds,
            "backtrack-free search" if dual.holds else "not established",
        )
        if dual.holds:
            trace = backtrack_free_solve(view)
            ok = (
                trace.solution is not None
                and trace.backtracks == 0
                and is_consistent_instantiation(net, trace.solution)
            )
            if not ok:
                raise SoundnessError(
                    "dually-adaptive fired but backtrack-free search failed"
                )
            line.oracle = "agrees"
        lines.append(line)

    oracle_global = None
    if needs_global_oracle:
        oracle_global = is_globally_consistent(net).holds
        for line in lines:
            if line.fires and line.conclusion == "globally consistent":
                if not oracle_global:
                    raise SoundnessError(
                        f"guarantee {line.theorem} fired but the network is "
                        "not globally consistent"
                    )
                line.oracle = "agrees"

    return AnalysisReport(
        variables=net.n,
        constraints=len(net.constraints),
        max_arity=r,
        m_values=m_values,
        tightness=report,
        convexity=tuple(convexity),
        weak_tightness=tuple(v for v, _ in weak.values() if v is not None),
        guarantees=tuple(lines),
        oracle_global=oracle_global,
        notes=tuple(notes),
    )
