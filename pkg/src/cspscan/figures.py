"""Matplotlib renderings that accompany the text reports.

Two figures: the constraint graph (thin edges for properly m-tight
binary constraints, thick for the rest, square markers for higher
arity) and the value tree.  Layouts are deterministic: variables sit
on a circle in declaration order, tree nodes are positioned by a
leaf-counting walk.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import ConstraintNetwork
from .tightness import is_properly_m_tight
from .valuetree import ValueTree


def render_constraint_graph(net: ConstraintNetwork, m: int, path: str) -> str:
    names = [v.name for v in net.variables]
    n = len(names)
    pos = {}
    for i, name in enumerate(names):
        angle = 2 * math.pi * i / n - math.pi / 2
        pos[name] = (math.cos(angle), math.sin(angle))

    fig, ax = plt.subplots(figsize=(5, 5))
    for c in net.constraints:
        tight = is_properly_m_tight(net, c, m)
        width_pt = 1.0 if tight else 3.5
        color = "#444444" if tight else "#111111"
        if c.arity == 1:
            x, y = pos[c.scope[0]]
            ax.scatter([x], [y], s=320, facecolors="none", edgecolors=color,
                       linewidths=width_pt, zorder=1)
            continue
        if c.arity == 2:
            (x1, y1), (x2, y2) = pos[c.scope[0]], pos[c.scope[1]]
            ax.plot([x1, x2], [y1, y2], color=color, linewidth=width_pt, zorder=1)
            continue
        # Higher arity: a square hub joined to every member.
        cx = sum(pos[v][0] for v in c.scope) / c.arity
        cy = sum(pos[v][1] for v in c.scope) / c.arity
        for v in c.scope:
            ax.plot([cx, pos[v][0]], [cy, pos[v][1]], color=color,
                    linewidth=width_pt, linestyle=":", zorder=1)
        ax.scatter([cx], [cy], marker="s", s=60, color=color, zorder=2)
    for name, (x, y) in pos.items():
        ax.scatter([x], [y], s=600, color="#dce6f2", edgecolors="#2f2f2f", zorder=3)
        ax.text(x, y, name, ha="center", va="center", fontsize=9, zorder=4)
    ax.set_title(f"constraint graph (thin = properly {m}-tight)")
    ax.set_aspect("equal")
    ax.axis("off")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _layout(tree: ValueTree) -> dict[str, tuple[float, float]]:
    pos: dict[str, tuple[float, float]] = {}
    next_x = [0.0]

    def place(v: str, depth: int) -> float:
        kids = tree.children(v)
        if not kids:
            x = next_x[0]
            next_x[0] += 1.0
        else:
            xs = [place(k, depth + 1) for k in kids]
            x = sum(xs) / len(xs)
        pos[v] = (x, -float(depth))
        return x

    place(tree.root, 0)
    return pos


def render_value_tree(tree: ValueTree, path: str) -> str:
    pos = _layout(tree)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for parent, child in tree.edges():
        (x1, y1), (x2, y2) = pos[parent], pos[child]
        ax.plot([x1, x2], [y1, y2], color="#555555", linewidth=1.2, zorder=1)
    for v, (x, y) in pos.items():
        ax.scatter([x], [y], s=500, color="#e8f0dc", edgecolors="#2f2f2f", zorder=2)
        ax.text(x, y, v, ha="center", va="center", fontsize=9, zorder=3)
    ax.set_title(f"value tree (root {tree.root})")
    ax.axis("off")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
