"""DOT emitters and matplotlib figures.

DOT output is for visual diffing only; node placement is left to Graphviz
apart from per-wheel clusters.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence

from .hypergraph import Hypergraph
from .picture import Picture
from .wagonwheel import WagonWheel

__all__ = ["hypergraph_dot", "wagonwheel_dot", "picture_dot", "wheel_positions",
           "plot_wheels", "plot_stage_sizes"]


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _edge_lines(H: Hypergraph, e: str, indent: str = "  ") -> list[str]:
    ends = [v for v, m in H.vertices_of(e).items() for _ in range(m)]
    if len(ends) == 2:
        return [f"{indent}{_q(ends[0])} -- {_q(ends[1])} [label={_q(e)}];"]
    hub = _q("edge:" + e)
    lines = [f"{indent}{hub} [shape=point, xlabel={_q(e)}];"]
    lines += [f"{indent}{hub} -- {_q(v)};" for v in ends]
    return lines


def hypergraph_dot(H: Hypergraph, b: Mapping[str, int] | None = None, name: str = "H") -> str:
    """Size-2 edges become plain edges; other edges get a point node."""
    b = b or {}
    lines = [f"graph {_q(name)} {{", "  node [shape=circle, fontsize=10];"]
    for v in H.vertices:
        style = ", style=filled, fillcolor=gray80" if b.get(v) else ""
        lines.append(f"  {_q(v)} [label={_q(v)}{style}];")
    for e in H.edges:
        lines += _edge_lines(H, e)
    lines.append("}")
    return "\n".join(lines) + "\n"


def wagonwheel_dot(W: WagonWheel, b: Mapping[str, int] | None = None) -> str:
    """One cluster per wheel with its three rings; generator edges outside."""
    b = b or {}
    H = W.hypergraph
    lines = ['graph "wagonwheel" {', "  node [shape=circle, fontsize=8];"]
    rim = set()
    for i in range(W.m):
        lines.append(f"  subgraph {_q('cluster_' + str(i))} {{")
        lines.append(f"    label={_q(W.source.relations[i].text())};")
        for v in W.wheel_vertices(i):
            attrs = " [style=filled, fillcolor=gray80]" if b.get(v) else ""
            lines.append(f"    {_q(v)}{attrs};")
        for e in W.wheel_edges(i):
            rim.add(e)
            lines += _edge_lines(H, e, "    ")
        lines.append("  }")
    for e in H.edges:
        if e not in rim:
            lines += _edge_lines(H, e)
    lines.append("}")
    return "\n".join(lines) + "\n"


def picture_dot(P: Picture, name: str = "P") -> str:
    """Picture vertices, a boundary node when open, free loops as ovals."""
    owner = {d: v.id for v in P.vertices for d in v.rot}
    lines = [f"graph {_q(name)} {{", "  node [shape=circle, fontsize=10];"]
    if not P.closed:
        lines.append('  "@boundary" [shape=doublecircle, label="bd"];')
    for v in P.vertices:
        lines.append(f"  {_q('pv:' + v.id)} [label={_q(v.label or v.id)}];")
    for e in P.edges:
        a, c = (_q("pv:" + owner[d]) if d in owner else '"@boundary"' for d in e.darts)
        lines.append(f"  {a} -- {c} [label={_q(e.label)}];")
    for l in P.free_loops:
        lines.append(f"  {_q('loop:' + l.id)} [shape=ellipse, style=dashed, label={_q(l.label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def wheel_positions(W: WagonWheel, i: int) -> dict[str, tuple[float, float]]:
    """Layer ``k`` of wheel ``i`` on a circle of radius ``4 - k``; position ``j`` by angle."""
    n = W.n(i)
    out = {}
    for j in range(n):
        for k in (1, 2, 3):
            angle = 2 * math.pi * (j + (0.5 if k == 2 else 0.0)) / n
            r = 4.0 - k
            out[W.v(i, j, k)] = (r * math.cos(angle), r * math.sin(angle))
    return out


def plot_wheels(W: WagonWheel, b: Mapping[str, int], path: Path, limit: int = 12) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    shown = list(range(min(W.m, limit)))
    cols = min(4, len(shown)) or 1
    rows = max(1, math.ceil(len(shown) / cols))
    fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 3 * rows), squeeze=False)
    H = W.hypergraph
    for ax in axes.flat:
        ax.set_axis_off()
    for i, ax in zip(shown, axes.flat):
        pos = wheel_positions(W, i)
        for e in W.wheel_edges(i):
            ends = [v for v, m in H.vertices_of(e).items() for _ in range(m)]
            (x0, y0), (x1, y1) = pos[ends[0]], pos[ends[-1]]
            ax.plot([x0, x1], [y0, y1], color="0.6", linewidth=0.8, zorder=1)
        for j in range(W.n(i)):
            x, y = pos[W.v(i, j, 1)]
            ax.plot([x, 1.3 * x], [y, 1.3 * y], color="tab:blue", linewidth=1.2, zorder=1)
            ax.text(1.45 * x, 1.45 * y, W.letter(i, j), ha="center", va="center", fontsize=7)
        xs, ys, colours = [], [], []
        for v, (x, y) in pos.items():
            xs.append(x)
            ys.append(y)
            colours.append("black" if b.get(v) else "white")
        ax.scatter(xs, ys, s=18, c=colours, edgecolors="black", linewidths=0.6, zorder=2)
        ax.set_title(f"wheel {i}: {W.source.relations[i].text()}", fontsize=7)
        ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_stage_sizes(stages: Sequence[tuple[str, object]], path: Path) -> Path:
    """Relation count and total relator length after every pass."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = [name for name, _ in stages]
    counts = [len(P.relations) for _, P in stages]
    lengths = [sum(len(r) for r in P.relations) for _, P in stages]
    fig, ax = plt.subplots(figsize=(5, 3))
    xs = range(len(names))
    ax.bar([x - 0.2 for x in xs], counts, width=0.4, label="relations")
    ax.bar([x + 0.2 for x in xs], lengths, width=0.4, label="total length")
    ax.set_xticks(list(xs), names)
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
