"""Graphviz DOT writers for the machines and graphs the toolkit makes."""

from __future__ import annotations

from .abstraction import Fts, LabeledFts, StatePredicate
from .refine import SearchReport
from .solver import MooreCounterStrategy


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot_counterstrategy(cs: MooreCounterStrategy, name: str = "counterstrategy") -> str:
    """The machine's state graph; nodes show the emitted input literals."""
    lines = [f"digraph {name} {{"]
    lines.append("  rankdir=LR;")
    for q in range(cs.n_states):
        pred = StatePredicate(cs.env_vars, cs.gamma[q])
        label = f"q{q}\\n{pred.text()}"
        shape = "doublecircle" if q == cs.initial else "circle"
        lines.append(f"  q{q} [label={_quote(label)}, shape={shape}];")
    for src, dst in cs.graph_edges():
        lines.append(f"  q{src} -> q{dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_fts(
    fts: Fts,
    predicates: dict[int, StatePredicate] | None = None,
    name: str = "fts",
) -> str:
    lines = [f"digraph {name} {{"]
    lines.append("  rankdir=LR;")
    for q in range(fts.n_states):
        if fts.dummy is not None and q == fts.dummy:
            label = f"q{q}\\n(sink)"
        elif predicates is not None and q in predicates:
            label = f"q{q}\\n{predicates[q].text()}"
        else:
            label = f"q{q}"
        shape = "doublecircle" if q == fts.initial else "circle"
        lines.append(f"  q{q} [label={_quote(label)}, shape={shape}];")
    for src, dst in fts.edges:
        lines.append(f"  q{src} -> q{dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_labeled_fts(lfts: LabeledFts, name: str = "fts") -> str:
    lines = [f"digraph {name} {{"]
    lines.append("  rankdir=LR;")
    fts = lfts.fts
    for q in range(fts.n_states):
        if fts.dummy is not None and q == fts.dummy:
            label = f"q{q}\\n(sink)"
        elif q in lfts.predicates:
            label = f"q{q}\\n{lfts.predicates[q].text()}"
        else:
            label = f"q{q}"
        shape = "doublecircle" if q == fts.initial else "circle"
        lines.append(f"  q{q} [label={_quote(label)}, shape={shape}];")
    for src, dst in fts.edges:
        edge_label = lfts.labels.get((src, dst))
        if edge_label is not None and edge_label.mask:
            lines.append(
                f"  q{src} -> q{dst} [label={_quote(edge_label.text())}];"
            )
        else:
            lines.append(f"  q{src} -> q{dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_search_tree(report: SearchReport, name: str = "search") -> str:
    """The refinement search as a tree of processed nodes.

    Nodes are shown in processing order; each is connected to the node
    holding all but its last conjunct.
    """
    lines = [f"digraph {name} {{"]
    lines.append("  node [shape=box];")
    index = {}
    for i, node in enumerate(report.nodes):
        index[node.formulas] = i
        if not node.formulas:
            text = "root"
        else:
            text = "\\n".join(node.formulas)
        if not node.consistent:
            text += "\\n[inconsistent]"
        elif node.realizable:
            text += "\\n[realizable]"
        else:
            text += "\\n[unrealizable]"
        lines.append(f"  n{i} [label={_quote(text)}];")
    for i, node in enumerate(report.nodes):
        if node.formulas:
            parent = node.formulas[:-1]
            if parent in index:
                lines.append(f"  n{index[parent]} -> n{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"
