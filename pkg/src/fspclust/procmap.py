"""Process maps built from closed sequence patterns.

An edge ``a -> b`` states that ``b`` eventually follows ``a`` in a frequent
pattern. By default only consecutive pattern positions form edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .fsp import SequencePattern


@dataclass
class NodeInfo:
    support: Fraction
    in_patterns: int


@dataclass
class EdgeInfo:
    weight: Fraction
    count: int


@dataclass
class ProcessMap:
    nodes: dict[str, NodeInfo] = field(default_factory=dict)
    edges: dict[tuple[str, str], EdgeInfo] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "nodes": [
                    {"label": k, "support": str(v.support), "in_patterns": v.in_patterns}
                    for k, v in sorted(self.nodes.items())
                ],
                "edges": [
                    {"source": a, "target": b, "weight": str(v.weight), "count": v.count}
                    for (a, b), v in sorted(self.edges.items())
                ],
            },
            ensure_ascii=False,
            indent=1,
        )


def build_map(sp_clo: Iterable[SequencePattern], transitive: bool = False) -> ProcessMap:
    """Map of the labels and eventually-follows pairs of ``sp_clo``.

    Node support and edge weight take the maximum support over contributing
    patterns; ``count``/``in_patterns`` count those patterns. With
    ``transitive`` every ordered pair ``i < j`` of a pattern yields an edge.
    """
    pm = ProcessMap()
    for p in sp_clo:
        s = p.support
        for label in set(p.labels):
            node = pm.nodes.get(label)
            if node is None:
                pm.nodes[label] = NodeInfo(s, 1)
            else:
                node.support = max(node.support, s)
                node.in_patterns += 1
        labels = p.labels
        if transitive:
            pairs = {(labels[i], labels[j]) for i in range(len(labels)) for j in range(i + 1, len(labels))}
        else:
            pairs = set(zip(labels, labels[1:]))
        for pair in pairs:
            edge = pm.edges.get(pair)
            if edge is None:
                pm.edges[pair] = EdgeInfo(s, 1)
            else:
                edge.weight = max(edge.weight, s)
                edge.count += 1
    return pm


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _fmt(x: Fraction) -> str:
    return f"{float(x):.3g}"


def to_dot(pm: ProcessMap, label_supports: bool = True, name: str = "map") -> str:
    """Render ``pm`` as a Graphviz digraph; output is byte-stable for equal maps."""
    if not pm.nodes:
        return f"digraph {name} {{\n}}\n"
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=box];"]
    for label in sorted(pm.nodes):
        info = pm.nodes[label]
        text = f"{label}\n{_fmt(info.support)}" if label_supports else label
        lines.append(f"  {_quote(label)} [label={_quote(text)}];")
    for (a, b) in sorted(pm.edges):
        info = pm.edges[(a, b)]
        attrs = f" [label={_quote(_fmt(info.weight))}, penwidth={1 + 2 * float(info.weight):.2f}]" if label_supports else ""
        lines.append(f"  {_quote(a)} -> {_quote(b)}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"
