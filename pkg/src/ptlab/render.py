"""DOT export for finite trees, rational machines and Böhm approximants."""

from __future__ import annotations

from . import lam
from .fpt import CUT, Fpt
from .lam import BCUT, BOTTOM, UNKNOWN, BNode
from .rational import Rpt


def _perm_label(perm) -> str:
    return "[" + " ".join(map(str, perm)) + "]"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _digraph(nodes, edges) -> str:
    lines = ["digraph G {", "  node [shape=box, fontname=monospace];"]
    lines += [f"  {nid} [label={_quote(label)}];" for nid, label in nodes]
    lines += [f"  {a} -> {b} [label={_quote(str(i))}];" for a, b, i in edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _render_fpt(t) -> str:
    nodes, edges = [], []

    def go(t):
        nid = f"n{len(nodes)}"
        if t is CUT:
            nodes.append((nid, "cut"))
            return nid
        nodes.append((nid, "*" if t.is_leaf else _perm_label(t.perm)))
        for i, c in enumerate(t.children, 1):
            edges.append((nid, go(c), i))
        return nid

    go(t)
    return _digraph(nodes, edges)


def _render_rpt(r: Rpt) -> str:
    nodes = [
        (f"s{i}", ("*" if not perm else _perm_label(perm)) + (" (root)" if i == r.root else ""))
        for i, (perm, _) in enumerate(r.states)
    ]
    edges = [(f"s{i}", f"s{k}", j) for i, (_, kids) in enumerate(r.states) for j, k in enumerate(kids, 1)]
    return _digraph(nodes, edges)


def _render_bohm(b) -> str:
    nodes, edges = [], []

    def go(b, level):
        nid = f"n{len(nodes)}"
        if b is BOTTOM:
            nodes.append((nid, "⊥"))
        elif b is BCUT:
            nodes.append((nid, "cut"))
        elif b is UNKNOWN:
            nodes.append((nid, "?"))
        else:
            names = [f"x{level + i}" for i in range(b.nbinders)]
            inner = level + b.nbinders
            head = b.head if isinstance(b.head, str) else f"x{inner - 1 - b.head}"
            label = (f"λ{' '.join(names)}. " if names else "") + head
            nodes.append((nid, label))
            for i, c in enumerate(b.children, 1):
                edges.append((nid, go(c, inner), i))
        return nid

    go(b, 0)
    return _digraph(nodes, edges)


def render_dot(x) -> str:
    """A DOT digraph for an ``Fpt`` (possibly with cuts), an ``Rpt`` or a Böhm approximant."""
    if isinstance(x, Rpt):
        return _render_rpt(x)
    if x is CUT or isinstance(x, Fpt):
        return _render_fpt(x)
    if isinstance(x, BNode) or x in (BOTTOM, BCUT, UNKNOWN):
        return _render_bohm(x)
    if isinstance(x, (lam.Var, lam.Free, lam.Lam, lam.App)):
        return _render_bohm(lam.bohm_approx(x))
    raise TypeError(f"cannot render {type(x).__name__}")
