"""Finite permutation trees and their inverse-monoid structure.

A tree is written ``<pi; t1, ..., tn>`` where ``pi`` is a permutation of
``{1..n}`` given by its image list and the ``ti`` are the children.  The leaf
``*`` carries the empty permutation and is the unit of the monoid.

Text form::

    fpt := '*' | '(' '[' NAT (' ' NAT)* ']' ';' fpt (',' fpt)* ')'
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

Perm = tuple[int, ...]


class ArityError(ValueError):
    pass


class FptSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


# ---------------------------------------------------------------------------
# permutations (image lists, 1-based; positions past the end are fixed)


def is_perm(images: Sequence[int]) -> bool:
    return sorted(images) == list(range(1, len(images) + 1))


def perm_apply(pi: Perm, i: int) -> int:
    return pi[i - 1] if i <= len(pi) else i


def perm_compose(pi: Perm, rho: Perm) -> Perm:
    """``pi o rho``, i.e. ``i -> pi(rho(i))``, on ``max(|pi|, |rho|)`` points."""
    n = max(len(pi), len(rho))
    return tuple(perm_apply(pi, perm_apply(rho, i)) for i in range(1, n + 1))


def perm_inverse(pi: Perm) -> Perm:
    inv = [0] * len(pi)
    for i, j in enumerate(pi, start=1):
        inv[j - 1] = i
    return tuple(inv)


def perm_is_identity(pi: Perm) -> bool:
    return all(j == i for i, j in enumerate(pi, start=1))


def perm_same(pi: Perm, rho: Perm) -> bool:
    """Equality as permutations of the positive integers."""
    if len(pi) < len(rho):
        pi, rho = rho, pi
    m = len(rho)
    return pi[:m] == rho and all(pi[i] == i + 1 for i in range(m, len(pi)))


# ---------------------------------------------------------------------------
# trees


class Cut:
    """Marker for a subtree pruned at an observation frontier."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CUT"

    def __reduce__(self):
        return (Cut, ())


CUT = Cut()


class Fpt(NamedTuple):
    perm: Perm
    children: tuple["Fpt", ...]

    @property
    def arity(self) -> int:
        return len(self.children)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __str__(self) -> str:
        return to_text(self)


LEAF = Fpt((), ())


def mk_node(label: Sequence[int], children: Sequence[Fpt]) -> Fpt:
    label = tuple(label)
    if len(label) != len(children):
        raise ArityError(
            f"arity mismatch: label {list(label)} expects {len(label)} children, got {len(children)}"
        )
    if not is_perm(label):
        raise ValueError(f"{list(label)} is not a permutation of 1..{len(label)}")
    return Fpt(label, tuple(children))


def norm(t: Fpt) -> int:
    """Node count."""
    return 1 + sum(norm(c) for c in t.children)


def has_cut(t) -> bool:
    if t is CUT:
        return True
    return any(has_cut(c) for c in t.children)


def truncate(t, depth: int):
    """Replace every node at ``depth`` (root = 0) by ``CUT``."""
    if depth <= 0 or t is CUT:
        return CUT
    return Fpt(t.perm, tuple(truncate(c, depth - 1) for c in t.children))


# ---------------------------------------------------------------------------
# monoid structure


def product(t: Fpt, u: Fpt):
    """Monoid product ``t u``.

    Child ``i`` of the result is ``u_i t_{rho i}`` for ``i <= arity(u)`` and
    ``t_i`` beyond that, with ``t_j`` read as the leaf when ``j > arity(t)``.
    Cut operands propagate, so truncated trees multiply level by level.
    """
    if t is CUT or u is CUT:
        return CUT
    if not u.children:
        return t
    if not t.children:
        return u
    return _product(t, u)


@lru_cache(maxsize=1 << 18)
def _product(t: Fpt, u: Fpt) -> Fpt:
    n, m = len(t.children), len(u.children)
    rho = u.perm
    kids = []
    for i in range(max(n, m)):
        if i < m:
            j = rho[i]
            kids.append(product(u.children[i], t.children[j - 1] if j <= n else LEAF))
        else:
            kids.append(t.children[i])
    return Fpt(perm_compose(t.perm, rho), tuple(kids))


@lru_cache(maxsize=1 << 16)
def star(t: Fpt) -> Fpt:
    """The inverse ``<pi^-1; (t_{pi^-1 1})*, ...>``."""
    if t is CUT or not t.children:
        return t
    inv = perm_inverse(t.perm)
    return Fpt(inv, tuple(star(t.children[j - 1]) for j in inv))


def is_idempotent(t: Fpt) -> bool:
    return perm_is_identity(t.perm) and all(is_idempotent(c) for c in t.children)


def natural_leq(t: Fpt, u: Fpt) -> bool:
    n, m = len(t.children), len(u.children)
    if m > n or not perm_same(t.perm, u.perm):
        return False
    return all(natural_leq(t.children[i], u.children[i]) for i in range(m)) and all(
        is_idempotent(t.children[i]) for i in range(m, n)
    )


def compatible(t: Fpt, u: Fpt) -> bool:
    return is_idempotent(product(star(t), u)) and is_idempotent(product(t, star(u)))


def meet(t: Fpt, u: Fpt) -> Fpt | None:
    """Greatest lower bound ``t u* u`` of compatible elements, else ``None``."""
    if not compatible(t, u):
        return None
    return product(t, product(star(u), u))


def max_rep(t: Fpt) -> Fpt:
    """The maximum of the up-set of ``t``: strip fixed trailing idempotent children."""
    perm, kids = list(t.perm), list(t.children)
    while kids and perm[-1] == len(perm) and is_idempotent(kids[-1]):
        perm.pop()
        kids.pop()
    return Fpt(tuple(perm), tuple(max_rep(c) for c in kids))


def sigma_equiv(t: Fpt, u: Fpt) -> bool:
    return max_rep(t) == max_rep(u)


def covers(t: Fpt, u: Fpt) -> bool:
    """``t < u`` with nothing strictly in between."""
    n, m = len(t.children), len(u.children)
    if n == m:
        if t.perm != u.perm:
            return False
        diff = [i for i in range(n) if t.children[i] != u.children[i]]
        return len(diff) == 1 and covers(t.children[diff[0]], u.children[diff[0]])
    if n == m + 1:
        return (
            perm_same(t.perm, u.perm)
            and t.children[-1] == LEAF
            and t.children[:m] == u.children
        )
    return False


def upset(t: Fpt) -> frozenset[Fpt]:
    """All ``u >= t``, found by filtering every tree no larger than ``t``."""
    return frozenset(u for u in enumerate_fpt(norm(t)) if natural_leq(t, u))


def skeleton(t: Fpt) -> Fpt:
    return Fpt(tuple(range(1, t.arity + 1)), tuple(skeleton(c) for c in t.children))


# ---------------------------------------------------------------------------
# enumeration


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def trees_of_size(n: int) -> tuple[Fpt, ...]:
    """Every tree with exactly ``n`` nodes, sorted by canonical text."""
    if n < 1:
        return ()
    if n == 1:
        return (LEAF,)
    out = []
    for k in range(1, n):
        perms = list(itertools.permutations(range(1, k + 1)))
        for sizes in _compositions(n - 1, k):
            for kids in itertools.product(*(trees_of_size(s) for s in sizes)):
                out.extend(Fpt(p, kids) for p in perms)
    out.sort(key=to_text)
    return tuple(out)


@lru_cache(maxsize=None)
def _enumerate(max_nodes: int) -> tuple[Fpt, ...]:
    return tuple(itertools.chain.from_iterable(trees_of_size(n) for n in range(1, max_nodes + 1)))


def enumerate_fpt(max_nodes: int) -> tuple[Fpt, ...]:
    """All trees with at most ``max_nodes`` nodes, by size then canonical text."""
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    return _enumerate(max_nodes)


def idempotents(max_nodes: int) -> tuple[Fpt, ...]:
    return tuple(t for t in enumerate_fpt(max_nodes) if is_idempotent(t))


# ---------------------------------------------------------------------------
# text form


@lru_cache(maxsize=1 << 16)
def _to_text(t: Fpt) -> str:
    if not t.children:
        return "*"
    label = " ".join(map(str, t.perm))
    return f"([{label}]; " + ", ".join(to_text(c) for c in t.children) + ")"


def to_text(t) -> str:
    if t is CUT:
        return "cut"
    return _to_text(t)


_TOKEN = re.compile(r"\s*(?:(\*)|(cut)|(\()|(\))|(\[[^\]]*\])|(;)|(,))")


def parse_fpt(text: str, allow_cut: bool = False):
    """Parse the text form; ``cut`` leaves are accepted only with ``allow_cut``."""
    pos = 0

    def next_token():
        nonlocal pos
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = len(text) - len(text[pos:].lstrip())
            if stripped >= len(text):
                raise FptSyntaxError("unexpected end of input", len(text))
            raise FptSyntaxError(f"unexpected character {text[stripped]!r}", stripped)
        pos = m.end()
        return m.lastindex, m.group(m.lastindex), m.start(m.lastindex)

    def expect(kind, what):
        k, _, at = next_token()
        if k != kind:
            raise FptSyntaxError(f"expected {what}", at)

    def tree():
        kind, tok, at = next_token()
        if kind == 1:
            return LEAF
        if kind == 2:
            if not allow_cut:
                raise FptSyntaxError("cut marker not allowed here", at)
            return CUT
        if kind != 3:
            raise FptSyntaxError("expected '*' or '('", at)
        kind, tok, at = next_token()
        if kind != 5:
            raise FptSyntaxError("expected permutation list", at)
        body = tok[1:-1].split()
        if not body or not all(x.isdigit() for x in body):
            raise FptSyntaxError("malformed permutation list", at)
        label = tuple(int(x) for x in body)
        if not is_perm(label):
            raise FptSyntaxError(f"{list(label)} is not a permutation", at)
        expect(6, "';'")
        kids = [tree()]
        while True:
            kind, _, at = next_token()
            if kind == 4:
                break
            if kind != 7:
                raise FptSyntaxError("expected ',' or ')'", at)
            kids.append(tree())
        if len(kids) != len(label):
            raise FptSyntaxError(
                f"arity mismatch: label has {len(label)} entries, node has {len(kids)} children", at
            )
        return Fpt(label, tuple(kids))

    result = tree()
    if text[pos:].strip():
        raise FptSyntaxError("trailing input", pos + len(text[pos:]) - len(text[pos:].lstrip()))
    return result
