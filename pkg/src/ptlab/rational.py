"""Rational permutation trees.

An ``Rpt`` is a finite rooted state system; its unfolding from the root is a
possibly infinite permutation tree with finitely many distinct subtrees.  All
constructors return machines that are trimmed to the reachable part,
minimized by partition refinement and numbered breadth-first from the root,
so bisimilar results are also structurally equal.

Two classes of idempotents matter here: ``E`` (identity labels everywhere)
and ``E'`` (identity labels everywhere and finite).
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterator

from .fpt import (
    CUT,
    Fpt,
    Perm,
    is_perm,
    perm_compose,
    perm_inverse,
    perm_is_identity,
    perm_same,
)


class IdemClass(enum.Enum):
    E = "E"
    E_PRIME = "E'"


class RptFormatError(ValueError):
    pass


State = tuple[Perm, tuple[int, ...]]


@dataclass(frozen=True)
class Rpt:
    states: tuple[State, ...]
    root: int = 0

    def __post_init__(self):
        for perm, kids in self.states:
            if len(perm) != len(kids):
                raise RptFormatError("perm length must equal children length")
            if any(not 0 <= k < len(self.states) for k in kids):
                raise RptFormatError("dangling child reference")
        if not 0 <= self.root < len(self.states):
            raise RptFormatError("root is not a state")

    def __len__(self):
        return len(self.states)

    def perm(self, s: int) -> Perm:
        return self.states[s][0]

    def kids(self, s: int) -> tuple[int, ...]:
        return self.states[s][1]


LEAF_MACHINE = Rpt((((), ()),))
J_MACHINE = Rpt((((1,), (0,)),))


def _build(root: Hashable, expand: Callable[[Hashable], tuple[Perm, tuple]]) -> Rpt:
    ids = {root: 0}
    order = [root]
    states = []
    for key in order:
        perm, child_keys = expand(key)
        kids = []
        for ck in child_keys:
            if ck not in ids:
                ids[ck] = len(order)
                order.append(ck)
            kids.append(ids[ck])
        states.append((tuple(perm), tuple(kids)))
    return Rpt(tuple(states), 0)


def minimize(r: Rpt) -> Rpt:
    """Trim, merge bisimilar states, renumber breadth-first."""
    reach = _reachable(r, r.root)
    block = {s: r.perm(s) for s in reach}
    n_blocks = len(set(block.values()))
    while True:
        sig = {s: (block[s], tuple(block[k] for k in r.kids(s))) for s in reach}
        ids: dict = {}
        new = {s: ids.setdefault(sig[s], len(ids)) for s in sorted(reach)}
        if len(ids) == n_blocks:
            break
        block, n_blocks = new, len(ids)
    rep = {}
    for s in sorted(reach):
        rep.setdefault(new[s], s)
    return _build(new[r.root], lambda b: (r.perm(rep[b]), tuple(new[k] for k in r.kids(rep[b]))))


def _reachable(r: Rpt, start: int) -> set[int]:
    seen = {start}
    todo = [start]
    while todo:
        s = todo.pop()
        for k in r.kids(s):
            if k not in seen:
                seen.add(k)
                todo.append(k)
    return seen


# ---------------------------------------------------------------------------
# per-state predicates


def finite_states(r: Rpt) -> frozenset[int]:
    """States from which no cycle is reachable (least fixpoint)."""
    fin: set[int] = set()
    changed = True
    while changed:
        changed = False
        for s in range(len(r)):
            if s not in fin and all(k in fin for k in r.kids(s)):
                fin.add(s)
                changed = True
    return frozenset(fin)


def identity_states(r: Rpt) -> frozenset[int]:
    """States whose whole unfolding carries identity labels (greatest fixpoint)."""
    good = {s for s in range(len(r)) if perm_is_identity(r.perm(s))}
    changed = True
    while changed:
        changed = False
        for s in list(good):
            if any(k not in good for k in r.kids(s)):
                good.discard(s)
                changed = True
    return frozenset(good)


def class_states(r: Rpt, cls: IdemClass) -> frozenset[int]:
    ident = identity_states(r)
    if cls is IdemClass.E:
        return ident
    return ident & finite_states(r)


def in_idem_class(r: Rpt, cls: IdemClass) -> bool:
    return r.root in class_states(r, cls)


def is_finite(r: Rpt) -> bool:
    return r.root in finite_states(r)


# ---------------------------------------------------------------------------
# conversions


def from_fpt(t: Fpt) -> Rpt:
    """One state per node, numbered breadth-first; not minimized."""
    nodes = [t]
    states = []
    for node in nodes:
        kids = []
        for c in node.children:
            kids.append(len(nodes))
            nodes.append(c)
        states.append((node.perm, tuple(kids)))
    return Rpt(tuple(states), 0)


def to_fpt(r: Rpt) -> Fpt | None:
    if not is_finite(r):
        return None

    def go(s):
        return Fpt(r.perm(s), tuple(go(k) for k in r.kids(s)))

    return go(r.root)


def unfold_to_depth(r: Rpt, d: int):
    """Depth-``d`` observation; nodes at depth ``d`` become ``CUT``."""

    def go(s, depth):
        if depth >= d:
            return CUT
        return Fpt(r.perm(s), tuple(go(k, depth + 1) for k in r.kids(s)))

    return go(r.root, 0)


def from_dict(doc: dict) -> Rpt:
    try:
        root = doc["root"]
        raw = doc["states"]
    except (KeyError, TypeError) as exc:
        raise RptFormatError(f"missing field {exc}") from None
    if not isinstance(raw, dict) or root not in raw:
        raise RptFormatError(f"root {root!r} is not a declared state")
    names = list(raw)
    index = {name: i for i, name in enumerate(names)}
    states = []
    for name in names:
        entry = raw[name]
        perm = tuple(entry.get("perm", ()))
        kids = entry.get("children", [])
        if len(perm) != len(kids):
            raise RptFormatError(f"state {name!r}: perm length must equal children length")
        if not is_perm(perm):
            raise RptFormatError(f"state {name!r}: {list(perm)} is not a permutation")
        for k in kids:
            if k not in index:
                raise RptFormatError(f"state {name!r}: dangling child id {k!r}")
        states.append((perm, tuple(index[k] for k in kids)))
    return Rpt(tuple(states), index[root])


def to_dict(r: Rpt) -> dict:
    return {
        "root": f"s{r.root}",
        "states": {
            f"s{i}": {"perm": list(perm), "children": [f"s{k}" for k in kids]}
            for i, (perm, kids) in enumerate(r.states)
        },
    }


def loads(text: str) -> Rpt:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RptFormatError(str(exc)) from None
    return from_dict(doc)


def dumps(r: Rpt) -> str:
    return json.dumps(to_dict(r), sort_keys=True)


# ---------------------------------------------------------------------------
# equality and order


def bisim_equal(r: Rpt, s: Rpt) -> bool:
    """Coinductive check: no reachable state pair disagrees on its label."""
    seen = {(r.root, s.root)}
    todo = [(r.root, s.root)]
    while todo:
        p, q = todo.pop()
        if r.perm(p) != s.perm(q):
            return False
        for pair in zip(r.kids(p), s.kids(q)):
            if pair not in seen:
                seen.add(pair)
                todo.append(pair)
    return True


def r_leq(r: Rpt, s: Rpt, cls: IdemClass = IdemClass.E) -> bool:
    """``r <= s`` (``cls = E``) or ``r <=' s`` (``cls = E'``).

    The greatest relation satisfying the local conditions holds at a pair
    exactly when no reachable pair violates them.
    """
    trailing_ok = class_states(r, cls)
    seen = {(r.root, s.root)}
    todo = [(r.root, s.root)]
    while todo:
        p, q = todo.pop()
        kp, kq = r.kids(p), s.kids(q)
        if len(kq) > len(kp) or not perm_same(r.perm(p), s.perm(q)):
            return False
        if any(k not in trailing_ok for k in kp[len(kq):]):
            return False
        for pair in zip(kp, kq):
            if pair not in seen:
                seen.add(pair)
                todo.append(pair)
    return True


# ---------------------------------------------------------------------------
# monoid operations


class _Union:
    """Disjoint union of several machines plus a shared leaf, keyed by (machine, state)."""

    LEAF_KEY = ("leaf",)

    def __init__(self, *machines: Rpt):
        self.machines = machines

    def root(self, i: int):
        return (i, self.machines[i].root)

    def node(self, key) -> tuple[Perm, tuple]:
        if key == self.LEAF_KEY:
            return (), ()
        i, s = key
        m = self.machines[i]
        return m.perm(s), tuple((i, k) for k in m.kids(s))

    def product_expand(self, a, b):
        """Label and child key pairs of ``tree(a) * tree(b)``."""
        pi, ta = self.node(a)
        rho, ub = self.node(b)
        n, m = len(ta), len(ub)
        kids = []
        for i in range(max(n, m)):
            if i < m:
                j = rho[i]
                kids.append((ub[i], ta[j - 1] if j <= n else self.LEAF_KEY))
            else:
                kids.append((ta[i], self.LEAF_KEY))
        return perm_compose(pi, rho), tuple(kids)


def r_product(r: Rpt, s: Rpt) -> Rpt:
    u = _Union(r, s)
    return minimize(_build((u.root(0), u.root(1)), lambda ab: u.product_expand(*ab)))


def r_star(r: Rpt) -> Rpt:
    def expand(s):
        inv = perm_inverse(r.perm(s))
        return inv, tuple(r.kids(s)[j - 1] for j in inv)

    return minimize(_build(r.root, expand))


def r_max_rep(r: Rpt, cls: IdemClass = IdemClass.E) -> Rpt:
    strippable = class_states(r, cls)

    def expand(s):
        perm, kids = list(r.perm(s)), list(r.kids(s))
        while kids and perm[-1] == len(perm) and kids[-1] in strippable:
            perm.pop()
            kids.pop()
        return tuple(perm), tuple(kids)

    return minimize(_build(r.root, expand))


def r_sigma_equiv(r: Rpt, s: Rpt, cls: IdemClass = IdemClass.E) -> bool:
    return bisim_equal(r_max_rep(r, cls), r_max_rep(s, cls))


def common_lower_bound(t: Rpt, u: Rpt, v: Rpt) -> Rpt:
    """Given ``t <=' v`` and ``u <=' v``, a ``w`` with ``w <=' t`` and ``w <=' u``.

    Shared positions recurse, positions beyond ``v`` but inside both take the
    product ``t_i u_i`` of the finite idempotent children, and positions only
    the longer operand has are copied from it.
    """
    un = _Union(t, u, v)

    def expand(key):
        tag = key[0]
        if tag == "prod":
            return un.product_expand(key[1], key[2])
        if tag == "copy":
            return un.node(key[1])
        _, a, b, c = key
        pa, ka = un.node(a)
        pb, kb = un.node(b)
        _, kc = un.node(c)
        k = len(kc)
        longer_perm = pa if len(ka) >= len(kb) else pb
        kids = []
        for i in range(max(len(ka), len(kb))):
            if i < k:
                kids.append(("lb", ka[i], kb[i], kc[i]))
            elif i < len(ka) and i < len(kb):
                kids.append(("prod", ka[i], kb[i]))
            elif i < len(ka):
                kids.append(("copy", ka[i]))
            else:
                kids.append(("copy", kb[i]))
        return longer_perm, tuple(kids)

    return minimize(_build(("lb", un.root(0), un.root(1), un.root(2)), expand))


# ---------------------------------------------------------------------------
# corpus


def machines(max_states: int, max_arity: int = 2) -> Iterator[Rpt]:
    """Every machine with root 0, up to ``max_states`` states, labels in S_0..S_max_arity."""
    for k in range(1, max_states + 1):
        options = [((), ())]
        for a in range(1, max_arity + 1):
            for perm in itertools.permutations(range(1, a + 1)):
                for kids in itertools.product(range(k), repeat=a):
                    options.append((perm, kids))
        for states in itertools.product(options, repeat=k):
            yield Rpt(tuple(states), 0)


def corpus(max_states: int = 3, max_arity: int = 2) -> tuple[Rpt, ...]:
    """Distinct trees presented by :func:`machines`, in canonical minimized form."""
    seen = {}
    for r in machines(max_states, max_arity):
        m = minimize(r)
        seen.setdefault(m, None)
    return tuple(sorted(seen, key=lambda m: (len(m), m.states)))
