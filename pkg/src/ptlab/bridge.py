"""Moving between permutation trees and lambda terms.

A tree ``<pi; t1..tn>`` is sent to the hereditary permutation
``\\x x1..xn. x (t1+ x_{pi 1}) .. (tn+ x_{pi n})`` in beta-normal form: a
child ``ti`` applied to ``x_{pi i}`` becomes ``\\y1..yk. x_{pi i} ...``.
Going back, a beta-normal form (or a Böhm approximant) is read as a tree
when every node binds exactly as many variables as it has children and the
children's heads are those variables, each used once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lam
from .fpt import CUT, LEAF, Fpt, star
from .lam import BCUT, BOTTOM, UNKNOWN, App, BNode, Lam, Term, Var
from .rational import Rpt


# ---------------------------------------------------------------------------
# trees to terms


def fpt_to_term(t: Fpt) -> Term:
    """Beta-normal form of the embedded tree."""

    def node(t, head_level, level):
        k = t.arity
        inner = level + k
        body = Var(inner - 1 - head_level)
        for j, c in enumerate(t.children):
            body = App(body, node(c, level + t.perm[j] - 1, inner))
        return lam.lams(k, body, [f"x{level + i}" for i in range(k)])

    if t.is_leaf:
        return Lam(Var(0), "x")
    return Lam(node(t, 0, 1), "x")


def fpt_to_bohm(t):
    """The Böhm-like tree of a tree with cuts; cut subtrees become ``BCUT``."""

    def node(t, head_level, level):
        if t is CUT:
            return BCUT
        k = t.arity
        inner = level + k
        kids = tuple(node(c, level + t.perm[j] - 1, inner) for j, c in enumerate(t.children))
        return BNode(k, inner - 1 - head_level, kids)

    if t is CUT:
        return BCUT
    n = t.arity
    return BNode(n + 1, n, tuple(node(c, t.perm[i], n + 1) for i, c in enumerate(t.children)))


def rpt_to_term(r: Rpt) -> Term:
    """A term whose Böhm tree is the embedding of the unfolding of ``r``.

    One function per state, bundled in a Church tuple and tied with a single
    ``Y``::

        Y (\\p sel. sel F_0 .. F_{k-1}) proj_root
        F_s = \\x x1..xn. x (p proj_{c1} x_{pi 1}) .. (p proj_{cn} x_{pi n})
        proj_j = \\y0..y_{k-1}. y_j
    """
    k = len(r)

    def proj(j):
        return lam.lams(k, Var(k - 1 - j), [f"y{i}" for i in range(k)])

    def state_fn(s):
        perm, kids = r.states[s]
        n = len(kids)
        depth = 3 + n  # p, sel, x, x1..xn
        body = Var(depth - 1 - 2)
        for i, c in enumerate(kids):
            rec = App(Var(depth - 1 - 0), proj(c))
            body = App(body, App(rec, Var(depth - 1 - (2 + perm[i]))))
        return lam.lams(n + 1, body, ["x"] + [f"x{i}" for i in range(1, n + 1)])

    tuple_body = lam.apps(Var(0), *(state_fn(s) for s in range(k)))
    gen = Lam(Lam(tuple_body, "sel"), "p")
    return lam.apps(lam.builtin("Y"), gen, proj(r.root))


def eta_family(kind: str, n: int) -> Fpt:
    """``wide``: ``<iota_n; *, .., *>``; ``deep``: the identity chain of length ``n``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if kind == "wide":
        return Fpt(tuple(range(1, n + 1)), (LEAF,) * n)
    if kind == "deep":
        t = LEAF
        for _ in range(n):
            t = Fpt((1,), (t,))
        return t
    raise ValueError(f"unknown family {kind!r}")


# ---------------------------------------------------------------------------
# terms to trees


class _NotHp(Exception):
    def __init__(self, kind: str, reason: str, path: tuple[int, ...]):
        super().__init__(reason)
        self.kind = kind  # "shape" or "unknown"
        self.reason = reason
        self.path = path


@dataclass(frozen=True)
class NodeWitness:
    path: tuple[int, ...]
    binders: int
    head_level: int
    perm: tuple[int, ...] | None


def _nf_to_bohm(t: Term):
    """A beta-normal form read as its own (finite) Böhm tree."""
    hf = lam._head_normal(t, lam.Fuel(1))
    head = hf.head.index if isinstance(hf.head, Var) else hf.head.name
    return BNode(len(hf.binders), head, tuple(_nf_to_bohm(a) for a in hf.args), hf.binders)


def _extract(b, witnesses: list | None = None):
    """Read an HP-shaped Böhm approximant as a tree with cuts.

    A node whose children are all cut and that has two or more children
    leaves its label undetermined, so it is itself reported as ``CUT``.
    """

    def head_of(b, inner, path):
        if not isinstance(b.head, int):
            raise _NotHp("shape", f"free variable {b.head!r} at head", path)
        return inner - 1 - b.head

    def node(b, expected, level, path):
        if b is BCUT:
            return CUT
        if b is UNKNOWN:
            raise _NotHp("unknown", "no head normal form within fuel", path)
        if b is BOTTOM:
            raise _NotHp("shape", "unsolvable subterm", path)
        k = b.nbinders
        inner = level + k
        if head_of(b, inner, path) != expected:
            raise _NotHp("shape", "head variable is not the one bound by the parent", path)
        if len(b.children) != k:
            raise _NotHp(
                "shape", f"node binds {k} variables but has {len(b.children)} arguments", path
            )
        perm, kids = [], []
        for j, c in enumerate(b.children):
            if c is BCUT or c is UNKNOWN or c is BOTTOM:
                perm.append(None)
                kids.append(node(c, None, inner, path + (j,)))
                continue
            h = head_of(c, inner + c.nbinders, path + (j,))
            if not level <= h < inner:
                raise _NotHp("shape", "argument head is not a variable bound at this node", path + (j,))
            if h - level + 1 in perm:
                raise _NotHp("shape", "bound variable used twice", path + (j,))
            perm.append(h - level + 1)
            kids.append(node(c, h, inner, path + (j,)))
        missing = perm.count(None)
        if missing == 1:
            perm[perm.index(None)] = next(i for i in range(1, k + 1) if i not in perm)
        elif missing:
            if witnesses is not None:
                witnesses.append(NodeWitness(path, k, expected, None))
            return CUT
        if witnesses is not None:
            witnesses.append(NodeWitness(path, k, expected, tuple(perm)))
        return Fpt(tuple(perm), tuple(kids))

    if b is BCUT:
        return CUT
    if isinstance(b, BNode) and b.nbinders >= 1:
        # the root binds its own head variable first
        root = BNode(b.nbinders - 1, b.head, b.children)
        return node(root, 0, 1, ())
    if isinstance(b, BNode):
        raise _NotHp("shape", "root is not an abstraction", ())
    return node(b, 0, 1, ())


@dataclass(frozen=True)
class FhpVerdict:
    outcome: str  # "yes", "no", "unknown"
    tree: Fpt | None = None
    reason: str = ""

    def __bool__(self):
        return self.outcome == "yes"


def term_to_fpt(m: Term, fuel: int = lam.DEFAULT_FUEL) -> FhpVerdict:
    """Recognize a finite hereditary permutation from its exact beta-normal form."""
    nf = lam.normalize(m, "beta", fuel)
    if nf is None:
        return FhpVerdict("unknown", reason="no beta-normal form within fuel")
    try:
        t = _extract(_nf_to_bohm(nf))
    except _NotHp as exc:
        where = "/".join(map(str, exc.path)) or "root"
        return FhpVerdict("no", reason=f"{exc.reason} (at {where})")
    return FhpVerdict("yes", t)


@dataclass
class HpResult:
    ok: bool
    depth: int
    tree: object = None
    approx: object = None
    witnesses: list = field(default_factory=list)
    failure: str = ""
    failure_kind: str = ""  # "shape" or "unknown"
    path: tuple[int, ...] = ()


HpCertificate = HpResult


def hp_check(m: Term, depth: int = lam.DEFAULT_DEPTH, fuel: int = lam.DEFAULT_FUEL) -> HpResult:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    b = lam.bohm_approx(m, depth, fuel)
    witnesses: list = []
    try:
        tree = _extract(b, witnesses)
    except _NotHp as exc:
        return HpResult(False, depth, approx=b, failure=exc.reason, failure_kind=exc.kind, path=exc.path)
    return HpResult(True, depth, tree, b, witnesses)


def hp_certificate(m: Term, depth: int = lam.DEFAULT_DEPTH, fuel: int = lam.DEFAULT_FUEL):
    """Certificate that the depth-``depth`` approximant fits the HP grammar, or ``None``.

    Cut nodes pass; nodes left unknown by fuel exhaustion fail.
    """
    result = hp_check(m, depth, fuel)
    return result if result.ok else None


def invert_fhp(m: Term, fuel: int = lam.DEFAULT_FUEL) -> Term | None:
    verdict = term_to_fpt(m, fuel)
    if not verdict:
        return None
    return fpt_to_term(star(verdict.tree))
