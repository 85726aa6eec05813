"""Untyped lambda terms: parsing, printing, normalization, Böhm approximants.

Terms are kept in locally nameless form: bound variables are de Bruijn
indices, free variables keep their names, and binder names survive only as
printing hints.  Alpha-equivalence is therefore plain ``==``.

Grammar accepted by :func:`parse` (``\\`` and ``λ`` are interchangeable)::

    term := '\\' IDENT+ '.' term | app
    app  := atom atom*
    atom := IDENT | '(' term ')'
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from typing import NamedTuple, Union

# Deep terms recurse; past this limit a computation reports "unknown" (like
# running out of fuel) instead of overflowing the C stack.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 8000))

DEFAULT_FUEL = 10_000
DEFAULT_DEPTH = 8


class _Node:
    """Caches the hash and the loose-index bound; both are used on every step."""

    def __post_init__(self):
        object.__setattr__(self, "loose", self._compute_loose())
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._key()))

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, eq=True)
class Var(_Node):
    index: int
    loose: int = field(init=False, compare=False, repr=False)

    def _compute_loose(self):
        return self.index + 1

    def _key(self):
        return (self.index,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Free(_Node):
    name: str
    loose: int = field(init=False, compare=False, repr=False)

    def _compute_loose(self):
        return 0

    def _key(self):
        return (self.name,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Lam(_Node):
    body: "Term"
    hint: str = field(default="x", compare=False)
    loose: int = field(init=False, compare=False, repr=False)

    def _compute_loose(self):
        return max(self.body.loose - 1, 0)

    def _key(self):
        return (self.body._hash,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class App(_Node):
    fn: "Term"
    arg: "Term"
    loose: int = field(init=False, compare=False, repr=False)

    def _compute_loose(self):
        return max(self.fn.loose, self.arg.loose)

    def _key(self):
        return (self.fn._hash, self.arg._hash)

    __hash__ = _Node.__hash__


Term = Union[Var, Free, Lam, App]


class TermSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class OutOfFuel(Exception):
    pass


class Fuel:
    """A reduction-step budget shared by one computation."""

    def __init__(self, steps: int):
        if steps <= 0:
            raise ValueError("fuel must be positive")
        self.remaining = steps

    def tick(self):
        if self.remaining <= 0:
            raise OutOfFuel
        self.remaining -= 1


def lams(n: int, body: Term, hints=None) -> Term:
    for i in reversed(range(n)):
        body = Lam(body, hints[i] if hints else "x")
    return body


def apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


# ---------------------------------------------------------------------------
# parsing and printing

_TOKEN = re.compile(r"\s*(?:([\\λ])|([A-Za-z][A-Za-z0-9_]*)|(\.)|(\()|(\)))")


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if not rest.strip():
                break
            at = pos + len(rest) - len(rest.lstrip())
            raise TermSyntaxError(f"unexpected character {text[at]!r}", at)
        out.append((m.lastindex, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    out.append((0, "", len(text)))
    return out


def parse(text: str) -> Term:
    toks = _tokenize(text)
    i = 0
    scope: list[str] = []

    def peek():
        return toks[i]

    def take(kind, what):
        nonlocal i
        k, val, at = toks[i]
        if k != kind:
            raise TermSyntaxError(f"expected {what}", at)
        i += 1
        return val

    def term():
        nonlocal i
        if peek()[0] == 1:
            i += 1
            names = [take(2, "binder name")]
            while peek()[0] == 2:
                names.append(take(2, "binder name"))
            take(3, "'.'")
            scope.extend(names)
            body = term()
            del scope[len(scope) - len(names):]
            for name in reversed(names):
                body = Lam(body, name)
            return body
        return app()

    def app():
        t = atom()
        while peek()[0] in (2, 4):
            t = App(t, atom())
        return t

    def atom():
        nonlocal i
        k, val, at = peek()
        if k == 2:
            i += 1
            for depth, name in enumerate(reversed(scope)):
                if name == val:
                    return Var(depth)
            return Free(val)
        if k == 4:
            i += 1
            t = term()
            take(5, "')'")
            return t
        if k == 0:
            raise TermSyntaxError("unexpected end of input", at)
        raise TermSyntaxError(f"unexpected {val!r}", at)

    t = term()
    k, val, at = peek()
    if k != 0:
        raise TermSyntaxError(f"unexpected {val!r}", at)
    return t


def free_names(t: Term) -> frozenset[str]:
    if isinstance(t, Free):
        return frozenset((t.name,))
    if isinstance(t, Lam):
        return free_names(t.body)
    if isinstance(t, App):
        return free_names(t.fn) | free_names(t.arg)
    return frozenset()


def _fresh(hint: str, taken) -> str:
    if hint not in taken:
        return hint
    base = hint.rstrip("0123456789") or "x"
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def to_text(t: Term) -> str:
    """Minimal-parenthesis printer with multi-binder sugar."""
    reserved = set(free_names(t))

    def show(t, ctx, pos):
        # pos: "top", "fn" (left of an application) or "arg"
        if isinstance(t, Var):
            return ctx[-1 - t.index] if t.index < len(ctx) else f"?{t.index}"
        if isinstance(t, Free):
            return t.name
        if isinstance(t, App):
            s = f"{show(t.fn, ctx, 'fn')} {show(t.arg, ctx, 'arg')}"
            return f"({s})" if pos == "arg" else s
        names = []
        inner = list(ctx)
        while isinstance(t, Lam):
            name = _fresh(t.hint, reserved | set(inner))
            names.append(name)
            inner.append(name)
            t = t.body
        s = "\\" + " ".join(names) + ". " + show(t, inner, "top")
        return s if pos == "top" else f"({s})"

    return show(t, [], "top")


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u


# ---------------------------------------------------------------------------
# de Bruijn machinery


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0 or t.loose <= cutoff:
        return t
    if isinstance(t, Var):
        return Var(t.index + d) if t.index >= cutoff else t
    if isinstance(t, Lam):
        return Lam(shift(t.body, d, cutoff + 1), t.hint)
    if isinstance(t, App):
        return App(shift(t.fn, d, cutoff), shift(t.arg, d, cutoff))
    return t


def subst_top(body: Term, arg: Term) -> Term:
    """``body[arg/0]`` with the remaining loose indices lowered by one."""

    def go(t, depth):
        if t.loose <= depth:
            return t
        if isinstance(t, Var):
            if t.index == depth:
                return shift(arg, depth)
            return Var(t.index - 1) if t.index > depth else t
        if isinstance(t, Lam):
            return Lam(go(t.body, depth + 1), t.hint)
        if isinstance(t, App):
            return App(go(t.fn, depth), go(t.arg, depth))
        return t

    return go(body, 0)


def occurs(t: Term, index: int) -> bool:
    if t.loose <= index:
        return False
    if isinstance(t, Var):
        return t.index == index
    if isinstance(t, Lam):
        return occurs(t.body, index + 1)
    if isinstance(t, App):
        return occurs(t.fn, index) or occurs(t.arg, index)
    return False


# ---------------------------------------------------------------------------
# reduction


class HeadForm(NamedTuple):
    """``\\x1..xn. h M1 .. Mk``; ``head`` and ``args`` live under the ``n`` binders."""

    binders: tuple[str, ...]
    head: Term
    args: tuple[Term, ...]

    def to_term(self) -> Term:
        return lams(len(self.binders), apps(self.head, *self.args), self.binders)


def _head_normal(t: Term, fuel: Fuel) -> HeadForm:
    hints: list[str] = []
    while True:
        while isinstance(t, Lam):
            hints.append(t.hint)
            t = t.body
        args = []
        while isinstance(t, App):
            args.append(t.arg)
            t = t.fn
        args.reverse()
        if isinstance(t, Lam) and args:
            fuel.tick()
            t = apps(subst_top(t.body, args[0]), *args[1:])
            continue
        return HeadForm(tuple(hints), t, tuple(args))


def head_reduce(t: Term, fuel: int = DEFAULT_FUEL) -> HeadForm | None:
    """Principal head normal form, or ``None`` if ``fuel`` head steps do not reach one."""
    try:
        return _head_normal(t, Fuel(fuel))
    except (OutOfFuel, RecursionError):
        return None


def _beta_nf(t: Term, fuel: Fuel) -> Term:
    hf = _head_normal(t, fuel)
    args = []
    for a in hf.args:
        args.append(_beta_nf(a, fuel))
    return hf._replace(args=tuple(args)).to_term()


def _eta_nf(t: Term, fuel: Fuel) -> Term:
    if isinstance(t, App):
        return App(_eta_nf(t.fn, fuel), _eta_nf(t.arg, fuel))
    if isinstance(t, Lam):
        body = _eta_nf(t.body, fuel)
        if isinstance(body, App) and body.arg == Var(0) and not occurs(body.fn, 0):
            fuel.tick()
            return shift(body.fn, -1)
        return Lam(body, t.hint)
    return t


def normalize(t: Term, mode: str = "beta", fuel: int = DEFAULT_FUEL) -> Term | None:
    """Normal form in ``mode`` ("beta" or "beta-eta"), or ``None`` when fuel runs out.

    Beta uses normal order (head reduction, then arguments left to right).
    For beta-eta the beta normal form is eta-normalized afterwards; eta
    postponement makes this the beta-eta normal form.
    """
    if mode not in ("beta", "beta-eta"):
        raise ValueError(f"unknown mode {mode!r}")
    budget = Fuel(fuel)
    try:
        nf = _beta_nf(t, budget)
        if mode == "beta-eta":
            nf = _eta_nf(nf, budget)
        return nf
    except (OutOfFuel, RecursionError):
        return None


def is_beta_normal(t: Term) -> bool:
    if isinstance(t, Lam):
        return is_beta_normal(t.body)
    if isinstance(t, App):
        return not isinstance(t.fn, Lam) and is_beta_normal(t.fn) and is_beta_normal(t.arg)
    return True


def eta_steps(t: Term) -> set[Term]:
    """Every term reachable from ``t`` by exactly one eta-reduction."""
    out = set()
    if isinstance(t, Lam):
        b = t.body
        if isinstance(b, App) and b.arg == Var(0) and not occurs(b.fn, 0):
            out.add(shift(b.fn, -1))
        out.update(Lam(s, t.hint) for s in eta_steps(b))
    elif isinstance(t, App):
        out.update(App(s, t.arg) for s in eta_steps(t.fn))
        out.update(App(t.fn, s) for s in eta_steps(t.arg))
    return out


def beta_step(t: Term, strategy: str = "leftmost") -> Term | None:
    """One beta step: leftmost-outermost or rightmost-innermost redex."""
    if strategy == "leftmost":
        if isinstance(t, App) and isinstance(t.fn, Lam):
            return subst_top(t.fn.body, t.arg)
        if isinstance(t, Lam):
            s = beta_step(t.body, strategy)
            return None if s is None else Lam(s, t.hint)
        if isinstance(t, App):
            s = beta_step(t.fn, strategy)
            if s is not None:
                return App(s, t.arg)
            s = beta_step(t.arg, strategy)
            return None if s is None else App(t.fn, s)
        return None
    if strategy == "rightmost":
        if isinstance(t, Lam):
            s = beta_step(t.body, strategy)
            return None if s is None else Lam(s, t.hint)
        if isinstance(t, App):
            s = beta_step(t.arg, strategy)
            if s is not None:
                return App(t.fn, s)
            s = beta_step(t.fn, strategy)
            if s is not None:
                return App(s, t.arg)
            if isinstance(t.fn, Lam):
                return subst_top(t.fn.body, t.arg)
        return None
    raise ValueError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Böhm approximants


class _Marker:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return (_marker, (self.name,))


def _marker(name):
    return {"BOTTOM": BOTTOM, "BCUT": BCUT, "UNKNOWN": UNKNOWN}[name]


BOTTOM = _Marker("BOTTOM")
BCUT = _Marker("BCUT")
UNKNOWN = _Marker("UNKNOWN")


@dataclass(frozen=True)
class BNode:
    """A solved node ``\\x1..xn. h`` with its children.

    ``head`` is a de Bruijn index counted from the innermost of all binders in
    scope (ancestors' and this node's), or a free name.
    """

    nbinders: int
    head: int | str
    children: tuple
    hints: tuple[str, ...] = field(default=(), compare=False)


def bohm_approx(t: Term, depth: int = DEFAULT_DEPTH, fuel: int = DEFAULT_FUEL):
    """Depth-``depth`` Böhm approximant.

    Each node gets its own budget of ``fuel`` head steps; an exhausted budget
    gives ``UNKNOWN``.  ``BOTTOM`` is never produced here.
    """

    def go(term, d):
        if d >= depth:
            return BCUT
        hf = head_reduce(term, fuel)
        if hf is None:
            return UNKNOWN
        head = hf.head.index if isinstance(hf.head, Var) else hf.head.name
        return BNode(len(hf.binders), head, tuple(go(a, d + 1) for a in hf.args), hf.binders)

    return go(t, 0)


def bohm_to_text(b) -> str:
    """Binders are named ``x<level>`` by absolute depth of binding."""

    def show(b, level):
        if b is BOTTOM:
            return "bot"
        if b is BCUT:
            return "cut"
        if b is UNKNOWN:
            return "?"
        names = [f"x{level + i}" for i in range(b.nbinders)]
        inner = level + b.nbinders
        head = b.head if isinstance(b.head, str) else f"x{inner - 1 - b.head}"
        s = (f"\\{' '.join(names)}. " if names else "") + head
        if b.children:
            s += " [" + ", ".join(show(c, inner) for c in b.children) + "]"
        return s

    return show(b, 0)


def bohm_agree(a, b) -> bool | None:
    """``True``/``False`` when determined; ``None`` if an ``UNKNOWN`` blocks the answer."""
    if a is UNKNOWN or b is UNKNOWN:
        return None
    if isinstance(a, BNode) and isinstance(b, BNode):
        if (a.nbinders, a.head, len(a.children)) != (b.nbinders, b.head, len(b.children)):
            return False
        blocked = False
        for x, y in zip(a.children, b.children):
            r = bohm_agree(x, y)
            if r is False:
                return False
            blocked |= r is None
        return None if blocked else True
    return a is b


def bohm_has_unknown(b) -> bool:
    if b is UNKNOWN:
        return True
    return isinstance(b, BNode) and any(bohm_has_unknown(c) for c in b.children)


# ---------------------------------------------------------------------------
# combinators


_BUILTIN_SRC = {
    "I": r"\x.x",
    "One": r"\x y. x y",
    "B": r"\f g x. f (g x)",
    "Y": r"\f. (\x. f (x x)) (\x. f (x x))",
}


def builtin(name: str) -> Term:
    if name in _BUILTIN_SRC:
        return parse(_BUILTIN_SRC[name])
    if name == "J":
        return App(builtin("Y"), parse(r"\f g x. g (f x)"))
    if name == "Omega":
        return parse(r"(\x. x x) (\x. x x)")
    raise KeyError(f"unknown builtin {name!r}")


BUILTINS = ("I", "One", "B", "Y", "J", "Omega")


def compose(m: Term, n: Term) -> Term:
    """``B m n``, unreduced."""
    return apps(builtin("B"), m, n)
