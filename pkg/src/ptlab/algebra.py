"""Green's relations, maximal subgroups, the group of maximal elements, and
brute-force law checking over enumerated permutation trees."""

from __future__ import annotations

import itertools
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import fpt as F
from . import rational as R
from .fpt import Fpt


class NotIdempotentError(ValueError):
    pass


class NotMaximalError(ValueError):
    pass


def green_class(kind: str, t: Fpt) -> frozenset[Fpt]:
    """The L-, R- or H-class of ``t``.

    Members share the skeleton size of ``t`` (the norm of ``t t*`` and ``t* t``),
    so only trees of exactly that size are searched.
    """
    if kind not in ("L", "R", "H"):
        raise ValueError(f"unknown Green relation {kind!r}")
    left = F.product(F.star(t), t)
    right = F.product(t, F.star(t))
    out = []
    for u in F.trees_of_size(F.norm(t)):
        in_l = F.product(F.star(u), u) == left
        in_r = F.product(u, F.star(u)) == right
        if (kind == "L" and in_l) or (kind == "R" and in_r) or (kind == "H" and in_l and in_r):
            out.append(u)
    return frozenset(out)


def max_subgroup(e: Fpt) -> frozenset[Fpt]:
    """The maximal subgroup at idempotent ``e``; raises on non-idempotents."""
    if not F.is_idempotent(e):
        raise NotIdempotentError(f"{e} is not idempotent")
    group = frozenset(
        u
        for u in F.trees_of_size(F.norm(e))
        if F.product(u, F.star(u)) == e and F.product(F.star(u), u) == e
    )
    for a in group:
        if F.product(a, e) != a or F.product(e, a) != a or F.star(a) not in group:
            raise AssertionError(f"subgroup at {e} is not closed at {a}")
        for b in group:
            if F.product(a, b) not in group:
                raise AssertionError(f"subgroup at {e} is not closed under product")
    return group


def group_product_max(t: Fpt, u: Fpt) -> Fpt:
    """Product in the group of maximal elements: ``(t u)`` made maximal."""
    for x in (t, u):
        if F.max_rep(x) != x:
            raise NotMaximalError(f"{x} is not maximal")
    return F.max_rep(F.product(t, u))


def brute_sigma(t: Fpt, u: Fpt) -> bool:
    """Common lower bound test with the witness ``t u* u``."""
    w = F.product(t, F.product(F.star(u), u))
    return F.natural_leq(w, t) and F.natural_leq(w, u)


def factorizations(t: Fpt) -> list[tuple[Fpt, Fpt]]:
    """All ``(v, w)`` with ``v w = t``; both factors are no larger than ``t``."""
    pool = F.enumerate_fpt(F.norm(t))
    return [(v, w) for v in pool for w in pool if F.product(v, w) == t]


def generated_submonoid(gens, cap: int = 10_000) -> frozenset[Fpt]:
    """Close ``gens`` and the unit under product; raises if ``cap`` elements are exceeded."""
    elems = {F.LEAF, *gens}
    frontier = list(elems)
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                for p in (F.product(a, g), F.product(g, a)):
                    if p not in elems:
                        elems.add(p)
                        new.append(p)
                        if len(elems) > cap:
                            raise RuntimeError("submonoid exceeded the iteration cap")
        frontier = new
    return frozenset(elems)


# ---------------------------------------------------------------------------
# law suite


@dataclass
class LawReport:
    law: str
    checked: int
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "checked": self.checked,
            "passed": self.passed,
            "counterexamples": [[_show(x) for x in cx] for cx in self.counterexamples],
        }


def _show(x) -> str:
    if isinstance(x, R.Rpt):
        return R.dumps(x)
    return F.to_text(x)


MAX_COUNTEREXAMPLES = 5


def _check(name, cases, pred) -> LawReport:
    report = LawReport(name, 0)
    for case in cases:
        report.checked += 1
        if not pred(*case):
            if len(report.counterexamples) < MAX_COUNTEREXAMPLES:
                report.counterexamples.append(case)
    return report


def broken_product(t: Fpt, u: Fpt) -> Fpt:
    """Product with the label composition skipped (every label becomes the identity).

    Children are still reindexed as in the real product.  Used to check that
    the law suite has teeth.
    """
    n, m = t.arity, u.arity
    if n == 0 and m == 0:
        return F.LEAF
    kids = []
    for i in range(max(n, m)):
        if i < m:
            j = u.perm[i]
            kids.append(broken_product(u.children[i], t.children[j - 1] if j <= n else F.LEAF))
        else:
            kids.append(t.children[i])
    return Fpt(tuple(range(1, max(n, m) + 1)), tuple(kids))


def _fpt_laws(max_nodes: int, ternary_nodes: int, product: Callable) -> list[tuple[str, Callable]]:
    """Each entry is ``(name, thunk)``; the thunk returns a LawReport."""
    star = F.star
    U = F.enumerate_fpt(max_nodes)
    pairs = lambda: itertools.product(U, U)  # noqa: E731
    idem = [t for t in U if F.is_idempotent(t)]
    singles = [(t,) for t in U]
    small = F.enumerate_fpt(min(ternary_nodes, max_nodes))

    def e_unitary(e, v):
        return not (F.is_idempotent(e) and F.natural_leq(e, v)) or F.is_idempotent(v)

    def f_inverse(t):
        m = F.max_rep(t)
        up = F.upset(t)
        return m in up and all(F.natural_leq(u, m) for u in up)

    def leq_definition(t, u):
        by_def = any(product(u, e) == t for e in F.idempotents(F.norm(t)))
        return F.natural_leq(t, u) == by_def

    def norm_laws(t, u):
        tu = product(t, u)
        ok = max(F.norm(t), F.norm(u)) <= F.norm(tu) <= F.norm(t) + F.norm(u)
        if F.natural_leq(t, u) and t != u:
            ok &= F.norm(u) < F.norm(t)
        return ok

    def norm_unary(t):
        return F.norm(star(t)) == F.norm(t) == F.norm(product(t, star(t))) == F.norm(product(star(t), t))

    def covering_chain(t, u):
        if not F.natural_leq(t, u) or t == u:
            return True
        up = F.upset(t)
        reach, todo = {t}, [t]
        while todo:
            x = todo.pop()
            for y in up:
                if y not in reach and F.covers(x, y):
                    reach.add(y)
                    todo.append(y)
        return u in reach

    def order_compat(s, t, u, v):
        if F.natural_leq(s, t) and F.natural_leq(u, v):
            return F.natural_leq(star(s), star(t)) and F.natural_leq(product(s, u), product(t, v))
        return True

    def idem_collapse(e):
        return not F.is_idempotent(e) or F.sigma_equiv(e, F.LEAF)

    def sigma_hom(t, u):
        return F.max_rep(product(t, u)) == F.max_rep(product(F.max_rep(t), F.max_rep(u)))

    def leq_prime_agrees(t, u):
        rt, ru = R.from_fpt(t), R.from_fpt(u)
        return F.natural_leq(t, u) == R.r_leq(rt, ru, R.IdemClass.E_PRIME)

    def max_prime_agrees(t):
        return R.to_fpt(R.r_max_rep(R.from_fpt(t), R.IdemClass.E_PRIME)) == F.max_rep(t)

    def l_right_congruence(u, v, w):
        if F.product(star(u), u) != F.product(star(v), v):
            return True
        uw, vw = product(u, w), product(v, w)
        return product(star(uw), uw) == product(star(vw), vw)

    def r_left_congruence(u, v, w):
        if F.product(u, star(u)) != F.product(v, star(v)):
            return True
        wu, wv = product(w, u), product(w, v)
        return product(wu, star(wu)) == product(wv, star(wv))

    quad_pool = F.enumerate_fpt(min(3, max_nodes))
    return [
        ("inverse: (t*)* = t", lambda: _check("inverse: (t*)* = t", singles, lambda t: star(star(t)) == t)),
        ("inverse: t t* t = t", lambda: _check("inverse: t t* t = t", singles, lambda t: product(product(t, star(t)), t) == t)),
        ("inverse: (t u)* = u* t*", lambda: _check("inverse: (t u)* = u* t*", pairs(), lambda t, u: star(product(t, u)) == product(star(u), star(t)))),
        ("inverse: idempotents commute", lambda: _check("inverse: idempotents commute", itertools.product(idem, idem), lambda e, f: product(e, f) == product(f, e))),
        ("inverse: (t t*)(u u*) = (u u*)(t t*)", lambda: _check("inverse: (t t*)(u u*) = (u u*)(t t*)", pairs(), lambda t, u: product(product(t, star(t)), product(u, star(u))) == product(product(u, star(u)), product(t, star(t))))),
        ("monoid: unit", lambda: _check("monoid: unit", singles, lambda t: product(t, F.LEAF) == t == product(F.LEAF, t))),
        ("monoid: associativity", lambda: _check("monoid: associativity", itertools.product(small, small, small), lambda t, u, v: product(product(t, u), v) == product(t, product(u, v)))),
        ("idempotent: tt = t iff identity labels", lambda: _check("idempotent: tt = t iff identity labels", singles, lambda t: (product(t, t) == t) == F.is_idempotent(t))),
        ("E-unitary", lambda: _check("E-unitary", itertools.product(idem, U), e_unitary)),
        ("F-inverse: max_rep is the maximum of the up-set", lambda: _check("F-inverse: max_rep is the maximum of the up-set", singles, f_inverse)),
        ("order: structural = algebraic", lambda: _check("order: structural = algebraic", itertools.product(F.enumerate_fpt(min(max_nodes, 5)), repeat=2), leq_definition)),
        ("norm: bounds on products and order", lambda: _check("norm: bounds on products and order", pairs(), norm_laws)),
        ("norm: star and skeleton", lambda: _check("norm: star and skeleton", singles, norm_unary)),
        ("covering: chains fill every interval", lambda: _check("covering: chains fill every interval", itertools.product(F.enumerate_fpt(min(max_nodes, 5)), repeat=2), covering_chain)),
        ("order: compatible with star and product", lambda: _check("order: compatible with star and product", itertools.product(quad_pool, repeat=4), order_compat)),
        ("sigma: brute force = max_rep", lambda: _check("sigma: brute force = max_rep", pairs(), lambda t, u: brute_sigma(t, u) == F.sigma_equiv(t, u))),
        ("sigma: idempotents collapse to the unit", lambda: _check("sigma: idempotents collapse to the unit", singles, idem_collapse)),
        ("sigma: max_rep is a homomorphism onto the group", lambda: _check("sigma: max_rep is a homomorphism onto the group", pairs(), sigma_hom)),
        ("green: L right congruence", lambda: _check("green: L right congruence", itertools.product(small, repeat=3), l_right_congruence)),
        ("green: R left congruence", lambda: _check("green: R left congruence", itertools.product(small, repeat=3), r_left_congruence)),
        ("finite: <=' agrees with <=", lambda: _check("finite: <=' agrees with <=", itertools.product(F.enumerate_fpt(min(max_nodes, 4)), repeat=2), leq_prime_agrees)),
        ("finite: max' agrees with max", lambda: _check("finite: max' agrees with max", singles, max_prime_agrees)),
    ]


def _rational_laws(max_states: int, sample: int, seed: int) -> list[tuple[str, Callable]]:
    corpus = R.corpus(max_states)
    small = [r for r in corpus if len(r) <= 2]
    rng = random.Random(seed)
    sampled = [(rng.choice(corpus), rng.choice(corpus)) for _ in range(sample)]
    pairs = list(itertools.product(small, small)) + sampled
    E, EP = R.IdemClass.E, R.IdemClass.E_PRIME
    eq = R.bisim_equal
    singles = [(r,) for r in corpus]

    def e_prime_unitary(f, r):
        if R.in_idem_class(f, EP) and R.r_leq(f, r, EP):
            return R.in_idem_class(r, EP)
        return True

    def lower_bound(t, u):
        # v = the common E'-maximum; both t and u lie below it when sigma' holds
        if not R.r_sigma_equiv(t, u, EP):
            return True
        v = R.r_max_rep(t, EP)
        w = R.common_lower_bound(t, u, v)
        return R.r_leq(w, t, EP) and R.r_leq(w, u, EP)

    def max_prime_infinite(r):
        if R.is_finite(r):
            return True
        return not R.is_finite(R.r_max_rep(r, EP))

    def idem_commute(r, s):
        e, f = R.r_product(r, R.r_star(r)), R.r_product(s, R.r_star(s))
        return eq(R.r_product(e, f), R.r_product(f, e))

    return [
        ("rational: (r*)* = r", lambda: _check("rational: (r*)* = r", singles, lambda r: eq(R.r_star(R.r_star(r)), r))),
        ("rational: r r* r = r", lambda: _check("rational: r r* r = r", singles, lambda r: eq(R.r_product(R.r_product(r, R.r_star(r)), r), r))),
        ("rational: (r s)* = s* r*", lambda: _check("rational: (r s)* = s* r*", pairs, lambda r, s: eq(R.r_star(R.r_product(r, s)), R.r_product(R.r_star(s), R.r_star(r))))),
        ("rational: idempotents commute", lambda: _check("rational: idempotents commute", pairs, idem_commute)),
        ("rational: E'-unitary", lambda: _check("rational: E'-unitary", pairs, e_prime_unitary)),
        ("rational: <=' implies <=", lambda: _check("rational: <=' implies <=", pairs, lambda r, s: not R.r_leq(r, s, EP) or R.r_leq(r, s, E))),
        ("rational: sigma' within sigma", lambda: _check("rational: sigma' within sigma", pairs, lambda r, s: not R.r_sigma_equiv(r, s, EP) or R.r_sigma_equiv(r, s, E))),
        ("rational: common lower bound witness", lambda: _check("rational: common lower bound witness", pairs, lower_bound)),
        ("rational: max' of an infinite tree is infinite", lambda: _check("rational: max' of an infinite tree is infinite", singles, max_prime_infinite)),
    ]


def _run(task):
    name, max_nodes, ternary_nodes, max_states, sample, seed, mutate = task
    product = broken_product if mutate else F.product
    laws = dict(_fpt_laws(max_nodes, ternary_nodes, product))
    if name in laws:
        return laws[name]()
    return dict(_rational_laws(max_states, sample, seed))[name]()


def law_names(rational: bool = True) -> list[str]:
    names = [n for n, _ in _fpt_laws(1, 1, F.product)]
    if rational:
        names += [n for n, _ in _rational_laws(1, 0, 0)]
    return names


def law_suite(
    max_nodes: int = 6,
    *,
    ternary_nodes: int = 4,
    rational: bool = True,
    max_states: int = 3,
    sample: int = 2000,
    seed: int = 0,
    product: Callable | None = None,
    jobs: int = 1,
) -> list[LawReport]:
    """Run every algebraic law over the enumerated universe; reports sorted by law name.

    ``product`` replaces the tree product in the finite laws (mutation testing).
    Binary rational laws run on all pairs of machines with at most two states
    plus ``sample`` random pairs drawn with ``seed`` from the full corpus.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    if product is not None and product not in (F.product, broken_product):
        laws = _fpt_laws(max_nodes, ternary_nodes, product)
        if rational:
            laws += _rational_laws(max_states, sample, seed)
        return sorted((thunk() for _, thunk in laws), key=lambda r: r.law)
    mutate = product is broken_product
    names = law_names(rational)
    tasks = [(n, max_nodes, ternary_nodes, max_states, sample, seed, mutate) for n in names]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            reports = list(pool.map(_run, tasks))
    else:
        reports = [_run(t) for t in tasks]
    return sorted(reports, key=lambda r: r.law)


def reports_to_json(reports: list[LawReport]) -> str:
    return json.dumps(
        {"passed": all(r.passed for r in reports), "laws": [r.to_json() for r in reports]},
        indent=2,
    )


def reports_to_text(reports: list[LawReport]) -> str:
    lines = []
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.law}  ({r.checked} instances)")
        for cx in r.counterexamples:
            lines.append("      counterexample: " + " ; ".join(_show(x) for x in cx))
    return "\n".join(lines)
