import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from ptlab import lam
from ptlab.lam import App, BCUT, BNode, Free, Lam, UNKNOWN, Var, parse

I = lam.builtin("I")
OMEGA = lam.builtin("Omega")
FLIP = parse(r"\x y z. x z y")
GOLDEN = (Path(__file__).parent / "golden" / "terms.txt").read_text().splitlines()


def test_parse_examples():
    assert parse(r"\x.x") == Lam(Var(0))
    assert parse(r"\x y z. x y z") == parse(r"\x.(\y.(\z.(x y) z))")
    assert parse("λx.x") == I
    assert parse("f x") == App(Free("f"), Free("x"))


def test_parse_stray_paren():
    with pytest.raises(lam.TermSyntaxError) as exc:
        parse(r"\x. x)")
    assert exc.value.pos == 5


@pytest.mark.parametrize("bad", ["", r"\.x", r"\x x", "(x", "x ) y", r"\x. \y", "1x", "x $"])
def test_parse_errors(bad):
    with pytest.raises(lam.TermSyntaxError):
        parse(bad)


def test_golden_round_trip():
    for line in GOLDEN:
        assert lam.to_text(parse(line)) == line


def test_printer_avoids_capture():
    # binder hint collides with a free name
    t = Lam(App(Var(0), Free("x")), "x")
    s = lam.to_text(t)
    assert parse(s) == t
    assert s != r"\x. x x"


def test_alpha():
    assert lam.alpha_eq(parse(r"\x.x"), parse(r"\y.y"))
    assert not lam.alpha_eq(parse(r"\x y.x"), parse(r"\x y.y"))
    assert hash(parse(r"\a b. b a")) == hash(parse(r"\x y. y x"))


def test_normalize_examples():
    assert lam.normalize(OMEGA, "beta", 500) is None
    assert lam.normalize(lam.builtin("One"), "beta-eta", 100) == I
    assert lam.normalize(lam.compose(FLIP, FLIP), "beta", 1000) == parse(r"\x y z. x y z")
    bii = lam.normalize(lam.compose(I, I), "beta", 100)
    assert bii == I and lam.normalize(bii, "beta-eta", 100) == I
    with pytest.raises(ValueError):
        lam.normalize(I, "gamma")


def test_fuel_is_a_step_bound():
    t = parse(r"(\x. x) ((\x. x) y)")
    assert lam.normalize(t, "beta", 1) is None
    assert lam.normalize(t, "beta", 2) == Free("y")


def test_head_reduce():
    hf = lam.head_reduce(I, 10)
    assert hf.binders == ("x",) and hf.head == Var(0) and hf.args == ()
    assert lam.head_reduce(OMEGA, 1000) is None
    hf = lam.head_reduce(lam.builtin("Y"), 100)
    assert len(hf.binders) == 1 and hf.head == Var(0) and len(hf.args) == 1


def test_bohm_examples():
    assert lam.bohm_approx(I, 3, 100) == BNode(1, 0, ())
    assert lam.bohm_approx(OMEGA, 3, 1000) is UNKNOWN
    j = lam.bohm_approx(lam.builtin("J"), 2, 10_000)
    assert lam.bohm_to_text(j) == r"\x0 x1. x0 [\x2. x1 [cut]]"
    assert j.children[0].children == (BCUT,)


def test_builtins():
    assert lam.builtin("One") == parse(r"\x y. x y")
    assert lam.builtin("J") == App(lam.builtin("Y"), parse(r"\f g x. g (f x)"))
    with pytest.raises(KeyError):
        lam.builtin("K")


def test_y_fixed_point_approximants():
    f = Free("f")
    y = App(lam.builtin("Y"), f)
    for d in range(1, 5):
        assert lam.bohm_approx(y, d, 1000) == lam.bohm_approx(App(f, y), d, 1000)


def test_bohm_depth_prefix_and_fuel_monotone():
    def prefix(a, b):
        # a (shallower) agrees with b wherever a is not cut
        if a is BCUT:
            return True
        if not isinstance(a, BNode):
            return a is b
        return (a.nbinders, a.head, len(a.children)) == (b.nbinders, b.head, len(b.children)) and all(
            prefix(x, y) for x, y in zip(a.children, b.children)
        )

    def refines(a, b):
        # b resolves unknowns of a and changes nothing determined
        if a is UNKNOWN:
            return True
        if not isinstance(a, BNode):
            return a is b
        return (a.nbinders, a.head, len(a.children)) == (b.nbinders, b.head, len(b.children)) and all(
            refines(x, y) for x, y in zip(a.children, b.children)
        )

    terms = [lam.builtin("J"), parse(r"\x. x ((\y. y y) (\y. y y)) (\z. z)")]
    terms += [parse(line) for line in GOLDEN]
    for t in terms:
        for d in range(1, 5):
            assert prefix(lam.bohm_approx(t, d, 300), lam.bohm_approx(t, d + 1, 300))
        for fuel in (1, 3, 10, 50):
            assert refines(lam.bohm_approx(t, 4, fuel), lam.bohm_approx(t, 4, fuel * 10))


def test_compose_associative_on_normalizing_triples():
    rng = random.Random(7)
    pool = [parse(s) for s in (r"\x.x", r"\x y z. x z y", r"\x y. x y", r"\f g x. f (g x)", r"\x y z. x (y z)", r"\x y. y x")]
    for _ in range(60):
        a, b, c = (rng.choice(pool) for _ in range(3))
        lhs = lam.normalize(lam.compose(lam.compose(a, b), c), "beta", 2000)
        rhs = lam.normalize(lam.compose(a, lam.compose(b, c)), "beta", 2000)
        assert lhs is not None and lhs == rhs


# -- random closed terms --------------------------------------------------


def closed_terms(max_depth=5):
    def build(scope, depth):
        leaves = [st.just(Var(i)) for i in range(scope)]
        if depth == 0 or not scope:
            body = st.deferred(lambda: build(scope + 1, depth - 1)).map(lambda b: Lam(b))
            return body if not leaves else st.one_of(*leaves)
        sub = st.deferred(lambda: build(scope, depth - 1))
        return st.one_of(
            *leaves,
            st.deferred(lambda: build(scope + 1, depth - 1)).map(lambda b: Lam(b)),
            st.tuples(sub, sub).map(lambda p: App(*p)),
        )

    return build(0, max_depth)


@settings(max_examples=300, deadline=None)
@given(closed_terms())
def test_confluence_witness(t):
    a = lam.normalize(t, "beta", 300)
    if a is None:
        return
    u = t
    for _ in range(300):
        nxt = lam.beta_step(u, "rightmost")
        if nxt is None:
            assert u == a
            return
        u = nxt


@settings(max_examples=300, deadline=None)
@given(closed_terms())
def test_eta_steps_on_beta_normal_forms(t):
    nf = lam.normalize(t, "beta", 300)
    if nf is None:
        return
    for r in lam.eta_steps(nf):
        assert lam.is_beta_normal(r)


@settings(max_examples=200, deadline=None)
@given(closed_terms())
def test_print_parse_round_trip(t):
    assert parse(lam.to_text(t)) == t


def test_deep_terms_do_not_overflow():
    t = I
    for _ in range(3000):
        t = App(I, t)
    assert lam.normalize(t, "beta", 10_000) == I
