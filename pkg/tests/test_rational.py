import itertools
import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from ptlab import fpt as F
from ptlab import rational as R
from ptlab.rational import IdemClass, J_MACHINE, LEAF_MACHINE, Rpt

from strategies import fpts

E, EP = IdemClass.E, IdemClass.E_PRIME
GOLDEN = Path(__file__).parent / "golden"
J2 = R.loads((GOLDEN / "j2.json").read_text())
FLIP = F.parse_fpt("([2 1]; *, *)")
CORPUS = R.corpus(3)
SMALL = [r for r in CORPUS if len(r) <= 2]


def test_corpus_size():
    # distinct minimized machines, <= 3 states, arity <= 2
    assert len(CORPUS) == 1906
    assert len(SMALL) == 55
    assert len({R.dumps(r) for r in CORPUS}) == len(CORPUS)


def test_unfold():
    assert R.unfold_to_depth(LEAF_MACHINE, 3) == F.LEAF
    assert F.to_text(R.unfold_to_depth(J_MACHINE, 2)) == "([1]; ([1]; cut))"
    assert R.unfold_to_depth(J2, 0) is F.CUT


def test_product_examples():
    for r in SMALL:
        assert R.bisim_equal(R.r_product(r, LEAF_MACHINE), r)
        assert R.bisim_equal(R.r_product(LEAF_MACHINE, r), r)
    assert R.bisim_equal(R.r_product(J_MACHINE, J_MACHINE), J_MACHINE)
    assert R.bisim_equal(R.r_star(J_MACHINE), J_MACHINE)


def test_cross_module_oracles():
    U = F.enumerate_fpt(4)
    for t, u in itertools.product(U, repeat=2):
        rt, ru = R.from_fpt(t), R.from_fpt(u)
        assert R.to_fpt(R.r_product(rt, ru)) == F.product(t, u)
        assert R.r_leq(rt, ru, E) == F.natural_leq(t, u)
    for t in F.enumerate_fpt(5):
        r = R.from_fpt(t)
        assert R.to_fpt(r) == t
        assert R.to_fpt(R.r_star(r)) == F.star(t)
        assert R.bisim_equal(R.r_max_rep(r, E), R.from_fpt(F.max_rep(t)))


def test_idem_classes():
    assert R.in_idem_class(J_MACHINE, E)
    assert not R.in_idem_class(J_MACHINE, EP)
    assert R.in_idem_class(LEAF_MACHINE, EP)
    assert not R.in_idem_class(R.from_fpt(FLIP), E)


def test_bisim():
    assert R.bisim_equal(J_MACHINE, J2)
    assert not R.bisim_equal(J_MACHINE, LEAF_MACHINE)
    for r in SMALL:
        assert R.bisim_equal(r, r)
        assert R.bisim_equal(R.minimize(r), r)


def test_j_separation():
    assert R.r_leq(J_MACHINE, LEAF_MACHINE, E)
    assert not R.r_leq(J_MACHINE, LEAF_MACHINE, EP)
    assert R.bisim_equal(R.r_max_rep(J_MACHINE, E), LEAF_MACHINE)
    assert R.bisim_equal(R.r_max_rep(J_MACHINE, EP), J_MACHINE)
    assert R.r_sigma_equiv(J_MACHINE, LEAF_MACHINE, E)
    assert not R.r_sigma_equiv(J_MACHINE, LEAF_MACHINE, EP)
    for cls in (E, EP):
        assert R.bisim_equal(R.r_max_rep(LEAF_MACHINE, cls), LEAF_MACHINE)
        assert R.r_leq(J2, J2, cls) and R.r_sigma_equiv(J2, J2, cls)
    assert R.to_fpt(J_MACHINE) is None
    assert R.from_fpt(F.LEAF) == LEAF_MACHINE


def test_json_format():
    doc = json.loads((GOLDEN / "flipflop.json").read_text())
    r = R.from_dict(doc)
    assert len(r) == 3
    assert R.bisim_equal(R.loads(R.dumps(r)), r)
    with pytest.raises(R.RptFormatError, match="dangling"):
        R.from_dict({"root": "a", "states": {"a": {"perm": [1], "children": ["z"]}}})
    with pytest.raises(R.RptFormatError, match="length"):
        R.from_dict({"root": "a", "states": {"a": {"perm": [1], "children": []}}})
    with pytest.raises(R.RptFormatError):
        R.from_dict({"root": "q", "states": {"a": {"perm": [], "children": []}}})
    with pytest.raises(R.RptFormatError):
        R.loads("{not json")


def test_unreachable_states_are_trimmed():
    r = R.from_dict({"root": "a", "states": {"a": {"perm": [], "children": []}, "b": {"perm": [1], "children": ["b"]}}})
    assert len(R.minimize(r)) == 1


def test_infinite_max_prime_stays_infinite():
    for r in CORPUS:
        if not R.is_finite(r):
            assert not R.is_finite(R.r_max_rep(r, EP))


def test_max_rep_may_become_finite():
    # e^m is finite for J while e^m' is not
    assert R.is_finite(R.r_max_rep(J_MACHINE, E))
    assert not R.is_finite(R.r_max_rep(J_MACHINE, EP))


corpus_machines = st.sampled_from(CORPUS)


@settings(max_examples=300, deadline=None)
@given(corpus_machines, corpus_machines)
def test_depth_coherence(r, s):
    for d in range(4):
        lhs = R.unfold_to_depth(R.r_product(r, s), d)
        rhs = F.truncate(F.product(R.unfold_to_depth(r, d + 1), R.unfold_to_depth(s, d + 1)), d)
        assert lhs == rhs


@settings(max_examples=300, deadline=None)
@given(corpus_machines, corpus_machines)
def test_rational_laws_random(r, s):
    assert R.bisim_equal(R.r_star(R.r_product(r, s)), R.r_product(R.r_star(s), R.r_star(r)))
    assert R.bisim_equal(R.r_product(R.r_product(r, R.r_star(r)), r), r)
    if R.r_leq(r, s, EP):
        assert R.r_leq(r, s, E)
    if R.r_sigma_equiv(r, s, EP):
        assert R.r_sigma_equiv(r, s, E)


@given(fpts, fpts)
def test_finite_sigma_classes_coincide(t, u):
    rt, ru = R.from_fpt(t), R.from_fpt(u)
    assert R.r_sigma_equiv(rt, ru, E) == R.r_sigma_equiv(rt, ru, EP) == F.sigma_equiv(t, u)


def test_rpt_validation():
    with pytest.raises(ValueError):
        Rpt((((1,), (5,)),))
    with pytest.raises(ValueError):
        Rpt((((1, 2), (0,)),))
