"""Equality and invertibility in the lambda theories beta, beta-eta, B, H+ and H*.

``beta`` and ``beta-eta`` compare fuel-bounded normal forms.  ``bohm:D``
compares Böhm approximants to depth ``D``.  ``hstar`` and ``hplus`` work on
hereditary permutations only: two of them are equal in H* when their trees
have the same maximal representative over all idempotents, and equal in H+
when they agree over finite idempotents.  Operands are either terms
recognized as finite hereditary permutations or rational trees (``Rpt``); a
term that is only certified to a finite depth gets a depth-qualified answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lam
from .bridge import fpt_to_term, hp_check, rpt_to_term, term_to_fpt
from .fpt import star, to_text as fpt_text
from .lam import Term
from .rational import (
    LEAF_MACHINE,
    IdemClass,
    Rpt,
    bisim_equal,
    dumps,
    from_fpt,
    r_max_rep,
    r_product,
    r_star,
    to_fpt,
)


class OutsideClassError(ValueError):
    """The operand is not in the input class the theory's oracle supports."""


@dataclass(frozen=True)
class Theory:
    kind: str  # beta, beta-eta, bohm, hstar, hplus
    depth: int | None = None

    def __str__(self):
        return f"bohm:{self.depth}" if self.kind == "bohm" else self.kind


def parse_theory(name: str) -> Theory:
    if name in ("beta", "beta-eta", "hstar", "hplus"):
        return Theory(name)
    if name.startswith("bohm:"):
        try:
            d = int(name[5:])
        except ValueError:
            raise ValueError(f"bad depth in {name!r}") from None
        if d < 1:
            raise ValueError("bohm depth must be >= 1")
        return Theory("bohm", d)
    raise ValueError(f"unknown theory {name!r} (expected beta, beta-eta, bohm:D, hstar, hplus)")


@dataclass(frozen=True)
class Verdict:
    outcome: str  # yes, no, unknown
    evidence: str = ""
    depth: int | None = None  # set when the answer only holds up to this depth

    @property
    def exit_code(self) -> int:
        return {"yes": 0, "no": 1, "unknown": 2}[self.outcome]

    def __str__(self):
        qual = f" (at depth {self.depth})" if self.depth is not None else ""
        return f"{self.outcome}{qual}"


IDENTITY = lam.builtin("I")


def _theory(th) -> Theory:
    return parse_theory(th) if isinstance(th, str) else th


def _nf_verdict(mode, m, n, fuel):
    a, b = lam.normalize(m, mode, fuel), lam.normalize(n, mode, fuel)
    if a is None or b is None:
        missing = "first" if a is None else "second"
        return Verdict("unknown", f"no {mode} normal form of the {missing} term within fuel {fuel}")
    evidence = f"nf: {lam.to_text(a)} | {lam.to_text(b)}"
    return Verdict("yes" if a == b else "no", evidence)


def _bohm_verdict(d, m, n, fuel):
    a, b = lam.bohm_approx(m, d, fuel), lam.bohm_approx(n, d, fuel)
    agree = lam.bohm_agree(a, b)
    evidence = f"BT_{d}: {lam.bohm_to_text(a)} | {lam.bohm_to_text(b)}"
    if agree is None:
        return Verdict("unknown", evidence)
    return Verdict("yes" if agree else "no", evidence, d if agree else None)


def _present(x, depth, fuel):
    """Resolve an operand to ``("rpt", Rpt)``, ``("cert", HpResult)`` or ``("unknown", why)``."""
    if isinstance(x, Rpt):
        return "rpt", x
    verdict = term_to_fpt(x, fuel)
    if verdict.outcome == "yes":
        return "rpt", from_fpt(verdict.tree)
    if verdict.outcome == "no":
        raise OutsideClassError(
            f"{lam.to_text(x)} is not a hereditary permutation: {verdict.reason}"
        )
    check = hp_check(x, depth, fuel)
    if check.ok:
        return "cert", check
    if check.failure_kind == "shape":
        raise OutsideClassError(
            f"{lam.to_text(x)} is not a hereditary permutation: {check.failure}"
        )
    return "unknown", f"{check.failure} at depth {depth}"


def _describe(r: Rpt) -> str:
    t = to_fpt(r)
    return fpt_text(t) if t is not None else dumps(r)


def equal(th, m, n, fuel: int = lam.DEFAULT_FUEL, depth: int = lam.DEFAULT_DEPTH) -> Verdict:
    th = _theory(th)
    if th.kind in ("beta", "beta-eta"):
        if isinstance(m, Rpt) or isinstance(n, Rpt):
            raise OutsideClassError(f"{th} compares terms, not tree presentations")
        return _nf_verdict(th.kind, m, n, fuel)
    if th.kind == "bohm":
        if isinstance(m, Rpt) or isinstance(n, Rpt):
            raise OutsideClassError(f"{th} compares terms, not tree presentations")
        return _bohm_verdict(th.depth, m, n, fuel)

    cls = IdemClass.E if th.kind == "hstar" else IdemClass.E_PRIME
    (ka, a), (kb, b) = _present(m, depth, fuel), _present(n, depth, fuel)
    if ka == "unknown" or kb == "unknown":
        return Verdict("unknown", a if ka == "unknown" else b)
    if ka == kb == "rpt":
        ma, mb = r_max_rep(a, cls), r_max_rep(b, cls)
        same = bisim_equal(ma, mb)
        tag = "max" if cls is IdemClass.E else "max'"
        return Verdict("yes" if same else "no", f"{tag}: {_describe(ma)} | {_describe(mb)}")
    # at least one side is an infinite term known only to a finite depth
    ba = a.approx if ka == "cert" else lam.bohm_approx(rpt_to_term(a), depth, fuel)
    bb = b.approx if kb == "cert" else lam.bohm_approx(rpt_to_term(b), depth, fuel)
    if lam.bohm_agree(ba, bb):
        return Verdict("yes", f"Böhm approximants agree to depth {depth}", depth)
    return Verdict(
        "unknown",
        f"HP-certified to depth {depth}; a full answer needs an FHP or a rational presentation",
    )


def invertible_in(th, m, fuel: int = lam.DEFAULT_FUEL, depth: int = lam.DEFAULT_DEPTH) -> Verdict:
    th = _theory(th)
    if th.kind in ("beta", "bohm"):
        v = equal(th, m, IDENTITY, fuel, depth)
        return Verdict(v.outcome, f"compared with I; {v.evidence}", v.depth)
    if isinstance(m, Rpt):
        if th.kind == "hstar":
            return Verdict("yes", "every rational permutation tree is a hereditary permutation")
        finite = to_fpt(m)
        if finite is None:
            return Verdict("no", "infinite tree: not a finite hereditary permutation")
        return Verdict("yes", f"finite tree {fpt_text(finite)}")
    verdict = term_to_fpt(m, fuel)
    if th.kind in ("beta-eta", "hplus"):
        if verdict.outcome == "yes":
            return Verdict("yes", f"FHP with tree {fpt_text(verdict.tree)}")
        return Verdict(verdict.outcome, verdict.reason)
    # hstar
    if verdict.outcome == "yes":
        return Verdict("yes", f"FHP with tree {fpt_text(verdict.tree)}")
    if verdict.outcome == "no":
        return Verdict("no", verdict.reason)
    check = hp_check(m, depth, fuel)
    if check.ok:
        return Verdict("yes", f"HP certificate: {fpt_text(check.tree)}", depth)
    if check.failure_kind == "shape":
        return Verdict("no", check.failure)
    return Verdict("unknown", check.failure)


def inverse_in(th, m, fuel: int = lam.DEFAULT_FUEL, depth: int = lam.DEFAULT_DEPTH) -> Term | None:
    """An inverse of ``m`` in ``th``, re-verified before it is returned."""
    th = _theory(th)
    if th.kind in ("beta", "bohm"):
        if isinstance(m, Rpt) or invertible_in(th, m, fuel, depth).outcome != "yes":
            return None
        candidate = IDENTITY
    elif isinstance(m, Rpt):
        if th.kind == "hstar":
            inv = r_star(m)
            unit_left = r_max_rep(r_product(m, inv), IdemClass.E)
            unit_right = r_max_rep(r_product(inv, m), IdemClass.E)
            if not (bisim_equal(unit_left, LEAF_MACHINE) and bisim_equal(unit_right, LEAF_MACHINE)):
                return None
            return rpt_to_term(inv)
        finite = to_fpt(m)
        if finite is None:
            return None
        m = fpt_to_term(finite)
        candidate = fpt_to_term(star(finite))
    else:
        verdict = term_to_fpt(m, fuel)
        if verdict.outcome != "yes":
            return None
        candidate = fpt_to_term(star(verdict.tree))
    check_th = th
    for comp in (lam.compose(m, candidate), lam.compose(candidate, m)):
        if equal(check_th, comp, IDENTITY, fuel, depth).outcome != "yes":
            return None
    return candidate
