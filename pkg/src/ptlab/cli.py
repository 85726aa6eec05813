"""``ptlab`` command line.

Exit codes: 0 yes/success, 1 no, 2 unknown, 3 or more for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import algebra as A
from . import bridge
from . import fpt as F
from . import lam
from . import rational as R
from . import theories as T
from .render import render_dot

YES, NO, UNKNOWN, ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Out:
    """Collects one result and prints it in the selected format."""

    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, text: str, code: int = YES, **data) -> int:
        if self.fmt == "json":
            doc = {"result": text, "exit": code, **data}
            print(json.dumps(doc, sort_keys=True, ensure_ascii=False))
        else:
            print(text)
        return code

    def verdict(self, v) -> int:
        data = {"evidence": v.evidence}
        if getattr(v, "depth", None) is not None:
            data["depth"] = v.depth
        if self.fmt == "text":
            print(str(v))
            if v.evidence:
                print(v.evidence)
            return v.exit_code
        return self.emit(v.outcome, v.exit_code, **data)

    def boolean(self, b: bool) -> int:
        return self.emit("yes" if b else "no", YES if b else NO)


# ---------------------------------------------------------------------------
# inputs


def _read(arg: str) -> str:
    if arg.startswith("@"):
        return Path(arg[1:]).read_text(encoding="utf-8").strip()
    return arg


def _listing(trees) -> list[str]:
    """Set output in enumeration order: by size, then by text."""
    return [F.to_text(x) for x in sorted(trees, key=lambda x: (F.norm(x), F.to_text(x)))]


def read_term(arg: str) -> lam.Term:
    if arg.startswith(":"):
        return lam.builtin(arg[1:])
    return lam.parse(_read(arg))


def read_tree(arg: str, allow_cut: bool = False):
    return F.parse_fpt(_read(arg), allow_cut=allow_cut)


def read_rpt(arg: str) -> R.Rpt:
    path = arg[1:] if arg.startswith("@") else arg
    return R.loads(Path(path).read_text(encoding="utf-8"))


def read_operand(arg: str):
    """A term, or an Rpt when the argument names a JSON document."""
    if arg.startswith(":"):
        return lam.builtin(arg[1:])
    if arg.startswith("@"):
        text = _read(arg)
        return R.loads(text) if text.startswith("{") else lam.parse(text)
    return lam.parse(arg)


def read_any(arg: str, depth: int, fuel: int):
    """Renderable input: a tree literal, an Rpt document, or a term (shown as its approximant)."""
    if arg.startswith(":"):
        return lam.bohm_approx(lam.builtin(arg[1:]), depth, fuel)
    text = _read(arg)
    if text.startswith("{"):
        return R.loads(text)
    if text.startswith(("(", "*", "cut")):
        try:
            return F.parse_fpt(text, allow_cut=True)
        except F.FptSyntaxError:
            pass
    return lam.bohm_approx(lam.parse(text), depth, fuel)


# ---------------------------------------------------------------------------
# handlers


def cmd_term(a, out: Out) -> int:
    op = a.op
    if op == "parse":
        return out.emit(lam.to_text(read_term(a.term)))
    if op == "normalize":
        nf = lam.normalize(read_term(a.term), a.mode, a.fuel)
        if nf is None:
            return out.emit("unknown", UNKNOWN, reason=f"no {a.mode} normal form within fuel {a.fuel}")
        return out.emit(lam.to_text(nf))
    if op == "hnf":
        hf = lam.head_reduce(read_term(a.term), a.fuel)
        if hf is None:
            return out.emit("unknown", UNKNOWN, reason=f"no head normal form within fuel {a.fuel}")
        return out.emit(lam.to_text(hf.to_term()))
    if op == "bt":
        b = lam.bohm_approx(read_term(a.term), a.depth, a.fuel)
        return out.emit(lam.bohm_to_text(b), UNKNOWN if lam.bohm_has_unknown(b) else YES)
    if op == "compose":
        m = lam.compose(read_term(a.term), read_term(a.other))
        nf = lam.normalize(m, "beta", a.fuel)
        if nf is None:
            return out.emit(lam.to_text(m), UNKNOWN, reason="composition has no beta-normal form within fuel")
        return out.emit(lam.to_text(nf))
    if op == "invert":
        m = read_term(a.term)
        verdict = bridge.term_to_fpt(m, a.fuel)
        if verdict.outcome != "yes":
            code = NO if verdict.outcome == "no" else UNKNOWN
            return out.emit(verdict.outcome, code, reason=verdict.reason)
        return out.emit(lam.to_text(bridge.fpt_to_term(F.star(verdict.tree))))
    raise AssertionError(op)


def cmd_tree(a, out: Out) -> int:
    op = a.op
    t = read_tree(a.tree)
    u = read_tree(a.other) if a.other is not None else None
    binary = {"product", "leq", "leq-prime", "meet", "covers"}
    if op in binary and u is None:
        raise UsageError(f"tree {op} needs two trees")
    if op not in binary and u is not None:
        raise UsageError(f"tree {op} takes one tree")
    show = F.to_text
    if op == "parse":
        return out.emit(show(t))
    if op == "product":
        return out.emit(show(F.product(t, u)))
    if op == "star":
        return out.emit(show(F.star(t)))
    if op == "max":
        return out.emit(show(F.max_rep(t)))
    if op == "max-prime":
        return out.emit(show(R.to_fpt(R.r_max_rep(R.from_fpt(t), R.IdemClass.E_PRIME))))
    if op == "leq":
        return out.boolean(F.natural_leq(t, u))
    if op == "leq-prime":
        return out.boolean(R.r_leq(R.from_fpt(t), R.from_fpt(u), R.IdemClass.E_PRIME))
    if op == "meet":
        m = F.meet(t, u)
        if m is None:
            return out.emit("none", NO)
        return out.emit(show(m))
    if op == "covers":
        return out.boolean(F.covers(t, u))
    if op == "norm":
        return out.emit(str(F.norm(t)))
    if op == "upset":
        items = _listing(F.upset(t))
        if out.fmt == "json":
            return out.emit("\n".join(items), YES, items=items)
        return out.emit("\n".join(items))
    if op == "to-term":
        return out.emit(lam.to_text(bridge.fpt_to_term(t)))
    raise AssertionError(op)


def cmd_rtree(a, out: Out) -> int:
    op = a.op
    r = read_rpt(a.file)
    s = read_rpt(a.other) if a.other is not None else None
    binary = {"product", "leq", "equal"}
    if op in binary and s is None:
        raise UsageError(f"rtree {op} needs two files")
    if op not in binary and s is not None:
        raise UsageError(f"rtree {op} takes one file")
    cls = R.IdemClass.E_PRIME if a.prime else R.IdemClass.E

    def show(x):
        return out.emit(R.dumps(R.minimize(x)))

    if op == "product":
        return show(R.r_product(r, s))
    if op == "star":
        return show(R.r_star(r))
    if op == "max":
        return show(R.r_max_rep(r, cls))
    if op == "leq":
        return out.boolean(R.r_leq(r, s, cls))
    if op == "equal":
        return out.boolean(R.bisim_equal(r, s))
    if op == "to-term":
        return out.emit(lam.to_text(bridge.rpt_to_term(r)))
    if op == "unfold":
        return out.emit(F.to_text(R.unfold_to_depth(r, a.depth)))
    raise AssertionError(op)


def cmd_theory(a, out: Out) -> int:
    th = T.parse_theory(a.theory)
    m = read_operand(a.term)
    if a.op == "equal":
        if a.other is None:
            raise UsageError("theory equal needs two operands")
        return out.verdict(T.equal(th, m, read_operand(a.other), a.fuel, a.depth))
    if a.other is not None:
        raise UsageError(f"theory {a.op} takes one operand")
    if a.op == "invertible":
        return out.verdict(T.invertible_in(th, m, a.fuel, a.depth))
    if a.op == "inverse":
        inv = T.inverse_in(th, m, a.fuel, a.depth)
        if inv is None:
            v = T.invertible_in(th, m, a.fuel, a.depth)
            code = v.exit_code if v.outcome != "yes" else UNKNOWN
            return out.emit("none", code, reason=v.evidence)
        return out.emit(lam.to_text(inv))
    raise AssertionError(a.op)


def cmd_algebra(a, out: Out) -> int:
    if a.op == "green":
        if a.relation not in ("L", "R", "H"):
            raise UsageError("green needs a relation L, R or H")
        members = _listing(A.green_class(a.relation, read_tree(a.tree)))
        return out.emit("\n".join(members), YES, items=members) if out.fmt == "json" else out.emit("\n".join(members))
    if a.op == "subgroup":
        members = _listing(A.max_subgroup(read_tree(a.tree)))
        return out.emit("\n".join(members), YES, items=members) if out.fmt == "json" else out.emit("\n".join(members))
    if a.op == "sigma":
        t, u = read_tree(a.tree), read_tree(a.other)
        return out.boolean(F.sigma_equiv(t, u))
    raise AssertionError(a.op)


def cmd_oracle(a, out: Out) -> int:
    reports = A.law_suite(
        a.max_nodes,
        ternary_nodes=min(a.max_nodes, 4),
        rational=not a.no_rational,
        sample=a.sample,
        seed=a.seed,
        jobs=a.jobs,
    )
    ok = all(r.passed for r in reports)
    if out.fmt == "json":
        doc = json.loads(A.reports_to_json(reports))
        doc.update(max_nodes=a.max_nodes, seed=a.seed, sample=a.sample)
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"max-nodes {a.max_nodes}, seed {a.seed}, rational sample {a.sample}")
        print(A.reports_to_text(reports))
        print("all laws pass" if ok else "FAILURES")
    return YES if ok else NO


def cmd_render(a, out: Out) -> int:
    sys.stdout.write(render_dot(read_any(a.input, a.depth, a.fuel)))
    return YES


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--fuel", type=int, default=lam.DEFAULT_FUEL, help="reduction steps per normalization (default 10000)")
    p.add_argument("--depth", type=int, default=lam.DEFAULT_DEPTH, help="approximation depth (default 8)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="ptlab", description="Permutation trees and invertible lambda terms.")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    term = sub.add_parser("term", parents=[common], help="lambda terms")
    term.add_argument("op", choices=("parse", "normalize", "hnf", "bt", "compose", "invert"))
    term.add_argument("term")
    term.add_argument("other", nargs="?")
    term.add_argument("--mode", choices=("beta", "beta-eta"), default="beta")
    term.set_defaults(run=cmd_term)

    tree = sub.add_parser("tree", parents=[common], help="finite permutation trees")
    tree.add_argument(
        "op",
        choices=("product", "star", "max", "max-prime", "leq", "leq-prime", "meet", "covers", "norm", "upset", "to-term", "parse"),
    )
    tree.add_argument("tree")
    tree.add_argument("other", nargs="?")
    tree.set_defaults(run=cmd_tree)

    rtree = sub.add_parser("rtree", parents=[common], help="rational permutation trees (JSON files)")
    rtree.add_argument("op", choices=("product", "star", "max", "leq", "equal", "to-term", "unfold"))
    rtree.add_argument("file")
    rtree.add_argument("other", nargs="?")
    rtree.add_argument("--prime", action="store_true", help="use finite idempotents only (max', <=')")
    rtree.set_defaults(run=cmd_rtree)

    theory = sub.add_parser("theory", parents=[common], help="equality and inversion in a lambda theory")
    theory.add_argument("op", choices=("equal", "invertible", "inverse"))
    theory.add_argument("theory", help="beta, beta-eta, bohm:D, hstar or hplus")
    theory.add_argument("term")
    theory.add_argument("other", nargs="?")
    theory.set_defaults(run=cmd_theory)

    algebra = sub.add_parser("algebra", parents=[common], help="Green's relations and sigma")
    algebra.add_argument("op", choices=("green", "subgroup", "sigma"))
    algebra.add_argument("args", nargs="+")
    algebra.set_defaults(run=cmd_algebra)

    oracle = sub.add_parser("oracle", parents=[common], help="run the law suite")
    oracle.add_argument("op", choices=("run",))
    oracle.add_argument("--max-nodes", type=int, default=6)
    oracle.add_argument("--jobs", type=int, default=1)
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--sample", type=int, default=2000, help="random 3-state pairs for binary rational laws")
    oracle.add_argument("--no-rational", action="store_true")
    oracle.set_defaults(run=cmd_oracle)

    render = sub.add_parser("render", parents=[common], help="DOT output")
    render.add_argument("--dot", dest="input", required=True, metavar="INPUT")
    render.set_defaults(run=cmd_render)
    return p


def _algebra_args(a):
    args = a.args
    if a.op == "green":
        if len(args) != 2:
            raise UsageError("usage: ptlab algebra green {L|R|H} TREE")
        a.relation, a.tree = args
    elif a.op == "subgroup":
        if len(args) != 1:
            raise UsageError("usage: ptlab algebra subgroup TREE")
        (a.tree,) = args
    else:
        if len(args) != 2:
            raise UsageError("usage: ptlab algebra sigma TREE TREE")
        a.tree, a.other = args


def main(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        if a.fuel < 1 or a.depth < 1:
            raise UsageError("--fuel and --depth must be positive")
        if a.group == "algebra":
            _algebra_args(a)
        if a.group == "oracle" and (a.max_nodes < 1 or a.jobs < 1):
            raise UsageError("--max-nodes and --jobs must be positive")
        return a.run(a, Out(a.format))
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return ERROR
    except (ValueError, KeyError, OSError, RecursionError) as exc:
        print(f"ptlab: error: {exc}", file=sys.stderr)
        return ERROR + 1


if __name__ == "__main__":
    sys.exit(main())
