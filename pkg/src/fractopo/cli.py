"""Command-line entry point.

Exit codes: 0 success, 1 the checked statement is false, 2 bad input,
3 a brute-force cap was exceeded.  ``--porcelain`` (anywhere on the command
line) replaces the human report with stable ``key=value`` lines.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import signs as sg
from .diagonal import DEFAULT_CAP, check_diagonal_axioms, default_seed, parse_family
from .errors import CapacityError, FractopoError, InputError, PreconditionError
from .family import (
    PROPERTIES,
    chain_sets,
    chain_topologies,
    check_fractal_family,
    format_family_spec,
    induced_formula_check,
    mutate,
    parse_family_spec,
    sierpinski_doubling,
)
from .finite_topology import format_subsets, parse_topology
from .generators import parse_generator
from .means import (
    METHODS,
    MeanSpec,
    build_nset,
    graph_csv,
    identification_residual,
    iterated_mean_detail,
    nset_csv,
    sample_graph,
    translation_residual,
)
from .quadrature import DEFAULT_TOL
from .selftest import run_selftest
from .tree import render_tree

OK, FALSE, BAD_INPUT, OVER_CAP = 0, 1, 2, 3
SIGN_FLAGS = ("--signs", "--from", "--sign")


@dataclass
class CommandResult:
    exit_code: int
    report: str
    summary: Optional[str] = None
    pairs: dict = field(default_factory=dict, repr=False)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fmt(v: float) -> str:
    return format(v, ".17g")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def _spec(args) -> MeanSpec:
    g = parse_generator(args.gen)
    signs = args.signs or ""
    deltas = _floats(args.deltas) if args.deltas else None
    return MeanSpec(g, signs, deltas)


def _add_mean_args(p: argparse.ArgumentParser, signs_required: bool = False) -> None:
    p.add_argument("--gen", default="weierstrass:0.5:13", help="generator, e.g. weierstrass:0.5:13, poly:0:1")
    p.add_argument("--signs", required=signs_required, help="sign string such as +- (p/m accepted)")
    p.add_argument("--deltas", required=signs_required, help="comma-separated widths, δ_0 first")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)


def _build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="fractopo", description="Finite fractal-topology checks and iterated-mean tools.")
    sub = root.add_subparsers(dest="command", parser_class=_Parser, required=True)

    topo = sub.add_parser("topo", help="finite and diagonal topologies").add_subparsers(dest="action", required=True)
    p = topo.add_parser("check", help="check a topology literal or a labelled family file")
    p.add_argument("source", help="file path or inline literal 'n=3; opens=...'")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--seed", type=int)

    fam = sub.add_parser("family", help="fractal families").add_subparsers(dest="action", required=True)
    p = fam.add_parser("check", help="model-check the five family properties")
    p.add_argument("file")
    p = fam.add_parser("chains", help="inclusion chains starting at a key")
    p.add_argument("file")
    p.add_argument("--from", dest="start", required=True)
    p = fam.add_parser("fixture", help="print the reference fixture, optionally mutated")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--mutate", choices=PROPERTIES)

    mean = sub.add_parser("mean", help="iterated means").add_subparsers(dest="action", required=True)
    p = mean.add_parser("eval", help="evaluate at one abscissa")
    _add_mean_args(p)
    p.add_argument("--x", type=float, required=True)

    graph = sub.add_parser("graph", help="graph samples").add_subparsers(dest="action", required=True)
    p = graph.add_parser("dump", help="write an x,y CSV")
    _add_mean_args(p)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--m", type=int, default=101)
    p.add_argument("--shrink", action="store_true", help="clip the interval to where the mean is defined")
    p.add_argument("--out", required=True)

    nset = sub.add_parser("nset", help="N-set samples").add_subparsers(dest="action", required=True)
    p = nset.add_parser("dump", help="write an x,y1,y2,y3 CSV")
    _add_mean_args(p, signs_required=True)
    p.add_argument("--gen2")
    p.add_argument("--gen3")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--m", type=int, default=101)
    p.add_argument("--shrink", action="store_true")
    p.add_argument("--out", required=True)

    ver = sub.add_parser("verify", help="numerical and set identities").add_subparsers(dest="action", required=True)
    p = ver.add_parser("pr1", help="identification residual under a shrinking extra width")
    _add_mean_args(p)
    p.set_defaults(signs="+", deltas="0.1")
    p.add_argument("--sign", default="+", help="sign of the extra level")
    p.add_argument("--x", default="0.3", help="comma-separated probe points")
    p.add_argument("--start", type=float, default=1e-2)
    p.add_argument("--halvings", type=int, default=9)
    p.add_argument("--factor", type=float, default=10.0, help="required decrease from first to last")
    p = ver.add_parser("translation", help="forward mean at x equals backward mean at x+δ0")
    p.add_argument("--gen", default="weierstrass:0.5:13")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--bound", type=float, help="largest admissible residual (default by route)")
    p = ver.add_parser("formulas", help="induced-topology set equalities on a family file")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, required=True)

    tree = sub.add_parser("tree", help="expanding chart diagram").add_subparsers(dest="action", required=True)
    p = tree.add_parser("print")
    p.add_argument("--steps", type=int, default=2)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("--mutate", choices=PROPERTIES, help="replace the family fixture by a mutation")
    p.add_argument("--seed", type=int)
    return root


def _glue_signs(argv: Sequence[str]) -> list[str]:
    # "--signs -+" would be read as a flag; glue sign-only values to their option
    out: list[str] = []
    it = iter(range(len(argv)))
    for i in it:
        tok = argv[i]
        if tok in SIGN_FLAGS and i + 1 < len(argv) and argv[i + 1] and set(argv[i + 1]) <= set("+-−pm"):
            out.append(f"{tok}={argv[i + 1]}")
            next(it, None)
        else:
            out.append(tok)
    return out


# -- commands --------------------------------------------------------------


def _topo_check(args) -> CommandResult:
    text = args.source
    if not text.lstrip().startswith("n") or "opens" not in text:
        text = _read(args.source)
    if text.lstrip().startswith("labels"):
        fam = parse_family(text)
        seed = args.seed if args.seed is not None else default_seed()
        r = check_diagonal_axioms(fam, cap=args.cap, seed=seed)
        lines = [f"diagonal family over {len(fam.labels)} labels: {r.open_count} opens, {r.mode} check"]
        lines.append("valid topology" if r.valid else f"axiom {r.axiom} fails: {r.message}")
        if not r.valid:
            lines.append("witness: " + " | ".join(format_subsets(w.components) for w in r.witness))
        pairs = {"kind": "diagonal", "valid": str(r.valid).lower(), "opens": r.open_count, "mode": r.mode,
                 "pairs": r.pairs_checked, "axiom": r.axiom or "-"}
        if r.mode == "sampled":
            pairs["seed"] = r.seed
        return CommandResult(OK if r.valid else FALSE, "\n".join(lines), pairs=pairs)
    t = parse_topology(text.strip())
    r = t.report()
    lines = [f"{t.universe_size} points, {len(t.opens)} subsets"]
    lines.append("valid topology" if r.valid else f"axiom {r.axiom} fails: {r.message}")
    pairs = {"kind": "topology", "valid": str(r.valid).lower(), "opens": len(t.opens), "axiom": r.axiom or "-"}
    return CommandResult(OK if r.valid else FALSE, "\n".join(lines), pairs=pairs)


def _family_check(args) -> CommandResult:
    spec = parse_family_spec(_read(args.file))
    r = check_fractal_family(spec)
    lines = r.lines() + ["fractal family: " + ("yes" if r.ok else "no (" + ",".join(r.failed()) + ")")]
    pairs = {f"property_{p}": "pass" if r.properties[p].ok else "fail" for p in PROPERTIES}
    pairs["ok"] = str(r.ok).lower()
    return CommandResult(OK if r.ok else FALSE, "\n".join(lines), pairs=pairs)


def _family_chains(args) -> CommandResult:
    spec = parse_family_spec(_read(args.file))
    start = sg.normalize(args.start)
    up = chain_topologies(spec, start)
    down = chain_sets(spec, start)
    emb = ",".join(f"{a}->{b}" for a, b in sorted(down.embedding.items()))
    lines = ["upward (coarser to finer): " + " -> ".join(up), "downward: " + " <- ".join((start,) + down.keys)]
    if down.keys:
        lines.append(f"embedding of {down.keys[-1]} into {start}: {emb}")
    pairs = {"up": ",".join(up), "down": ",".join((start,) + down.keys)}
    return CommandResult(OK, "\n".join(lines), pairs=pairs)


def _family_fixture(args) -> CommandResult:
    spec = sierpinski_doubling(args.levels)
    if args.mutate:
        spec = mutate(spec, args.mutate)
    return CommandResult(OK, format_family_spec(spec).rstrip("\n"))


def _mean_eval(args) -> CommandResult:
    spec = _spec(args)
    r = iterated_mean_detail(spec, args.x, args.method, args.tol)
    return CommandResult(OK, _fmt(r.value), pairs={"value": _fmt(r.value), "method": r.method, "evaluations": r.evaluations})


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _graph_dump(args) -> CommandResult:
    s = sample_graph(_spec(args), (args.lo, args.hi), args.m, args.method, args.tol, args.shrink)
    _write(args.out, graph_csv(s))
    lo, hi = s.points[0][0], s.points[-1][0]
    lines = [f"wrote {len(s.points)} rows to {args.out} ({s.method})"]
    if s.shrunk:
        lines.append(f"interval shrunk from [{_fmt(s.requested[0])}, {_fmt(s.requested[1])}] to [{_fmt(lo)}, {_fmt(hi)}]")
    pairs = {"rows": len(s.points), "out": args.out, "lo": _fmt(lo), "hi": _fmt(hi), "shrunk": str(s.shrunk).lower()}
    return CommandResult(OK, "\n".join(lines), pairs=pairs)


def _nset_dump(args) -> CommandResult:
    gens = [parse_generator(g) for g in (args.gen, args.gen2 or args.gen, args.gen3 or args.gen)]
    s = build_nset(gens, args.signs, _floats(args.deltas), (args.lo, args.hi), args.m, args.method, args.tol, args.shrink)
    _write(args.out, nset_csv(s))
    tags = ",".join(_fmt(t) for t in s.tags)
    return CommandResult(
        OK, f"wrote {len(s.graphs[0].points)} rows to {args.out}, tags ({tags})", pairs={"rows": len(s.graphs[0].points), "tags": tags}
    )


def _verify_pr1(args) -> CommandResult:
    spec = _spec(args)
    if not spec.signs:
        raise InputError("verify pr1 needs a base spec with at least one level")
    xs = _floats(args.x)
    if args.halvings < 0 or not args.start > 0:
        raise InputError("need --halvings >= 0 and --start > 0")
    widths = [args.start * 2.0**-j for j in range(args.halvings + 1)]
    zero = max(identification_residual(spec, x, 0.0, args.sign, args.method, args.tol) for x in xs)
    seq = [sum(identification_residual(spec, x, d, args.sign, args.method, args.tol) for x in xs) / len(xs) for d in widths]
    ratio = seq[-1] / seq[0] if seq[0] else 0.0
    ok = zero == 0.0 and seq[-1] * args.factor <= seq[0]
    lines = [f"residual at zero extra width: {_fmt(zero)}"]
    lines += [f"δ={_fmt(d)}  mean residual {_fmt(r)}" for d, r in zip(widths, seq)]
    lines.append(f"last/first = {ratio:.4g}; required at most {1 / args.factor:.4g}: {'pass' if ok else 'FAIL'}")
    pairs = {"zero": _fmt(zero), "first": _fmt(seq[0]), "last": _fmt(seq[-1]), "ratio": _fmt(ratio), "ok": str(ok).lower()}
    return CommandResult(OK if ok else FALSE, "\n".join(lines), pairs=pairs)


def _verify_translation(args) -> CommandResult:
    g = parse_generator(args.gen)
    seed = args.seed if args.seed is not None else default_seed()
    method = "closed" if args.method == "auto" and g.closed_form else ("quadrature" if args.method == "auto" else args.method)
    bound = args.bound if args.bound is not None else (1e-12 if method == "closed" else 1e-9)
    if args.probes < 1:
        raise InputError("need at least one probe")
    rng = random.Random(seed)
    worst, at = 0.0, None
    for _ in range(args.probes):
        d0 = rng.uniform(1e-3, min(0.999, g.hi - g.lo))
        x = rng.uniform(g.lo, g.hi - d0)
        r = translation_residual(g, x, d0, method, args.tol)
        if r >= worst:
            worst, at = r, (x, d0)
    ok = worst <= bound
    lines = [
        f"{args.probes} probes, seed {seed}, {method} route",
        f"largest residual {_fmt(worst)} at x={_fmt(at[0])}, δ0={_fmt(at[1])}; bound {bound:g}: {'pass' if ok else 'FAIL'}",
    ]
    pairs = {"probes": args.probes, "seed": seed, "method": method, "max_residual": _fmt(worst), "ok": str(ok).lower()}
    return CommandResult(OK if ok else FALSE, "\n".join(lines), pairs=pairs)


def _verify_formulas(args) -> CommandResult:
    spec = parse_family_spec(_read(args.file))
    r = induced_formula_check(spec, args.n, args.i)
    lines = [" <= ".join(c) for c in r.checked]
    lines.append(f"n={r.n}, i={r.i}: " + ("holds" if r.holds else f"fails: {r.witness}"))
    pairs = {"n": r.n, "i": r.i, "holds": str(r.holds).lower(), "chains": len(r.checked)}
    return CommandResult(OK if r.holds else FALSE, "\n".join(lines), pairs=pairs)


def _tree_print(args) -> CommandResult:
    return CommandResult(OK, render_tree(args.steps).rstrip("\n"), pairs={"steps": args.steps})


def _selftest(args) -> CommandResult:
    seed = args.seed if args.seed is not None else default_seed()
    results = run_selftest(args.mutate, seed)
    ok = all(r.ok for r in results)
    lines = [f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    lines.append(f"selftest: {sum(r.ok for r in results)}/{len(results)} passed")
    pairs = {r.name: "pass" if r.ok else "fail" for r in results}
    pairs["ok"] = str(ok).lower()
    return CommandResult(OK if ok else FALSE, "\n".join(lines), pairs=pairs)


HANDLERS = {
    ("topo", "check"): _topo_check,
    ("family", "check"): _family_check,
    ("family", "chains"): _family_chains,
    ("family", "fixture"): _family_fixture,
    ("mean", "eval"): _mean_eval,
    ("graph", "dump"): _graph_dump,
    ("nset", "dump"): _nset_dump,
    ("verify", "pr1"): _verify_pr1,
    ("verify", "translation"): _verify_translation,
    ("verify", "formulas"): _verify_formulas,
    ("tree", "print"): _tree_print,
    ("selftest", None): _selftest,
}


def run(argv: Sequence[str]) -> CommandResult:
    """Parse ``argv`` and execute one command without touching the process streams."""
    argv = list(argv)
    porcelain = "--porcelain" in argv
    argv = _glue_signs([a for a in argv if a != "--porcelain"])
    parser = _build_parser()
    try:
        buf = io.StringIO()
        try:
            with contextlib.redirect_stdout(buf):
                args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return CommandResult(OK if not exc.code else BAD_INPUT, buf.getvalue().rstrip("\n"))
        result = HANDLERS[(args.command, getattr(args, "action", None))](args)
    except CapacityError as exc:
        result = CommandResult(OVER_CAP, f"capacity exceeded: {exc}", pairs={"error": "capacity"})
    except PreconditionError as exc:
        result = CommandResult(FALSE, f"precondition failed: {exc}", pairs={"error": "precondition"})
    except InputError as exc:
        result = CommandResult(BAD_INPUT, f"input error: {exc}", pairs={"error": "input"})
    except FractopoError as exc:  # pragma: no cover - every subclass is handled above
        result = CommandResult(BAD_INPUT, f"error: {exc}", pairs={"error": "other"})
    if porcelain:
        pairs = {"exit": result.exit_code, **result.pairs}
        result.summary = "\n".join(f"{k}={v}" for k, v in pairs.items())
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    text = result.summary if result.summary is not None else result.report
    stream = sys.stdout if result.exit_code in (OK, FALSE) else sys.stderr
    if text:
        print(text, file=stream)
    return result.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
