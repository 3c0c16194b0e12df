"""Fast invariant suite behind ``fractopo selftest``.

Each check is small enough that the whole suite runs in a few seconds.  A
``mutate`` argument swaps the reference family fixture for a single-fault
mutation, which must make the suite fail.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

from . import signs as sg
from .errors import FractopoError
from .diagonal import IndexedFamily, check_diagonal_axioms
from .family import check_fractal_family, induced_formula_check, mutate, sierpinski_doubling
from .finite_topology import FiniteTopology, all_topologies, homeomorphism_classes
from .generators import weierstrass
from .means import MeanSpec, identification_residual, iterated_mean, translation_residual
from .tree import chart_tuple_labels, chart_tuple_size, enumerate_step


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def _lambda_counts() -> tuple[bool, str]:
    got = [len(sg.lambda_set(n)) for n in range(4)]
    return got == [2, 4, 8, 16], f"|Λ_n| for n=0..3: {got}"


def _tree() -> tuple[bool, str]:
    for n in range(11):
        d = enumerate_step(n)
        if [e.k for e in d.entries] != list(range(2**n, 2 ** (n + 1))):
            return False, f"step {n}: wrong node range"
        if sorted(d.child_labels(), key=sg.sort_key) != sg.lambda_set(n):
            return False, f"step {n}: child labels differ from Λ_{n}"
    sizes = [chart_tuple_size(n) for n in range(3)]
    ok = sizes == [3, 5, 9] and len(chart_tuple_labels(3)) == chart_tuple_size(3)
    return ok, f"steps 0..10 consistent, chart tuple sizes {sizes}"


def _family(prop: Optional[str]) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        spec = sierpinski_doubling(3)
        if prop:
            spec = mutate(spec, prop)
        report = check_fractal_family(spec)
        failed = report.failed()
        return report.ok, "all five properties hold" if report.ok else "failed: " + ",".join(failed)

    return run


def _formulas(prop: Optional[str]) -> Callable[[], tuple[bool, str]]:
    def run() -> tuple[bool, str]:
        spec = sierpinski_doubling(3)
        if prop:
            spec = mutate(spec, prop)
        bad = []
        for n in range(3):
            for i in range(3):
                try:
                    r = induced_formula_check(spec, n, i)
                except FractopoError as exc:  # a mutated fixture may break the preconditions
                    bad.append(f"({n},{i}): {exc}")
                    continue
                if not r.holds:
                    bad.append(f"({n},{i}): {r.witness}")
        return not bad, "9 (n, i) pairs hold" if not bad else "; ".join(bad[:3])

    return run


def _finite() -> tuple[bool, str]:
    tops = all_topologies(3)
    classes = homeomorphism_classes(tops)
    return (len(tops), len(classes)) == (29, 9), f"{len(tops)} topologies on 3 points, {len(classes)} classes"


def _diagonal() -> tuple[bool, str]:
    s = FiniteTopology.sierpinski()
    r = check_diagonal_axioms(IndexedFamily(("0", "0.1"), (s, s)))
    return r.valid and r.open_count == 9, f"{r.open_count} diagonal opens, {r.message}"


def _means(seed: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    w = weierstrass()
    worst_t = worst_q = 0.0
    for _ in range(5):
        d0 = rng.uniform(0.01, 0.9)
        x = rng.uniform(-1.0, 2.0 - d0)
        worst_t = max(worst_t, translation_residual(w, x, d0, "closed"))
        spec = MeanSpec(w, "+-", (d0, d0 / 3))
        xq = rng.uniform(-1.0 + d0 / 3, 2.0 - d0)
        worst_q = max(worst_q, abs(iterated_mean(spec, xq, "closed") - iterated_mean(spec, xq, "quadrature")))
    zero = identification_residual(MeanSpec(w, "+", (0.1,)), 0.3, 0.0)
    ok = worst_t <= 1e-12 and worst_q <= 1e-8 and zero == 0.0
    return ok, f"translation {worst_t:.1e}, closed vs quadrature {worst_q:.1e}, identification at 0: {zero}"


def run_selftest(mutate_property: Optional[str] = None, seed: int = 0) -> list[CheckResult]:
    checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("cardinalities", _lambda_counts),
        ("expansion-tree", _tree),
        ("fractal-family", _family(mutate_property)),
        ("induced-formulas", _formulas(mutate_property)),
        ("finite-topologies", _finite),
        ("diagonal-topology", _diagonal),
        ("means", lambda: _means(seed)),
    ]
    out = []
    for name, fn in checks:
        t0 = time.perf_counter()
        ok, detail = fn()
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return out
