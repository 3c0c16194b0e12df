"""Adaptive Simpson quadrature with an absolute error target."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

DEFAULT_TOL = 1e-10
DEFAULT_MAX_DEPTH = 30


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    evaluations: int
    depth_limited: bool = False


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]`` (``b < a`` allowed, giving the signed integral).

    Panels are split until ``|S_left + S_right - S_whole| <= 15 * tol_panel``,
    with the tolerance halved at each split, and accepted values carry the
    Richardson correction.
    """
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    evals = 3
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    err = 0.0
    limited = False
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, s0, tol0, depth = stack.pop()
        m0 = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m0), 0.5 * (m0 + b0)
        flm, frm = f(lm), f(rm)
        evals += 2
        h = (b0 - a0) / 12.0
        left = h * (fa0 + 4.0 * flm + fm0)
        right = h * (fm0 + 4.0 * frm + fb0)
        delta = left + right - s0
        if abs(delta) <= 15.0 * tol0 or depth >= max_depth:
            if depth >= max_depth and abs(delta) > 15.0 * tol0:
                limited = True
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
        else:
            stack.append((m0, b0, fm0, frm, fb0, right, 0.5 * tol0, depth + 1))
            stack.append((a0, m0, fa0, flm, fm0, left, 0.5 * tol0, depth + 1))
    return QuadResult(total, err, evals, limited)
