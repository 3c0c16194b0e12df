"""Reference computations written independently of the library.

Nothing here imports ``fractopo``: topologies are plain sets of frozensets,
and the mean oracles use exact antiderivatives with finite differences
rather than the library's damping-factor or coefficient transforms.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


# -- finite topologies -----------------------------------------------------


def powerset(points):
    pts = list(points)
    return [frozenset(c) for r in range(len(pts) + 1) for c in itertools.combinations(pts, r)]


def is_topology_bruteforce(n: int, opens) -> bool:
    opens = set(opens)
    full = frozenset(range(n))
    if frozenset() not in opens or full not in opens:
        return False
    # all finite unions and intersections, via pairs (enough for finite collections)
    return all(a | b in opens and a & b in opens for a in opens for b in opens)


def all_topologies_bruteforce(n: int) -> list[frozenset]:
    """Every set system on ``n`` points that is a topology, found by exhaustive search."""
    full = frozenset(range(n))
    middle = [s for s in powerset(range(n)) if s and s != full]
    out = []
    for mask in range(1 << len(middle)):
        opens = {frozenset(), full} | {middle[i] for i in range(len(middle)) if mask >> i & 1}
        if is_topology_bruteforce(n, opens):
            out.append(frozenset(opens))
    return out


def canonical_class(n: int, opens) -> tuple:
    """Lexicographically least relabelling over all ``n!`` permutations."""
    best = None
    for perm in itertools.permutations(range(n)):
        img = sorted(tuple(sorted(perm[p] for p in o)) for o in opens)
        key = tuple(img)
        if best is None or key < best:
            best = key
    return best


def trace(opens, subset) -> set:
    s = frozenset(subset)
    return {frozenset(o) & s for o in opens}


# -- sliding means ---------------------------------------------------------


def _mod2(num: Fraction) -> float:
    return float(num - 2 * math.floor(num / 2))


def cos_mean_oracle(multiple: int, x, steps) -> float:
    """Iterated mean of ``cos(mπt)`` by finite differences of the L-th antiderivative.

    ``A_L(t) = cos(mπt − Lπ/2) / (mπ)^L``; each mean of signed width ``h`` is
    ``(A(t+h) − A(t)) / h`` one level down.  Arguments are reduced mod 2
    exactly before calling ``cos``.
    """
    L = len(steps)
    hs = [Fraction(h) for h in steps]
    x = Fraction(x)
    if multiple == 0:
        return 1.0
    total = 0.0
    for choice in itertools.product((0, 1), repeat=L):
        shift = sum((h for h, c in zip(hs, choice) if c), Fraction(0))
        sign = (-1) ** (L - sum(choice))
        phase = multiple * (x + shift) - Fraction(L, 2)
        total += sign * math.cos(math.pi * _mod2(phase))
    denom = (multiple * math.pi) ** L
    for h in hs:
        denom *= float(h)
    return total / denom


def weierstrass_mean_oracle(a: float, b: int, K: int, x, steps) -> float:
    return math.fsum(a**k * cos_mean_oracle(b**k, x, steps) for k in range(K + 1))


def weierstrass_value(a: float, b: int, K: int, t) -> float:
    t = Fraction(t)
    return math.fsum(a**k * math.cos(math.pi * _mod2(b**k * t)) for k in range(K + 1))


def poly_mean_oracle(coeffs, x, steps) -> Fraction:
    """Exact iterated mean of ``Σ c_j t^j`` via repeated antiderivatives and differences."""
    L = len(steps)
    anti = [Fraction(c) for c in coeffs]
    for _ in range(L):
        anti = [Fraction(0)] + [c / (j + 1) for j, c in enumerate(anti)]

    def A(t: Fraction) -> Fraction:
        return sum((c * t**j for j, c in enumerate(anti)), Fraction(0))

    hs = [Fraction(h) for h in steps]
    x = Fraction(x)
    total = Fraction(0)
    for choice in itertools.product((0, 1), repeat=L):
        shift = sum((h for h, c in zip(hs, choice) if c), Fraction(0))
        total += (-1) ** (L - sum(choice)) * A(x + shift)
    for h in hs:
        total /= h
    return total


def _tri_int(u: Fraction) -> Fraction:
    # ∫_0^u dist(s, Z) ds
    n = math.floor(u)
    f = u - n
    d = f * f / 2 if f <= Fraction(1, 2) else Fraction(1, 4) - (1 - f) ** 2 / 2
    return Fraction(n, 4) + d


def _tri_int2(u: Fraction) -> Fraction:
    # ∫_0^u ∫_0^s dist(r, Z) dr ds
    n = math.floor(u)
    f = u - n
    if f <= Fraction(1, 2):
        e = f**3 / 6
    else:
        e = Fraction(1, 48) + (f - Fraction(1, 2)) / 4 + ((1 - f) ** 3 - Fraction(1, 8)) / 6
    return Fraction(n * n, 8) + f * n / 4 + e


def takagi_mean_oracle(w: float, K: int, x, steps) -> float:
    """One or two levels of mean of ``Σ w^k dist(2^k t, Z)``, exactly per term."""
    x = Fraction(x)
    hs = [Fraction(h) for h in steps]
    total = Fraction(0)
    for k in range(K + 1):
        m = 2**k
        X = m * x
        if len(hs) == 1:
            H = m * hs[0]
            term = (_tri_int(X + H) - _tri_int(X)) / H
        elif len(hs) == 2:
            H1, H2 = m * hs[0], m * hs[1]
            E = _tri_int2
            term = ((E(X + H1 + H2) - E(X + H2)) - (E(X + H1) - E(X))) / (H1 * H2)
        else:
            raise ValueError("oracle covers one or two levels")
        total += Fraction(w) ** k * term
    return float(total)


def heap_label(k: int) -> str:
    """Sign label of heap node ``k`` by repeated division (no string tricks)."""
    out = []
    while k > 1:
        out.append("+" if k % 2 == 0 else "-")
        k //= 2
    return "".join(reversed(out))
