"""Continuous generator functions on a bounded interval.

Cosine series (Weierstrass and friends) and polynomials carry closed forms
for the sliding-mean operator; Takagi and tabulated generators only support
quadrature.  Cosine arguments are reduced exactly: every frequency is an
integer multiple of π and every abscissa a binary float, so ``m·t mod 2``
is computed with integer arithmetic before calling ``cos``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Callable, Union

from .errors import DomainError, InputError

Number = Union[float, int, Fraction]
TAIL = 1e-14
DEFAULT_DOMAIN = (-1.0, 2.0)


def _ratio(x: Number) -> tuple[int, int]:
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    return Fraction(x).numerator, Fraction(x).denominator


def mod2(m: int, t: Number, phase: Fraction = Fraction(0)) -> float:
    """``(m·t + phase) mod 2`` in ``[0, 2)``, exact up to the final rounding."""
    n, d = _ratio(t)
    pn, pd = phase.numerator, phase.denominator
    num = m * n * pd + pn * d
    den = d * pd
    return (num % (2 * den)) / den


def tail_order(ratio: float, tail: float = TAIL) -> int:
    """Smallest ``K`` with ``ratio**(K+1) / (1-ratio) < tail``."""
    if not 0 < ratio < 1:
        raise InputError(f"ratio must lie in (0, 1), got {ratio}")
    k = 0
    while ratio ** (k + 1) / (1 - ratio) >= tail:
        k += 1
    return k


class Generator:
    """Base class.  Subclasses provide ``lo``, ``hi`` and ``__call__``."""

    lo: float
    hi: float
    closed_form = False

    def __call__(self, t: Number) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def check_window(self, left: Number, right: Number) -> None:
        if left < self.lo or right > self.hi:
            raise DomainError(
                f"[{float(left):.17g}, {float(right):.17g}] leaves the domain [{self.lo}, {self.hi}]"
            )

    def averaged(self, h: Number) -> "Generator":
        raise NotImplementedError(f"{type(self).__name__} has no closed-form mean")


def _check_domain(lo: float, hi: float) -> None:
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InputError(f"domain must satisfy lo < hi, got [{lo}, {hi}]")


@dataclass(frozen=True)
class CosineTerm:
    """``amplitude · cos(π·(multiple·t + phase))``."""

    amplitude: float
    multiple: int
    phase: Fraction = Fraction(0)


@dataclass(frozen=True)
class CosineSeries(Generator):
    terms: tuple[CosineTerm, ...]
    lo: float = DEFAULT_DOMAIN[0]
    hi: float = DEFAULT_DOMAIN[1]
    name: str = "cosine-series"
    closed_form = True

    def __post_init__(self):
        _check_domain(self.lo, self.hi)
        for term in self.terms:
            if not isinstance(term.multiple, int) or term.multiple < 0:
                raise InputError("cosine multiples must be nonnegative integers")

    def __call__(self, t: Number) -> float:
        return math.fsum(
            c.amplitude * math.cos(math.pi * mod2(c.multiple, t, c.phase)) for c in self.terms if c.amplitude
        )

    def averaged(self, h: Number) -> "CosineSeries":
        """Closed form of ``x ↦ (1/h)∫_x^{x+h} g``: each term is damped by a sinc and phase-shifted by ``m·h/2``."""
        hf = Fraction(h)
        out = []
        for c in self.terms:
            if c.multiple == 0:
                out.append(c)
                continue
            half = abs(c.multiple * hf) / 2
            damp = math.sin(math.pi * mod2(1, half)) / (math.pi * float(half))
            out.append(CosineTerm(c.amplitude * damp, c.multiple, c.phase + c.multiple * hf / 2))
        return CosineSeries(tuple(out), self.lo, self.hi, self.name)

    def scaled(self, factor: float) -> "CosineSeries":
        return CosineSeries(
            tuple(CosineTerm(factor * c.amplitude, c.multiple, c.phase) for c in self.terms), self.lo, self.hi, self.name
        )

    def __add__(self, other: "CosineSeries") -> "CosineSeries":
        return CosineSeries(
            self.terms + other.terms, max(self.lo, other.lo), min(self.hi, other.hi), f"{self.name}+{other.name}"
        )


def weierstrass(a: float = 0.5, b: int = 13, K: int | None = None, lo: float = -1.0, hi: float = 2.0) -> CosineSeries:
    """``Σ_{k≤K} a^k cos(b^k π t)`` with ``K`` from the 1e-14 tail rule by default."""
    if not 0 < a < 1:
        raise InputError(f"a must lie in (0, 1), got {a}")
    if not isinstance(b, int) or b < 1 or b % 2 == 0:
        raise InputError(f"b must be an odd positive integer, got {b!r}")
    if not a * b > 1 + 1.5 * math.pi:
        raise InputError(f"a*b = {a * b} does not exceed 1 + 3π/2")
    K = tail_order(a) if K is None else K
    terms = tuple(CosineTerm(a**k, b**k) for k in range(K + 1))
    return CosineSeries(terms, lo, hi, f"weierstrass(a={a},b={b},K={K})")


def cosine(multiple: int = 1, amplitude: float = 1.0, lo: float = -1.0, hi: float = 2.0) -> CosineSeries:
    return CosineSeries((CosineTerm(amplitude, multiple),), lo, hi, f"cos({multiple}πt)")


@dataclass(frozen=True)
class Polynomial(Generator):
    """Exact-coefficient polynomial ``Σ c_j t^j``; evaluation is exact until the final rounding."""

    coeffs: tuple[Fraction, ...]
    lo: float = -10.0
    hi: float = 10.0
    closed_form = True

    def __post_init__(self):
        _check_domain(self.lo, self.hi)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs) or (Fraction(0),))

    def exact(self, t: Number) -> Fraction:
        x = Fraction(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __call__(self, t: Number) -> float:
        return float(self.exact(t))

    def float_eval(self, t: float) -> float:
        """Plain float Horner scheme, for the quadrature route."""
        acc = 0.0
        for c in self._float_coeffs:
            acc = acc * t + c
        return acc

    @cached_property
    def _float_coeffs(self) -> tuple[float, ...]:
        return tuple(float(c) for c in reversed(self.coeffs))

    def averaged(self, h: Number) -> "Polynomial":
        hf = Fraction(h)
        deg = len(self.coeffs) - 1
        out = []
        for i in range(deg + 1):
            out.append(
                sum(
                    (self.coeffs[j] * math.comb(j + 1, i) * hf ** (j - i) / (j + 1) for j in range(i, deg + 1)),
                    Fraction(0),
                )
            )
        return Polynomial(tuple(out), self.lo, self.hi)


def constant(c: float, lo: float = -10.0, hi: float = 10.0) -> Polynomial:
    return Polynomial((Fraction(c),), lo, hi)


@dataclass(frozen=True)
class Takagi(Generator):
    """``Σ_{k≤K} w^k · dist(2^k t, ℤ)``."""

    w: float = 0.5
    K: int | None = None
    lo: float = DEFAULT_DOMAIN[0]
    hi: float = DEFAULT_DOMAIN[1]

    def __post_init__(self):
        _check_domain(self.lo, self.hi)
        if not 0 < self.w < 1:
            raise InputError(f"w must lie in (0, 1), got {self.w}")
        if self.K is None:
            object.__setattr__(self, "K", tail_order(self.w))

    def __call__(self, t: Number) -> float:
        t = float(t)
        total = 0.0
        for k in range(self.K + 1):
            u = math.ldexp(t, k)
            total += self.w**k * abs(u - round(u))
        return total


@dataclass(frozen=True)
class Tabulated(Generator):
    """Piecewise-linear interpolation through ``(t, f(t))`` samples."""

    samples: tuple[tuple[float, float], ...]
    ts: tuple[float, ...] = field(init=False, repr=False)
    lo: float = field(init=False)
    hi: float = field(init=False)

    def __post_init__(self):
        pts = tuple(sorted((float(t), float(y)) for t, y in self.samples))
        if len(pts) < 2:
            raise InputError("tabulated generator needs at least two samples")
        ts = tuple(p[0] for p in pts)
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise InputError("sample abscissae must be distinct")
        object.__setattr__(self, "samples", pts)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "lo", ts[0])
        object.__setattr__(self, "hi", ts[-1])

    def __call__(self, t: Number) -> float:
        t = float(t)
        i = min(max(bisect.bisect_right(self.ts, t) - 1, 0), len(self.ts) - 2)
        (t0, y0), (t1, y1) = self.samples[i], self.samples[i + 1]
        return y0 + (y1 - y0) * (t - t0) / (t1 - t0)


@dataclass(frozen=True)
class FunctionGenerator(Generator):
    """Wraps an arbitrary callable; quadrature only."""

    func: Callable[[float], float]
    lo: float = DEFAULT_DOMAIN[0]
    hi: float = DEFAULT_DOMAIN[1]

    def __post_init__(self):
        _check_domain(self.lo, self.hi)

    def __call__(self, t: Number) -> float:
        return float(self.func(float(t)))


def eval_generator(g: Generator, t: Number) -> float:
    """``g(t)`` after checking that ``t`` lies in the domain."""
    if not g.lo <= t <= g.hi:
        raise DomainError(f"t = {float(t)!r} outside [{g.lo}, {g.hi}]")
    return g(t)


def parse_generator(text: str) -> Generator:
    """Parse a CLI generator spec.

    Forms: ``weierstrass:a:b[:K]``, ``takagi:w``, ``poly:c0:c1:…``,
    ``const:c``, ``cos:m``, ``table:path.csv`` (two columns ``t,y``).
    """
    kind, *args = text.strip().split(":")
    kind = kind.lower()
    try:
        if kind == "weierstrass":
            a = float(args[0]) if args else 0.5
            b = int(args[1]) if len(args) > 1 else 13
            K = int(args[2]) if len(args) > 2 else None
            return weierstrass(a, b, K)
        if kind == "takagi":
            return Takagi(float(args[0]) if args else 0.5)
        if kind == "poly":
            return Polynomial(tuple(Fraction(a) for a in args))
        if kind == "const":
            return constant(float(args[0]))
        if kind == "cos":
            return cosine(int(args[0]) if args else 1)
        if kind == "table":
            rows = []
            with open(":".join(args)) as fh:
                for line in fh:
                    line = line.strip()
                    if not line or line.startswith("#") or line[0].isalpha():
                        continue
                    t, y = line.split(",")[:2]
                    rows.append((float(t), float(y)))
            return Tabulated(tuple(rows))
    except (IndexError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad generator spec {text!r}: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read table: {exc}") from None
    raise InputError(f"unknown generator kind {kind!r}")


def sample_points(lo: float, hi: float, m: int) -> list[float]:
    if m < 2:
        raise InputError("need at least two sample points")
    step = (hi - lo) / (m - 1)
    return [lo + i * step for i in range(m - 1)] + [hi]


__all__ = [
    "CosineSeries",
    "CosineTerm",
    "FunctionGenerator",
    "Generator",
    "Polynomial",
    "Tabulated",
    "Takagi",
    "constant",
    "cosine",
    "eval_generator",
    "mod2",
    "parse_generator",
    "sample_points",
    "tail_order",
    "weierstrass",
]

