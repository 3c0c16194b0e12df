"""Forward/backward sliding means and their iterates.

The level-``j`` operator with sign ``σ`` and width ``δ`` maps ``F`` to
``x ↦ (σ/δ)∫_x^{x+σδ} F(t) dt``.  A :class:`MeanSpec` stacks ``n+1`` of
them on a generator, level 0 first.  A zero width (allowed from level 1 on)
is the identity operator.

Two evaluation routes exist.  ``closed`` uses the generator's exact mean
(sinc damping for cosine series, coefficient transform for polynomials).
``quadrature`` integrates numerically with adaptive Simpson; for cosine
series it works term by term, discards whole periods (they integrate to
zero) and integrates the leftover sub-period window in phase coordinates,
so high harmonics never have to be resolved on the ``t`` axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from . import signs as sg
from .errors import DomainError, InputError
from .generators import CosineSeries, Generator, Number, Takagi, mod2, sample_points
from .quadrature import DEFAULT_TOL, adaptive_simpson

METHODS = ("auto", "closed", "quadrature")


@dataclass(frozen=True)
class DeltaVector:
    """Nested widths ``δ_0 > δ_1 > … ≥ 0`` with optional bounds ``ε_k``.

    Positive widths must strictly decrease; once a zero appears every later
    width is zero too.  Without explicit ``epsilons`` only ``δ_0 < 1`` is
    enforced.
    """

    deltas: tuple[float, ...]
    epsilons: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        ds = tuple(float(d) for d in self.deltas)
        object.__setattr__(self, "deltas", ds)
        if not ds:
            raise InputError("at least one width is required")
        if not all(math.isfinite(d) for d in ds):
            raise InputError("widths must be finite")
        if not 0 < ds[0] < 1:
            raise InputError(f"δ_0 must lie in (0, 1), got {ds[0]}")
        for k, (a, b) in enumerate(zip(ds, ds[1:]), 1):
            if b < 0:
                raise InputError(f"δ_{k} = {b} is negative")
            if a == 0 and b != 0:
                raise InputError(f"δ_{k} = {b} follows a zero width")
            if a > 0 and not b < a:
                raise InputError(f"widths must strictly decrease: δ_{k - 1} = {a}, δ_{k} = {b}")
        if self.epsilons is not None:
            es = tuple(float(e) for e in self.epsilons)
            object.__setattr__(self, "epsilons", es)
            if len(es) != len(ds):
                raise InputError("one ε per width is required")
            if not all(0 < e < 1 for e in es) or any(not b < a for a, b in zip(es, es[1:])):
                raise InputError("ε_k must strictly decrease inside (0, 1)")
            for k, (d, e) in enumerate(zip(ds, es)):
                if d > e:
                    raise InputError(f"δ_{k} = {d} exceeds ε_{k} = {e}")

    def __len__(self) -> int:
        return len(self.deltas)

    def extended(self, delta: float, epsilon: Optional[float] = None) -> "DeltaVector":
        eps = None
        if self.epsilons is not None:
            eps = self.epsilons + ((epsilon if epsilon is not None else max(delta, self.epsilons[-1] / 2)),)
        return DeltaVector(self.deltas + (delta,), eps)


def as_deltas(value: Union[DeltaVector, Sequence[float]]) -> DeltaVector:
    return value if isinstance(value, DeltaVector) else DeltaVector(tuple(value))


@dataclass(frozen=True)
class MeanSpec:
    """Generator plus signs and widths.  Empty ``signs`` means the raw generator."""

    generator: Generator
    signs: str = ""
    deltas: Optional[DeltaVector] = None
    component: int = 1

    def __post_init__(self):
        s = sg.normalize(self.signs) if self.signs else ""
        object.__setattr__(self, "signs", s)
        if s:
            if self.deltas is None:
                raise InputError("widths are required when signs are given")
            d = as_deltas(self.deltas)
            object.__setattr__(self, "deltas", d)
            if len(d) != len(s):
                raise InputError(f"{len(s)} signs but {len(d)} widths")
        elif self.deltas is not None and len(as_deltas(self.deltas)):
            raise InputError("widths given without signs")
        if self.component not in (1, 2, 3):
            raise InputError("component index must be 1, 2 or 3")

    @property
    def levels(self) -> int:
        return len(self.signs)

    def steps(self) -> list[float]:
        """Signed widths ``σ_j δ_j`` of the non-identity levels, level 0 first."""
        if not self.signs:
            return []
        return [(d if s == "+" else -d) for s, d in zip(self.signs, self.deltas.deltas) if d > 0]

    def support(self, x: Number) -> tuple[Number, Number]:
        """Interval of generator values the iterated mean at ``x`` depends on."""
        steps = self.steps()
        return x + sum(h for h in steps if h < 0), x + sum(h for h in steps if h > 0)

    def extended(self, sign: str, delta: float) -> "MeanSpec":
        sign = sg.normalize(sign)
        if len(sign) != 1:
            raise InputError("extend by exactly one sign")
        if not self.signs:
            raise InputError("cannot extend a raw generator spec")
        return replace(self, signs=self.signs + sign, deltas=self.deltas.extended(delta))


@dataclass(frozen=True)
class MeanValue:
    value: float
    method: str
    evaluations: int = 0


def _pick(g: Generator, method: str) -> str:
    if method not in METHODS:
        raise InputError(f"method must be one of {METHODS}")
    if method == "auto":
        return "closed" if g.closed_form else "quadrature"
    if method == "closed" and not g.closed_form:
        raise InputError(f"{type(g).__name__} has no closed form; use quadrature")
    return method


def _window_mean(f: Callable[[float], float], start: float, width: float, tol: float):
    """Mean of ``f`` over ``[start, start+width]`` as ``∫_0^1 f(start + width·s) ds``.

    Integrating in the unit variable keeps very small widths meaningful: the
    window never collapses to a single float.
    """
    return adaptive_simpson(lambda s: f(start + width * s), 0.0, 1.0, tol)


def _cosine_term_quadrature(amp, m, phase, steps, x, tol) -> tuple[float, int]:
    """One cosine term through all levels by adaptive Simpson in phase coordinates."""
    if m == 0 or amp == 0:
        return amp, 0
    a, beta = amp, math.pi * mod2(1, phase)  # φ(v) = a·cos(πv + β), v = m·t mod 2
    evals = 0
    u_x = mod2(m, x)
    for idx, h in enumerate(steps):
        mh = m * Fraction(h)
        whole = 2 * math.trunc(mh / 2)
        rem = float(mh - whole)  # window left after removing full periods, |rem| < 2
        scale = float(mh)
        last = idx == len(steps) - 1

        def psi(u: float, a=a, beta=beta, rem=rem, scale=scale) -> tuple[float, int]:
            if rem == 0:
                return 0.0, 0
            r = _window_mean(lambda v: a * math.cos(math.pi * v + beta), u, rem, tol * abs(scale / rem))
            return r.value * (rem / scale), r.evaluations

        if last:
            val, n = psi(u_x)
            return val, evals + n
        c0, n0 = psi(0.0)
        c1, n1 = psi(0.5)
        evals += n0 + n1
        z = complex(c0, -c1)
        a, beta = abs(z), cmath.phase(z)
    return a * math.cos(math.pi * u_x + beta), evals


def _nested_quadrature(g: Generator, steps: Sequence[float], x: float, tol: float) -> tuple[float, int]:
    count = [0]
    raw = getattr(g, "float_eval", g)

    def counted(t: float) -> float:
        count[0] += 1
        return raw(t)

    f: Callable[[float], float] = counted
    for h in steps:
        f = (lambda prev, h: lambda t: _window_mean(prev, t, h, tol).value)(f, h)
    return f(float(x)), count[0]


def _triangle(v: float) -> float:
    return abs(v - round(v))


def _periodic_term_quadrature(amp, m, steps, x, tol, base=_triangle, period_mean=0.25) -> tuple[float, int]:
    """``amp · p(m·t)`` through all levels, ``p`` 1-periodic, integrated in ``v = m·t``.

    Each mean keeps period 1 and the period mean, so a window of width
    ``H = n + r`` contributes ``n·mean`` plus an integral over ``r`` alone.
    """
    if amp == 0:
        return 0.0, 0
    count = [0]
    widths = [m * Fraction(h) for h in steps]
    budget = tol / abs(amp)

    def level(j: int, v: float) -> float:
        if j == 0:
            count[0] += 1
            return base(v)
        H = widths[j - 1]
        n = math.trunc(H)
        r = float(H - n)
        inner = 0.0
        if r:
            tol_r = budget * abs(float(H) / r) / len(steps)
            inner = r * _window_mean(lambda t: level(j - 1, t), v, r, tol_r).value
        return (n * period_mean + inner) / float(H)

    u = float((m * Fraction(x)) % 1)
    return amp * level(len(steps), u), count[0]


def _quadrature(g: Generator, steps: Sequence[float], x: Number, tol: float) -> tuple[float, int]:
    if isinstance(g, CosineSeries):
        per = tol / max(1, len(g.terms))
        parts = [_cosine_term_quadrature(c.amplitude, c.multiple, c.phase, steps, x, per) for c in g.terms]
    elif isinstance(g, Takagi):
        per = tol / (g.K + 1)
        parts = [_periodic_term_quadrature(g.w**k, 2**k, steps, x, per) for k in range(g.K + 1)]
    else:
        return _nested_quadrature(g, steps, float(x), tol)
    return math.fsum(p[0] for p in parts), sum(p[1] for p in parts)


def iterated_mean_detail(spec: MeanSpec, x: Number, method: str = "auto", tol: float = DEFAULT_TOL) -> MeanValue:
    g = spec.generator
    left, right = spec.support(x)
    g.check_window(left, right)
    steps = spec.steps()
    how = _pick(g, method)
    if not steps:
        return MeanValue(g(x), how)
    if how == "closed":
        f = g
        for h in steps:
            f = f.averaged(h)
        return MeanValue(f(x), how)
    value, n = _quadrature(g, steps, x, tol)
    return MeanValue(value, how, n)


def iterated_mean(spec: MeanSpec, x: Number, method: str = "auto", tol: float = DEFAULT_TOL) -> float:
    """Value of the iterated mean at ``x``."""
    return iterated_mean_detail(spec, x, method, tol).value


def mean(g: Generator, x: Number, sign: str, delta: float, method: str = "auto", tol: float = DEFAULT_TOL) -> float:
    """Single forward (``+``) or backward (``-``) mean ``(σ/δ)∫_x^{x+σδ} g``."""
    if not delta > 0:
        raise InputError(f"width must be positive, got {delta}")
    sign = sg.normalize(sign)
    if len(sign) != 1:
        raise InputError("a single sign is required")
    h = delta if sign == "+" else -delta
    g.check_window(min(x, x + h), max(x, x + h))
    how = _pick(g, method)
    if how == "closed":
        return g.averaged(h)(x)
    return _quadrature(g, [h], x, tol)[0]


def mean_specs_at_level(g: Generator, deltas: Union[DeltaVector, Sequence[float]]) -> list[MeanSpec]:
    """One spec per sign string of the matching level: ``2**(n+1)`` of them."""
    d = as_deltas(deltas)
    return [MeanSpec(g, s, d) for s in sg.lambda_set(len(d) - 1)]


# -- translation and identification ----------------------------------------


def translate(point: tuple[Number, Number], delta0: Number) -> tuple[Number, Number]:
    """Shift the abscissa by ``δ_0``; the ordinate is untouched."""
    if not delta0 > 0:
        raise InputError("translation width must be positive")
    a, b = point
    return a + delta0, b


def translate_triple(points, delta0: Number):
    return tuple(translate(p, delta0) for p in points)


def translation_residual(g: Generator, x: Number, delta0: float, method: str = "auto", tol: float = DEFAULT_TOL) -> float:
    """``|backward mean at x+δ_0 − forward mean at x|``; zero in exact arithmetic.

    On the closed-form route the shifted abscissa is kept as an exact
    fraction, so no rounding enters through ``x + δ_0``.
    """
    how = _pick(g, method)
    shifted = Fraction(x) + Fraction(delta0) if how == "closed" else x + delta0
    fwd = mean(g, x, "+", delta0, how, tol)
    bwd = mean(g, shifted, "-", delta0, how, tol)
    return abs(bwd - fwd)


def identification_residual(
    spec: MeanSpec, x: Number, delta_next: float, sign_next: str = "+", method: str = "auto", tol: float = DEFAULT_TOL
) -> float:
    """Gap between a mean spec and its extension by one more level at ``x``.

    A zero extra width is the identity, so the gap is exactly zero there.
    """
    if delta_next < 0:
        raise InputError("extra width must be nonnegative")
    ext = spec.extended(sign_next, delta_next)
    if delta_next == 0:
        return 0.0
    return abs(iterated_mean(ext, x, method, tol) - iterated_mean(spec, x, method, tol))


# -- graphs and N-sets -----------------------------------------------------


@dataclass(frozen=True)
class GraphSample:
    spec: MeanSpec
    points: tuple[tuple[float, float], ...]
    method: str
    tolerance: float
    evaluations: int = 0
    requested: Optional[tuple[float, float]] = None  # set when the interval was shrunk

    @property
    def shrunk(self) -> bool:
        return self.requested is not None


def evaluable_interval(spec: MeanSpec, lo: float, hi: float) -> tuple[float, float]:
    """Largest part of ``[lo, hi]`` where the iterated mean stays inside the domain."""
    g = spec.generator
    steps = spec.steps()
    neg = sum(h for h in steps if h < 0)
    pos = sum(h for h in steps if h > 0)
    a, b = max(lo, g.lo - neg), min(hi, g.hi - pos)
    if not a < b:
        raise DomainError(f"no evaluable abscissa in [{lo}, {hi}] for this spec")
    return a, b


def sample_graph(
    spec: MeanSpec,
    interval: tuple[float, float],
    m: int,
    method: str = "auto",
    tol: float = DEFAULT_TOL,
    shrink: bool = False,
) -> GraphSample:
    """``m`` equally spaced samples of the iterated mean (raw generator when no levels)."""
    lo, hi = map(float, interval)
    if not lo < hi:
        raise InputError("interval must satisfy lo < hi")
    requested = None
    if shrink:
        a, b = evaluable_interval(spec, lo, hi)
        if (a, b) != (lo, hi):
            requested = (lo, hi)
        lo, hi = a, b
    xs = sample_points(lo, hi, m)
    pts = []
    evals = 0
    how = _pick(spec.generator, method)
    for x in xs:
        r = iterated_mean_detail(spec, x, how, tol)
        evals += r.evaluations
        pts.append((x, r.value))
    return GraphSample(spec, tuple(pts), how, tol, evals, requested)


@dataclass(frozen=True)
class NSetSample:
    graphs: tuple[GraphSample, GraphSample, GraphSample]
    tags: tuple[float, ...] = field(default=())  # δ_n, …, δ_0


def build_nset(
    generators: Sequence[Generator],
    signs: str,
    deltas: Union[DeltaVector, Sequence[float]],
    interval: tuple[float, float],
    m: int,
    method: str = "auto",
    tol: float = DEFAULT_TOL,
    shrink: bool = False,
) -> NSetSample:
    """Three aligned graphs sharing signs and widths, tagged ``(δ_n, …, δ_0)``."""
    if len(generators) != 3:
        raise InputError("an N-set needs exactly three generators")
    d = as_deltas(deltas)
    specs = [MeanSpec(g, signs, d, i) for i, g in enumerate(generators, 1)]
    if shrink:
        lo, hi = interval
        for s in specs:
            lo, hi = evaluable_interval(s, lo, hi)
        interval = (lo, hi)
    graphs = tuple(sample_graph(s, interval, m, method, tol) for s in specs)
    return NSetSample(graphs, tuple(reversed(d.deltas)))


def _fmt(v: float) -> str:
    return format(v, ".17g")


def graph_csv(sample: GraphSample) -> str:
    return "x,y\n" + "".join(f"{_fmt(x)},{_fmt(y)}\n" for x, y in sample.points)


def nset_csv(sample: NSetSample) -> str:
    rows = [f"# tags={','.join(_fmt(t) for t in sample.tags)}", "x,y1,y2,y3"]
    g1, g2, g3 = sample.graphs
    for (x, y1), (_, y2), (_, y3) in zip(g1.points, g2.points, g3.points):
        rows.append(",".join(_fmt(v) for v in (x, y1, y2, y3)))
    return "\n".join(rows) + "\n"
