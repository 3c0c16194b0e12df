"""Topologies on small finite ground sets.

Points are the integers ``0 .. universe_size - 1``.  Opens are stored as
frozensets in a canonical order (by size, then lexicographically on the
sorted elements), so two topologies are equal iff their open tuples are.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import CapacityError, InputError

MAX_UNIVERSE = 24
MAX_HOMEOMORPHISM_UNIVERSE = 8
MAX_ENUMERATION_UNIVERSE = 4


def _canonical_key(s: frozenset[int]) -> tuple[int, tuple[int, ...]]:
    return (len(s), tuple(sorted(s)))


def canonical_opens(opens: Iterable[Iterable[int]]) -> tuple[frozenset[int], ...]:
    """Deduplicate and sort a collection of subsets into canonical order."""
    return tuple(sorted({frozenset(o) for o in opens}, key=_canonical_key))


def _check_universe(universe_size: int) -> None:
    if not isinstance(universe_size, int) or isinstance(universe_size, bool):
        raise InputError(f"universe size must be an integer, got {universe_size!r}")
    if not 1 <= universe_size <= MAX_UNIVERSE:
        raise InputError(f"universe size {universe_size} outside 1..{MAX_UNIVERSE}")


def _check_elements(universe_size: int, subsets: Iterable[frozenset[int]]) -> None:
    for s in subsets:
        for p in s:
            if not isinstance(p, int) or not 0 <= p < universe_size:
                raise InputError(f"point {p!r} of subset {sorted(s)} outside 0..{universe_size - 1}")


def _mask(s: Iterable[int]) -> int:
    m = 0
    for p in s:
        m |= 1 << p
    return m


@dataclass(frozen=True)
class FiniteTopology:
    """A set system over ``{0 .. universe_size-1}``; possibly not (yet) a topology.

    Construction only canonicalises and range-checks.  Use :meth:`report` or
    :func:`is_topology` to validate.
    """

    universe_size: int
    opens: tuple[frozenset[int], ...] = field(default=())

    def __post_init__(self):
        _check_universe(self.universe_size)
        opens = canonical_opens(self.opens)
        _check_elements(self.universe_size, opens)
        object.__setattr__(self, "opens", opens)

    @cached_property
    def masks(self) -> frozenset[int]:
        return frozenset(_mask(o) for o in self.opens)

    @property
    def full(self) -> frozenset[int]:
        return frozenset(range(self.universe_size))

    def __len__(self) -> int:
        return len(self.opens)

    def __contains__(self, subset: Iterable[int]) -> bool:
        return _mask(subset) in self.masks

    def index(self, subset: Iterable[int]) -> int:
        s = frozenset(subset)
        try:
            return self.opens.index(s)
        except ValueError:
            raise InputError(f"{sorted(s)} is not an open of this topology") from None

    def report(self) -> "TopologyReport":
        return is_topology(self.universe_size, self.opens)

    def is_valid(self) -> bool:
        return self.report().valid

    def degrees(self) -> tuple[int, ...]:
        """Number of opens containing each point."""
        return tuple(sum(1 for o in self.opens if p in o) for p in range(self.universe_size))

    def __str__(self) -> str:
        return format_topology(self)

    @classmethod
    def discrete(cls, n: int) -> "FiniteTopology":
        return cls(n, tuple(frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)))

    @classmethod
    def indiscrete(cls, n: int) -> "FiniteTopology":
        return cls(n, (frozenset(), frozenset(range(n))))

    @classmethod
    def sierpinski(cls) -> "FiniteTopology":
        return cls(2, (frozenset(), frozenset({0}), frozenset({0, 1})))


@dataclass(frozen=True)
class TopologyReport:
    valid: bool
    axiom: Optional[str] = None
    witness: tuple = ()
    message: str = "ok"

    def __bool__(self) -> bool:
        return self.valid


def is_topology(universe_size: int, opens: Iterable[Iterable[int]]) -> TopologyReport:
    """Check the three topology axioms and name the first violation.

    Axiom ``i``: empty set and universe are open.  ``ii``: closed under
    pairwise intersection.  ``iii``: closed under union (pairwise suffices
    on a finite collection).
    """
    _check_universe(universe_size)
    subsets = canonical_opens(opens)
    _check_elements(universe_size, subsets)
    masks = {_mask(s): s for s in subsets}
    full = (1 << universe_size) - 1
    if 0 not in masks:
        return TopologyReport(False, "i", (frozenset(),), "empty set is not open")
    if full not in masks:
        return TopologyReport(False, "i", (frozenset(range(universe_size)),), "full universe is not open")
    items = sorted(masks.items())
    for (ma, a), (mb, b) in itertools.combinations(items, 2):
        if ma & mb not in masks:
            return TopologyReport(
                False, "ii", (a, b), f"intersection of {sorted(a)} and {sorted(b)} is not open"
            )
    for (ma, a), (mb, b) in itertools.combinations(items, 2):
        if ma | mb not in masks:
            return TopologyReport(False, "iii", (a, b), f"union of {sorted(a)} and {sorted(b)} is not open")
    return TopologyReport(True)


def _require_valid(t: FiniteTopology, what: str = "topology") -> None:
    r = t.report()
    if not r.valid:
        raise InputError(f"{what} is not a topology: {r.message}")


def induced_topology(t: FiniteTopology, points: Sequence[int]) -> FiniteTopology:
    """Trace of ``t`` on ``points``, re-indexed so ``points[i]`` becomes ``i``.

    The order of ``points`` is respected, which lets callers pull a topology
    back along an arbitrary injective map.
    """
    if len(set(points)) != len(points):
        raise InputError("points must be distinct")
    if not points:
        raise InputError("cannot restrict to the empty set")
    for p in points:
        if not isinstance(p, int) or not 0 <= p < t.universe_size:
            raise InputError(f"point {p!r} not in universe of size {t.universe_size}")
    position = {p: i for i, p in enumerate(points)}
    return FiniteTopology(
        len(points), tuple(frozenset(position[p] for p in o if p in position) for o in t.opens)
    )


def subspace_topology(t: FiniteTopology, subset: Iterable[int]) -> FiniteTopology:
    """``{O ∩ S : O ∈ t}`` re-indexed to ``S`` in increasing point order."""
    _require_valid(t)
    return induced_topology(t, sorted(set(subset)))


def is_coarser(t1: FiniteTopology, t2: FiniteTopology) -> bool:
    """True iff every open of ``t1`` is an open of ``t2``."""
    if t1.universe_size != t2.universe_size:
        raise InputError(f"universe sizes differ: {t1.universe_size} vs {t2.universe_size}")
    return t1.masks <= t2.masks


def _signature(t: FiniteTopology) -> tuple:
    return (t.universe_size, len(t.opens), tuple(sorted(t.degrees())))


def are_homeomorphic(t1: FiniteTopology, t2: FiniteTopology) -> Optional[tuple[int, ...]]:
    """Search for a point bijection carrying the opens of ``t1`` onto those of ``t2``.

    Returns ``perm`` with ``perm[p]`` the image of point ``p``, or ``None``.
    Candidate bijections only pair points of equal open-membership degree.
    """
    for t in (t1, t2):
        if t.universe_size > MAX_HOMEOMORPHISM_UNIVERSE:
            raise CapacityError(
                f"homeomorphism search is limited to {MAX_HOMEOMORPHISM_UNIVERSE} points, got {t.universe_size}"
            )
    if _signature(t1) != _signature(t2):
        return None
    n = t1.universe_size
    d1, d2 = t1.degrees(), t2.degrees()
    candidates = [[q for q in range(n) if d2[q] == d1[p]] for p in range(n)]
    target = t2.masks
    perm = [-1] * n
    used = [False] * n

    def image_ok() -> bool:
        for o in t1.opens:
            m = 0
            for p in o:
                m |= 1 << perm[p]
            if m not in target:
                return False
        return True

    def assign(p: int) -> bool:
        if p == n:
            return image_ok()
        for q in candidates[p]:
            if not used[q]:
                used[q] = True
                perm[p] = q
                if assign(p + 1):
                    return True
                used[q] = False
        return False

    return tuple(perm) if assign(0) else None


def all_topologies(n: int) -> list[FiniteTopology]:
    """Every labelled topology on ``n`` points (``n`` at most 4)."""
    _check_universe(n)
    if n > MAX_ENUMERATION_UNIVERSE:
        raise CapacityError(f"enumeration limited to {MAX_ENUMERATION_UNIVERSE} points")
    full = (1 << n) - 1
    middle = list(range(1, full))
    found = []
    for bits in range(1 << len(middle)):
        masks = {0, full} | {m for i, m in enumerate(middle) if bits >> i & 1}
        if all(a & b in masks and a | b in masks for a in masks for b in masks):
            found.append(FiniteTopology(n, tuple(frozenset(p for p in range(n) if m >> p & 1) for m in masks)))
    return found


def homeomorphism_classes(topologies: Iterable[FiniteTopology]) -> list[list[FiniteTopology]]:
    classes: list[list[FiniteTopology]] = []
    for t in topologies:
        for cls in classes:
            if are_homeomorphic(cls[0], t) is not None:
                cls.append(t)
                break
        else:
            classes.append([t])
    return classes


# -- textual literal -------------------------------------------------------

_LITERAL = re.compile(r"^n\s*=\s*(\d+)\s*;\s*opens\s*=\s*(.*)$", re.S)
_BRACES = re.compile(r"\{([^{}]*)\}")


def parse_subsets(text: str) -> list[frozenset[int]]:
    """Parse ``{},{0},{0,1}`` into a list of subsets."""
    body = re.sub(r"\s+", "", text)
    stripped = _BRACES.sub("", body).replace(",", "")
    if stripped:
        raise InputError(f"unexpected characters in subset list: {stripped!r}")
    out = []
    for inner in _BRACES.findall(body):
        try:
            out.append(frozenset(int(tok) for tok in inner.split(",") if tok))
        except ValueError:
            raise InputError(f"non-integer element in {{{inner}}}") from None
    return out


def parse_topology(text: str) -> FiniteTopology:
    """Parse a literal such as ``n=3; opens={},{0},{0,1,2}``."""
    m = _LITERAL.match(text.strip())
    if not m:
        raise InputError(f"not a topology literal: {text.strip()!r}")
    return FiniteTopology(int(m.group(1)), tuple(parse_subsets(m.group(2))))


def format_subsets(subsets: Iterable[Iterable[int]]) -> str:
    return ",".join("{" + ",".join(str(p) for p in sorted(s)) + "}" for s in subsets)


def format_topology(t: FiniteTopology) -> str:
    return f"n={t.universe_size}; opens={format_subsets(t.opens)}"
