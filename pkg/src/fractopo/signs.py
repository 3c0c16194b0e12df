"""Sign strings ``σ0…σn`` and the index sets they form.

Sign strings are plain ``str`` values over ``"+"`` and ``"-"``; ``+`` sorts
before ``-`` everywhere.  Unicode minus and the letters ``p``/``m`` are
accepted on input.
"""

from __future__ import annotations

import itertools

from .errors import CapacityError, DomainError, InputError

MAX_LEVEL = 20
_ALIASES = {"+": "+", "-": "-", "−": "-", "p": "+", "m": "-"}


def normalize(signs: str) -> str:
    try:
        out = "".join(_ALIASES[c] for c in signs.strip())
    except KeyError as exc:
        raise InputError(f"invalid sign {exc.args[0]!r} in {signs!r}") from None
    if not out:
        raise InputError("a sign string must not be empty")
    return out


def level(signs: str) -> int:
    return len(normalize(signs)) - 1


def sort_key(signs: str) -> tuple[int, str]:
    # '+' (0x2B) already precedes '-' (0x2D); length first keeps levels grouped
    return (len(signs), signs)


def lambda_set(n: int) -> list[str]:
    """All ``2**(n+1)`` sign strings of length ``n+1``, ``+`` before ``-``."""
    if not isinstance(n, int) or n < 0:
        raise InputError(f"level must be a nonnegative integer, got {n!r}")
    if n > MAX_LEVEL:
        raise CapacityError(f"level {n} above cap {MAX_LEVEL}")
    return ["".join(p) for p in itertools.product("+-", repeat=n + 1)]


def parent(signs: str) -> str:
    s = normalize(signs)
    if len(s) < 2:
        raise DomainError(f"level-0 string {s!r} has no parent")
    return s[:-1]


def children(signs: str) -> tuple[str, str]:
    s = normalize(signs)
    return s + "+", s + "-"
