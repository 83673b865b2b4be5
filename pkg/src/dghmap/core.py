"""(d, g, h)-maps: parameters, the domain, single steps and trajectories.

A map is fixed by coprime integers ``2 <= d < g`` and a function ``h`` on the
nonzero residues mod ``d`` with ``c + h(c) = 0 (mod d)`` and ``0 < |h(c)| < g``.
On the domain (positive integers divisible by neither ``d`` nor ``g``) it acts
as ``T(x) = (g*x + h(g*x mod d)) / d**k`` with ``k`` the exact power of ``d``
dividing the numerator.

All arithmetic is on Python ints, so trajectories of expanding maps never
overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import (
    CongruenceViolation,
    DomainError,
    IncompleteTable,
    MagnitudeViolation,
    NotCoprime,
    OrderViolation,
)

__all__ = [
    "MapParams",
    "validate_params",
    "parse_h_spec",
    "format_h_spec",
    "residue_set_E",
    "check_domain",
    "step",
    "path",
    "trajectory",
    "stopping_time",
    "COLLATZ",
    "THREE_X_MINUS_ONE",
    "FIVE_X_PLUS_ONE",
]


@dataclass(frozen=True)
class MapParams:
    """A validated (d, g, h) triple.

    ``h`` holds h(1), ..., h(d-1); h is never evaluated on multiples of d.
    Build instances through :func:`validate_params`.
    """

    d: int
    g: int
    h: tuple[int, ...]

    @property
    def dg(self) -> int:
        return self.d * self.g

    @property
    def h_table(self) -> dict[int, int]:
        return {c: v for c, v in enumerate(self.h, start=1)}

    def h_of(self, c: int) -> int:
        c %= self.d
        if c == 0:
            raise DomainError(f"h is undefined on multiples of d={self.d}")
        return self.h[c - 1]

    def in_domain(self, x: int) -> bool:
        return x > 0 and x % self.d != 0 and x % self.g != 0

    def __str__(self) -> str:
        return f"(d={self.d}, g={self.g}, h={format_h_spec(self.h_table)})"


def validate_params(d: int, g: int, h_table: Mapping[int, int]) -> MapParams:
    """Check conditions 1-3 on ``h`` plus coprimality and order; return MapParams."""
    if d < 2 or g <= d:
        raise OrderViolation(f"need 2 <= d < g, got d={d}, g={g}")
    if math.gcd(d, g) != 1:
        raise NotCoprime(f"gcd({d}, {g}) = {math.gcd(d, g)}")
    keys = set(h_table)
    expected = set(range(1, d))
    if keys != expected:
        missing = sorted(expected - keys)
        extra = sorted(keys - expected)
        raise IncompleteTable(f"h must define residues 1..{d - 1}; missing {missing}, extra {extra}")
    for c in range(1, d):
        v = h_table[c]
        if (c + v) % d != 0:
            raise CongruenceViolation(f"{c} + h({c}) = {c + v} is not divisible by {d}")
        if not 0 < abs(v) < g:
            raise MagnitudeViolation(f"|h({c})| = {abs(v)} not in (0, {g})")
    return MapParams(d, g, tuple(int(h_table[c]) for c in range(1, d)))


def parse_h_spec(text: str) -> dict[int, int]:
    """Parse ``"1=2,2=1"`` into ``{1: 2, 2: 1}``."""
    table: dict[int, int] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"bad h entry {item!r}, expected residue=value")
        c = int(key)
        if c in table:
            raise ValueError(f"residue {c} given twice")
        table[c] = int(value)
    return table


def format_h_spec(table: Mapping[int, int]) -> str:
    return ",".join(f"{c}={table[c]}" for c in sorted(table))


COLLATZ = validate_params(2, 3, {1: 1})
THREE_X_MINUS_ONE = validate_params(2, 3, {1: -1})
FIVE_X_PLUS_ONE = validate_params(2, 5, {1: 1})


def residue_set_E(params: MapParams) -> list[int]:
    """Residues in [1, dg] divisible by neither d nor g, ascending."""
    d, g = params.d, params.g
    return [e for e in range(1, d * g + 1) if e % d and e % g]


def check_domain(params: MapParams, x: int) -> int:
    if not params.in_domain(x):
        raise DomainError(f"{x} is not in the domain of {params}")
    return x


def _step(params: MapParams, x: int) -> tuple[int, int]:
    d = params.d
    y = params.g * x
    y += params.h[y % d - 1]
    if d == 2:
        k = (y & -y).bit_length() - 1
        return y >> k, k
    k = 0
    while True:
        q, rem = divmod(y, d)
        if rem:
            return y, k
        y = q
        k += 1


def step(params: MapParams, x: int) -> tuple[int, int]:
    """One application of T; returns ``(T(x), k)``."""
    check_domain(params, x)
    return _step(params, x)


def path(params: MapParams, x: int, m: int) -> tuple[int, ...]:
    """The m-path (k_1, ..., k_m) of x."""
    check_domain(params, x)
    ks = []
    for _ in range(m):
        x, k = _step(params, x)
        ks.append(k)
    return tuple(ks)


def trajectory(params: MapParams, x: int, m: int) -> list[int]:
    """[x, T(x), ..., T^m(x)]."""
    check_domain(params, x)
    out = [x]
    for _ in range(m):
        x, _k = _step(params, x)
        out.append(x)
    return out


def stopping_time(params: MapParams, x: int, cap: int) -> Optional[int]:
    """Smallest n <= cap with T^n(x) < x, or None if no such n within the cap."""
    check_domain(params, x)
    y = x
    for n in range(1, cap + 1):
        y, _k = _step(params, y)
        if y < x:
            return n
    return None
