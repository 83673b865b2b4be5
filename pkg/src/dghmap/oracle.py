"""Brute-force references for the structure solver.

Nothing here touches the solver: members are found by iterating the map on
every integer of a range. :func:`brute_force_members` is the literal scalar
scan; :func:`path_table` does the same scan vectorized with numpy so that
configuration sweeps finish in seconds.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import MapParams, path as map_path

__all__ = [
    "brute_force_members",
    "brute_force_path_probability",
    "path_table",
    "members_from_table",
    "brute_force_counts",
    "encode_path",
]

_INT64_SAFE = 2**62
_CHUNK = 1 << 22


def brute_force_members(params: MapParams, path: Sequence[int], epsilon: int, bound: int) -> list[int]:
    """All x <= bound in the domain with x = epsilon (mod dg) and the given path."""
    target = tuple(path)
    m = len(target)
    dg = params.dg
    out = []
    for x in range(1, bound + 1):
        if params.in_domain(x) and x % dg == epsilon % dg and map_path(params, x, m) == target:
            out.append(x)
    return out


def _scan_paths(params: MapParams, lo: int, hi: int, m: int, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Domain members of [lo, hi] and their m-paths encoded base (k_max + 1).

    Paths with any k_i > k_max get code -1.
    """
    if hi * (params.g + 1) ** (m + 1) >= _INT64_SAFE:
        raise OverflowError("range too large for the int64 scan")
    xs, codes = [], []
    for start in range(lo, hi + 1, _CHUNK):
        x, code = _scan_chunk(params, start, min(hi, start + _CHUNK - 1), m, k_max)
        xs.append(x)
        codes.append(code)
    if not xs:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(xs), np.concatenate(codes)


def _scan_chunk(params: MapParams, lo: int, hi: int, m: int, k_max: int):
    d, g = params.d, params.g
    x = np.arange(lo, hi + 1, dtype=np.int64)
    x = x[(x % d != 0) & (x % g != 0)]
    h = np.zeros(d, dtype=np.int64)
    h[1:] = params.h
    base = k_max + 1
    code = np.zeros(x.shape, dtype=np.int64)
    weight = 1
    y = x.copy()
    for _ in range(m):
        y = g * y
        y += h[y % d]
        k = np.zeros(y.shape, dtype=np.int64)
        while True:
            div = y % d == 0
            if not div.any():
                break
            y[div] //= d
            k[div] += 1
        code += np.where(k <= k_max, k, -(base**m)) * weight
        weight *= base
    code[code < 0] = -1
    return x, code


def encode_path(path: Sequence[int], k_max: int) -> int:
    base = k_max + 1
    return sum(k * base**i for i, k in enumerate(path))


def path_table(params: MapParams, m: int, k_max: int, bound: int) -> dict[tuple[tuple[int, ...], int], np.ndarray]:
    """Scan [1, bound] once; map (path, epsilon) to the sorted members.

    Only paths of length exactly m with every k_i <= k_max are kept.
    """
    x, code = _scan_paths(params, 1, bound, m, k_max)
    keep = code >= 0
    x, code = x[keep], code[keep]
    eps = x % params.dg
    order = np.lexsort((x, eps, code))
    x, code, eps = x[order], code[order], eps[order]
    table: dict = {}
    if x.size == 0:
        return table
    key = code * params.dg + eps
    cuts = np.flatnonzero(np.diff(key)) + 1
    starts = np.concatenate(([0], cuts))
    ends = np.concatenate((cuts, [x.size]))
    base = k_max + 1
    for s, e in zip(starts, ends):
        c = int(code[s])
        ks = []
        for _ in range(m):
            ks.append(c % base)
            c //= base
        table[(tuple(ks), int(eps[s]))] = x[s:e]
    return table


def members_from_table(table, path: Sequence[int], epsilon: int, bound: int) -> list[int]:
    arr = table.get((tuple(path), epsilon))
    if arr is None:
        return []
    return [int(v) for v in arr[: np.searchsorted(arr, bound, side="right")]]


def brute_force_path_probability(params: MapParams, path: Sequence[int]) -> Fraction:
    """Exact share of domain members in [1, dg*d**K] whose m-path is ``path``."""
    path = tuple(path)
    m = len(path)
    K = sum(path)
    window = params.dg * params.d**K
    k_max = max(path)
    x, code = _scan_paths(params, 1, window, m, k_max)
    hits = int(np.count_nonzero(code == encode_path(path, k_max)))
    return Fraction(hits, x.size)


def brute_force_counts(params: MapParams, m: int, k_max: int) -> dict[tuple[int, ...], Fraction]:
    """Path probabilities for every path with k_i <= k_max from one scan.

    Each path is counted over its own window [1, dg*d**K]; the scan covers the
    largest window.
    """
    window_max = params.dg * params.d ** (m * k_max)
    x, code = _scan_paths(params, 1, window_max, m, k_max)
    counts: dict[tuple[int, ...], Fraction] = {}
    base = k_max + 1
    by_code = {}
    valid = code >= 0
    for c in np.unique(code[valid]):
        by_code[int(c)] = x[code == c]
    dg, d, E = params.dg, params.d, (params.d - 1) * (params.g - 1)
    for c, xs in by_code.items():
        ks, cc = [], c
        for _ in range(m):
            ks.append(cc % base)
            cc //= base
        K = sum(ks)
        window = dg * d**K
        hits = int(np.searchsorted(xs, window, side="right"))
        counts[tuple(ks)] = Fraction(hits, d**K * E)
    return counts
