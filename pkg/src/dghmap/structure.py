"""Constructive solver for the set of integers sharing an m-path.

For a path ``(k_1, ..., k_m)`` with ``K = k_1 + ... + k_m`` and a residue
``eps`` in E, the integers ``x = eps (mod dg)`` with that path are exactly the
``(d-1)**m`` progressions ``dg*(d**K * p + q) + eps``, ``p >= 0``, and each is
carried by ``T**m`` onto ``dg*(g**m * p + r) + delta``. The solver builds the
triples ``(q, r, delta)`` by induction on the path length: every triple for the
length-(m-1) prefix splits into ``d - 1`` triples for the full path, one per
admissible ``delta`` lift.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .core import MapParams, _step, validate_params
from .errors import NotCoprime, ResidueError

__all__ = [
    "PathSpec",
    "ResidueTriple",
    "StructureSolution",
    "PrefixRepresentation",
    "bezout_pair",
    "solve_base",
    "extend",
    "solve_structure",
    "enumerate_members",
    "image_of",
    "verify_solution",
    "prefix_representations",
    "solution_to_json",
    "solution_from_json",
]


@dataclass(frozen=True)
class PathSpec:
    ks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        if any(k < 1 for k in self.ks):
            raise ValueError(f"path entries must be >= 1, got {self.ks}")

    @classmethod
    def parse(cls, text: str) -> "PathSpec":
        return cls(tuple(int(s) for s in text.split(",") if s.strip()))

    @property
    def m(self) -> int:
        return len(self.ks)

    @property
    def k_total(self) -> int:
        return sum(self.ks)

    def __len__(self) -> int:
        return len(self.ks)

    def __getitem__(self, item):
        return self.ks[item]

    def prefix(self, i: int) -> "PathSpec":
        return PathSpec(self.ks[:i])


class ResidueTriple(tuple):
    """``(q, r, delta)``; a plain tuple with named access."""

    __slots__ = ()

    def __new__(cls, q: int, r: int, delta: int):
        return super().__new__(cls, (q, r, delta))

    q = property(lambda self: self[0])
    r = property(lambda self: self[1])
    delta = property(lambda self: self[2])

    def __repr__(self) -> str:
        return f"ResidueTriple(q={self[0]}, r={self[1]}, delta={self[2]})"


@dataclass(frozen=True)
class StructureSolution:
    params: MapParams
    epsilon: int
    path: PathSpec
    triples: tuple[ResidueTriple, ...]
    _powers: tuple[int, int] = field(default=(0, 0), repr=False, compare=False)

    @property
    def d_power(self) -> int:
        """d**k_total."""
        return self._powers[0] or self.params.d ** self.path.k_total

    @property
    def g_power(self) -> int:
        """g**m."""
        return self._powers[1] or self.params.g ** self.path.m

    @property
    def progression_step(self) -> int:
        return self.params.dg * self.d_power

    @property
    def image_step(self) -> int:
        return self.params.dg * self.g_power

    def member(self, i: int, p: int) -> int:
        """x_p for triple i."""
        return self.params.dg * (self.d_power * p + self.triples[i].q) + self.epsilon

    def __len__(self) -> int:
        return len(self.triples)


@dataclass(frozen=True)
class PrefixRepresentation:
    """``T**m_i(x_p) = dg*(coefficient*p + q_i) + delta_i`` for all p >= 0."""

    prefix_index: int
    coefficient: int
    q_i: int
    delta_i: int

    def value(self, dg: int, p: int) -> int:
        return dg * (self.coefficient * p + self.q_i) + self.delta_i


def bezout_pair(A: int, B: int) -> tuple[int, int]:
    """``(a, b)`` with ``A*a - B*b == 1`` and ``0 <= a < B``."""
    if A <= 0 or B <= 0:
        raise ValueError("bezout_pair needs positive arguments")
    if B == 1:
        return 0, -1
    try:
        a = pow(A, -1, B)
    except ValueError:
        raise NotCoprime(f"gcd({A}, {B}) != 1") from None
    b, rem = divmod(A * a - 1, B)
    assert rem == 0
    return a, b


def _check_epsilon(params: MapParams, epsilon: int) -> None:
    if not (1 <= epsilon < params.dg and epsilon % params.d and epsilon % params.g):
        raise ResidueError(f"{epsilon} is not in E for {params}")


def _lifts(params: MapParams, d_k: int, h: int) -> list[int]:
    """The d-1 residues delta in E with ``d_k * delta = h (mod g)``."""
    d, g = params.d, params.g
    low = h * pow(d_k, -1, g) % g
    out = []
    for hi in range(d):
        delta = hi * g + low
        if delta % d:
            out.append(delta)
    assert len(out) == d - 1, "exactly one lift must be divisible by d"
    return out


def _split(
    params: MapParams,
    q_prev: int,
    r_prev: int,
    delta_prev: int,
    k_prev: int,
    k_m: int,
    g_pow: int,
    bezout_a: int,
) -> Iterator[ResidueTriple]:
    """Children of one prefix triple; ``g_pow`` is g to the new path length.

    ``q_prev, r_prev, delta_prev`` describe the length-(m-1) prefix whose
    exponents sum to ``k_prev``; the empty prefix is ``(0, 0, eps)`` with
    ``k_prev = 0``.
    """
    d, g = params.d, params.g
    dg = d * g
    d_km = d ** k_m
    h = params.h_of(g * delta_prev)
    d_prev = d ** k_prev
    for delta in _lifts(params, d_km, h):
        num = d_km * delta - g * delta_prev - h
        v, rem = divmod(num, dg)
        assert rem == 0, "v must be an integer"
        v -= g * r_prev
        p2 = bezout_a * v % d_km
        r, rem = divmod(g_pow * p2 - v, d_km)
        assert rem == 0 and 0 <= r < g_pow
        yield ResidueTriple(d_prev * p2 + q_prev, r, delta)


def solve_base(params: MapParams, k: int, epsilon: int) -> list[ResidueTriple]:
    """The d-1 triples for the 1-path ``(k,)`` and residue ``epsilon``."""
    _check_epsilon(params, epsilon)
    if k < 1:
        raise ValueError("k must be >= 1")
    g = params.g
    a, _b = bezout_pair(g, params.d ** k)
    triples = list(_split(params, 0, 0, epsilon, 0, k, g, a))
    return sorted(triples, key=_order)


def _order(t: ResidueTriple):
    return t[2], t[0]


def extend(params: MapParams, prior: StructureSolution, k_m: int) -> StructureSolution:
    """Solution for ``prior.path + (k_m,)`` from the solution of the prefix."""
    if k_m < 1:
        raise ValueError("k_m must be >= 1")
    m = prior.path.m + 1
    k_prev = prior.path.k_total
    g_pow = params.g ** m
    a, _b = bezout_pair(g_pow, params.d ** k_m)
    triples: list[ResidueTriple] = []
    for q, r, delta in prior.triples:
        triples.extend(_split(params, q, r, delta, k_prev, k_m, g_pow, a))
    triples.sort(key=_order)
    new_path = PathSpec(prior.path.ks + (k_m,))
    return StructureSolution(
        params,
        prior.epsilon,
        new_path,
        tuple(triples),
        (params.d ** (k_prev + k_m), g_pow),
    )


def solve_structure(
    params: MapParams,
    path: PathSpec | Sequence[int],
    epsilon: int,
    verify: bool = __debug__,
) -> StructureSolution:
    """All (d-1)**m triples for ``path`` and ``epsilon``.

    With ``verify`` (on unless Python runs with -O) every progression is
    checked at p = 0, 1 by direct iteration.
    """
    if not isinstance(path, PathSpec):
        path = PathSpec(tuple(path))
    if path.m == 0:
        raise ValueError("path must be nonempty")
    base = solve_base(params, path.ks[0], epsilon)
    sol = StructureSolution(
        params, epsilon, path.prefix(1), tuple(base), (params.d ** path.ks[0], params.g)
    )
    for k_m in path.ks[1:]:
        sol = extend(params, sol, k_m)
    assert len(sol.triples) == (params.d - 1) ** path.m
    if verify:
        bad = verify_solution(sol, (0, 1))
        assert not bad, f"forward verification failed for {bad}"
    return sol


def verify_solution(solution: StructureSolution, ps: Iterable[int] = (0, 1)) -> list[tuple[int, int]]:
    """Forward-check every triple by direct iteration; returns failing (i, p)."""
    params = solution.params
    ks = solution.path.ks
    failures = []
    for i in range(len(solution.triples)):
        for p in ps:
            x = solution.member(i, p)
            ok = params.in_domain(x)
            y = x
            for k in ks:
                if not ok:
                    break
                y, k_obs = _step(params, y)
                ok = k_obs == k
            if not ok or y != image_of(solution, i, p):
                failures.append((i, p))
    return failures


def enumerate_members(solution: StructureSolution, bound: int) -> list[int]:
    """Every member ``<= bound`` of the solution's progressions, ascending."""
    dg = solution.params.dg
    step_ = solution.progression_step
    out = []
    for t in solution.triples:
        x = dg * t.q + solution.epsilon
        if x > bound:
            continue
        out.extend(range(x, bound + 1, step_))
    out.sort()
    return out


def image_of(solution: StructureSolution, triple_index: int, p: int) -> int:
    """``T**m`` of the p-th member of progression ``triple_index``."""
    if not 0 <= triple_index < len(solution.triples):
        raise IndexError(f"triple index {triple_index} out of range 0..{len(solution.triples) - 1}")
    if p < 0:
        raise ValueError("p must be >= 0")
    _q, r, delta = solution.triples[triple_index]
    return solution.params.dg * (solution.g_power * p + r) + delta


def prefix_representations(
    params: MapParams,
    path: PathSpec | Sequence[int],
    triple: ResidueTriple,
    epsilon: int,
) -> list[PrefixRepresentation]:
    """Affine form of ``T**i`` on the progression of ``triple``, for i = 0..m.

    Walks the induction along the lineage of ``triple``: at each prefix length
    the unique child whose q agrees with ``triple.q`` modulo d**(prefix sum)
    is kept.
    """
    if not isinstance(path, PathSpec):
        path = PathSpec(tuple(path))
    _check_epsilon(params, epsilon)
    d, g = params.d, params.g
    K = path.k_total
    reps = [PrefixRepresentation(0, d ** K, triple.q, epsilon)]
    q, r, delta = 0, 0, epsilon
    k_prev = 0
    for i, k_i in enumerate(path.ks, start=1):
        g_pow = g ** i
        a, _b = bezout_pair(g_pow, d ** k_i)
        k_now = k_prev + k_i
        mod = d ** k_now
        match = [t for t in _split(params, q, r, delta, k_prev, k_i, g_pow, a) if t.q == triple.q % mod]
        if len(match) != 1:
            raise ValueError(f"{triple} is not a solution triple for path {path.ks} at eps={epsilon}")
        q, r, delta = match[0]
        k_prev = k_now
        # x_p sits at index j = (triple.q - q) / d**k_now + d**(K - k_now) * p of the prefix progression
        j0 = (triple.q - q) // mod
        reps.append(PrefixRepresentation(i, g_pow * d ** (K - k_now), g_pow * j0 + r, delta))
    if (reps[-1].q_i, reps[-1].delta_i) != (triple.r, triple.delta):
        raise ValueError(f"{triple} is not a solution triple for path {path.ks} at eps={epsilon}")
    return reps


def solution_to_json(solution: StructureSolution) -> dict:
    """JSON-ready dict; big integers become decimal strings."""
    p = solution.params
    return {
        "d": p.d,
        "g": p.g,
        "h": {str(c): v for c, v in p.h_table.items()},
        "epsilon": solution.epsilon,
        "path": list(solution.path.ks),
        "k_total": solution.path.k_total,
        "triples": [{"q": str(t.q), "r": str(t.r), "delta": t.delta} for t in solution.triples],
        "progression_step": str(solution.progression_step),
        "image_step": str(solution.image_step),
    }


def solution_from_json(data: dict) -> StructureSolution:
    params = validate_params(int(data["d"]), int(data["g"]), {int(c): int(v) for c, v in data["h"].items()})
    epsilon = int(data["epsilon"])
    _check_epsilon(params, epsilon)
    path = PathSpec(tuple(int(k) for k in data["path"]))
    if int(data["k_total"]) != path.k_total:
        raise ValueError("k_total does not match path")
    triples = tuple(ResidueTriple(int(t["q"]), int(t["r"]), int(t["delta"])) for t in data["triples"])
    return StructureSolution(params, epsilon, path, triples)

