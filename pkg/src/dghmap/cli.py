"""Command-line interface.

Exit codes: 0 ok, 2 invalid parameters or usage, 3 x outside the domain,
4 residue not in E, 5 verification mismatch, 6 missing --seed.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import oracle, statistics as st
from .core import MapParams, parse_h_spec, path as map_path, residue_set_E, trajectory, validate_params
from .errors import DomainError, ParamsError, ResidueError  # WindowTooSmall is a ValueError
from .structure import (
    PathSpec,
    enumerate_members,
    solution_to_json,
    solve_structure,
    verify_solution,
)

EXIT_OK, EXIT_PARAMS, EXIT_DOMAIN, EXIT_RESIDUE, EXIT_MISMATCH, EXIT_SEED = 0, 2, 3, 4, 5, 6


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _common() -> argparse.ArgumentParser:
    # SUPPRESS lets the same options appear before or after the subcommand.
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--d", type=int, default=S, help="divisor base d (default 2)")
    p.add_argument("--g", type=int, default=S, help="multiplier g (default 3)")
    p.add_argument("--h", default=S, help="h table as residue=value pairs, e.g. 1=1 or 1=2,2=1 (default 1=1 when d=2)")
    p.add_argument("--format", choices=("json", "csv"), default=S, help="output format (default json)")
    p.add_argument("--out", default=S, help="write output here instead of stdout")
    p.add_argument("--threads", type=int, default=S, help=f"worker processes (default ${st.THREADS_ENV} or 1)")
    p.add_argument("--seed", type=int, default=S, help="RNG seed, required by stochastic commands")
    return p


def _window_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window-low", type=int, help="sampling window start (default: a full-period window sized for m)")
    p.add_argument("--window-high", type=int, help="sampling window end, inclusive")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="dghmap",
        description="Generalized 3x+1 maps T(x) = (g x + h(g x)) / d^k: iteration, path structure solver, statistics.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iterate", parents=[common], help="print x, T(x), ..., T^m(x) and the m-path")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("solve", parents=[common], help="all (q, r, delta) triples for a path and residue")
    p.add_argument("--path", required=True, help="comma-separated k values, e.g. 2,3")
    p.add_argument("--eps", type=int, required=True, help="residue class mod dg (must be in E)")
    p.add_argument("--verify", help="comma-separated p values to forward-check by direct iteration")

    p = sub.add_parser("enumerate", parents=[common], help="members <= bound with the given path and residue")
    p.add_argument("--path", required=True)
    p.add_argument("--eps", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check against a brute-force scan (exit 5 on mismatch)")

    p = sub.add_parser("verify", parents=[common], help="solver vs brute force over all small paths and residues")
    p.add_argument("--m-max", type=int, default=3)
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--bound-factor", type=int, default=3, help="scan bound per path is factor * dg * d^K")

    p = sub.add_parser("stats", parents=[common], help="distribution, drift and Monte Carlo statistics")
    ssub = p.add_subparsers(dest="stat", required=True)

    q = ssub.add_parser("path-prob", parents=[common], help="exact density of a path")
    q.add_argument("--path", required=True)

    q = ssub.add_parser("moments", parents=[common], help="mean and variance of k_1 + ... + k_m")
    q.add_argument("--m", type=int, required=True)

    q = ssub.add_parser("drift", parents=[common], help="theoretical drift; with --m/--n also a sampled estimate")
    q.add_argument("--m", type=int)
    q.add_argument("--n", type=int)
    _window_args(q)

    q = ssub.add_parser("increments", parents=[common], help="normalized log increments and KS summary")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--t", default="0,0.25,0.5,0.75,1", help="partition of [0, 1]")
    q.add_argument("--normalization", choices=("increment", "total"), default="increment")
    _window_args(q)

    q = ssub.add_parser("kdist", parents=[common], help="histogram of k over sampled trajectories")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    _window_args(q)

    q = ssub.add_parser("stopping", parents=[common], help="share of [1, bound] with stopping time <= cap")
    q.add_argument("--bound", type=int, required=True)
    q.add_argument("--cap", type=int, required=True)
    return parser


def _params(ns) -> MapParams:
    d = getattr(ns, "d", 2)
    g = getattr(ns, "g", 3)
    h_spec = getattr(ns, "h", None)
    try:
        table = parse_h_spec(h_spec) if h_spec is not None else ({1: 1} if d == 2 else {})
    except ValueError as exc:
        raise CliError(EXIT_PARAMS, str(exc)) from None
    return validate_params(d, g, table)


def _params_json(params: MapParams) -> dict:
    return {"d": params.d, "g": params.g, "h": {str(c): v for c, v in params.h_table.items()}}


def _seed(ns) -> int:
    seed = getattr(ns, "seed", None)
    if seed is None:
        raise CliError(EXIT_SEED, f"stats {ns.stat} needs --seed")
    return seed


def _window(ns, params: MapParams, m: int) -> st.DensitySpec:
    if ns.window_low is None and ns.window_high is None:
        return st.DensitySpec.for_steps(params, m)
    if ns.window_low is None or ns.window_high is None:
        raise CliError(EXIT_PARAMS, "give both --window-low and --window-high")
    spec = st.DensitySpec(ns.window_low, ns.window_high)
    spec.check(params)
    return spec


def _path(text: str) -> PathSpec:
    try:
        path = PathSpec.parse(text)
    except ValueError as exc:
        raise CliError(EXIT_PARAMS, f"bad --path: {exc}") from None
    if path.m == 0:
        raise CliError(EXIT_PARAMS, "--path must be nonempty")
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_iterate(ns, params: MapParams, fmt: str) -> str:
    traj = trajectory(params, ns.x, ns.m)
    ks = map_path(params, ns.x, ns.m)
    if fmt == "csv":
        lines = ["n,x,k"] + [f"{n},{x},{ks[n - 1] if n else ''}" for n, x in enumerate(traj)]
        return "\n".join(lines) + "\n"
    return _dump({**_params_json(params), "x": str(ns.x), "m": ns.m, "trajectory": [str(v) for v in traj], "path": list(ks)})


def cmd_solve(ns, params: MapParams, fmt: str) -> tuple[str, int]:
    sol = solve_structure(params, _path(ns.path), ns.eps, verify=False)
    code = EXIT_OK
    out = solution_to_json(sol)
    if ns.verify:
        ps = [int(p) for p in ns.verify.split(",") if p.strip()]
        failures = verify_solution(sol, ps)
        out["verification"] = {"p": ps, "passed": not failures, "failures": [list(f) for f in failures]}
        if failures:
            code = EXIT_MISMATCH
    if fmt == "csv":
        lines = ["q,r,delta"] + [f"{t.q},{t.r},{t.delta}" for t in sol.triples]
        if ns.verify:
            lines.append(f"# verification {'passed' if code == EXIT_OK else 'FAILED'}")
        return "\n".join(lines) + "\n", code
    return _dump(out), code


def cmd_enumerate(ns, params: MapParams, fmt: str) -> tuple[str, int]:
    path = _path(ns.path)
    sol = solve_structure(params, path, ns.eps, verify=False)
    members = enumerate_members(sol, ns.bound)
    code = EXIT_OK
    if ns.oracle and oracle.brute_force_members(params, path.ks, ns.eps, ns.bound) != members:
        code = EXIT_MISMATCH
    if fmt == "csv":
        return "".join(f"{x}\n" for x in members), code
    return _dump([str(x) for x in members]), code


def cmd_verify(ns, params: MapParams, fmt: str) -> tuple[str, int]:
    d, dg = params.d, params.dg
    checked = 0
    mismatches = []
    for m in range(1, ns.m_max + 1):
        bound_max = ns.bound_factor * dg * d ** (m * ns.k_max)
        table = oracle.path_table(params, m, ns.k_max, bound_max)
        for ks in itertools.product(range(1, ns.k_max + 1), repeat=m):
            bound = ns.bound_factor * dg * d ** sum(ks)
            for eps in residue_set_E(params):
                sol = solve_structure(params, ks, eps, verify=False)
                ok = len(sol.triples) == (d - 1) ** m and enumerate_members(sol, bound) == oracle.members_from_table(
                    table, ks, eps, bound
                )
                checked += 1
                if not ok:
                    mismatches.append({"path": list(ks), "eps": eps})
    code = EXIT_MISMATCH if mismatches else EXIT_OK
    if fmt == "csv":
        return f"checked,mismatches\n{checked},{len(mismatches)}\n", code
    return _dump({**_params_json(params), "checked": checked, "mismatches": mismatches}), code


def cmd_stats(ns, params: MapParams, fmt: str, threads: Optional[int]) -> str:
    stat = ns.stat
    if stat == "path-prob":
        path = _path(ns.path)
        prob = st.path_probability(params, path.ks)
        if fmt == "csv":
            return st._csv(("path", "probability"), [(ns.path, str(prob))])
        return _dump({**_params_json(params), "path": list(path.ks), "probability": str(prob)})
    if stat == "moments":
        mean, var = st.k_sum_moments(params, ns.m)
        if fmt == "csv":
            return st._csv(("m", "mean", "variance"), [(ns.m, str(mean), str(var))])
        return _dump({**_params_json(params), "m": ns.m, "mean": str(mean), "variance": str(var)})
    if stat == "drift":
        ds = st.drift_stats(params)
        if ns.m is None and ns.n is None:
            if fmt == "csv":
                return st._csv(
                    ("drift", "sign", "per_step_variance", "k_mean", "k_variance"),
                    [(ds.drift, ds.sign, ds.per_step_variance, str(ds.k_mean), str(ds.k_variance))],
                )
            return _dump(
                {
                    **_params_json(params),
                    "drift": st.format_float(ds.drift),
                    "sign": ds.sign,
                    "per_step_variance": st.format_float(ds.per_step_variance),
                    "k_mean": str(ds.k_mean),
                    "k_variance": str(ds.k_variance),
                }
            )
        if ns.m is None or ns.n is None:
            raise CliError(EXIT_PARAMS, "stats drift needs both --m and --n for a sampled estimate")
        seed = _seed(ns)
        emp = st.empirical_drift(params, ns.m, _window(ns, params, ns.m), ns.n, seed, threads)
        if fmt == "csv":
            return st.drift_csv([(ns.m, ns.n, emp, ds.drift)])
        return _dump(
            {
                **_params_json(params),
                "m": ns.m,
                "n": ns.n,
                "seed": seed,
                "empirical": st.format_float(emp),
                "theoretical": st.format_float(ds.drift),
                "abs_err": st.format_float(abs(emp - ds.drift)),
                "sign_match": (emp < 0) == (ds.drift < 0),
            }
        )
    if stat == "increments":
        seed = _seed(ns)
        try:
            part = st.PartitionSpec.parse(ns.t, ns.m)
        except ValueError as exc:
            raise CliError(EXIT_PARAMS, str(exc)) from None
        sample = st.sample_increments(
            params, part, _window(ns, params, ns.m), ns.n, seed, threads, normalization=ns.normalization
        )
        ks = sample.ks()
        crit = st.ks_critical(sample.sample_count)
        if fmt == "csv":
            text = st.increments_csv(sample)
            text += "".join(
                f"# ks i={i} D={st.format_float(D)} critical={st.format_float(crit)} {'pass' if D < crit else 'fail'}\n"
                for i, D in enumerate(ks)
            )
            return text
        return _dump(
            {
                **_params_json(params),
                "m": ns.m,
                "n": ns.n,
                "seed": seed,
                "m_values": list(part.m_values),
                "normalization": ns.normalization,
                "u": [[st.format_float(v) for v in row] for row in sample.u.tolist()],
                "ks": [st.format_float(D) for D in ks],
                "ks_critical": st.format_float(crit),
                "max_form_gap": st.format_float(sample.max_form_gap),
            }
        )
    if stat == "kdist":
        seed = _seed(ns)
        xs = st.sample_domain(params, _window(ns, params, ns.m), ns.n, seed)
        counts = st.empirical_k_distribution(params, ns.m, xs, threads)
        if fmt == "csv":
            return st.histogram_csv(params, counts)
        total = sum(counts.values())
        return _dump(
            {
                **_params_json(params),
                "m": ns.m,
                "n": ns.n,
                "seed": seed,
                "counts": {str(k): c for k, c in counts.items()},
                "expected": {str(k): str(Fraction(total * (params.d - 1), params.d**k)) for k in counts},
            }
        )
    if stat == "stopping":
        frac = st.stopping_density(params, ns.bound, ns.cap, threads)
        if fmt == "csv":
            return st.stopping_csv([(ns.bound, ns.cap, frac)])
        return _dump({**_params_json(params), "bound": ns.bound, "cap": ns.cap, "fraction": st.format_float(frac)})
    raise CliError(EXIT_PARAMS, f"unknown stats command {stat}")


def run(argv: Optional[Sequence[str]] = None) -> tuple[str, int, Optional[str]]:
    """Parse and execute; returns (output text, exit code, --out path)."""
    ns = build_parser().parse_args(argv)
    fmt = getattr(ns, "format", "json")
    threads = getattr(ns, "threads", None)
    params = _params(ns)
    code = EXIT_OK
    if ns.command == "iterate":
        text = cmd_iterate(ns, params, fmt)
    elif ns.command == "solve":
        text, code = cmd_solve(ns, params, fmt)
    elif ns.command == "enumerate":
        text, code = cmd_enumerate(ns, params, fmt)
    elif ns.command == "verify":
        text, code = cmd_verify(ns, params, fmt)
    else:
        text = cmd_stats(ns, params, fmt, threads)
    return text, code, getattr(ns, "out", None)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        text, code, out = run(argv)
    except CliError as exc:
        print(f"dghmap: {exc}", file=sys.stderr)
        return exc.code
    except ParamsError as exc:
        print(f"dghmap: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except DomainError as exc:
        print(f"dghmap: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResidueError as exc:
        print(f"dghmap: {exc}", file=sys.stderr)
        return EXIT_RESIDUE
    except ValueError as exc:
        print(f"dghmap: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
