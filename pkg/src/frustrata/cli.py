"""Command-line front end.

Every randomised subcommand is a deterministic function of its flags, seed
included, and ``--threads`` never changes a result. Exit codes: 0 success,
1 invalid input, 2 I/O failure, 3 a size cap was exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
from fractions import Fraction
from pathlib import Path

from . import io as fio
from .census import (CENSUS_COLUMNS, CensusParams, census, stima_bound,
                     theta_and_bounds)
from .errors import CapacityError, FrustrataError
from .ground_state import GroundStateResult, solve
from .interface import components, euler_circuit, interface, majority_report
from .lattice import Domain, gen_periodic, gen_random, mu
from .separating import (LEMMA1_COLUMNS, lemma1_experiment, proof_chain_holds, search_separating,
                         separating_tail_probability, trail_count, trial_seed)

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_CAPACITY = 0, 1, 2, 3


class CLIValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which the exit-code contract reserves for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return w, h


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _window(text: str) -> tuple[int, int, int, int]:
    vals = _ints(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("expected x0,y0,width,height")
    return tuple(vals)


def _require(cond: bool, message: str):
    if not cond:
        raise CLIValidationError(message)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise CLIValidationError(f"{path}: not valid JSON ({exc})") from None


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _table(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: r[c] for c in columns} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({c: r[c] for c in columns})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands

def cmd_gen(args) -> int:
    _require(args.format == "json", "gen writes JSON only")
    w, h = args.size
    if args.periodic:
        _require(args.p is None, "give either --p or --periodic")
        cell = fio.cell_from_dict(_load_json(args.periodic))
        system = gen_periodic(cell, w, h)
    else:
        _require(args.p is not None, "gen needs --p or --periodic")
        _require(args.seed is not None, "a random system needs --seed")
        system = gen_random(args.p, w, h, args.seed)
    _emit(fio.dumps_system(system), args.out)
    n = system.n_bonds
    af = system.af_count
    summary = f"bonds={n} af={af} af_fraction={af / n if n else 0.0:.6f}\n"
    (sys.stdout if args.out else sys.stderr).write(summary)
    return EXIT_OK


def _domain(args, system) -> Domain:
    if args.domain is None:
        return Domain.rect(system.width, system.height)
    x0, y0, w, h = args.domain
    return Domain.rect(w, h, (x0, y0))


def cmd_solve(args) -> int:
    _require(args.format == "json", "solve writes JSON only")
    system = fio.system_from_dict(_load_json(args.system))
    _require(args.method != "local" or args.seed is not None, "method local needs --seed")
    D = _domain(args, system)
    result = solve(system, D, args.method, args.seed or 0, args.steps)
    report = majority_report(result.config)
    if args.out is None:
        _emit(json.dumps({"ground_state": result.to_dict(), "majority": report.to_dict()}) + "\n",
              None)
    else:
        report_path = args.report or str(Path(args.out).with_suffix("")) + ".majority.json"
        _emit(result.to_json() + "\n", args.out)
        _emit(report.to_json() + "\n", report_path)
    return EXIT_OK


def cmd_interface(args) -> int:
    system = fio.system_from_dict(_load_json(args.system))
    ground = GroundStateResult.from_dict(_load_json(args.ground))
    sigma = interface(ground.config)
    if args.format == "csv":
        _emit(sigma.to_csv(), args.out)
        return EXIT_OK
    comps = []
    for comp in components(sigma, ground.config.domain):
        entry = {"kind": comp.kind, "length": comp.length,
                 "touches_boundary": comp.touches_boundary}
        if comp.kind == "closed":
            m = mu(euler_circuit(comp), system)
            entry.update(mu=m, two_mu_ge_length=2 * m >= comp.length)
        comps.append(entry)
    _emit(json.dumps({"length": len(sigma), "components": comps}, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_seppath(args) -> int:
    system = fio.system_from_dict(_load_json(args.system))
    window = args.window or (0, 0, system.width - 1, system.height - 1)
    res = search_separating(system, window, args.min_len, args.mode, args.cap,
                            seed=args.seed or 0)
    out = {"found": res.found, "mode": res.mode, "complete": res.complete,
           "explored": res.explored, "window": list(window), "min_len": args.min_len}
    if res.witness is not None:
        out.update(witness=[list(s) for s in res.witness.sites], length=res.witness.length,
                   mu=mu(res.witness, system))
    if args.format == "csv":
        rows = [{"step": k, "x": s[0], "y": s[1]}
                for k, s in enumerate(res.witness.sites if res.witness else [])]
        _emit(_table(rows, ["step", "x", "y"], "csv"), args.out)
    else:
        _emit(json.dumps(out) + "\n", args.out)
    return EXIT_OK


SWEEP_COLUMNS = LEMMA1_COLUMNS + ["gs_trials", "gs_width", "gs_height", "gs_median_max_boundary",
                                  "gs_max_max_boundary", "gs_mean_majority_fraction"]


def ground_state_stats(p: float, width: int, height: int, trials: int, seed: int) -> dict:
    """Majority statistics of exact minimisers on ``trials`` random strips."""
    bounds, fractions = [], []
    D = Domain.rect(width, height)
    for t in range(trials):
        system = gen_random(p, width, height, trial_seed(seed, t))
        rep = majority_report(solve(system, D, "dp").config)
        bounds.append(rep.max_boundary_length)
        fractions.append(rep.majority_fraction)
    if not trials:
        return {"gs_median_max_boundary": "", "gs_max_max_boundary": "",
                "gs_mean_majority_fraction": ""}
    return {"gs_median_max_boundary": statistics.median(bounds),
            "gs_max_max_boundary": max(bounds),
            "gs_mean_majority_fraction": statistics.fmean(fractions)}


def cmd_sweep(args) -> int:
    _require(args.seed is not None, "sweep needs --seed")
    _require(all(0 <= p <= 1 for p in args.p_grid), "p values must lie in [0, 1]")
    _require(all(n >= 1 for n in args.sizes), "sizes must be positive")
    _require(args.trials >= 0 and args.gs_trials >= 0, "trial counts must be >= 0")
    rows = []
    for n in args.sizes:
        lemma_rows = lemma1_experiment(args.p_grid, n, args.kappa, args.trials, args.seed,
                                       cap=args.cap, min_len=args.min_len, workers=args.threads)
        gw, gh = n, min(n, args.strip)
        for r in lemma_rows:
            d = r.as_dict()
            d.update(gs_trials=args.gs_trials, gs_width=gw, gs_height=gh)
            d.update(ground_state_stats(r.p, gw, gh, args.gs_trials, args.seed))
            rows.append(d)
    _emit(_table(rows, SWEEP_COLUMNS, args.format), args.out)
    return EXIT_OK


def cmd_census(args) -> int:
    _require((args.m is None) != (args.p is None), "give exactly one of --m and --p")
    lam = Fraction(args.lam)
    if args.p is not None:
        params = CensusParams.from_p(args.N, args.p, lam, args.translate)
    else:
        params = CensusParams(args.N, args.m, lam, args.translate)
    if args.mode == "sample":
        _require(args.seed is not None, "sampled census needs --seed")
    res = census(params, args.mode, seed=args.seed or 0, trials=args.trials,
                            workers=args.threads)
    _emit(_table([res.as_dict()], CENSUS_COLUMNS, args.format), args.out)
    return EXIT_OK


BOUNDS_COLUMNS = ["p", "k", "tail_exact", "tail_bound", "tail_holds", "chain_holds", "trail_count",
                  "theta", "C_of_p", "three_theta", "N", "lambda", "stima_bound"]


def cmd_bounds(args) -> int:
    _require(all(0 <= p <= 1 for p in args.p_grid), "p values must lie in [0, 1]")
    _require(args.k_max >= 1, "k-max must be >= 1")
    counts = {k: trail_count(k) for k in range(1, min(args.k_max, args.count_max) + 1)}
    rows = []
    for p in args.p_grid:
        if 0 < p < 0.5:
            tb = theta_and_bounds(p)
            th = {"theta": tb.theta, "C_of_p": tb.C_of_p, "three_theta": tb.three_theta}
        else:
            th = {"theta": "", "C_of_p": "", "three_theta": ""}
        stima = stima_bound(args.N, p, args.lam)
        for k in range(1, args.k_max + 1):
            tail = separating_tail_probability(k, p)
            rows.append({"p": p, "k": k, "tail_exact": float(tail.exact),
                         "tail_bound": float(tail.bound), "tail_holds": tail.holds,
                         "chain_holds": proof_chain_holds(p, k), "trail_count": counts.get(k, ""),
                         **th, "N": args.N, "lambda": args.lam, "stima_bound": stima})
    _emit(_table(rows, BOUNDS_COLUMNS, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed of every random choice")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes; never changes results")

    parser = _Parser(prog="frustrata",
                     description="Random +-1 spin systems on the square lattice: ground states, "
                                 "interfaces and separating trails.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a spin system")
    g.add_argument("--p", type=float, help="antiferromagnetic bond probability")
    g.add_argument("--size", type=_size, required=True, help="WxH sites")
    g.add_argument("--periodic", help="tile a period cell from this JSON file")
    g.set_defaults(func=cmd_gen, default_format="json")

    s = sub.add_parser("solve", parents=[common], help="exact or heuristic ground state")
    s.add_argument("--system", required=True)
    s.add_argument("--method", choices=("brute", "dp", "local"), default="dp")
    s.add_argument("--domain", type=_window, help="x0,y0,width,height (default: all sites)")
    s.add_argument("--steps", type=int, help="annealing proposals for method local")
    s.add_argument("--report", help="majority report path (default: next to --out)")
    s.set_defaults(func=cmd_solve, default_format="json")

    i = sub.add_parser("interface", parents=[common], help="interface of a ground state")
    i.add_argument("--system", required=True)
    i.add_argument("--ground", required=True, help="ground-state JSON written by solve")
    i.set_defaults(func=cmd_interface, default_format="json")

    sp = sub.add_parser("seppath", parents=[common], help="search for a separating trail")
    sp.add_argument("--system", required=True)
    sp.add_argument("--window", type=_window, help="x0,y0,width,height of trail sites")
    sp.add_argument("--min-len", type=int, required=True)
    sp.add_argument("--mode", choices=("exhaustive", "heuristic"), default="exhaustive")
    sp.add_argument("--cap", type=int, help="maximal trail length searched")
    sp.set_defaults(func=cmd_seppath, default_format="json")

    w = sub.add_parser("sweep", parents=[common], help="separating-trail and majority sweep")
    w.add_argument("--p-grid", type=_floats, required=True)
    w.add_argument("--sizes", type=_ints, required=True)
    w.add_argument("--kappa", type=float, default=0.5)
    w.add_argument("--trials", type=int, default=100)
    w.add_argument("--min-len", type=int, help="override the length threshold")
    w.add_argument("--cap", type=int, help="exhaustive search depth")
    w.add_argument("--gs-trials", type=int, default=10, help="ground states per row")
    w.add_argument("--strip", type=int, default=16, help="short side of the ground-state strip")
    w.set_defaults(func=cmd_sweep, default_format="csv")

    c = sub.add_parser("census", parents=[common], help="periodic-cell census")
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--m", type=int)
    c.add_argument("--p", type=float)
    c.add_argument("--lambda", dest="lam", default="1/2", help="length fraction, e.g. 1/2")
    c.add_argument("--translate", action="store_true", help="search all N^2 translates")
    c.add_argument("--mode", choices=("exact", "sample"), default="exact")
    c.add_argument("--trials", type=int, default=0)
    c.set_defaults(func=cmd_census, default_format="csv")

    b = sub.add_parser("bounds", parents=[common], help="tail, chain, theta and census bounds")
    b.add_argument("--p-grid", type=_floats, required=True)
    b.add_argument("--k-max", type=int, default=16)
    b.add_argument("--count-max", type=int, default=8, help="largest k whose trails are counted")
    b.add_argument("--N", type=int, default=100)
    b.add_argument("--lambda", dest="lam", type=float, default=0.5)
    b.set_defaults(func=cmd_bounds, default_format="csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    if args.format is None:
        args.format = args.default_format
    if args.threads < 1:
        args.threads = 1
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"frustrata: capacity exceeded ({exc.cap_name}={exc.cap}): {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as exc:
        print(f"frustrata: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CLIValidationError, FrustrataError, ValueError, KeyError, TypeError) as exc:
        print(f"frustrata: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
