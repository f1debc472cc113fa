"""Command line front end: ``winhopf {analyze,factor,invert,solve,verify}``.

Exit codes: 0 success, 1 a mathematical precondition failed (or a
verification suite failed), 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .acceptance import CHECKS, run_suite
from .classify import check_thm32_heuristic, classify
from .discretization import Grid, LaguerreBasis
from .errors import SchemaError, WinHopfError
from .factorization import matching_factor, verify_factorization, wiener_hopf_factor
from .harness import TestVectorSet, choose_recipe, residual, solve
from .inverses import whh_operator
from .io import load_pair, load_rhs, load_symbol, read_json, write_matrix, write_matrix_csv
from .operators import compose, identity
from .symbols import is_matching

EXIT_OK, EXIT_MATH, EXIT_INPUT = 0, 1, 2


@dataclass
class Config:
    T: float = 40.0
    N: int = 2560
    modes: int = 200
    tol: float = 1e-6
    seed: int = 0

    def validate(self):
        if self.T <= 0 or self.N <= 0 or self.modes <= 0:
            raise SchemaError("T, N and modes must be positive")
        if not 0 < self.tol < 1:
            raise SchemaError("tol must lie in (0, 1)")
        return self


def load_config(args) -> Config:
    """Defaults, then the file named by ``WINHOPF_CONFIG``, then flags."""
    cfg = asdict(Config())
    path = os.environ.get("WINHOPF_CONFIG")
    if path:
        data = read_json(path)
        if not isinstance(data, dict):
            raise SchemaError("config file must hold a JSON object")
        unknown = set(data) - set(cfg)
        if unknown:
            raise SchemaError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    try:
        out = Config(float(cfg["T"]), int(cfg["N"]), int(cfg["modes"]), float(cfg["tol"]),
                     int(cfg["seed"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad config value: {exc}") from exc
    return out.validate()


def backends(cfg: Config, name: str) -> list:
    grid, lag = Grid(cfg.T, cfg.N), LaguerreBasis(cfg.modes)
    return {"grid": [grid], "laguerre": [lag], "both": [grid, lag]}[name]


# output


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def clean(obj):
    """Recursively replace non-finite floats by the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
        return str(float(obj))
    return obj


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for k, v in enumerate(obj):
            _flatten(f"{prefix}[{k}]", v, rows)
    else:
        rows.append((prefix, json.dumps(clean(obj), default=_jsonable)))


def emit(payload: dict, args, table: list | None = None):
    """Write ``payload`` as JSON, or as CSV (``table`` rows if given, else flattened keys)."""
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        if table:
            w.writerow(list(table[0]))
            w.writerows([list(r.values()) for r in table])
        else:
            w.writerow(["key", "value"])
            rows = []
            _flatten("", payload, rows)
            w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(clean(payload), indent=2, default=_jsonable, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# commands


def cmd_analyze(args, cfg):
    pair = load_pair(args.pair)
    report = classify(pair)
    payload = report.to_json()
    if args.heuristic:
        try:
            payload["subspace_heuristic"] = check_thm32_heuristic(pair, Grid(cfg.T, cfg.N))
        except WinHopfError as err:
            payload["subspace_heuristic"] = {"verdict": "not_applicable", "reason": str(err)}
    emit(payload, args, [{"rule": r, "condition": c} for r, c in report.fired_rules]
         if args.format == "csv" else None)
    return EXIT_OK


def cmd_factor(args, cfg):
    g = load_symbol(args.symbol)
    f = matching_factor(g) if is_matching(g) else wiener_hopf_factor(g)
    payload = f.to_json()
    payload["check"] = verify_factorization(f, g).to_json()
    emit(payload, args)
    return EXIT_OK


def _inverse_residuals(pair, rec, disc, cfg) -> dict:
    V = TestVectorSet(cfg.seed, 20).vectors(disc)
    A, B, I = whh_operator(pair, disc), rec.operator, identity(disc)
    out = {}
    if rec.kind in ("right", "two_sided"):
        out["AB=I"] = residual(compose(A, B), I, V, disc)
    if rec.kind in ("left", "two_sided"):
        out["BA=I"] = residual(compose(B, A), I, V, disc)
    if rec.kind == "generalized":
        out["AGA=A"] = residual(compose(A, B, A), A, V, disc)
    return out


def _per_backend(path, disc, choice):
    """``x.csv`` becomes ``x.grid.csv`` and ``x.laguerre.csv`` when both backends run."""
    if choice != "both":
        return path
    root, ext = os.path.splitext(path)
    return f"{root}.{disc.backend}{ext}"


def cmd_invert(args, cfg):
    pair = load_pair(args.pair)
    results, failed = [], False
    for disc in backends(cfg, args.backend):
        try:
            rec = choose_recipe(pair, disc, args.kind)
        except WinHopfError as err:
            if args.backend != "both":
                raise
            results.append({"backend": disc.backend, "error": str(err)})
            continue
        rec.residuals = _inverse_residuals(pair, rec, disc, cfg)
        failed |= any(v > cfg.tol for v in rec.residuals.values())
        entry = rec.to_json()
        entry["recipe"] = rec.operator.recipe
        entry["discretization"] = disc.to_json()
        entry["within_tol"] = all(v <= cfg.tol for v in rec.residuals.values())
        results.append(entry)
        if args.matrix:
            path = _per_backend(args.matrix, disc, args.backend)
            M = rec.operator.to_dense()
            if path.endswith(".csv"):
                write_matrix_csv(path, M)
            else:
                write_matrix(path, M, clean(entry))
    table = [{"backend": r.get("backend", r.get("discretization", {}).get("backend")),
              "formula": r.get("formula_id", ""), "check": k, "residual": v}
             for r in results for k, v in r.get("residuals", {}).items()]
    emit({"kind": args.kind, "results": results, "tol": cfg.tol}, args, table or None)
    return EXIT_MATH if failed else EXIT_OK


def cmd_solve(args, cfg):
    pair = load_pair(args.pair)
    f = load_rhs(args.rhs)
    results = []
    for disc in backends(cfg, args.backend):
        x, rep = solve(pair, f, disc, args.kind, oracle=not args.no_oracle, tol=cfg.tol)
        entry = {"backend": disc.backend, **rep.to_json()}
        if args.solution:
            t = disc.nodes if isinstance(disc, Grid) else Grid(cfg.T, cfg.N).nodes
            vals = x if isinstance(disc, Grid) else disc.synthesize(x, t)
            path = _per_backend(args.solution, disc, args.backend)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "value_re", "value_im"])
                w.writerows([[f"{ti:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"]
                             for ti, v in zip(t, vals)])
            entry["solution_file"] = path
        results.append(entry)
    emit({"rhs": args.rhs, "results": results}, args,
         [{k: v for k, v in r.items() if not isinstance(v, list)} for r in results])
    return EXIT_OK


def cmd_verify(args, cfg):
    numbers = args.only or sorted(CHECKS)
    results = run_suite(numbers, jobs=args.jobs)
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = {"suite": args.suite, "passed": all(r.passed for r in results),
               "criteria": [r.to_json() for r in results]}
    table = [{"criterion": r.number, "name": row.name, "value": row.value, "tol": row.tol,
              "passed": row.passed, "detail": row.detail}
             for r in results for row in r.report.rows]
    emit(payload, args, table)
    return EXIT_OK if payload["passed"] else EXIT_MATH


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--T", type=float, help="grid length (default 40)")
    common.add_argument("--N", type=int, help="grid nodes (default 2560)")
    common.add_argument("--modes", type=int, help="Laguerre modes (default 200)")
    common.add_argument("--tol", type=float, help="residual tolerance (default 1e-6)")
    common.add_argument("--seed", type=int, help="test vector seed (default 0)")
    common.add_argument("--backend", choices=["grid", "laguerre", "both"], default="grid")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    p = argparse.ArgumentParser(prog="winhopf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", parents=[common], help="classify a matching pair")
    s.add_argument("pair")
    s.add_argument("--heuristic", action="store_true",
                   help="also run the subspace test when nu1 > 0 > nu2")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("factor", parents=[common], help="Wiener-Hopf factorization of a symbol")
    s.add_argument("symbol")
    s.set_defaults(func=cmd_factor)

    kinds = ["auto", "left", "right", "two_sided", "generalized"]
    s = sub.add_parser("invert", parents=[common], help="build an inverse and check it")
    s.add_argument("pair")
    s.add_argument("--kind", choices=kinds, default="auto")
    s.add_argument("--matrix", help="export the dense inverse (.csv or binary)")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("solve", parents=[common], help="solve (W(a)+H(b)) x = f")
    s.add_argument("pair")
    s.add_argument("rhs", help="psi0, gauss:center,width, or a t,value_re,value_im CSV file")
    s.add_argument("--kind", choices=kinds, default="auto")
    s.add_argument("--solution", help="write x as t,value_re,value_im CSV")
    s.add_argument("--no-oracle", action="store_true", help="skip the dense comparison")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("--suite", choices=["paper-examples"], default="paper-examples")
    s.add_argument("--only", type=int, nargs="+", choices=sorted(CHECKS),
                   help="run only these criteria")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return args.func(args, cfg)
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print(f"error: E_IO: {err}", file=sys.stderr)
        return EXIT_INPUT
    except WinHopfError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
