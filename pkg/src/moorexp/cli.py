"""Command-line front end.

Exit codes: 0 completed, 2 invalid input, 3 budget exceeded.  Reports go to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable

from . import __version__
from . import bounds as bd
from . import fq_linalg as fl
from .gf_tower import field_for, split_prime_power
from .linpoly import case2_z_search, verify_case2
from .moore import (BudgetExceeded, EngineDisagreement, Witness, moore_check,
                    multiplier_observations, normalize, search_moore_sets)
from .poly_sparse import (InexactDivision, TermBudgetExceeded, divexact, format_poly,
                          moore_G, partial_derivative, sym_moore_poly)
from .rank_metric import CodeSpec, code_report
from .variety import count_points, verify_borges

SCHEMA_VERSION = 1
CACHE_ENV = "MOOREXP_CACHE_DIR"
EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3
DEFAULT_BUDGET = 2 * 10**8

log = logging.getLogger("moorexp")


class UsageError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _prime_power(text: str) -> int:
    q = int(text)
    try:
        split_prime_power(q)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return q


# -- subcommand bodies: each returns (result dict, csv rows, text lines) -----------


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")


def _ctx(args):
    override = None
    if getattr(args, "base_modulus", None) or getattr(args, "ext_modulus", None):
        override = (args.base_modulus, args.ext_modulus)
    return field_for(args.q, args.n, override)


def cmd_field(args):
    _need(args, "q", "n")
    ctx = _ctx(args)
    overridden = bool(args.base_modulus or args.ext_modulus)
    res = ctx.describe()
    res["provenance"] = "override" if overridden else "lexicographically least monic irreducible"
    rows = [{"p": ctx.p, "e": ctx.e, "q": ctx.q, "n": ctx.n,
             "base_modulus": " ".join(map(str, ctx.base_modulus)),
             "ext_modulus": " ".join(map(str, ctx.ext_modulus))}]
    text = [f"F_{ctx.q}: modulus {ctx.base_modulus}",
            f"F_{ctx.q}^{ctx.n}: modulus {ctx.ext_modulus}",
            f"provenance: {res['provenance']}"]
    return res, rows, text


def _witness_checks(ctx, w: Witness) -> dict:
    return {"rank_and_det": w.verify(ctx), "pencil": w.verify_pencil(ctx)}


def cmd_check(args):
    _need(args, "q", "n", "I")
    I = normalize(args.I, args.n)
    ctx = _ctx(args)
    v = moore_check(ctx, I, method=args.method, jobs=args.jobs, budget=args.budget)
    res = {"I": list(I.exps), "canonical": list(I.canonical().exps), **v.to_json(ctx)}
    if args.verify and v.witness is not None:
        checks = _witness_checks(ctx, v.witness)
        res["verified"] = checks
        if not all(checks.values()):
            raise EngineDisagreement("witness failed independent verification")
    rows = [{"q": ctx.q, "n": ctx.n, "I": " ".join(map(str, I.exps)), "is_moore": v.is_moore,
             "method": v.method, "work": v.work,
             "witness": "" if v.witness is None else " ".join(map(str, v.witness.tuple))}]
    text = [f"I = {I} for q = {ctx.q}, n = {ctx.n}: "
            + ("Moore" if v.is_moore else "not Moore") + f" ({v.method}, {v.work} subspaces)"]
    if v.witness is not None:
        text.append(f"witness codes: {list(v.witness.tuple)}")
    return res, rows, text


def cmd_search(args):
    _need(args, "q", "n", "k")
    ctx = _ctx(args)
    results = search_moore_sets(ctx, args.k, method=args.method, jobs=args.jobs, budget=args.budget)
    classes = []
    rows = []
    text = []
    for r in results:
        if args.verify and r.verdict.witness is not None:
            if not all(_witness_checks(ctx, r.verdict.witness).values()):
                raise EngineDisagreement(f"witness for {r.representative} failed verification")
        classes.append({"representative": list(r.representative.exps),
                        "members": [list(m.exps) for m in r.members],
                        **r.verdict.to_json(ctx)})
        rows.append({"representative": " ".join(map(str, r.representative.exps)),
                     "class_size": len(r.members), "is_moore": r.verdict.is_moore,
                     "work": r.verdict.work})
        text.append(f"{r.representative}: {'Moore' if r.verdict.is_moore else 'not Moore'}")
    res = {"k": args.k, "classes": classes,
           "multiplier_observations": multiplier_observations(results)}
    return res, rows, text


def cmd_mrd(args):
    _need(args, "q", "n", "I")
    ctx = _ctx(args)
    spec = CodeSpec(ctx, normalize(args.I, args.n))
    rep = code_report(spec, budget=args.budget, idealisers=not args.no_idealisers)
    res = rep.to_json(ctx)
    row = {k: v for k, v in res.items() if k != "min_weight_codeword"}
    text = [f"min rank distance {rep.min_rank_distance} (Singleton {rep.singleton}): "
            + ("MRD" if rep.is_mrd else "not MRD"),
            f"idealiser dimensions: left {rep.left_ideal_dim}, right {rep.right_ideal_dim}"]
    return res, [row], text


def cmd_count(args):
    _need(args, "q", "n", "I")
    ctx = _ctx(args)
    rep = count_points(ctx, normalize(args.I, args.n).exps, budget=args.budget)
    res = rep.to_json(ctx)
    row = {k: v for k, v in res.items() if k not in ("first_witness", "exps")}
    row["I"] = " ".join(map(str, rep.exps))
    text = [f"{rep.n_points} points, {rep.n_F_zero} zeros of F_I, {rep.n_dep} dependent "
            f"(formula {rep.formula_dep}), {rep.n_witness} witnesses"]
    return res, [row], text


def cmd_symbolic(args):
    _need(args, "q")
    op = args.op
    if op == "borges":
        _need(args, "i", "j", "m")
        rep = verify_borges(args.q, args.i, args.j, args.m, budget=args.budget)
        res = rep.to_json()
        text = [f"intersection {rep.intersection_count} vs formula {rep.formula}; "
                f"singular failures {rep.singular_failures}/{rep.singular_points_checked}"]
        return res, [res], text
    _need(args, "I")
    exps = list(args.I)
    k = len(exps)
    F = sym_moore_poly(args.q, k, exps)
    if op == "poly":
        P = F
    elif op == "quotient":
        P = divexact(F, moore_G(args.q, k))
    elif op == "derivative":
        _need(args, "var")
        base = divexact(F, moore_G(args.q, k)) if args.of_quotient else F
        P = partial_derivative(base, args.var - 1)
    elif op == "case2":
        _need(args, "n")
        ctx = _ctx(args)
        z = case2_z_search(ctx, exps, args.trials, seed=args.seed, randomize=args.randomize)
        res = {"I": exps, "z": None if z is None else [ctx.nested(c) for c in z],
               "z_codes": None if z is None else list(z),
               "verified": None if z is None else verify_case2(ctx, exps, z)}
        text = ["no z found within budget" if z is None else f"z = {list(z)}"]
        return res, [{"I": " ".join(map(str, exps)), "found": z is not None}], text
    else:
        raise UsageError(f"unknown symbolic operation {op!r}")
    poly = format_poly(P)
    res = {"op": op, "I": exps, "nvars": P.nvars, "degree": P.degree, "terms": len(P),
           "homogeneous": P.is_homogeneous(), "poly": poly}
    row = {k: v for k, v in res.items() if k != "I"}
    row["I"] = " ".join(map(str, exps))
    return res, [row], [poly]


def cmd_bounds(args):
    _need(args, "q", "I")
    rep = bd.bounds_report(args.q, args.I, args.n)
    res = rep.to_json()
    text = [f"I = {list(rep.exps)}: AP {rep.is_ap}, case {rep.case}"]
    if rep.curve_threshold is not None:
        text.append(f"curve_threshold {rep.curve_threshold}"
                    + ("" if rep.curve_j_neq_2i else " (not applicable: j = 2i)"))
    if rep.general_threshold is not None:
        text.append(f"general_threshold {rep.general_threshold}")
    if args.n is not None:
        fv = bd.final_verdict(args.q, args.n, args.I, budget=args.budget, jobs=args.jobs)
        res["final_verdict"] = {
            "verdict": fv.verdict, "known_family": fv.known_family,
            "theorem": fv.theorem.to_json() if fv.theorem else None,
            "engine": fv.engine.to_json(field_for(args.q, args.n)) if fv.engine else None,
            "engine_work_estimate": fv.engine_work_estimate, "notes": fv.notes,
        }
        text.append(f"final verdict: {fv.verdict}")
    row = {k: v for k, v in res.items() if not isinstance(v, (dict, list))}
    row["I"] = " ".join(map(str, rep.exps))
    return res, [row], text


def cmd_bezout_gap(args):
    if args.sweep:
        sw = bd.bezout_sweep()
        rows = [{"kind": kind, "q": c[0], "k": c[1], "i1": c[2], "ik2": c[3], "ik1": c[4]}
                for kind, cs in (("gap", sw.gap_failures), ("tau", sw.tau_failures))
                for c in cs]
        text = [f"{sw.cells} cells; gap <= 0 in hypothesis grid: {len(sw.gap_failures)} "
                f"({len(sw.realizable_gap_failures)} realizable); tau > B_tau: "
                f"{len(sw.tau_failures)} ({len(sw.realizable_tau_failures)} realizable)"]
        return sw.to_json(), rows, text
    _need(args, "q", "k", "i1", "ik2", "ik1")
    g = bd.bezout_gap(args.q, args.k, args.i1, args.ik2, args.ik1)
    res = {"q": args.q, "k": args.k, "i1": args.i1, "ik2": args.ik2, "ik1": args.ik1, **g.to_json()}
    return res, [res], [f"gap = {g.gap} ({float(g.gap):.6g})"]


COMMANDS: dict[str, Callable] = {
    "field": cmd_field, "check": cmd_check, "search": cmd_search, "mrd": cmd_mrd,
    "count": cmd_count, "symbolic": cmd_symbolic, "bounds": cmd_bounds,
    "bezout-gap": cmd_bezout_gap,
}

# flags that never influence a report
NON_SEMANTIC = {"jobs", "cache_dir", "output", "no_cache", "verbose", "func"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=_prime_power, help="base field size (prime power)")
    common.add_argument("--n", type=int, help="extension degree")
    common.add_argument("-I", "--I", dest="I", type=_int_list, help="exponent set, e.g. 0,1,3")
    common.add_argument("--k", type=int, help="size of exponent sets (search)")
    common.add_argument("--method", choices=["kernel", "det", "both"], default="kernel")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="maximum enumeration size")
    common.add_argument("--seed", type=int, default=0)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json")
    fmt.add_argument("--csv", dest="output", action="store_const", const="csv")
    fmt.add_argument("--text", dest="output", action="store_const", const="text")
    common.add_argument("--cache-dir", default=None,
                        help=f"result cache directory (default: ${CACHE_ENV})")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--verify", action="store_true",
                        help="re-check witnesses and certificates independently")
    common.add_argument("--base-modulus", type=_int_list, default=None)
    common.add_argument("--ext-modulus", type=_int_list, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="moorexp", description="Moore exponent set toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("field", parents=[common], help="print the field tower moduli")
    sub.add_parser("check", parents=[common], help="decide whether I is a Moore exponent set")
    sub.add_parser("search", parents=[common], help="decide every shift class of size k")
    p = sub.add_parser("mrd", parents=[common], help="rank distance and idealisers of the code")
    p.add_argument("--no-idealisers", action="store_true")
    sub.add_parser("count", parents=[common], help="point counts on the determinant variety")
    p = sub.add_parser("symbolic", parents=[common], help="symbolic determinant polynomials")
    p.add_argument("--op", choices=["poly", "quotient", "derivative", "borges", "case2"],
                   default="poly")
    p.add_argument("--var", type=int, help="variable index (1-based) for --op derivative")
    p.add_argument("--of-quotient", action="store_true",
                   help="differentiate F_I/G_k instead of F_I")
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--m", type=int, help="search field degree for --op borges")
    p.add_argument("--trials", type=int, default=10**4, help="z-search trials for --op case2")
    p.add_argument("--randomize", action="store_true")
    sub.add_parser("bounds", parents=[common], help="thresholds and final verdict")
    p = sub.add_parser("bezout-gap", parents=[common], help="intersection gap arithmetic")
    for name in ("i1", "ik2", "ik1"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--sweep", action="store_true", help="evaluate the full parameter grid")
    return parser


def run_config(args) -> dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in NON_SEMANTIC}


def config_hash(cfg: dict) -> str:
    blob = json.dumps({"version": __version__, "config": cfg}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _cache_path(args) -> Path | None:
    if args.no_cache:
        return None
    root = args.cache_dir or os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"{args.command}-{config_hash(run_config(args))}.json"


def _revalidate(args, payload: dict) -> bool:
    """Cached witnesses are only trusted after re-checking their certificate."""
    if args.command != "check" or payload["result"].get("witness") is None:
        return True
    ctx = _ctx(args)
    I = normalize(args.I, args.n)
    codes = tuple(payload["result"]["witness"]["codes"])
    w = Witness(I.exps, codes, payload["result"]["witness"]["subspace_index"], "cache")
    return w.verify(ctx)


def _render(args, payload: dict, rows: list[dict], text: list[str]) -> str:
    if args.output == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.output == "csv":
        buf = io.StringIO()
        if rows:
            cols = list(rows[0].keys())
            w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()
    return "\n".join(text) + "\n"


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.output = args.output or "text"
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=stderr)
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        cache = _cache_path(args)
        payload = None
        if cache is not None and cache.exists():
            cached = json.loads(cache.read_text())
            if _revalidate(args, cached):
                payload, rows, text = cached, cached["rows"], cached["text"]
            else:
                log.warning("discarding cache entry %s: witness failed re-verification", cache)
        if payload is None:
            result, rows, text = COMMANDS[args.command](args)
            payload = {"schema_version": SCHEMA_VERSION, "version": __version__,
                       "command": args.command, "config": run_config(args), "result": result}
            if cache is not None:
                cache.parent.mkdir(parents=True, exist_ok=True)
                cache.write_text(json.dumps({**payload, "rows": rows, "text": text},
                                            sort_keys=True))
        out = {k: payload[k] for k in ("schema_version", "version", "command", "config", "result")}
        stdout.write(_render(args, out, rows, text))
        return EXIT_OK
    except (BudgetExceeded, TermBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, InexactDivision, ZeroDivisionError) as exc:
        print(f"invalid input: {exc}", file=stderr)
        return EXIT_INVALID
    except EngineDisagreement as exc:
        print(f"internal inconsistency: {exc}", file=stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
