"""Command line: ``abgeo constants|volume|check|fuzz|probe|report``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .bodies import CoordSubspace, parse_body
from .numerics import LpParam, rat_to_str
from .volume import default_jobs


def _fmt(x):
    if isinstance(x, Fraction):
        return rat_to_str(x)
    if isinstance(x, int):
        return x
    return float(x)


def _int_list(text: str) -> list[int]:
    """``3``, ``1,2,5`` or ``1-4``."""
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _emit(rows: list[dict], fmt: str, columns: list[str] | None = None):
    if fmt == "csv":
        columns = columns or list(rows[0]) if rows else []
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        sys.stdout.write(buf.getvalue())
    else:
        for r in rows:
            print(json.dumps(r, sort_keys=True, separators=(",", ":")))


# subcommands ----------------------------------------------------------------

def cmd_constants(args) -> int:
    from .constants import compute
    p = LpParam.from_p(args.p)
    rows = []
    for n in _int_list(args.n):
        res = compute(args.id, n, m=args.m, i=args.i, p=p)
        rows.append({"id": args.id, "n": n, "m": args.m if args.id in ("zeta", "varrho") else "",
                     "i": args.i if args.id in ("r", "nu") else "",
                     "p": p.label() if args.id in ("nu", "b", "kappa", "varrho") else "",
                     "exact": rat_to_str(res.exact) if res.exact is not None else "",
                     "approx": res.approx, "argmax": list(res.argmax) if res.argmax else ""})
    _emit(rows, args.format, ["id", "n", "m", "i", "p", "exact", "approx", "argmax"])
    return 0


def cmd_volume(args) -> int:
    from .bodies import as_vpolytope
    from .volume import BBox, diff_volume_decomp, exact_volume, lp_diff_volume, mc_volume, polytope_oracle
    A = parse_body(args.body)
    B = parse_body(args.other) if args.other else A
    if args.method == "exact":
        out = {"value": _fmt(exact_volume(A)), "stderr": 0.0, "method": "exact"}
    elif args.method == "decomp":
        out = {"value": _fmt(diff_volume_decomp(A, B)), "stderr": 0.0, "method": "exact"}
    elif args.method == "lp-decomp":
        p = LpParam.from_p(args.p)
        v = lp_diff_volume(A, B, p)
        out = {"value": _fmt(v), "stderr": 0.0, "method": "exact" if isinstance(v, Fraction) else "numeric"}
    else:
        est = mc_volume(polytope_oracle(A), BBox.of(as_vpolytope(A)), args.samples, args.seed, args.jobs)
        out = {"value": float(est.value), "stderr": est.stderr, "method": "mc", "samples": est.samples,
               "seed": args.seed}
    print(json.dumps(out, sort_keys=True))
    return 0


def _custom_check(args):
    """Checks on user-supplied bodies (``--body``, ``--other``, ``--cover``, ``--subspace``)."""
    from .covers import UniformCover, bt_check, llw_check
    from .harness.checks import ratio_report
    from .lpsum import rk_lp_check, rogers_shephard_lp_check
    from .volume import diff_volume_decomp, exact_volume
    from .bodies import minkowski_sum, difference_polytope
    from .report import CheckReport
    A = parse_body(args.body)
    B = parse_body(args.other) if args.other else A
    tid = args.theorem
    if tid == "thm3.1":
        return llw_check(A, UniformCover.parse(args.cover))
    if tid == "eq2.6":
        return bt_check(A, UniformCover.parse(args.cover))
    if tid == "eq2.3":
        return CheckReport("eq2.3", {"A": A.to_json(), "B": B.to_json()}, exact_volume(difference_polytope(A, B)),
                           diff_volume_decomp(A, B), 1, "exact", relation="==")
    if tid == "eq2.4":
        return CheckReport("eq2.4", {"A": A.to_json(), "B": B.to_json()}, exact_volume(minkowski_sum(A, B)),
                           diff_volume_decomp(A, B), 1, "exact")
    if tid == "thm4.4":
        E = CoordSubspace.spanned_by(A.dim, [int(c) - 1 for c in args.subspace.split(",")])
        return ratio_report(A, B, E)
    if tid == "lemma5.7":
        return rk_lp_check(A, B, LpParam.from_p(args.p), args.samples, args.seed, args.jobs)
    if tid == "lemma5.9":
        return rogers_shephard_lp_check(A, LpParam.from_p(args.p))
    raise SystemExit(f"check {tid} does not take explicit bodies; use --n and --seed")


def cmd_check(args) -> int:
    from .harness.checks import anchor_table, run_check
    if args.list:
        for tid, statement in anchor_table():
            print(f"{tid:16s} {statement}")
        return 0
    if not args.theorem:
        raise SystemExit("give a theorem id (see --list)")
    if args.body:
        rep = _custom_check(args)
    else:
        params = {"n": args.n, "p": args.p, "samples": args.samples, "jobs": args.jobs, "measure": args.measure}
        if args.m is not None:
            params["m"] = args.m
        if args.r is not None:
            params["r"] = args.r
        if args.q is not None:
            params["q"] = args.q
        rep = run_check(args.theorem, params, args.seed)
    if args.format == "csv":
        from .harness.campaign import records_csv
        sys.stdout.write(records_csv([rep.to_dict()]))
    else:
        print(rep.to_json())
    return 0 if rep.passed else 1


def cmd_fuzz(args) -> int:
    from .harness.campaign import CampaignConfig, run_campaign, summary_csv
    cfg = CampaignConfig(dims=_int_list(args.dims), trials=args.trials, seed=args.seed,
                         theorems=args.theorems.split(","), samples=args.samples,
                         p_values=args.p.split(","), measure=args.measure, output=args.output, jobs=args.jobs)
    _, summary = run_campaign(cfg)
    if args.format == "csv":
        sys.stdout.write(summary_csv(summary))
    else:
        print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["ok"] else 1


def cmd_probe(args) -> int:
    from .harness.probes import sharpness_probe
    res = sharpness_probe(args.id, args.n, args.i, args.j, LpParam.from_p(args.p))
    d = res.to_dict()
    if args.format == "csv":
        _emit([{"t": t, "ratio": r} for t, r in d["ratios"]], "csv", ["t", "ratio"])
    else:
        print(json.dumps(d, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    from .harness.campaign import read_jsonl, records_csv, summarize, summary_csv
    records = read_jsonl(args.path)
    summary = summarize(records)
    if args.records:
        sys.stdout.write(records_csv(records))
    elif args.format == "csv":
        sys.stdout.write(summary_csv(summary))
    else:
        print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--jobs", type=int, default=None, help="worker count (default: $ABGEO_JOBS or 1)")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    ap = argparse.ArgumentParser(prog="abgeo", description="Volume inequalities for anti-blocking bodies.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", parents=[common], help="sharp constants")
    c.add_argument("id", choices=["zeta", "r", "nu", "b", "kappa", "varrho"])
    c.add_argument("--n", default="3", help="dimension, list or range such as 1-10")
    c.add_argument("--m", type=int, default=2)
    c.add_argument("--i", type=int, default=None)
    c.add_argument("--p", default="1")
    c.set_defaults(func=cmd_constants)

    v = sub.add_parser("volume", parents=[common], help="volume of a body or a difference body")
    v.add_argument("--body", required=True)
    v.add_argument("--other", help="second body for decomp and lp-decomp (default: the same body)")
    v.add_argument("--method", choices=["exact", "mc", "decomp", "lp-decomp"], default="exact")
    v.add_argument("--p", default="1")
    v.set_defaults(func=cmd_volume)

    k = sub.add_parser("check", parents=[common], help="run one registered check")
    k.add_argument("theorem", nargs="?")
    k.add_argument("--list", action="store_true", help="list check ids and their statements")
    k.add_argument("--n", type=int, default=3)
    k.add_argument("--p", default="1")
    k.add_argument("--m", type=int)
    k.add_argument("--r", type=int)
    k.add_argument("--q", type=float)
    k.add_argument("--measure", default="exp:1")
    k.add_argument("--body")
    k.add_argument("--other")
    k.add_argument("--cover")
    k.add_argument("--subspace", help="1-based coordinate list, e.g. 1,2")
    k.set_defaults(func=cmd_check)

    f = sub.add_parser("fuzz", parents=[common], help="seeded campaign over the registry")
    f.add_argument("--dims", default="1-3")
    f.add_argument("--trials", type=int, default=25)
    f.add_argument("--theorems", default="*", help="comma-separated globs, e.g. '5.*'")
    f.add_argument("--p", default="1,2,inf")
    f.add_argument("--measure", default="exp:1")
    f.add_argument("--output", help="JSON-lines report path")
    f.set_defaults(func=cmd_fuzz, seed=1, samples=20_000)

    pr = sub.add_parser("probe", parents=[common], help="sharpness probe of a constant")
    pr.add_argument("id", choices=["zeta", "r", "b", "nu"])
    pr.add_argument("--n", type=int, default=3)
    pr.add_argument("--i", type=int)
    pr.add_argument("--j", type=int)
    pr.add_argument("--p", default="1")
    pr.set_defaults(func=cmd_probe)

    rp = sub.add_parser("report", parents=[common], help="summarize a JSON-lines report")
    rp.add_argument("path")
    rp.add_argument("--records", action="store_true", help="dump every record as CSV")
    rp.set_defaults(func=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs is None:
        args.jobs = default_jobs()
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        parser.exit(2, f"abgeo: error: {msg}\n")


if __name__ == "__main__":
    sys.exit(main())
