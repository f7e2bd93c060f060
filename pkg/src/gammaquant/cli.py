"""Command line interface: ``gammaquant <subcommand> ...``.

Exit status: 0 success, 1 a verification check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .harness import VerifyConfig, run_verify, sweep
from .infinity_expansion import TableOrderExceeded, build_table, eval_expansion
from .oracle import gaussian_quantile, quantile, quantile_log
from .zero_expansion import NonPositiveArgument, eval_small_x_log, u_derivatives


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    return [int(v) for v in _floats(text)]


def cmd_quantile(args) -> int:
    if args.log_domain:
        res = quantile_log(args.x, args.p, args.tol)
    else:
        res = quantile(args.x, args.p, args.tol)
    print(json.dumps(res.as_dict()))
    return 0


def cmd_coeffs(args) -> int:
    table = build_table(args.order)
    if args.format == "json":
        doc = {
            "a": [{"k": k, "poly": p.to_string()} for k, p in enumerate(table.a, 1)],
            "tau": [{"n": n, "poly": p.to_string()} for n, p in enumerate(table.tau, -2)],
        }
        print(json.dumps(doc, indent=2))
    else:
        for k, p in enumerate(table.a, 1):
            print(f"a_{k} = {p}")
        for n, p in enumerate(table.tau, -2):
            print(f"tau_{n} = {p}")
    return 0


def cmd_expand_zero(args) -> int:
    coeffs = u_derivatives(args.tol)
    log_m = eval_small_x_log(args.x, args.p, args.order, coeffs)
    m = math.exp(log_m)
    doc = {
        "x": args.x,
        "p": args.p,
        "order": args.order,
        "log_m": log_m,
        "m": m if m > 0 else None,
        "coefficients": {
            "gamma": coeffs.gamma, "u0": coeffs.u0, "s1": coeffs.s1, "s2": coeffs.s2,
            "u1": coeffs.u1, "u2": coeffs.u2,
        },
        "quadrature_error_estimates": coeffs.quadrature_error_estimates,
        "note": "u_p derivatives at 0 are available only through order 2",
    }
    print(json.dumps(doc, indent=2))
    return 0


def cmd_expand_infinity(args) -> int:
    Lp = gaussian_quantile(args.p)
    table = build_table(max(args.table_order, args.order))
    value = eval_expansion(args.x, Lp, args.order, table)
    print(json.dumps({"x": args.x, "p": args.p, "L_p": Lp, "order": args.order, "m": value}))
    return 0


def cmd_sweep(args) -> int:
    text = sweep(args.kind, args.x, args.p, args.orders)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_config(args) -> VerifyConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if args.order is not None:
        data["order"] = args.order
    overrides = dict(data.get("tau_overrides", {}))
    for item in args.tau_override or []:
        n, _, poly = item.partition("=")
        if not poly:
            raise UsageError(f"--tau-override expects n=POLY, got {item!r}")
        overrides[n] = poly
    if overrides:
        data["tau_overrides"] = overrides
    try:
        return VerifyConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_verify(args) -> int:
    report = run_verify(_load_config(args))
    if args.format == "json":
        print(report.to_json(timestamp=args.timestamp))
    elif args.format == "csv":
        sys.stdout.write(report.to_csv())
    else:
        print(report.to_text())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gammaquant", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quantile", help="numeric p-quantile of Gamma(x, 1)")
    q.add_argument("--x", type=float, required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--log-domain", action="store_true", help="return log m_p(x) (x <= 0.5)")
    q.add_argument("--tol", type=float, default=1e-13)
    q.set_defaults(func=cmd_quantile)

    c = sub.add_parser("coeffs", help="exact a_k and tau_n polynomials")
    c.add_argument("--order", type=int, default=7)
    c.add_argument("--format", choices=("json", "text"), default="text")
    c.set_defaults(func=cmd_coeffs)

    z = sub.add_parser("expand-zero", help="small-shape expansion of log m_p(x)")
    z.add_argument("--x", type=float, required=True)
    z.add_argument("--p", type=float, required=True)
    z.add_argument("--order", type=int, choices=(0, 1, 2), default=2)
    z.add_argument("--tol", type=float, default=1e-12)
    z.set_defaults(func=cmd_expand_zero)

    i = sub.add_parser("expand-infinity", help="large-shape expansion of m_p(x)")
    i.add_argument("--x", type=float, required=True)
    i.add_argument("--p", type=float, required=True)
    i.add_argument("--order", type=int, default=2)
    i.add_argument("--table-order", type=int, default=7)
    i.set_defaults(func=cmd_expand_infinity)

    s = sub.add_parser("sweep", help="CSV of expansion vs oracle over a grid")
    s.add_argument("--kind", choices=("zero", "infinity"), required=True)
    s.add_argument("--x", type=_floats, required=True, help="comma-separated shapes")
    s.add_argument("--p", type=_floats, default=[0.5], help="comma-separated probabilities")
    s.add_argument("--orders", type=_ints, default=None)
    s.add_argument("--output")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--config", help="JSON file of VerifyConfig fields; flags win")
    v.add_argument("--order", type=int)
    v.add_argument("--tau-override", action="append", metavar="N=POLY",
                   help="replace the reference tau_N polynomial")
    v.add_argument("--format", choices=("text", "json", "csv"), default="text")
    v.add_argument("--timestamp", action="store_true", help="add a timestamp to JSON output")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (UsageError, ValueError, TableOrderExceeded, NonPositiveArgument) as exc:
        print(f"gammaquant: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
