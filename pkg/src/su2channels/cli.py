"""Command-line interface: ``su2channels <command> [options]``.

Exit status is 0 on success, 2 for invalid arguments and 1 when a
verification command finds a residual above its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import cg, ebt, moe
from .channels import completeness_defect, matrix_to_json, random_density_matrix, tensor
from .eposic import (EposicParams, apply_to_basis, apply_to_basis_direct, basis_action_range,
                     covariance_defect, epsilon_table, eposic_channel)
from .su2 import random_group_element

CSV_SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "completeness": 1e-10,
    "covariance": 1e-8,
    "basis_action": 1e-12,
    "row_norm": 1e-10,
    "moe_gap": 1e-4,
    "cg_residual": 1e-9,
    "cg_equivariance": 1e-8,
    "tensor_bound": 1e-6,
}

TENSOR_DIRECT_MAX_DIM = 20


class UsageError(Exception):
    pass


def _params(args) -> EposicParams:
    try:
        return EposicParams(args.m, args.n, args.h)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _triple(text: str) -> EposicParams:
    try:
        m, n, h = (int(x) for x in text.split(","))
        return EposicParams(m, n, h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected m,n,h with 0 <= h <= min(m, n): {exc}")


def _tolerance(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    if name not in DEFAULT_TOLERANCES or not value:
        raise argparse.ArgumentTypeError(
            f"expected NAME=VALUE with NAME in {sorted(DEFAULT_TOLERANCES)}")
    return name, float(value)


def _default_seed() -> int:
    env = os.environ.get("EPOSIC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"EPOSIC_SEED must be an integer, got {env!r}")


# command implementations: each returns (payload, ok)

def cmd_kraus(args, tol):
    p = _params(args)
    table = epsilon_table(p)
    ch = eposic_channel(p)
    return {
        "m": p.m, "n": p.n, "h": p.h, "r": p.r,
        "epsilon": table.values.tolist(),
        "kraus": [matrix_to_json(t) for t in ch.ops],
    }, True


def cmd_verify(args, tol):
    p = _params(args)
    ch = eposic_channel(p)
    rng = np.random.default_rng(args.seed)
    cov = 0.0
    for _ in range(args.g_samples):
        g = random_group_element(rng)
        a = random_density_matrix(p.in_dim, rng)
        cov = max(cov, covariance_defect(ch, g, a))
    basis = max(np.abs(apply_to_basis(p, i) - apply_to_basis_direct(p, i)).max()
                for i in range(p.r + 1))
    table = epsilon_table(p)
    # the printed j-range of the basis action against the Kraus support rule
    ranges_agree = all(
        set(basis_action_range(p, i)) == {j for j in range(p.n + 1) if 0 <= i - j + p.h <= p.m}
        for i in range(p.r + 1))
    checks = {
        "completeness": completeness_defect(ch),
        "covariance": cov,
        "basis_action": float(basis),
        "row_norm": table.row_norm_defect(),
    }
    passed = {k: v <= tol[k] for k, v in checks.items()}
    ok = all(passed.values()) and ranges_agree and table.support_violation() == 0
    return {"m": p.m, "n": p.n, "h": p.h, "residuals": checks, "passed": passed,
            "j_ranges_agree": ranges_agree, "g_samples": args.g_samples, "ok": ok}, ok


def _closed_form(p: EposicParams) -> tuple[str, float] | None:
    if p.h == 0:
        return "h=0", 0.0
    if (p.n, p.h) == (1, 1):
        return "m11", moe.moe_exact_m11(p.m)
    if p.r == 1 and p.n == p.m + 1:
        return "upper", moe.moe_covariant_1_to_m(p.m, 1.0)
    if p.r == 1 and p.n == p.m - 1:
        return "lower", moe.moe_covariant_1_to_m(p.m, 0.0)
    return None


def cmd_moe(args, tol):
    p = _params(args)
    res = moe.moe_numeric(eposic_channel(p), args.restarts, args.seed)
    out = {"m": p.m, "n": p.n, "h": p.h, **res.to_json()}
    ok = True
    cf = _closed_form(p)
    if cf is not None:
        gap = abs(res.value - cf[1])
        out.update(closed_form_family=cf[0], closed_form_bits=cf[1], abs_gap=gap)
        ok = gap <= tol["moe_gap"]
    return out, ok


def cmd_moe_exact(args, tol):
    m = args.m
    if m < 1:
        raise UsageError("m must be >= 1")
    if args.family == "m11":
        return {"family": "m11", "m": m, "value_bits": moe.moe_exact_m11(m)}, True
    if args.family == "upper":
        return {"family": "upper", "m": m, "value_bits": moe.moe_exact_upper(m),
                "spectrum": moe.spectrum_E11_extreme(m, "upper")}, True
    if args.family == "lower":
        return {"family": "lower", "m": m, "value_bits": moe.moe_exact_lower(m),
                "spectrum": moe.spectrum_E11_extreme(m, "lower")}, True
    if args.p is None or not 0.0 <= args.p <= 1.0:
        raise UsageError("--family convex needs --p in [0, 1]")
    return {"family": "convex", "m": m, "p": args.p,
            "value_bits": moe.moe_covariant_1_to_m(m, args.p),
            "spectrum": moe.covariant_1_to_m_spectrum(m, args.p).tolist()}, True


def cmd_bound(args, tol):
    if args.m < 5:
        raise UsageError("the bound needs m >= 5")
    report = moe.lower_bound_report(args.m)
    grid = np.linspace(0.0, 1.0, 101)
    lowest = min(moe.moe_covariant_1_to_m(args.m, float(q)) for q in grid)
    report.update(min_moe_on_p_grid=lowest, holds_on_grid=lowest >= report["bound_bits"])
    return report, report["holds_on_grid"]


def cmd_cg(args, tol):
    if args.m1 < 0 or args.m2 < 0:
        raise UsageError("degrees must be nonnegative")
    dec = cg.cg_decompose(args.m1, args.m2)
    res = dec.residuals()
    rng = np.random.default_rng(args.seed)
    equiv = max(dec.equivariance_defect(random_group_element(rng)) for _ in range(10))
    ok = max(res.values()) <= tol["cg_residual"] and equiv <= tol["cg_equivariance"]
    return {"m1": args.m1, "m2": args.m2,
            "block_dims": [b.degree + 1 for b in dec.blocks],
            "residuals": res, "equivariance": equiv, "ok": ok}, ok


def cmd_tensor_bound(args, tol):
    c1, c2 = eposic_channel(args.ch1), eposic_channel(args.ch2)
    tb = cg.tensor_moe_bound(c1, c2, args.restarts, args.seed)
    out = {"ch1": list(args.ch1.as_tuple()), "ch2": list(args.ch2.as_tuple()), **tb.to_json()}
    ok = True
    if c1.in_dim * c2.in_dim <= TENSOR_DIRECT_MAX_DIM:
        direct = moe.moe_numeric(tensor(c1, c2), args.restarts, args.seed).value
        out["direct_tensor_moe"] = direct
        ok = tb.best >= direct - tol["tensor_bound"]
        out["bound_holds"] = ok
    return out, ok


def cmd_ebt(args, tol):
    p = _params(args)
    v = ebt.classify_eposic(p)
    return {"m": p.m, "n": p.n, "h": p.h, **v.to_json()}, True


def cmd_ebt_sweep(args, tol):
    if args.max_sum < 0:
        raise UsageError("--max-sum must be nonnegative")
    rows = ebt.ebt_sweep(args.max_sum)
    bad = [r for r in rows if r.contradiction]
    return {"max_sum": args.max_sum, "rows": [r.to_json() for r in rows],
            "contradictions": len(bad)}, not bad


COMMANDS = {
    "kraus": cmd_kraus,
    "verify": cmd_verify,
    "moe": cmd_moe,
    "moe-exact": cmd_moe_exact,
    "bound": cmd_bound,
    "cg": cmd_cg,
    "tensor-bound": cmd_tensor_bound,
    "ebt": cmd_ebt,
    "ebt-sweep": cmd_ebt_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "csv"], default="json")
    common.add_argument("--output-path", default=None)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default: $EPOSIC_SEED or 0)")
    common.add_argument("--tol", type=_tolerance, action="append", default=[],
                        metavar="NAME=VALUE", help="override a named tolerance")

    parser = argparse.ArgumentParser(prog="su2channels",
                                     description="EPOSIC channels: construction, MOE, EBT.")
    sub = parser.add_subparsers(dest="command", required=True)

    def mnh(sp):
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--h", type=int, required=True)

    mnh(sub.add_parser("kraus", parents=[common], help="dump Kraus operators and epsilon table"))
    sp = sub.add_parser("verify", parents=[common], help="completeness/covariance/basis checks")
    mnh(sp)
    sp.add_argument("--g-samples", type=int, default=10)
    sp = sub.add_parser("moe", parents=[common], help="numerical minimal output entropy")
    mnh(sp)
    sp.add_argument("--restarts", type=int, default=moe.DEFAULT_RESTARTS)
    sp = sub.add_parser("moe-exact", parents=[common], help="closed-form MOE values")
    sp.add_argument("--family", choices=["m11", "upper", "lower", "convex"], required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--p", type=float, default=None)
    sp = sub.add_parser("bound", parents=[common], help="MOE lower bound for P_1 -> P_m")
    sp.add_argument("--m", type=int, required=True)
    sp = sub.add_parser("cg", parents=[common], help="Clebsch-Gordan blocks and residuals")
    sp.add_argument("--m1", type=int, required=True)
    sp.add_argument("--m2", type=int, required=True)
    sp = sub.add_parser("tensor-bound", parents=[common], help="tensor-product MOE bounds")
    sp.add_argument("--ch1", type=_triple, required=True, metavar="M,N,H")
    sp.add_argument("--ch2", type=_triple, required=True, metavar="M,N,H")
    sp.add_argument("--restarts", type=int, default=moe.DEFAULT_RESTARTS)
    mnh(sub.add_parser("ebt", parents=[common], help="entanglement-breaking verdict"))
    sp = sub.add_parser("ebt-sweep", parents=[common], help="verdicts for all m + n <= S")
    sp.add_argument("--max-sum", type=int, required=True)
    return parser


def _scalar(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return v


def to_csv(payload: dict) -> str:
    """Rows (if present) or the top-level fields as a single row.

    Nested values are JSON-encoded; a leading ``csv_schema`` column carries
    the schema version.
    """
    rows = payload.get("rows")
    if rows is None:
        rows = [{k: v for k, v in payload.items()}]
    fields = ["csv_schema"] + sorted({k for r in rows for k in r})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({"csv_schema": CSV_SCHEMA_VERSION, **{k: _scalar(v) for k, v in r.items()}})
    return buf.getvalue()


def _clean(obj):
    """Make numpy scalars and non-finite floats JSON friendly."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.seed is None:
            args.seed = _default_seed()
        overrides = dict(args.tol)
        tol = {**DEFAULT_TOLERANCES, **overrides}
        payload, ok = COMMANDS[args.command](args, tol)
    except UsageError as exc:
        print(f"su2channels {args.command}: error: {exc}", file=sys.stderr)
        return 2
    payload = _clean({"command": args.command, **payload})
    if overrides:
        payload["tolerance_overrides"] = overrides
    if args.output == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        text = to_csv(payload)
    try:
        if args.output_path:
            with open(args.output_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"su2channels: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
