"""Batch command line: `gcdsum <command> [flags]`.

Every run writes one report (JSON by default, CSV on request) echoing the
parameters, seed and library version. Exit status: 0 when every requested
check holds, 1 when a check fails, 2 on usage or parameter errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from gcdsum import __version__, arith, bounds, fcset, gcdform, sweeps, verify, zeta
from gcdsum.errors import GcdSumError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("json", "csv")
# tolerances a campaign config may override, by name
DEFAULT_TOLERANCES = {"diag_rel": 1e-10, "mc_stderr": 4.0, "omega_rel": 1e-12, "truncation_envelope": 1.0}


class UsageError(Exception):
    pass


def _load_list(raw: str | None, cast) -> list | None:
    """Comma-separated values or @file.json holding a JSON array; runs as an argparse type."""
    if raw is None:
        return None
    try:
        if raw.startswith("@"):
            data = json.loads(Path(raw[1:]).read_text())
            if not isinstance(data, list):
                raise argparse.ArgumentTypeError(f"{raw}: expected a JSON array")
            return [cast(v) for v in data]
        return [cast(v) for v in raw.split(",") if v.strip()]
    except (ValueError, TypeError, OSError) as exc:
        raise argparse.ArgumentTypeError(f"cannot parse list {raw!r}: {exc}") from None


def _clean(obj: Any) -> Any:
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


# commands return (results, all_satisfied)


def cmd_arith(args) -> tuple[list[dict], bool]:
    fn = args.fn
    if fn == "scan":
        recs = arith.extremal_scan(args.N, args.statistic, args.alpha)
        return [{"fn": fn, "N": args.N, "statistic": args.statistic, "records": [list(r) for r in recs]}], True
    if args.n is None:
        raise UsageError("--n is required")
    n = args.n
    table = {
        "sigma": lambda: arith.divisor_sigma(args.u, n),
        "mobius": lambda: arith.mobius(n),
        "jordan": lambda: arith.jordan_totient(args.s, n),
        "theta": lambda: arith.theta_sqfree(n),
        "hooley": lambda: arith.hooley_delta(n),
        "phi": lambda: arith.euler_phi(n),
        "d": lambda: arith.divisor_count(n),
        "factorize": lambda: [list(pe) for pe in arith.factorize(n)],
    }
    return [{"fn": fn, "n": n, "u": args.u, "s": args.s, "value": table[fn]()}], True


def cmd_fcset(args) -> tuple[list[dict], bool]:
    K = fcset.IndexSet(_require(args.set, "--set"))
    v = fcset.varpi(K)
    res = {
        "set": K.to_list(),
        "is_fc": K.is_fc,
        "closure": fcset.fc_closure(K).to_list(),
        "f_prime": list(fcset.f_prime(K)),
        "kstar": list(fcset.kstar(K)),
        "varpi": str(v),
    }
    return [res], True


def _require(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _coefs(args, K: list[int]) -> gcdform.CoefSeq:
    vals = args.coef if args.coef is not None else [1.0] * len(K)
    return gcdform.CoefSeq.on(K, vals)


def cmd_form(args) -> tuple[list[dict], bool]:
    K = _require(args.set, "--set")
    s = _require(args.s, "--s")
    c = _coefs(args, K)
    spec = gcdform.GcdFormSpec(K, s, include_zeta_factor=args.zeta_factor)
    direct = gcdform.quadratic_form_direct(spec, c)
    diag = gcdform.cesaro_diagonalize(spec, c)
    diag_ok = abs(direct - diag.value) <= args.tolerances["diag_rel"] * max(abs(direct), 1e-300)
    results = [
        {"check": "direct", "value": direct},
        {"check": "diagonalize", "value": diag.value, "b": diag.to_dict()["b"], "satisfied": diag_ok},
    ]
    ok = diag_ok
    if args.samples:
        mc = gcdform.cauchy_mc_estimate(spec, c, args.samples, args.seed, workers=args.workers)
        mc_ok = abs(mc.estimate - direct) <= args.tolerances["mc_stderr"] * mc.stderr
        results.append({"check": "monte_carlo", **mc.to_dict(), "satisfied": mc_ok})
        ok &= mc_ok
    return results, ok


def _fourier(args) -> gcdform.CoefSeq:
    if args.fourier is not None:
        return gcdform.CoefSeq.dense(args.fourier)
    return gcdform.CoefSeq.dense([1.0 / m for m in range(1, args.M + 1)])


def cmd_bounds(args) -> tuple[list[dict], bool]:
    if args.sweep:
        names = list(sweeps.EVALUATORS) if args.name == "all" else [args.name]
        results, ok = [], True
        for name in names:
            reps = sweeps.sweep(name, args.cases, args.seed)
            summary = sweeps.summarize(reps)
            ok &= summary["all_satisfied"]
            results.append({"evaluator": name, **summary, "reports": [r.to_dict() for r in reps]})
        return results, ok
    K = _require(args.set, "--set")
    c = _coefs(args, K)
    name = args.name
    if name == "c1":
        rep = bounds.bound_theorem_c1(_fourier(args), K, c)
    elif name == "t1":
        psi = args.psi or "theta"
        rep = bounds.bound_theorem_t1(_fourier(args), K, c, bounds.psi_by_name(psi, args.s or 1.0), psi)
    elif name.startswith("p1_"):
        preset = name[3:]
        psi1 = bounds.psi_by_name(args.psi or "id", args.s or 1.0) if preset == "general" else None
        rep = bounds.bound_theorem_p1(K, c, _require(args.s, "--s"), args.tau, preset=preset, psi1=psi1, eps=args.eps)
    elif name == "eq61":
        rep = bounds.bound_eq61(K, c, _require(args.s, "--s"))
    elif name == "wqe":
        rep = bounds.bound_wqe(K, c, _require(args.s, "--s"))
    elif name == "t1a1":
        rep = bounds.bound_strengthened(K, c, _require(args.s, "--s"), _require(args.tau, "--tau"))
    elif name == "gershgorin":
        rep = bounds.gershgorin_as_bound(K, _require(args.s, "--s"))
    elif name == "hooley":
        rep = bounds.bound_hooley(_fourier(args), K, c)
    else:
        raise UsageError(f"unknown bound {name!r}")
    return [rep.to_dict()], rep.satisfied


def cmd_eig(args) -> tuple[list[dict], bool]:
    rep = bounds.rowsum_and_gershgorin(_require(args.set, "--set"), _require(args.s, "--s"))
    return [rep.to_dict()], rep.satisfied


def cmd_zeta(args) -> tuple[list[dict], bool]:
    sigma = _require(args.sigma, "--sigma")
    mode = args.mode
    if mode == "point":
        z = zeta.zeta_reference(sigma, args.t)
        return [{"mode": mode, "sigma": sigma, "t": args.t, "re": z.real, "im": z.imag, "abs": abs(z)}], True
    if mode == "truncated":
        x = args.x if args.x is not None else abs(args.t)
        z = zeta.zeta_truncated(sigma, args.t, x)
        ref = zeta.zeta_reference(sigma, args.t)
        scaled = abs(z - ref) * x**sigma
        res = {"mode": mode, "sigma": sigma, "t": args.t, "x": x, "re": z.real, "im": z.imag,
               "scaled_error": scaled, "satisfied": scaled <= args.tolerances["truncation_envelope"]}  # fmt: skip
        return [res], res["satisfied"]
    T = _require(args.T, "--T")
    if mode == "max":
        cfg = zeta.ZetaEvalConfig(sigma, T, grid_step=args.grid_step, refine_iterations=args.refine)
        t_star, mx = zeta.max_abs_zeta(cfg)
        return [{"mode": mode, "sigma": sigma, "T": T, "t_star": t_star, "max_value": mx}], True
    if mode == "meanvalue":
        rep = zeta.meanvalue_check(sigma, T, args.k, args.l)
        return [{"mode": mode, **rep.to_dict()}], True
    Ts = tuple(T * 2**i for i in range(3))
    reps, dec = zeta.meanvalue_ladder(sigma, args.k, args.l, Ts)
    return [{"mode": mode, "ladder": [r.to_dict() for r in reps], "decreasing": dec, "satisfied": dec}], dec


def cmd_omega(args) -> tuple[list[dict], bool]:
    nus = _require(args.nu, "--nu")
    sigma = _require(args.sigma, "--sigma")
    T = _require(args.T, "--T")
    eps_list = args.eps_list or [0.0]
    results, ok = [], True
    for nu in nus:
        for eps in eps_list:
            rep = zeta.omega_lower_bound(nu, sigma, eps, T)
            direct = verify.omega_direct(nu, sigma, eps)
            agree = abs(rep.lb_factor - direct) <= args.tolerances["omega_rel"] * direct
            ok &= agree
            results.append({**rep.to_dict(), "lb_factor_direct": direct, "lb_factor_agrees": agree})
    return results, ok


def cmd_verify(args) -> tuple[list[dict], bool]:
    results = verify.run_all(args.cases, args.seed)
    return results, all(r["passed"] for r in results)


COMMANDS = {
    "arith": cmd_arith,
    "fcset": cmd_fcset,
    "form": cmd_form,
    "bounds": cmd_bounds,
    "eig": cmd_eig,
    "zeta": cmd_zeta,
    "omega": cmd_omega,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int, default=100)
    common.add_argument("--out", type=Path, default=None, help="report path (stdout when omitted)")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--sieve-bound", type=int, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--config", type=Path, default=None, help="JSON campaign config")

    ints = lambda raw: _load_list(raw, int)  # noqa: E731
    floats = lambda raw: _load_list(raw, float)  # noqa: E731

    parser = _Parser(prog="gcdsum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gcdsum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("arith", parents=[common], help="evaluate an arithmetic function")
    p.add_argument("--fn", required=True,
                   choices=["sigma", "mobius", "jordan", "theta", "hooley", "phi", "d", "factorize", "scan"])  # fmt: skip
    p.add_argument("--n", type=int)
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--N", type=int, default=10**4)
    p.add_argument("--statistic", choices=arith.STATISTICS, default="sigma_over_nloglogn")
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("fcset", parents=[common], help="closure, core and spread of a set")
    p.add_argument("--set", type=ints)

    p = sub.add_parser("form", parents=[common], help="direct vs diagonalized vs Monte-Carlo form")
    p.add_argument("--set", type=ints)
    p.add_argument("--coef", type=floats)
    p.add_argument("--s", type=float)
    p.add_argument("--zeta-factor", action="store_true")
    p.add_argument("--samples", type=int, default=20000)

    p = sub.add_parser("bounds", parents=[common], help="evaluate a named bound or sweep")
    p.add_argument("--name", required=True, choices=[*sweeps.EVALUATORS, "all"])
    p.add_argument("--set", type=ints)
    p.add_argument("--coef", type=floats)
    p.add_argument("--s", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--psi", help="theta, one, d, sigma_s or id")
    p.add_argument("--fourier", type=floats)
    p.add_argument("--M", type=int, default=64)
    p.add_argument("--sweep", action="store_true")

    p = sub.add_parser("eig", parents=[common], help="Gershgorin envelope and eigenvalues")
    p.add_argument("--set", type=ints)
    p.add_argument("--s", type=float)

    p = sub.add_parser("zeta", parents=[common], help="zeta values, maxima and mean values")
    p.add_argument("--mode", choices=["point", "truncated", "max", "meanvalue", "ladder"], default="point")
    p.add_argument("--sigma", type=float)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--x", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--refine", type=int, default=30)

    p = sub.add_parser("omega", parents=[common], help="divisor-set Omega reports")
    p.add_argument("--nu", type=ints)
    p.add_argument("--sigma", type=float)
    p.add_argument("--eps", dest="eps_list", type=floats)
    p.add_argument("--T", type=float)

    sub.add_parser("verify", parents=[common], help="run every invariant suite")
    return parser


def _apply_config(args) -> None:
    args.tolerances = dict(DEFAULT_TOLERANCES)
    if args.config is not None:
        cfg = json.loads(args.config.read_text())
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        allowed = {"seed", "cases", "sieve_bound", "workers", "tolerances", "output"}
        unknown = set(cfg) - allowed
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        out = cfg.pop("output", {})
        if "path" in out:
            args.out = Path(out["path"])
        if "format" in out:
            args.format = out["format"]
        tols = cfg.pop("tolerances", {})
        bad = set(tols) - set(DEFAULT_TOLERANCES)
        if bad:
            raise UsageError(f"unknown tolerance names: {sorted(bad)}")
        args.tolerances.update({k: float(v) for k, v in tols.items()})
        for key, val in cfg.items():
            setattr(args, key, val)
    if args.format not in FORMATS:
        raise UsageError(f"format must be one of {FORMATS}")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    if args.cases < 1:
        raise UsageError("--cases must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")


def _params(args) -> dict:
    skip = {"command", "out", "config"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def render_csv(command: str, results: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "omega":
        w.writerow(zeta.OmegaReport.CSV_COLUMNS)
        for r in results:
            w.writerow([r[c] for c in zeta.OmegaReport.CSV_COLUMNS])
    elif command == "bounds":
        w.writerow(bounds.BoundReport.CSV_HEADER)
        for r in results:
            for rep in r.get("reports", [r]):
                br = bounds.BoundReport(**{k: rep[k] for k in
                                           ("name", "params", "bound_value", "exact_value", "ratio", "satisfied")})  # fmt: skip
                w.writerow(br.csv_row())
    else:
        w.writerow(["schema", "command", "index", "satisfied", "payload"])
        for i, r in enumerate(results):
            sat = r.get("passed", r.get("satisfied", True))
            w.writerow(["result/1", command, i, sat, json.dumps(_clean(r), sort_keys=True)])
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if args.sieve_bound is not None:
            arith.set_sieve_bound(args.sieve_bound)
        results, ok = COMMANDS[args.command](args)
    except (UsageError, GcdSumError, ValueError, OSError) as exc:
        print(f"gcdsum {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "version": __version__,
        "command": args.command,
        "params": _params(args),
        "seed": args.seed,
        "results": results,
        "all_satisfied": bool(ok),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if args.command == "verify":
        report["coverage"] = verify.COVERAGE
    text = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n" if args.format == "json" else render_csv(
        args.command, results
    )
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
