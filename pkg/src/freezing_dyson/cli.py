"""Command-line interface for reproducible runs.

Subcommands: zeros, convolve, limit, simulate, clt, moments.  Parameters come
from flags and/or a JSON config file (flags win); every output begins with a
metadata block echoing the fully resolved configuration, the seed and the
library version, so re-running with the same metadata reproduces the file
bit-exactly.  Exit codes: 0 success, 2 usage or parameter error, 3 numerical
failure.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dynamics import (
    gaussian_gk,
    gaussian_limit_closed,
    laguerre_gk,
    laguerre_limit_closed,
    limit_roots,
    moment_sequence,
)
from .elemsym import RootTuple
from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NoConvergence,
    NotRealRooted,
    NotSymmetric,
    StepUnstable,
)
from .finfree import boxplus, hermite_roots, laguerre_roots
from .stats import (
    clt_covariance_gaussian,
    clt_covariance_laguerre,
    ek_drift_report,
    primitive_clt_check,
)
from .stochastic import SimConfig, simulate_dyson, simulate_laguerre

USAGE_ERROR = 2
NUMERICAL_ERROR = 3


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _meta(command: str, config: dict) -> dict:
    return {"command": command, "config": config, "version": __version__}


def _csv_tuple_output(command: str, config: dict, rows) -> str:
    lines = [f"# {json.dumps(_meta(command, config), sort_keys=True)}"]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_output(command: str, config: dict, payload: dict) -> str:
    doc = {"meta": _meta(command, config)}
    doc.update(payload)
    return json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _emit_tuple(args, command: str, config: dict, roots: RootTuple):
    if args.format == "json":
        text = _json_output(command, config, {"roots": list(roots.roots)})
    else:
        text = _csv_tuple_output(command, config, [roots.roots])
    _write_text(args.out, text)


def read_root_tuple(path: str) -> RootTuple:
    """Read a one-row CSV root tuple; unsorted input is re-sorted with a warning."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            values = [float(tok) for tok in line.split(",") if tok.strip()]
            if not values:
                continue
            if any(b < a for a, b in zip(values, values[1:])):
                print(f"warning: re-sorting unsorted tuple from {path}", file=sys.stderr)
                values = sorted(values)
            return RootTuple(tuple(values))
    raise InvalidParameter(f"no tuple row found in {path}")


def _resolved(args, names) -> dict:
    return {name: getattr(args, name) for name in names}


def _require(args, names):
    for name in names:
        if getattr(args, name) is None:
            raise InvalidParameter(f"missing required parameter --{name.replace('_', '-')}")


def cmd_zeros(args) -> int:
    _require(args, ["family", "n"])
    t = 1.0 if args.t is None else args.t
    if args.family == "hermite":
        roots = hermite_roots(args.n, t)
    elif args.family == "laguerre":
        _require(args, ["alpha"])
        roots = laguerre_roots(args.n, args.alpha, t)
    else:
        raise InvalidParameter(f"unknown family {args.family!r}")
    config = _resolved(args, ["family", "n", "alpha", "t", "format"])
    config["t"] = t
    _emit_tuple(args, "zeros", config, roots)
    return 0


def cmd_convolve(args) -> int:
    _require(args, ["a", "b"])
    ta, tb = read_root_tuple(args.a), read_root_tuple(args.b)
    if ta.n != tb.n:
        raise DimensionMismatch("dimension mismatch")
    roots = boxplus(ta, tb)
    config = _resolved(args, ["a", "b", "format"])
    _emit_tuple(args, "convolve", config, roots)
    return 0


def cmd_limit(args) -> int:
    _require(args, ["kind", "initial", "t"])
    initial = read_root_tuple(args.initial)
    config = _resolved(
        args, ["kind", "initial", "t", "alpha", "verify_ode", "closed_form", "format"]
    )
    if args.kind == "gaussian":
        closed = gaussian_limit_closed(initial, args.t)
        traj = gaussian_gk(initial)
    elif args.kind == "laguerre":
        _require(args, ["alpha"])
        traj = laguerre_gk(initial, args.alpha)
        try:
            closed = laguerre_limit_closed(initial, args.alpha, args.t)
        except InvalidParameter:
            if args.closed_form:
                raise
            closed = None  # fall back to the ODE route below
    else:
        raise InvalidParameter(f"unknown kind {args.kind!r}")
    if closed is None:
        result = limit_roots(traj, args.t)
    else:
        result = closed
    if args.verify_ode:
        ode = limit_roots(traj, args.t)
        discrepancy = float(np.max(np.abs(ode.as_array() - result.as_array())))
        print(f"max route discrepancy: {_fmt(discrepancy)}", file=sys.stderr)
        config["route_discrepancy"] = discrepancy
    _emit_tuple(args, "limit", config, result)
    return 0


def cmd_simulate(args) -> int:
    _require(args, ["kind", "n", "beta", "t", "dt", "paths", "seed"])
    record = (
        tuple(float(v) for v in args.record.split(",")) if args.record else (args.t,)
    )
    initial = (
        read_root_tuple(args.initial)
        if args.initial
        else RootTuple((0.0,) * args.n)
    )
    cfg = SimConfig(
        beta=args.beta,
        n=args.n,
        t_end=args.t,
        dt=args.dt,
        initial=initial,
        seed=args.seed,
        paths=args.paths,
        record_times=record,
        alpha=args.alpha,
    )
    if args.kind == "dyson":
        ens = simulate_dyson(cfg)
    elif args.kind == "laguerre":
        ens = simulate_laguerre(cfg)
    else:
        raise InvalidParameter(f"unknown kind {args.kind!r}")
    config = _resolved(
        args, ["kind", "n", "beta", "t", "dt", "paths", "seed", "alpha", "format"]
    )
    config["record"] = list(cfg.record_times)
    # particle CSV: one recorded tuple per row, keyed by time and path
    lines = [f"# {json.dumps(_meta('simulate', config), sort_keys=True)}"]
    lines.append("# columns: time,path," + ",".join(f"x{i+1}" for i in range(cfg.n)))
    for slot, t in enumerate(cfg.record_times):
        for p in range(cfg.paths):
            row = [t, p] + list(ens.data[p, slot])
            lines.append(",".join(_fmt(v) if i != 1 else str(int(v)) for i, v in enumerate(row)))
    _write_text(args.out, "\n".join(lines) + "\n")
    # JSON summary: e_k means against the exact g_k(t)
    rep = ek_drift_report(ens)
    summary = {
        "record_times": list(rep.times),
        "ek_mean": rep.ek_mean,
        "ek_stderr": rep.ek_stderr,
        "gk_target": rep.gk_target,
        "tolerance": rep.tolerance,
        "passed": rep.passed,
        "all_passed": rep.all_passed(),
        "clamp_events": ens.clamp_events,
    }
    text = _json_output("simulate-summary", config, summary)
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        _write_text(args.out + ".summary.json", text)
    return 0


def cmd_clt(args) -> int:
    _require(args, ["kind", "n", "beta", "samples", "seed"])
    mode = args.mode or "static"
    config = _resolved(
        args, ["kind", "n", "beta", "samples", "seed", "alpha", "mode", "format"]
    )
    config["mode"] = mode
    if mode == "static":
        if args.kind == "gaussian":
            rep = clt_covariance_gaussian(args.beta, args.n, args.samples, args.seed)
        elif args.kind == "laguerre":
            _require(args, ["alpha"])
            rep = clt_covariance_laguerre(
                args.beta, args.n, args.alpha, args.samples, args.seed
            )
        else:
            raise InvalidParameter(f"unknown kind {args.kind!r}")
        payload = {
            "sigma_hat": rep.sigma_hat,
            "rotated": rep.rotated,
            "target_diag": rep.target_diag,
            "off_diag_max": rep.off_diag_max,
            "diag_rel_err": rep.diag_rel_err,
            "mc_stderr": rep.mc_stderr,
            "samples": rep.samples,
            "diag_pass": rep.diag_pass(),
            "offdiag_pass": rep.offdiag_pass(),
        }
    elif mode == "primitive":
        alpha = args.alpha if args.alpha is not None else 1.0
        rep = primitive_clt_check(
            args.beta, args.n, args.samples, args.seed, args.kind, alpha=alpha
        )
        payload = {
            "variances": rep.variances,
            "targets": rep.targets,
            "var_stderr": rep.var_stderr,
            "correlations": rep.correlations,
            "samples": rep.samples,
            "variance_pass": rep.variance_pass(),
            "independence_pass": rep.independence_pass(),
        }
    else:
        raise InvalidParameter(f"unknown clt mode {mode!r}")
    _write_text(args.out, _json_output("clt", config, payload))
    return 0


def cmd_moments(args) -> int:
    _require(args, ["n", "max"])
    ms = moment_sequence(args.n, args.max)
    config = _resolved(args, ["n", "max", "format"])
    if args.format == "json":
        text = _json_output("moments", config, {"u": list(ms.u)})
    else:
        text = _csv_tuple_output("moments", config, [ms.u])
    _write_text(args.out, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freezing-dyson",
        description="Finite free convolution and freezing-limit toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output path ('-' for stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--config", default=None, help="JSON config file; flags override")

    p = sub.add_parser("zeros", help="classical polynomial zeros")
    p.add_argument("--family", choices=["hermite", "laguerre"], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("convolve", help="finite free convolution of two tuple files")
    p.add_argument("--a", default=None, help="CSV file with the first tuple")
    p.add_argument("--b", default=None, help="CSV file with the second tuple")
    common(p)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("limit", help="deterministic freezing limit at time t")
    p.add_argument("--kind", choices=["gaussian", "laguerre"], default=None)
    p.add_argument("--initial", default=None, help="CSV file with the initial tuple")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--verify-ode", dest="verify_ode", action="store_true")
    p.add_argument("--closed-form", dest="closed_form", action="store_true")
    common(p)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("simulate", help="Monte Carlo SDE simulation")
    p.add_argument("--kind", choices=["dyson", "laguerre"], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--record", default=None, help="comma-separated record times")
    p.add_argument("--initial", default=None, help="CSV file; default all zeros")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("clt", help="fluctuation covariance reports")
    p.add_argument("--kind", choices=["gaussian", "laguerre"], default=None)
    p.add_argument("--mode", choices=["static", "primitive"], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_clt)

    p = sub.add_parser("moments", help="scale-free moment recursion")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--max", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_moments)
    return parser


def _apply_config_file(args):
    if getattr(args, "config", None) is None:
        return
    with open(args.config, encoding="utf-8") as fh:
        values = json.load(fh)
    if not isinstance(values, dict):
        raise InvalidParameter("config file must hold a JSON object")
    for key, value in values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise InvalidParameter(f"unknown config key {key!r}")
        if getattr(args, attr) is None or getattr(args, attr) is False:
            setattr(args, attr, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        if args.format is None:
            args.format = "csv"
        return args.func(args)
    except (InvalidParameter, DimensionMismatch, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NotRealRooted, StepUnstable, NoConvergence, NotSymmetric) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
