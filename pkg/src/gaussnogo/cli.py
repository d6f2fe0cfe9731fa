"""Command-line interface.

Exit status: 0 on success, 1 when the no-go check is violated or a stage
crashes, 2 on usage errors.
"""

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from . import channels as ch
from . import serialization as ser
from .entanglement import entanglement_degradation, finite_r_degradation
from .gecc import effective_channel
from .nogo_search import METHODS, N_MAX, search, sweep_report
from .teleport import lemma1_components

OUTPUT_DIR_ENV = "GAUSSNOGO_OUTPUT_DIR"
#: Largest squeezing accepted on the command line; conditioning degrades beyond it.
CLI_R_CAP = 12.0

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_SPEC_HELP = (
    "attenuation:<eta>, amplification:<eta>, classical-noise:<sigma> (N = sigma*I), "
    "phase-conjugation:<eta>, measure-prepare, identity, file:<path>"
)

_PARAM_LABELS = {
    "attenuation": "eta[dimensionless]",
    "amplification": "eta[dimensionless]",
    "classical-noise": "det_N[vacuum units^2]",
    "phase-conjugation": "eta[dimensionless]",
}


class UsageError(Exception):
    pass


def parse_channel_spec(text):
    """Resolves a textual channel spec to a validated :class:`GaussianChannel`."""
    name, _, arg = text.partition(":")
    try:
        if name == "file":
            if not arg:
                raise UsageError("file: spec needs a path")
            channel = ser.channel_from_dict(ser.load_json(arg))
        elif name in ("measure-prepare", "identity"):
            if arg:
                raise UsageError(f"{name} takes no parameter")
            channel = ch.measure_prepare() if name == "measure-prepare" else ch.identity_channel()
        elif name in ch.FAMILIES:
            if not arg:
                raise UsageError(f"{name} needs a parameter, e.g. {name}:0.5")
            value = float(arg)
            if not math.isfinite(value):
                raise UsageError(f"{name} parameter must be finite")
            channel = ch.FAMILIES[name](value)
        else:
            raise UsageError(f"unknown channel {name!r}; expected one of: {_SPEC_HELP}")
        report = ch.validate(channel)
        if not report.valid:
            raise UsageError("channel is not a valid Gaussian channel: " + "; ".join(report.failures()))
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad channel spec {text!r}: {exc}") from None
    return channel


def parse_grid(text):
    """``start:stop:step`` (inclusive) or a comma separated list of values."""
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0:
                raise UsageError("grid step must be positive")
            count = math.floor((stop - start) / step + 1e-9) + 1
            values = [round(start + k * step, 12) for k in range(max(count, 0))]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}; use start:stop:step or v1,v2,...") from None
    if not values:
        raise UsageError(f"grid {text!r} is empty")
    return values


def _r_arg(text):
    r = float(text)
    if not 0 < r <= CLI_R_CAP:
        raise argparse.ArgumentTypeError(f"r must lie in (0, {CLI_R_CAP}], got {text}")
    return r


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _output_path(path, default_name):
    if path is not None:
        return Path(path)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name


def _emit(obj, out=None):
    text = ser.dump_json(obj, out)
    print(text)


def _degradation_payload(channel):
    result = entanglement_degradation(channel)
    return {
        "channel": ser.channel_to_dict(channel),
        "det_M": channel.det_M,
        "det_N": channel.det_N,
        "degradation": ser.degradation_to_dict(result),
        "capacity_upper_bound": ser.number(result.capacity_bound),
        "entanglement_breaking": result.entanglement_breaking,
    }


def cmd_degradation(args):
    _emit(ser.envelope("degradation", _degradation_payload(args.channel), {"channel": args.channel_text}))
    return EXIT_OK


def cmd_verify(args):
    channel = args.channel
    params = {
        "channel": args.channel_text, "r": args.r, "n": args.n,
        "budget": args.budget, "seed": args.seed, "method": args.method,
    }
    stages, crashed = {}, False

    def stage(name, fn):
        nonlocal crashed
        try:
            stages[name] = fn()
        except Exception as exc:  # reported per stage, never fatal
            crashed = True
            stages[name] = {"error": f"{type(exc).__name__}: {exc}"}

    def closed():
        return _degradation_payload(channel)

    def finite():
        nu2 = finite_r_degradation(channel, args.r)
        ref = entanglement_degradation(channel).nu_minus_squared
        out = {"r": args.r, "nu_minus_sq": nu2, "D": min(1.0, nu2)}
        if math.isfinite(ref) and ref > 0:
            out["relative_residual"] = abs(nu2 / ref - 1.0)
        return {k: ser.number(v) if isinstance(v, float) else v for k, v in out.items()}

    def lemma1():
        comp = lemma1_components(channel, args.r)
        return {
            "r": args.r,
            "M_tel": ser.matrix(comp["M_tel"]),
            "N_tel": ser.matrix(comp["N_tel"]),
            "residual_M": comp["residual_M"],
            "residual_N": comp["residual_N"],
            "residual": comp["residual"],
        }

    def nogo():
        res = search(channel, args.n, args.budget, args.seed, method=args.method)
        return {
            "best_D": ser.number(res.best_D),
            "baseline_D": ser.number(res.baseline_D),
            "violated": res.violated,
            "evaluations": res.evaluations,
            "skipped": res.skipped,
            "best_det_N_GC": ser.number(res.best_det_N_GC),
        }

    stage("closed_form", closed)
    stage("finite_r", finite)
    stage("lemma1", lemma1)
    stage("search", nogo)
    violated = bool(stages["search"].get("violated", False))
    _emit(ser.envelope("verify", {"stages": stages, "violated": violated, "crashed": crashed}, params))
    return EXIT_FAIL if violated or crashed else EXIT_OK


def cmd_lemma1(args):
    comp = lemma1_components(args.channel, args.r)
    payload = {
        "channel": ser.channel_to_dict(args.channel),
        "M_tel": ser.matrix(comp["M_tel"]),
        "N_tel": ser.matrix(comp["N_tel"]),
        "residual_M": comp["residual_M"],
        "residual_N": comp["residual_N"],
        "residual": comp["residual"],
    }
    _emit(ser.envelope("lemma1-check", payload, {"channel": args.channel_text, "r": args.r}))
    return EXIT_OK


def cmd_gecc_eval(args):
    try:
        code = ser.code_from_dict(ser.load_json(args.code))
        code.check()
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad code file {args.code}: {exc}") from None
    eff = effective_channel(code, args.channel)
    base = entanglement_degradation(args.channel)
    result = entanglement_degradation(eff)
    payload = {
        "n": code.n,
        "effective_channel": ser.channel_to_dict(eff),
        "degradation": ser.degradation_to_dict(result),
        "baseline_D": ser.number(base.D),
    }
    _emit(ser.envelope("gecc eval", payload, {"code": str(args.code), "channel": args.channel_text}))
    return EXIT_OK


def cmd_search(args):
    res = search(args.channel, args.n, args.budget, args.seed, method=args.method)
    params = {
        "channel": args.channel_text, "n": args.n, "budget": args.budget,
        "seed": args.seed, "method": args.method,
    }
    obj = ser.envelope("nogo-search", ser.search_result_to_dict(res, args.channel), params)
    out = _output_path(args.out, "nogo_search.json")
    ser.dump_json(obj, out)
    summary = {k: obj[k] for k in ("best_D", "baseline_D", "violated", "evaluations", "skipped")}
    summary["out"] = str(out)
    print(ser.dump_json(summary))
    if res.violated:
        print(f"no-go violation; offending code written to {out}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(args):
    grid = parse_grid(args.grid)
    rows = sweep_report(args.family, grid, n=args.n, budget=args.budget, seed=args.seed, r=args.r)
    r_label = f"{args.r:g}"
    columns = [
        ("family", "family"),
        ("param", _PARAM_LABELS[args.family]),
        ("D_closed", "D_closed_form[dimensionless]"),
        ("D_finite_r", f"D_finite_r{r_label}[dimensionless]"),
        ("D_search_best", "D_search_best[dimensionless]"),
        ("capacity_bound_log2", "capacity_bound[log2 units]"),
        ("violated", "violated"),
        ("error", "error"),
    ]
    renamed = [{label: row[key] for key, label in columns} for row in rows]
    out = _output_path(args.out, f"sweep_{args.family}.csv")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        ser.write_csv(renamed, out, [label for _, label in columns])
    except OSError as exc:
        print(f"error: cannot write sweep to {out}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_FAIL if any(row["violated"] or row["error"] for row in rows) else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gaussnogo",
        description="Entanglement degradation of Gaussian channels and Gaussian error-correction search.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log search progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def channel_opt(p):
        p.add_argument("--channel", required=True, type=str, help=_SPEC_HELP)

    def search_opts(p, budget):
        p.add_argument("--n", type=int, default=2, help=f"modes per code, 1..{N_MAX} (default 2)")
        p.add_argument("--budget", type=_positive_int, default=budget)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--method", choices=METHODS, default="nelder-mead-multistart")

    p = sub.add_parser("degradation", help="closed-form entanglement degradation of a channel")
    channel_opt(p)
    p.set_defaults(func=cmd_degradation)

    p = sub.add_parser("verify", help="closed form, finite-r limit, teleportation and code search")
    channel_opt(p)
    p.add_argument("--r", type=_r_arg, default=8.0)
    search_opts(p, 2000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lemma1-check", help="teleportation through the finite-r Choi state")
    channel_opt(p)
    p.add_argument("--r", type=_r_arg, default=8.0)
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("gecc", help="Gaussian error-correcting code tools")
    gsub = p.add_subparsers(dest="gecc_command", required=True)
    q = gsub.add_parser("eval", help="effective channel of a code from a JSON file")
    q.add_argument("--code", required=True)
    channel_opt(q)
    q.set_defaults(func=cmd_gecc_eval)

    p = sub.add_parser("nogo-search", help="search codes for a degradation below the channel's")
    channel_opt(p)
    search_opts(p, 2000)
    p.add_argument("--out", default=None, help=f"result JSON (default ${OUTPUT_DIR_ENV}/nogo_search.json)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sweep", help="degradation table over a channel family")
    p.add_argument("--family", required=True, choices=sorted(ch.FAMILIES))
    p.add_argument("--grid", required=True, help="start:stop:step (inclusive) or v1,v2,...")
    p.add_argument("--r", type=_r_arg, default=8.0)
    search_opts(p, 200)
    p.add_argument("--out", default=None, help=f"CSV path (default ${OUTPUT_DIR_ENV}/sweep_<family>.csv)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if hasattr(args, "channel"):
            args.channel_text = args.channel
            args.channel = parse_channel_spec(args.channel)
        if hasattr(args, "n") and not 1 <= args.n <= N_MAX:
            raise UsageError(f"--n must lie in [1, {N_MAX}], got {args.n}")
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"{parser.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def _entry():
    sys.exit(main())


if __name__ == "__main__":
    _entry()
