"""Command-line interface.

Exit codes: 0 success, 1 malformed JSON/CSV input, 2 domain error,
3 when a reproduced example has a failing check.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import backext, fixtures, positivity, shift_analysis
from .errors import CpdError
from .measures import DiscreteMeasure
from .sequences import (DEFAULT_FLOOR, DEFAULT_HORIZON, DEFAULT_WINDOW,
                        RepresentingTriplet, growth_estimate, is_cpd_window,
                        is_pd_window, is_stieltjes_window, synthesize,
                        weights_from_gamma)

EXIT_OK, EXIT_MALFORMED, EXIT_DOMAIN, EXIT_CHECK_FAILED = 0, 1, 2, 3
SIG_DIGITS = 15


class MalformedInput(Exception):
    pass


def _num(x):
    """Round to 15 significant digits; non-finite values become strings."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def _clean(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    return str(obj)


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        v = _num(v)
        return v if isinstance(v, str) else f"{v:.{SIG_DIGITS}g}"
    return str(v)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _read_source(text):
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            return fh.read()
    return text


def _load_json(text):
    try:
        return json.loads(_read_source(text))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from None


def _check_atoms(data):
    if not (isinstance(data, dict) and isinstance(data.get("atoms"), list)
            and all(isinstance(a, dict) and "x" in a and "w" in a
                    and all(isinstance(a[k], (int, float)) for k in ("x", "w"))
                    for a in data["atoms"])):
        raise MalformedInput('measure must look like {"atoms": [{"x": .., "w": ..}]}')


def parse_measure(text):
    data = _load_json(text)
    _check_atoms(data)
    return DiscreteMeasure.from_dict(data)


def parse_triplet(text):
    data = _load_json(text)
    if not isinstance(data, dict) or "b" not in data:
        raise MalformedInput('triplet must look like {"b", "c", "nu", "gamma0"}')
    for key in ("b", "c", "gamma0"):
        if key in data and not isinstance(data[key], (int, float)):
            raise MalformedInput(f"triplet field {key!r} must be a number")
    if "nu" in data:
        _check_atoms(data["nu"])
    return RepresentingTriplet.from_dict(data)


def parse_numbers(text, column):
    """A JSON list, or CSV with a header containing ``column``."""
    raw = _read_source(text)
    if raw.lstrip().startswith("["):
        data = _load_json(raw)
        if not all(isinstance(v, (int, float)) for v in data):
            raise MalformedInput("expected a JSON list of numbers")
        return np.asarray(data, dtype=float)
    rows = list(csv.DictReader(io.StringIO(raw)))
    if not rows or column not in rows[0]:
        raise MalformedInput(f"CSV input needs a {column!r} column")
    try:
        return np.array([float(r[column]) for r in rows if r[column] != ""])
    except ValueError as exc:
        raise MalformedInput(f"bad number in CSV: {exc}") from None


def _tolerances(args, **extra):
    out = {"floor": args.floor, "window": args.window, "horizon": args.horizon}
    out.update(extra)
    return out


def _sequence_rows(gamma):
    lam = weights_from_gamma(gamma).weights
    return [(n, g, lam[n] if n < lam.size else None) for n, g in enumerate(gamma)]


def _window_report(gamma, args):
    win = args.window
    out = {}
    for name, fn, top in (("cpd", is_cpd_window, 2 * win + 2),
                          ("pd", is_pd_window, 2 * win),
                          ("stieltjes", is_stieltjes_window, 2 * win + 1)):
        if gamma.size - 1 < top:
            out[name] = None
            continue
        chk = fn(gamma, win, args.floor)
        out[name] = {"passed": chk.passed, "min_eigenvalue": chk.min_eigenvalue,
                     "relative_margin": chk.relative_margin}
    return out


# --- subcommands -------------------------------------------------------------

def cmd_synth(args):
    trip, g0 = parse_triplet(args.triplet)
    gamma = synthesize(trip, g0, args.horizon).values
    rows = _sequence_rows(gamma)
    if args.format == "csv":
        return _csv(["n", "gamma", "lambda"], rows)
    return {"triplet": trip.to_dict(gamma0=g0),
            "n": [r[0] for r in rows], "gamma": gamma,
            "lambda": [r[2] for r in rows[:-1]],
            "tolerances": _tolerances(args)}


def cmd_analyze(args):
    if args.sequence is not None:
        gamma = parse_numbers(args.sequence, "gamma")
        if args.format == "csv":
            return _csv(["n", "gamma", "lambda"], _sequence_rows(gamma))
        report = {"source": "supplied", "windows": _window_report(gamma, args)}
        if gamma.size > 8:
            report["growth"] = growth_estimate(gamma)
        report["tolerances"] = _tolerances(args)
        return report
    trip, g0 = parse_triplet(args.triplet)
    if args.format == "csv":
        return shift_analysis.diagonal_triplet(trip, args.horizon).to_csv()
    gamma = synthesize(trip, g0, args.horizon).values
    report = {"source": "triplet", "triplet": trip.to_dict(gamma0=g0),
              "windows": _window_report(gamma, args),
              "growth": growth_estimate(gamma) if args.horizon >= 8 else None}
    if trip.supported_on_halfline:
        report["compactness"] = [v.to_dict() for v in
                                 shift_analysis.compactness_diagnostics(
                                     trip, args.horizon)]
        report["subnormal"] = shift_analysis.subnormality_check(
            trip, args.window, args.floor, args.horizon)
    if trip.c == 0:
        report["berger"] = shift_analysis.berger_from_triplet(trip, g0).to_dict()
    report["tolerances"] = _tolerances(
        args, nonzero=shift_analysis.NONZERO_TOL, berger=shift_analysis.BERGER_TOL)
    return report


def cmd_classify(args):
    if args.triplet is not None:
        trip, _ = parse_triplet(args.triplet)
        c, nu = trip.c, trip.nu
    else:
        c = args.c
        nu = parse_measure(args.nu) if args.nu is not None else DiscreteMeasure()
    rep = positivity.classify(c, nu)
    if args.format == "csv":
        return _csv(["n", "zeta"], enumerate(rep.zeta_trace, start=1))
    out = rep.to_dict()
    out["tolerances"] = {"gamma2": positivity.GAMMA2_TOL,
                         "scan_cap": positivity.ZETA_SCAN_CAP,
                         "patience": positivity.ZETA_PATIENCE}
    return out


def cmd_backext(args):
    trip, _ = parse_triplet(args.triplet)
    m = max(args.steps or 0, 16)
    trace = backext.sigma_trace(trip, m)
    if args.format == "csv":
        return _csv(["k", "sigma"], enumerate(trace.sigma, start=1))
    out = {"sigma_trace": trace.to_dict(),
           "infinite_step": backext.infinite_step_check(trip).to_dict()}
    if args.steps is not None:
        out["extension"] = backext.extend_shift_n(trip, args.steps, args.t).to_dict()
    elif args.t is not None:
        out["extension"] = backext.extend_shift_1(trip, args.t).to_dict()
    out["tolerances"] = {"degenerate_sigma": backext.DEGENERATE_TOL,
                         "infinite_scan_cap": backext.INFINITE_SCAN_CAP}
    return out


def cmd_flatness(args):
    if args.weights is not None:
        weights = parse_numbers(args.weights, "lambda")
        certified = args.cpd_certified
    else:
        trip, g0 = parse_triplet(args.triplet)
        gamma = synthesize(trip, g0, max(args.count, 2)).values
        weights = weights_from_gamma(gamma).weights[:args.count]
        certified = True
    verdict = shift_analysis.flatness_analyze(weights, certified, args.equality_tol)
    if args.format == "csv":
        return _csv(["n", "lambda"], enumerate(weights))
    out = verdict.to_dict()
    out["weights"] = weights
    out["tolerances"] = {"equality": args.equality_tol}
    return out


def cmd_reproduce(args):
    params = {"theta": args.theta, "k": args.k, "c": args.c}
    if args.nu is not None:
        params["nu"] = parse_measure(args.nu)
    if args.horizon_given:
        params["horizon"] = args.horizon
    rep = fixtures.reproduce_example(args.name, **params)
    args.exit_code = EXIT_OK if rep.passed else EXIT_CHECK_FAILED
    if args.format == "csv":
        return _csv(["check", "passed", "detail"],
                    [(c.label, c.passed, c.detail) for c in rep.checks])
    out = rep.to_dict()
    out["tolerances"] = {"relative": fixtures.REL_TOL, "sigma": fixtures.SIGMA_TOL}
    return out


# --- parser ------------------------------------------------------------------

def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=_positive(int), default=None,
                        help=f"last sequence index (default {DEFAULT_HORIZON})")
    common.add_argument("--window", type=_positive(int), default=DEFAULT_WINDOW)
    common.add_argument("--floor", type=_positive(float), default=DEFAULT_FLOOR,
                        help="eigenvalue floor, relative to the max Hankel entry")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(
        prog="cpdshift",
        description="CPD sequences, their triplets and weighted shifts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="sequence from a triplet")
    p.add_argument("--triplet", required=True, help="inline JSON or file path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", parents=[common],
                       help="window tests and shift diagnostics")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--triplet")
    src.add_argument("--sequence", help="JSON list or CSV with a gamma column")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", parents=[common], help="positivity region")
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--nu", help='measure JSON {"atoms": [...]}')
    p.add_argument("--triplet")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("backext", parents=[common], help="backward extensions")
    p.add_argument("--triplet", required=True)
    p.add_argument("--steps", type=_positive(int))
    p.add_argument("--t", type=_positive(float),
                   help="probe for one step, or the last weight with --steps")
    p.set_defaults(func=cmd_backext)

    p = sub.add_parser("flatness", parents=[common], help="equal-weight patterns")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--weights", help="JSON list or CSV with a lambda column")
    src.add_argument("--triplet")
    p.add_argument("--cpd-certified", action="store_true",
                   help="assert that the supplied weights give a CPD shift")
    p.add_argument("--count", type=_positive(int), default=fixtures.FLATNESS_WINDOW,
                   help="weights taken from a triplet")
    p.add_argument("--equality-tol", type=_positive(float),
                   default=shift_analysis.EQUALITY_TOL)
    p.set_defaults(func=cmd_flatness)

    p = sub.add_parser("reproduce-example", parents=[common],
                       help="rebuild a worked example and check its claims")
    p.add_argument("name", choices=sorted(fixtures.EXAMPLES))
    p.add_argument("--theta", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--nu")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.horizon_given = args.horizon is not None
    if args.horizon is None:
        args.horizon = DEFAULT_HORIZON
    args.exit_code = EXIT_OK
    try:
        result = args.func(args)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (CpdError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        sys.stdout.write(json.dumps(_clean(result), indent=2) + "\n")
    return args.exit_code


if __name__ == "__main__":
    sys.exit(main())
