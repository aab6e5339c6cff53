"""Command-line entry point: ``driftlens <command> ...`` or ``python -m driftlens``.

Exit codes: 0 success, 1 validation failure, 2 malformed input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dataio, harness
from .errors import DataInvalid, DriftLensError, InputFormatError, NumericalError
from .subspace import METHODS, HyperParams, fit

EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _fixed(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return name.strip(), (int(value) if name.strip() == "d" else float(value))


def _add_data_args(p):
    g = p.add_argument_group("data (svmlight files, or a seeded synthetic pair)")
    g.add_argument("--source", help="labeled source file")
    g.add_argument("--target", help="target file")
    g.add_argument("--dim", type=int, default=dataio.UCSD_DIM, help="feature dimension")
    g.add_argument("--seed", type=int, default=0,
                   help="seed for the synthetic pair used when --source is omitted")
    g.add_argument("--synth-classes", type=int, default=4)
    g.add_argument("--synth-dim", type=int, default=10)
    g.add_argument("--synth-n", type=int, default=30, help="samples per class")
    g.add_argument("--synth-drift", type=float, default=5.0,
                   help="shift of the target along the first feature")


def _add_model_args(p, grid=False):
    p.add_argument("--method", choices=METHODS, default="ddrca")
    if grid:
        p.add_argument("--d", type=_ints, help="comma-separated d grid")
        p.add_argument("--lambda", dest="lam", type=_floats, help="comma-separated grid")
        p.add_argument("--kappa", type=_floats, help="comma-separated grid")
        p.add_argument("--mu", type=_floats, help="comma-separated grid")
    else:
        p.add_argument("--d", type=int, default=2)
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
        p.add_argument("--kappa", type=float, default=1.0)
        p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--ridge-tau", type=float, default=1e-3)
    p.add_argument("--norm", choices=harness.NORMS, default="zscore")


def _add_eval_args(p):
    p.add_argument("--classifier", choices=tuple(harness.CLASSIFIERS), default="1nn")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (stdout when omitted)")


def build_parser():
    parser = argparse.ArgumentParser(prog="driftlens", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check batch files against the expected counts")
    p.add_argument("dir", nargs="?", help=f"dataset directory (default ${dataio.DATA_ENV})")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("fit", help="fit a projection and save it as JSON")
    _add_data_args(p)
    _add_model_args(p)
    p.add_argument("--out", help="model file (stdout when omitted)")

    p = sub.add_parser("eval", help="run one drift task and report accuracy")
    _add_data_args(p)
    _add_model_args(p)
    _add_eval_args(p)

    p = sub.add_parser("grid", help="sweep parameter grids for one task")
    _add_data_args(p)
    _add_model_args(p, grid=True)
    _add_eval_args(p)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("reproduce-ucsd", help="batch 1 -> batches 2..10 sweeps")
    p.add_argument("dir", nargs="?", help=f"dataset directory (default ${dataio.DATA_ENV})")
    p.add_argument("--method", action="append", choices=METHODS,
                   help="repeatable; default: all four methods")
    p.add_argument("--classifier", choices=tuple(harness.CLASSIFIERS), default="1nn")
    p.add_argument("--norm", choices=harness.NORMS, default="zscore")
    p.add_argument("--out", default="ucsd_report", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="format echoed to stdout; both are written to --out")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("project2d", help="write 2-D PCA coordinates of all batches")
    p.add_argument("dir", nargs="?", help=f"dataset directory (default ${dataio.DATA_ENV})")
    p.add_argument("out", nargs="?", default="projection2d.csv")
    p.add_argument("--norm", choices=harness.NORMS, default="zscore")

    p = sub.add_parser("heatmap", help="slice a saved grid into a 2-D accuracy table")
    p.add_argument("surface", help="grid output written by the grid command")
    p.add_argument("--x", required=True, help="column axis (d, lambda, kappa, mu)")
    p.add_argument("--y", required=True, help="row axis")
    p.add_argument("--fixed", type=_fixed, action="append", default=[],
                   help="NAME=VALUE for every other swept axis (repeatable)")
    p.add_argument("--out", help="CSV file (stdout when omitted)")
    return parser


def _load_pair(args):
    if args.source:
        source = dataio.parse_svmlight(args.source, args.dim)
        if not args.target:
            raise InputFormatError("--target is required with --source")
        label_map = {raw: k + 1 for k, raw in enumerate(source.class_ids)}
        target = dataio.parse_svmlight(args.target, args.dim, label_map)
        return source, target
    drift = np.zeros(args.synth_dim)
    drift[0] = args.synth_drift
    return dataio.synth_two_domain(
        args.seed, args.synth_n, args.synth_classes, args.synth_dim, drift
    )


def _params(args):
    return HyperParams(d=args.d, lam=args.lam, kappa=args.kappa, mu=args.mu,
                       ridge_tau=args.ridge_tau)


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(args):
    report = dataio.validate_batches(dataio.load_ucsd(args.dir))
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=1))
    else:
        print(report)
    return EXIT_OK if report.passed else EXIT_INVALID


def _cmd_fit(args):
    source, target = _load_pair(args)
    src, X_t = harness._prepare(source, target, args.norm)
    model = fit(args.method, src, X_t, _params(args))
    _emit(model.to_json() + "\n", args.out)
    return EXIT_OK


def _cmd_eval(args):
    source, target = _load_pair(args)
    r = harness.run_task(source, target, args.method, _params(args),
                         args.classifier, args.norm)
    row = {"source": r.source, "target": r.target, "method": r.method,
           **r.param_values(), "accuracy": round(r.accuracy, 2)}
    if args.format == "json":
        text = json.dumps(row) + "\n"
    else:
        text = ",".join(row) + "\n" + ",".join(str(v) for v in row.values()) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _cmd_grid(args):
    source, target = _load_pair(args)
    grids = dict(harness.default_grids(args.method))
    for name, value in (("d", args.d), ("lambda", args.lam),
                        ("kappa", args.kappa), ("mu", args.mu)):
        if value:
            grids[name] = value
    surface, best = harness.grid_search(
        source, target, args.method, grids, args.classifier, args.norm,
        ridge_tau=args.ridge_tau, workers=args.workers,
    )
    if args.out:
        if args.format == "json":
            surface.write_json(args.out)
        else:
            surface.write_csv(args.out)
    if best is not None:
        print(f"best {best.accuracy:.2f}% at {harness._fmt_params(args.method, best.params)}",
              file=sys.stderr)
    if not args.out:
        sys.stdout.write(json.dumps(surface.to_dict(), indent=1) + "\n")
    return EXIT_OK


def _cmd_reproduce(args):
    methods = tuple(args.method) if args.method else METHODS

    def progress(method, target, best):
        acc = "error" if best is None else f"{best.accuracy:.2f}"
        print(f"{method:>5} batch1 -> {target}: {acc}", file=sys.stderr)

    report = harness.reproduce_ucsd(args.dir, methods, args.classifier, args.norm,
                                    workers=args.workers, out_dir=args.out,
                                    progress=progress)
    name = "summary.json" if args.format == "json" else "summary.csv"
    with open(f"{args.out}/{name}") as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


def _cmd_project2d(args):
    batches = dataio.load_ucsd(args.dir)
    harness.emit_projection_2d(batches, args.out, norm=args.norm)
    return EXIT_OK


def _cmd_heatmap(args):
    surface = harness.GridSurface.read(args.surface)
    if args.out:
        harness.emit_heatmap(surface, dict(args.fixed), args.x, args.y, args.out)
    else:
        harness.write_heatmap(sys.stdout, surface, dict(args.fixed), args.x, args.y)
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "fit": _cmd_fit,
    "eval": _cmd_eval,
    "grid": _cmd_grid,
    "reproduce-ucsd": _cmd_reproduce,
    "project2d": _cmd_project2d,
    "heatmap": _cmd_heatmap,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DataInvalid as exc:
        print(f"validation failed:\n{exc.report}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DriftLensError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
