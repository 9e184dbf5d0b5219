"""``dtl`` command line.

Subcommands: ``fit``, ``predict``, ``generate``, ``export-mesh``,
``experiment``. Long flags only. Exit status is 0 on success, 1 on a usage
error, 2 on a data or model error; messages go to stderr prefixed
``error:``. Every output file ``F`` gets a manifest ``F.manifest.json``
with the resolved configuration, seed and library versions (no
timestamps), so a rerun with the same manifest reproduces ``F`` byte for
byte.

Experiment outputs
    ``--out r.json`` writes ``r.json`` (``experiment``, ``config`` and every
    result field at the top level) and ``r.csv`` (one row per condition).
    Column sets per experiment:

    optimality   alternative, mean_loss_delaunay, mean_loss_alternative
    scaling      n, mean_T, in_hull_queries
    consistency  n, mse, in_hull_queries
    risk         n, n_test, bayes_risk, empirical_dtl_risk, bound
    adaptivity   n, gradient_error, in_hull_queries
    interperror  n, l2_error, in_hull_queries

    Plot with any CSV tool, e.g.
    ``python -c "import pandas as pd; pd.read_csv('r.csv').plot(x='n', logx=True, logy=True).figure.savefig('r.png')"``.
"""
import argparse
import csv
import json
import os
import platform
import sys

import numpy as np
import scipy

from . import __version__, _backend
from .datasets import DatasetKind
from .errors import DtlError
from .evaluation import (
    classification_risk_experiment, consistency_experiment, interpolation_error_experiment,
    local_adaptivity_experiment, optimality_experiment, scaling_experiment,
)
from .io import (
    load_model, read_dataset, read_queries, save_model, write_dataset, write_mesh,
    write_surface_mesh,
)
from .optimizer import FitConfig, LossKind, fit, predict

EXPERIMENTS = ("optimality", "scaling", "consistency", "risk", "adaptivity", "interperror")

# per-experiment defaults for flags left unset
EXPERIMENT_DEFAULTS = {
    "optimality": {"p": 2, "n": 200, "queries": 500, "alternatives": 20},
    "scaling": {"p": 2, "sizes": "100,400,1600,6400", "queries": 200},
    "consistency": {"generator": "saddle", "sizes": "50,200,800", "test_size": 2000,
                    "lam": 0.0, "loss": "squared", "noise": 0.0, "max_iters": 1000},
    "risk": {"generator": "flip-circles", "n": 1000, "test_size": 2000, "flip": 0.1,
             "lam": 0.0, "loss": "squared", "max_iters": 1000},
    "adaptivity": {"generator": "saddle", "sizes": "100,400,1600", "test_size": 2000},
    "interperror": {"generator": "paraboloid", "sizes": "100,400,1600", "test_size": 4000},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _Formatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


def _sizes(text):
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


def _add_optimizer_flags(sp):
    sp.add_argument("--lambda", dest="lam", type=float, default=0.0,
                    help="regularization weight")
    sp.add_argument("--loss", choices=[k.value for k in LossKind], default="squared",
                    help="data loss")
    sp.add_argument("--step", type=float, default=0.01, help="Adam step size")
    sp.add_argument("--eta", type=float, default=None,
                    help="stop when |psi_t - psi_{t-1}| <= eta (default 1e-6 * |y|)")
    sp.add_argument("--max-iters", type=int, default=5000, help="iteration cap")
    sp.add_argument("--beta1", type=float, default=0.9, help="Adam first-moment decay")
    sp.add_argument("--beta2", type=float, default=0.999, help="Adam second-moment decay")
    sp.add_argument("--epsilon", type=float, default=1e-8, help="Adam denominator offset")
    sp.add_argument("--seed", type=int, default=0, help="random seed (recorded)")


def build_parser():
    ap = _Parser(prog="dtl", formatter_class=_Formatter, allow_abbrev=False,
                 description="Delaunay triangulation learner.")
    ap.add_argument("--version", action="version", version=f"dtl {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("fit", help="fit a model to a dataset CSV", formatter_class=_Formatter,
                        allow_abbrev=False, description="Fit psi by Adam; writes model JSON.")
    sp.add_argument("--data", required=True, help="dataset CSV (x1..xp,y)")
    sp.add_argument("--out", required=True, help="model JSON path")
    _add_optimizer_flags(sp)

    sp = sub.add_parser("predict", help="evaluate a model at query points",
                        formatter_class=_Formatter, allow_abbrev=False,
                        description="Writes CSV x1..xp,y with y the prediction.")
    sp.add_argument("--model", required=True, help="model JSON")
    sp.add_argument("--queries", required=True, help="CSV with x1..xp (a y column is ignored)")
    sp.add_argument("--out", required=True, help="predictions CSV path")
    sp.add_argument("--classify", action="store_true",
                    help="write labels 1{F > 1/2} instead of values")

    sp = sub.add_parser("generate", help="draw a synthetic dataset", formatter_class=_Formatter,
                        allow_abbrev=False, description="Writes dataset CSV x1,x2,y.")
    sp.add_argument("--kind", required=True, choices=[k.value for k in DatasetKind],
                    help="generator")
    sp.add_argument("--n", type=int, required=True, help="number of samples (>= 4)")
    sp.add_argument("--noise", type=float, default=0.0,
                    help="response noise std (regression) or feature jitter std (moons, circles)")
    sp.add_argument("--flip", type=float, default=0.1, help="label-flip rate for flip-circles")
    sp.add_argument("--seed", type=int, default=0, help="random seed")
    sp.add_argument("--out", required=True, help="dataset CSV path")

    sp = sub.add_parser("export-mesh", help="write a model's mesh", formatter_class=_Formatter,
                        allow_abbrev=False,
                        description="Lifted surface (x, psi) or the triangulation itself.")
    sp.add_argument("--model", required=True, help="model JSON")
    sp.add_argument("--out", required=True, help="mesh path")
    sp.add_argument("--format", choices=["off", "json"], default="off", help="mesh format")
    sp.add_argument("--what", choices=["surface", "triangulation"], default="surface",
                    help="lifted surface (OFF needs p <= 2) or feature-space mesh "
                         "(OFF needs p in {2, 3})")

    sp = sub.add_parser(
        "experiment", help="run one verification experiment", formatter_class=_Formatter,
        allow_abbrev=False,
        description="Unset flags take per-experiment defaults:\n" + "\n".join(
            f"  {k}: " + ", ".join(f"{a}={b}" for a, b in v.items())
            for k, v in EXPERIMENT_DEFAULTS.items()))
    sp.add_argument("--name", required=True, choices=EXPERIMENTS, help="experiment")
    sp.add_argument("--out", required=True, help="result JSON path (CSV written alongside)")
    sp.add_argument("--seed", type=int, default=0, help="base random seed")
    sp.add_argument("--p", type=int, default=None, help="dimension (optimality, scaling)")
    sp.add_argument("--n", type=int, default=None, help="sample size (optimality, risk)")
    sp.add_argument("--queries", type=int, default=None,
                    help="queries per condition (optimality, scaling)")
    sp.add_argument("--alternatives", type=int, default=None,
                    help="random triangulations to compare (optimality)")
    sp.add_argument("--sizes", type=str, default=None,
                    help="comma-separated sample sizes (scaling, consistency, adaptivity, "
                         "interperror)")
    sp.add_argument("--generator", type=str, default=None,
                    help="data generator (consistency, risk, adaptivity, interperror)")
    sp.add_argument("--test-size", type=int, default=None, help="held-out test points")
    sp.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="regularization weight (consistency, risk)")
    sp.add_argument("--loss", choices=[k.value for k in LossKind], default=None,
                    help="data loss (consistency, risk)")
    sp.add_argument("--noise", type=float, default=None, help="response noise std (consistency)")
    sp.add_argument("--flip", type=float, default=None, help="label-flip rate (risk)")
    sp.add_argument("--max-iters", type=int, default=None, help="Adam iteration cap")
    return ap


# -- helpers ------------------------------------------------------------------

def _versions():
    return {"dtl": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version(), "kernels": _backend.name}


def _write_json(path, obj):
    with open(path, "w", newline="") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _manifest(path, command, config, seed):
    _write_json(path + ".manifest.json", {
        "command": command, "config": config, "seed": seed, "output": os.path.basename(path),
        "versions": _versions()})


def _write_rows(path, rows):
    cols = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in
                        (r[c] for c in cols)])


# -- commands -----------------------------------------------------------------

def _cmd_fit(a):
    ps, y = read_dataset(a.data)
    cfg = FitConfig(lam=a.lam, loss=a.loss, beta1=a.beta1, beta2=a.beta2, epsilon=a.epsilon,
                    step_size=a.step, eta=a.eta, max_iters=a.max_iters, seed=a.seed)
    model, state = fit(ps, y, cfg)
    save_model(model, a.out)
    _manifest(a.out, "fit", {"data": a.data, **cfg.to_dict()}, a.seed)
    print(f"fit: n={ps.n} p={ps.dim} simplices={len(model.tri)} iterations={state.t} "
          f"objective {state.objective_trace[0]!r} -> {state.objective!r}")


def _cmd_predict(a):
    model = load_model(a.model)
    Q = read_queries(a.queries)
    if Q.shape[1] != model.dim:
        raise DtlError(f"queries have {Q.shape[1]} features, model expects {model.dim}")
    out = predict(model, Q)
    if a.classify:
        out = (out > 0.5).astype(np.float64)
    write_dataset(a.out, Q, out)
    _manifest(a.out, "predict", {"model": a.model, "queries": a.queries,
                                 "classify": a.classify}, None)


def _cmd_generate(a):
    from .datasets import generate_dataset
    ps, y = generate_dataset(a.kind, a.n, a.noise, a.seed, flip=a.flip)
    write_dataset(a.out, ps, y)
    _manifest(a.out, "generate", {"kind": a.kind, "n": a.n, "noise": a.noise,
                                  "flip": a.flip}, a.seed)


def _cmd_export(a):
    model = load_model(a.model)
    if a.what == "surface":
        write_surface_mesh(model, a.out, a.format)
    else:
        write_mesh(model.tri, a.out, a.format)
    _manifest(a.out, "export-mesh", {"model": a.model, "format": a.format,
                                     "what": a.what}, None)


def resolve_experiment(a):
    """Experiment flags with per-experiment defaults filled in."""
    keys = ("p", "n", "queries", "alternatives", "sizes", "generator", "test_size", "lam",
            "loss", "noise", "flip", "max_iters")
    cfg = dict(EXPERIMENT_DEFAULTS[a.name])
    for k in keys:
        v = getattr(a, k)
        if v is not None:
            if k not in cfg:
                raise UsageError(f"--{k.replace('_', '-')} does not apply to experiment {a.name}")
            cfg[k] = v
    if "sizes" in cfg:
        try:
            cfg["sizes"] = _sizes(cfg["sizes"])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc)) from None
    return cfg


def run_experiment(name, cfg, seed):
    if name == "optimality":
        return optimality_experiment(cfg["n"], cfg["p"], cfg["queries"], cfg["alternatives"], seed)
    if name == "scaling":
        return scaling_experiment(cfg["p"], cfg["sizes"], cfg["queries"], seed)
    if name == "consistency":
        return consistency_experiment(cfg["generator"], cfg["loss"], cfg["lam"], cfg["sizes"],
                                      seed, noise=cfg["noise"], n_test=cfg["test_size"],
                                      max_iters=cfg["max_iters"])
    if name == "risk":
        return classification_risk_experiment(cfg["generator"], cfg["n"], cfg["test_size"],
                                              cfg["lam"], seed, loss=cfg["loss"],
                                              flip=cfg["flip"], max_iters=cfg["max_iters"])
    if name == "adaptivity":
        return local_adaptivity_experiment(cfg["generator"], cfg["sizes"], seed,
                                           n_test=cfg["test_size"])
    return interpolation_error_experiment(cfg["generator"], cfg["sizes"], seed,
                                          n_test=cfg["test_size"])


def _cmd_experiment(a):
    cfg = resolve_experiment(a)
    report = run_experiment(a.name, cfg, a.seed)
    stem, ext = os.path.splitext(a.out)
    json_path = a.out if ext.lower() == ".json" else a.out + ".json"
    csv_path = (stem if ext.lower() == ".json" else a.out) + ".csv"
    result = report.to_dict()
    _write_json(json_path, {"experiment": a.name, "config": {**cfg, "seed": a.seed}, **result})
    _write_rows(csv_path, report.rows())
    for path in (json_path, csv_path):
        _manifest(path, "experiment", {"name": a.name, **cfg}, a.seed)
    print(f"experiment {a.name}: wrote {json_path} and {csv_path}")


COMMANDS = {"fit": _cmd_fit, "predict": _cmd_predict, "generate": _cmd_generate,
            "export-mesh": _cmd_export, "experiment": _cmd_experiment}


def run(argv=None):
    """Execute one command; returns the exit status instead of exiting."""
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (DtlError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
