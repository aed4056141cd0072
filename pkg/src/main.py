"""Command-line entry point for the convergence studies and the flat-norm tool."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .config import DEFAULT_SEED, load_config_file
from .harness import ExperimentConfig, emit_results, run_experiment
from .interface import ConsoleInterface, UserInterface
from .measures import save_csv, load_csv
from .metrics import Ball, FlatMetricProblem, flat_norm
from .sampling import sample, save_points_csv
from .geometry import shape_by_name
from .utils import configure_logging

logger = logging.getLogger(__name__)

EXPERIMENTS = ("rate", "measure", "fluct", "tangent", "density")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="disable progress bars")
    return common


def _experiment_parser() -> argparse.ArgumentParser:
    # defaults are suppressed so that only explicit flags override the config file
    exp = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    exp.add_argument("--config", help="JSON or TOML file with the same keys as the flags")
    exp.add_argument("--shape", help="shape name with parameters, e.g. stadium:radius=1,length=2")
    exp.add_argument("--density", help="uniform, tilt, holder:b=0.5 or jump")
    exp.add_argument("--variant", choices=["W", "V", "split"])
    exp.add_argument("--n-grid", dest="n_grid", help="comma-separated increasing sample sizes")
    exp.add_argument("--trials", type=int)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--tau", type=float)
    exp.add_argument("--delta", type=float, help="fixed bandwidth instead of the N-rule")
    exp.add_argument("--h", type=float, help="reference quadrature resolution")
    exp.add_argument("--ball", help="localization ball c1,...,cn,R")
    exp.add_argument("--kernel", help="triangular, epanechnikov or custom:<table.csv>")
    exp.add_argument("--solver", choices=["auto", "exact", "sparse"])
    exp.add_argument("--matrix-norm", dest="matrix_norm", choices=["op", "fro"])
    exp.add_argument("--bootstrap", type=int)
    exp.add_argument("--singular-factor", dest="singular_factor", type=float)
    exp.add_argument("--out", help="directory for trials.csv and summary.json")
    return exp


def build_parser() -> argparse.ArgumentParser:
    common, exp = _common_parser(), _experiment_parser()
    parser = argparse.ArgumentParser(prog="varifold-estimation",
                                     description="Varifold estimation from point samples")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        cmd = sub.add_parser(name, parents=[common, exp], help=f"run the {name} experiment")
        if name in ("fluct", "density"):
            cmd.add_argument("--point", default=argparse.SUPPRESS, help="evaluation point x1,...,xn")
        if name == "fluct":
            cmd.add_argument("--delta-grid", dest="delta_grid", default=argparse.SUPPRESS,
                             help="comma-separated bandwidths at a single N")

    flat = sub.add_parser("flatnorm", parents=[common], help="bounded-Lipschitz distance of two CSV files")
    flat.add_argument("first")
    flat.add_argument("second")
    flat.add_argument("--ball", help="localization ball c1,...,cn,R")
    flat.add_argument("--coarsen", type=float, help="grid diameter used when over the size cap")
    flat.add_argument("--solver", default="auto", choices=["auto", "exact", "sparse"])
    flat.add_argument("--matrix-norm", dest="matrix_norm", default="op", choices=["op", "fro"])
    flat.add_argument("--out", help="directory for the witness and the transport plan")

    smp = sub.add_parser("sample", parents=[common], help="write a sample or a reference quadrature")
    smp.add_argument("--shape", default="circle")
    smp.add_argument("--density", default="uniform")
    smp.add_argument("--n", type=int, default=1000)
    smp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    smp.add_argument("--stream", type=int, default=0)
    smp.add_argument("--quadrature", type=float, metavar="H",
                     help="write the reference quadrature varifold at resolution H instead")
    smp.add_argument("--out", default="samples.csv")
    return parser


def experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values overridden by explicit flags."""
    options: Dict[str, Any] = dict(vars(args))
    for key in ("command", "log_level"):
        options.pop(key, None)
    base = load_config_file(options.pop("config")) if "config" in options else {}
    return ExperimentConfig.from_mapping({**base, **options})


def _run_flatnorm(args: argparse.Namespace, ui: UserInterface) -> None:
    first, second = load_csv(args.first), load_csv(args.second)
    ball = Ball.parse(args.ball) if args.ball else None
    problem = FlatMetricProblem(first, second, localization=ball, matrix_norm=args.matrix_norm)
    want_witness = args.out is not None
    # only the exact solver yields dual potentials
    method = "exact" if want_witness and args.solver == "auto" else args.solver
    result = flat_norm(problem, method=method, coarsen_h=args.coarsen, witness=want_witness)
    ui.display_message(f"beta = {result.value:.12g} (exact={result.exact}, support={result.support_size})")
    if want_witness and result.witness is None:
        logger.warning("solver %r returned no witness; nothing written to %s", method, args.out)
        ui.display_message(f"no witness from the {method} solver, nothing written to {args.out}")
    elif want_witness:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        np.savetxt(out / "witness.csv", result.witness, delimiter=",", fmt="%.17g", header="f", comments="")
        if result.plan is not None:
            np.savetxt(out / "plan.csv", result.plan, delimiter=",", fmt="%.17g")
        ui.display_message(f"witness and plan written to {out}")


def _run_sample(args: argparse.Namespace, ui: UserInterface) -> None:
    shape = shape_by_name(args.shape, args.density)
    if args.quadrature is not None:
        path = save_csv(shape.quadrature_varifold(args.quadrature), args.out)
    else:
        path = save_points_csv(sample(shape, args.n, args.seed, args.stream), args.out)
    ui.display_message(f"wrote {path}")


def main(argv: Optional[List[str]] = None) -> int:
    ui = ConsoleInterface()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        if args.command in EXPERIMENTS:
            cfg = experiment_config(args)
            result = run_experiment(args.command, cfg)
            ui.display_result(result)
            if cfg.out:
                paths = emit_results(result, cfg.out)
                ui.display_message(f"results written to {paths['summary'].parent}")
        elif args.command == "flatnorm":
            _run_flatnorm(args, ui)
        else:
            _run_sample(args, ui)
    except ValueError as e:
        ui.display_error(str(e))
        return 2
    except Exception as e:
        logger.debug("command failed", exc_info=True)
        ui.display_error(str(e))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
