"""
BlockMax Lab - command line

    blockmax simulate --preset M2 --reps 200 --n 1000 --out results/M2
    blockmax estimate --input data.csv --estimator bc_agg --m 10 --M 10..19 --out est.csv
    blockmax variance --beta 1 --grid-diag 0.01:0.99:0.01 --out var.csv
    blockmax rho --preset M1 --n 4000 --seed 7
    blockmax timing --preset M1 --m 2..20

Every subcommand accepts --config FILE, a flat key=value file whose keys
mirror the long flag names (dashes or underscores); flags given on the
command line win over the file.
"""
import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

import pandas as pd

import config
from modules.asymptotics import variance_curve, variance_dominance_check
from modules.block_engine import DataMatrix
from modules.copula_models import GumbelHougaard
from modules.errors import BlockmaxError
from modules.estimators import (
    ESTIMATOR_NAMES,
    EstimatorRequest,
    default_rho_config,
    evaluate,
    rho_pen_aggregated,
)
from modules.series_gen import generate
from modules.simlab import (
    PRESET_NAMES,
    emit,
    preset,
    preset_model,
    replication_rng,
    run,
    select_estimators,
    time_estimators,
)
from utils.helpers import configure_logging, diagonal_grid, load_flat_config, parse_axis, parse_range, product_grid

logger = logging.getLogger("blockmax")

TRUE_WORDS = ("1", "true", "yes", "on")


def _label_list(text: str) -> List[str]:
    return [part.strip() for part in str(text).split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockmax",
        description="Extreme-value copula estimation from sliding and disjoint block maxima",
    )
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="Logging level (default: %(default)s)")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--config", default=None, help="Flat key=value file mirroring the flags")
        return sub

    sim = command("simulate", "Run a Monte Carlo experiment on a preset model")
    sim.add_argument("--preset", default=None, choices=PRESET_NAMES)
    sim.add_argument("--reps", type=int, default=None, help="Replications (default: desk scale)")
    sim.add_argument("--n", type=int, default=None, help=f"Sample size (default: {config.DEFAULT_N})")
    sim.add_argument("--out", default=None, help="Output directory for summary.csv and manifest.json")
    sim.add_argument("--full-scale", action="store_true", help=f"Use {config.FULL_SCALE_REPS} replications")
    sim.add_argument("--workers", type=int, default=None, help="Parallel replications")
    sim.add_argument("--seed", type=int, default=None, help=f"Master seed (default: {config.MASTER_SEED})")
    sim.add_argument("--m", default="1..20", help="Block sizes lo..hi (default: %(default)s)")
    sim.add_argument("--estimators", type=_label_list, default=None, help="Comma list of estimator labels")
    sim.add_argument("--per-point", action="store_true", help="Also write points.csv")

    est = command("estimate", "Evaluate one estimator on a data CSV")
    est.add_argument("--input", default=None, help="CSV with a header row and one column per coordinate")
    est.add_argument("--estimator", default="sliding", choices=ESTIMATOR_NAMES)
    est.add_argument("--m", type=int, default=None, help="Block size")
    est.add_argument("--m-prime", type=int, default=1, help="Second block size of the bias corrections")
    est.add_argument("--M", "--blocks", dest="blocks", default=None, help="Block set lo..hi (default: m..m+9)")
    est.add_argument("--weights", default="harmonic", choices=("harmonic", "uniform"))
    est.add_argument("--rho", default="pen_agg", help="pen_agg or fixed:<negative value>")
    est.add_argument("--grid", default="0.1:0.9:0.1", help="Axis start:stop:step, used in every coordinate")
    est.add_argument("--out", default=None, help="Output CSV (default: print)")

    var = command("variance", "Asymptotic variances along the diagonal for a Gumbel-Hougaard limit")
    var.add_argument("--beta", type=float, default=1.0)
    var.add_argument("--d", type=int, default=2)
    var.add_argument("--grid-diag", default="0.01:0.99:0.01", help="Diagonal values start:stop:step")
    var.add_argument("--a", default="1", help="Block scales (comma list or start:stop:step)")
    var.add_argument("--dominance", action="store_true", help="Also check covariance dominance on random point sets")
    var.add_argument("--out", default=None, help="Output CSV (default: print)")

    rho = command("rho", "Penalised aggregated rho estimate on one generated series")
    rho.add_argument("--preset", default=None, choices=PRESET_NAMES)
    rho.add_argument("--n", type=int, default=4000)
    rho.add_argument("--seed", type=int, default=config.MASTER_SEED)

    timing = command("timing", "Wall-clock time per estimator on one generated dataset")
    timing.add_argument("--preset", default=None, choices=PRESET_NAMES)
    timing.add_argument("--n", type=int, default=None)
    timing.add_argument("--m", default="2..20")
    timing.add_argument("--repeats", type=int, default=3)
    timing.add_argument("--seed", type=int, default=None)
    timing.add_argument("--out", default=None)

    parser.set_defaults(_subparsers=commands.choices)
    return parser


def _apply_config_file(sub: argparse.ArgumentParser, path: str) -> None:
    """Install file values as defaults of the subcommand; string defaults are type-converted by argparse"""
    values = load_flat_config(path)
    actions = {action.dest: action for action in sub._actions}
    defaults: Dict[str, object] = {}
    for key, value in values.items():
        action = actions.get(key)
        if action is None or key == "config":
            logger.warning("[CONFIG] %s: ignoring unknown key '%s'", path, key)
            continue
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.strip().lower() in TRUE_WORDS
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = args._subparsers[args.command]
        _apply_config_file(sub, args.config)
        args = parser.parse_args(argv)
    return args


def _write_or_print(frame: pd.DataFrame, out: Optional[str]) -> None:
    if out:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(out, index=False)
        print(f"💾 Wrote {len(frame)} rows to {out}")
    else:
        print(frame.to_csv(index=False), end="")


def cmd_simulate(args: argparse.Namespace) -> int:
    if not args.preset:
        raise ValueError("--preset is required")
    spec = preset(
        args.preset,
        n=args.n,
        reps=args.reps,
        full_scale=args.full_scale,
        master_seed=args.seed,
        m_values=parse_range(args.m),
        estimators=select_estimators(args.estimators),
    )
    out = args.out or os.path.join(config.OUTPUT_DIR, spec.name)
    print(f"🧮 {spec.name}: {spec.model.describe()}, n={spec.n}, reps={spec.reps}, m={args.m}")

    last_status = {"value": None}

    def status_callback(status, progress=None):
        if status != last_status["value"]:
            print(f"⏳ {status}...")
            last_status["value"] = status

    table = run(spec, workers=args.workers, status_callback=status_callback)
    written = emit(table, out, per_point=args.per_point)
    print(f"✅ Done in {table.elapsed_seconds:.1f}s")
    for name, path in written.items():
        print(f"💾 {name}: {path}")
    if table.flagged:
        print(f"⚠️  Flagged cells (failure rate above {config.FAILURE_FLAG_RATE:.0%}): {', '.join(table.flagged)}")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    if not args.input or args.m is None:
        raise ValueError("--input and --m are required")
    data = DataMatrix.from_csv(args.input)
    request = EstimatorRequest(
        name=args.estimator,
        m=args.m,
        m_prime=args.m_prime,
        blocks=tuple(parse_range(args.blocks)) if args.blocks else (),
        weights=args.weights,
        rho=args.rho,
    )
    grid = product_grid(parse_axis(args.grid), data.d)
    result = evaluate(request, data, grid, rho_config=default_rho_config(data.d))
    frame = pd.DataFrame(result.grid, columns=[f"u{j + 1}" for j in range(data.d)])
    frame["value"] = result.values
    _write_or_print(frame, args.out)
    return 0


def cmd_variance(args: argparse.Namespace) -> int:
    copula = GumbelHougaard(beta=args.beta, d=args.d)
    diag = parse_axis(args.grid_diag)
    frame = variance_curve(copula, diag, parse_axis(args.a))
    _write_or_print(frame, args.out)
    if args.dominance:
        report = variance_dominance_check(copula, diagonal_grid(diag, args.d))
        marker = "✅" if report.dominated else "❌"
        print(
            f"{marker} disjoint - sliding: min variance gap {report.min_difference:.3e}, "
            f"min eigenvalue {report.min_eigenvalue:.3e} over {report.point_sets} point sets"
        )
    return 0


def cmd_rho(args: argparse.Namespace) -> int:
    if not args.preset:
        raise ValueError("--preset is required")
    model = preset_model(args.preset)
    data = generate(model, args.n, replication_rng(args.seed, 0))
    estimate = rho_pen_aggregated(data, default_rho_config(model.d))
    print(f"📈 {args.preset} ({model.describe()}), n={args.n}, seed={args.seed}")
    print(f"rho_hat = {estimate.value:.6f}")
    if estimate.skipped:
        print(f"⚠️  {estimate.skipped} points of U were undefined and skipped")
    if model.p == 0:
        try:
            print(f"rho_true = {model.base.second_order().rho_phi:.6f}")
        except BlockmaxError:
            pass
    return 0


def cmd_timing(args: argparse.Namespace) -> int:
    if not args.preset:
        raise ValueError("--preset is required")
    m_values = parse_range(args.m)
    spec = preset(args.preset, n=args.n, reps=1, master_seed=args.seed, m_values=m_values)
    frame = time_estimators(spec, m_values, repeats=args.repeats)
    _write_or_print(frame, args.out)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "variance": cmd_variance,
    "rho": cmd_rho,
    "timing": cmd_timing,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except FileNotFoundError as e:
        print(f"❌ {str(e)}", file=sys.stderr)
        return 2
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except (BlockmaxError, ValueError) as e:
        logger.debug("[CLI] %s failed", args.command, exc_info=True)
        print(f"❌ {type(e).__name__}: {str(e)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
