"""
Command line - one subcommand per experiment.

Subcommands:
    simulate     trajectory CSV of one scenario
    scenarios    horizon comparisons of scenarios against baseline
    sensitivity  Latin hypercube ensembles (summary.csv + bands.csv)
    sweep        alpha x fold heatmap CSV
    threshold    minimal preventing fold as JSON
    calibrate    fitted configuration document
    structure    influence graph edges CSV

Exit status: 0 success, 1 input or configuration error, 2 model error.
"""

import argparse
import logging
import sys
from typing import List, Optional, Tuple

from pydantic import ValidationError

from core.errors import InputError, ModelError
from core.integrator import IntegrationConfig, simulate
from core.structure import edge_table, feedback_loops, get_stats, model_structure
from experiments.calibration import CalibrationTarget, calibrate
from experiments.scenarios import PUBLISHED_THRESHOLD_FOLD, COMPARISON_SCENARIOS, run_comparisons
from experiments.sensitivity import ParameterSpace, lhs_sample, run_ensemble, summarize
from experiments.sweep import (
    GridSpec,
    ThresholdQuery,
    grid_sweep,
    pass_set_violations,
    prevention_regime_finding,
    threshold_search,
)
from model_config import ModelConfig, emit_config, load_config
from output_store import OutputStore

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MODEL = 2

DEFAULT_TARGET = "underutilised_persons_pct_change:b:2050.5=99.76"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error status."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ==================== Argument Types ====================

def _pair(text: str) -> Tuple[float, float]:
    """'a:b' -> (a, b)"""
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'lo:hi', got '{text}'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two numbers, got '{text}'") from None


def parse_target(text: str) -> CalibrationTarget:
    """'METRIC:SCENARIO:T=VALUE' -> CalibrationTarget"""
    lhs, sep, value = text.rpartition("=")
    parts = lhs.split(":")
    if not sep or len(parts) != 3:
        raise InputError(f"target must look like METRIC:SCENARIO:T=VALUE, got '{text}'")
    metric, scenario_id, t = parts
    try:
        return CalibrationTarget(metric=metric, scenario_id=scenario_id, t=float(t), target_value=float(value))
    except (ValueError, ValidationError) as e:
        raise InputError(f"invalid target '{text}': {e}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", default=None, help="configuration document (defaults built in)")
    common.add_argument("--out", default=None, help="output file (directory for sensitivity)")
    common.add_argument("--dt", type=float, default=1.0 / 32.0, help="integration step in years")
    common.add_argument("--method", choices=["euler", "rk4"], default="euler")
    common.add_argument("--workers", type=int, default=1, help="worker processes for ensembles and sweeps")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = _Parser(prog="capital-deepening", description="AI capital deepening system dynamics engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="trajectory of one scenario")
    p.add_argument("--scenario", default="baseline")

    p = sub.add_parser("scenarios", parents=[common], help="scenario vs baseline at the horizon")
    p.add_argument("--scenario", action="append", default=None)

    p = sub.add_parser("sensitivity", parents=[common], help="Latin hypercube ensembles")
    p.add_argument("--scenario", action="append", default=None)
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("sweep", parents=[common], help="alpha x fold heatmap")
    p.add_argument("--alpha-min", type=float, default=0.02)
    p.add_argument("--alpha-max", type=float, default=0.10)
    p.add_argument("--alpha-steps", type=int, default=30)
    p.add_argument("--fold-min", type=float, default=0.5)
    p.add_argument("--fold-max", type=float, default=12.0)
    p.add_argument("--fold-steps", type=int, default=30)
    p.add_argument("--skip-regime-check", action="store_true",
                   help="do not search for a preventing fold at alpha=10%%")

    p = sub.add_parser("threshold", parents=[common], help="minimal fold preventing a consumption decline")
    p.add_argument("--alpha", type=float, default=0.11)
    p.add_argument("--window", type=_pair, default=(2025.0, 2045.0), help="start:end in years")
    p.add_argument("--fold-min", type=float, default=1.0)
    p.add_argument("--fold-max", type=float, default=12.0)
    p.add_argument("--criterion", choices=["all_times", "at_window_end"], default="all_times")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--strategy", choices=["bisection", "scan"], default="bisection")

    p = sub.add_parser("calibrate", parents=[common], help="fit beta to published anchors")
    p.add_argument("--target", action="append", default=None, help="METRIC:SCENARIO:T=VALUE (repeatable)")
    p.add_argument("--free", choices=["beta", "beta_and_converter_scale"], default="beta")
    p.add_argument("--bounds", type=_pair, default=(0.0005, 0.05), help="beta search interval lo:hi")
    p.add_argument("--scale-bounds", type=_pair, default=(0.25, 4.0), help="eta scale interval lo:hi")

    sub.add_parser("structure", parents=[common], help="influence graph edges")

    return parser


# ==================== Commands ====================

def _cmd_simulate(args, config: ModelConfig, cfg: IntegrationConfig, store: OutputStore) -> None:
    traj = simulate(config.params, config.scenario(args.scenario), cfg, config.converters)
    store.save_trajectory(traj, args.out or "trajectory.csv")
    state, out = traj.last
    print(f"scenario={args.scenario} t={state.t} U={state.u:.1f} "
          f"income_pc={out.income_pc:.2f} consumption_index={out.consumption_index:.6f}")


def _cmd_scenarios(args, config: ModelConfig, cfg: IntegrationConfig, store: OutputStore) -> None:
    ids = args.scenario or [s for s in COMPARISON_SCENARIOS if s in config.scenarios]
    for sid in ids:
        config.scenario(sid)
    rows = run_comparisons(config.params, config.scenarios, cfg, config.converters, scenario_ids=ids)
    store.save_comparisons(rows, args.out or "scenarios.csv")
    for sid, summary in rows:
        print(f"scenario={sid} metric={summary.metric} pct_{summary.direction}={summary.pct_reduction:.2f}")


def _cmd_sensitivity(args, config: ModelConfig, cfg: IntegrationConfig, store: OutputStore) -> None:
    ids = args.scenario or [s for s in COMPARISON_SCENARIOS if s in config.scenarios]
    space = ParameterSpace.around(config.params, config.sensitivity)
    design = lhs_sample(space, args.draws, args.seed)

    summaries = []
    for sid in ids:
        ensemble = run_ensemble(design, config.scenario(sid), cfg, config.params,
                                config.converters, workers=args.workers)
        summaries.append(summarize(ensemble))
    store.save_ensemble(summaries, args.out or "sensitivity")

    for summary in summaries:
        for row in summary.summary_rows():
            print(f"scenario={row['scenario']} metric={row['metric']} mean_pct={row['mean_pct']:.2f} "
                  f"lo95={row['lo95']:.2f} hi95={row['hi95']:.2f} published_mean_pct={row['published_mean_pct']}")


def _cmd_sweep(args, config: ModelConfig, cfg: IntegrationConfig, store: OutputStore) -> None:
    grid = GridSpec(
        alpha_min=args.alpha_min, alpha_max=args.alpha_max, alpha_steps=args.alpha_steps,
        fold_min=args.fold_min, fold_max=args.fold_max, fold_steps=args.fold_steps,
    )
    table = grid_sweep(config.params, grid, cfg, config.converters, workers=args.workers)
    store.save_heatmap(table, args.out or "heatmap.csv")
    violations = pass_set_violations(table)
    print(f"cells={len(table.cells)} invalid={table.invalid_count} pass_set_violations={len(violations)}")

    if not args.skip_regime_check:
        finding = prevention_regime_finding(config.params, cfg, config.converters)
        print(f"finding: {finding}" if finding else "no job creation fold up to 12 prevents decline at alpha=0.1")


def _cmd_threshold(args, config: ModelConfig, cfg: IntegrationConfig, store: OutputStore) -> None:
    query = ThresholdQuery(
        alpha=args.alpha, window=args.window, fold_min=args.fold_min, fold_max=args.fold_max,
        criterion=args.criterion, tolerance=args.tolerance,
    )
    result = threshold_search(config.params, query, cfg, config.converters, strategy=args.strategy)
    store.write_json(result.to_dict(), args.out or "threshold.json")
    print(f"found={result.found} fold={result.fold} published_fold={PUBLISHED_THRESHOLD_FOLD}")


def _cmd_calibrate(args, config: ModelConfig, cfg: IntegrationConfig, store: OutputStore) -> None:
    targets = [parse_target(text) for text in (args.target or [DEFAULT_TARGET])]
    result = calibrate(
        config.params, targets, config.scenarios,
        free=args.free, bounds=args.bounds, scale_bounds=args.scale_bounds,
        cfg=cfg, converters=config.converters,
    )
    fitted = ModelConfig(params=result.params, converters=result.converters,
                         scenarios=config.scenarios, sensitivity=config.sensitivity)
    header = f"calibrated: beta={result.beta!r} eta_scale={result.eta_scale!r} objective={result.objective!r}"
    report = {**result.to_dict(), "targets": [t.model_dump() for t in targets]}
    store.save_calibration(emit_config(fitted, header=header), report, args.out or "calibrated.cfg")
    print(f"beta={result.beta:.8g} eta_scale={result.eta_scale:.8g} "
          f"objective={result.objective:.6g} at_boundary={result.at_boundary}")


def _cmd_structure(args, config: ModelConfig, cfg: IntegrationConfig, store: OutputStore) -> None:
    graph = model_structure()
    store.save_edges(edge_table(graph), args.out or "structure.csv")
    for loop in feedback_loops(graph):
        logger.info("feedback loop polarity=%s nodes=%s", loop.polarity, " -> ".join(loop.nodes))
    print(" ".join(f"{k}={v}" for k, v in get_stats(graph).items()))


COMMANDS = {
    "simulate": _cmd_simulate,
    "scenarios": _cmd_scenarios,
    "sensitivity": _cmd_sensitivity,
    "sweep": _cmd_sweep,
    "threshold": _cmd_threshold,
    "calibrate": _cmd_calibrate,
    "structure": _cmd_structure,
}


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s %(message)s")
    logging.getLogger().setLevel(logging.DEBUG if verbose else logging.INFO)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK

    _configure_logging(args.verbose)

    try:
        if args.workers < 1:
            raise InputError(f"--workers must be at least 1, got {args.workers}")
        config = load_config(args.config)
        cfg = IntegrationConfig(dt=args.dt, method=args.method)
        COMMANDS[args.command](args, config, cfg, OutputStore())
    except ValidationError as e:
        logger.error("invalid input: %s", e)
        return EXIT_INPUT
    except InputError as e:
        logger.error("%s", e)
        return EXIT_INPUT
    except ModelError as e:
        logger.error("model error: %s", e)
        return EXIT_MODEL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
