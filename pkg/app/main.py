"""
Command-line entry point for the S/I/Q epidemic toolkit.
"""
from typing import Callable, Dict, List, Optional
import argparse
import logging
import os
import sys

from dotenv import load_dotenv

from app.components.config import load_run_config, load_sweep_config, write_flat_file
from app.components.export import (
    output_path,
    run_summary,
    write_frame,
    write_report,
    write_trajectory,
)
from app.core.analysis import analyze
from app.core.errors import ConfigError, ParameterError
from app.core.meanfield import IndividualProbState, integrate
from app.core.presets import PRESET_NAMES, preset
from app.core.trajectory import Engine
from app.tools.convergence import convergence
from app.tools.ensemble import ensemble, run_stochastic
from app.tools.equivalence import compare_engines
from app.tools.sweep import sweep, sweep_summary

logger = logging.getLogger("app")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


def _seeds(config, offset: int) -> List[int]:
    seeds = [seed + offset for seed in config.seeds]
    if min(seeds) < 0:
        raise ConfigError(f"--seed-offset {offset} makes seeds negative")
    return seeds


def cmd_run(args: argparse.Namespace) -> int:
    """Single run (plus an ensemble summary when a stochastic engine gets several seeds)."""
    config = load_run_config(args.config)
    engine = Engine(args.engine) if args.engine else config.engine
    prefix = args.out or config.out
    params = config.params
    seeds = _seeds(config, args.seed_offset)

    # Mean-field engines integrate; stochastic ones run the first seed
    if engine is Engine.MACRO:
        trajectory = integrate(params, config.initial_macro(), config.horizon, config.sampling)
    elif engine is Engine.INDIVIDUAL_ODE:
        if config.init_counts is not None:
            init = IndividualProbState.from_counts(*config.init_counts)
        else:
            init = IndividualProbState.homogeneous(params.n, config.initial_macro())
        trajectory = integrate(params, init, config.horizon, config.sampling)
    else:
        trajectory = run_stochastic(
            engine, params, config.initial_counts(), config.horizon, config.sampling, seeds[0]
        )
        # Every seed, including the first, goes into the ensemble summary
        if len(seeds) >= 2:
            summary = ensemble(params, config.initial_counts(), config.horizon, seeds,
                               engine, config.sampling, args.workers)
            write_frame(summary.to_frame(), output_path(prefix, "ensemble.csv"))

    # Closed-form analysis goes next to the run statistics
    document = {f"param_{k}": v for k, v in params.to_dict().items()}
    document.update(analyze(params).to_dict())
    document.update(run_summary(trajectory))
    write_trajectory(trajectory, output_path(prefix, "trajectory.csv"))
    write_report(document, output_path(prefix, "report.json"))
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    report = analyze(config.params)
    logger.info(f"Regime {report.regime.value}: c_t_bar={report.c_t_bar:.6g}, xi={report.xi:.6g}")
    document = {f"param_{k}": v for k, v in config.params.to_dict().items()}
    document.update(report.to_dict())
    write_report(document, output_path(args.out or config.out, "report.json"))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_sweep_config(args.config)
    frame = sweep(config.base, config.x, config.y, config.quantities, args.workers)
    for quantity, bounds in sweep_summary(frame).items():
        logger.info(f"{quantity}: min={bounds['min']:.6g} max={bounds['max']:.6g}")
    write_frame(frame, output_path(args.out or config.out, "sweep.csv"))
    return EXIT_OK


def cmd_convergence(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    sizes = args.n or config.sizes
    if not sizes:
        raise ConfigError("Population sizes are required (--n or 'sizes' in the config)")
    engine = Engine(args.engine) if args.engine else Engine.GILLESPIE
    if not engine.stochastic:
        raise ConfigError(f"Convergence needs a stochastic engine, got '{engine.value}'")
    result = convergence(
        config.params,
        config.initial_macro(),
        sizes,
        _seeds(config, args.seed_offset),
        config.horizon,
        config.sampling,
        engine,
        args.workers,
    )
    write_frame(result.to_frame(), output_path(args.out or config.out, "convergence.csv"))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    seeds = _seeds(config, args.seed_offset)
    init = config.initial_counts()
    # Same seeds for both engines; their streams never overlap
    aggregate = ensemble(config.params, init, config.horizon, seeds,
                         Engine.GILLESPIE, config.sampling, args.workers)
    individual = ensemble(config.params, init, config.horizon, seeds,
                          Engine.ACTIVATION, config.sampling, args.workers)
    result = compare_engines(aggregate, individual)
    logger.info(
        f"Engines {'indistinguishable' if result.indistinguishable else 'DIFFER'} "
        f"at corrected level {result.corrected_alpha:.3g}"
    )
    write_frame(result.to_frame(), output_path(args.out or config.out, "compare.csv"))
    return EXIT_OK


def cmd_example_config(args: argparse.Namespace) -> int:
    write_flat_file(preset(args.preset), args.out or f"{args.preset}.cfg")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "run": cmd_run,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "convergence": cmd_convergence,
    "compare": cmd_compare,
    "example-config": cmd_example_config,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=os.getenv("SIQ_LOG_LEVEL", "INFO"))
    common.add_argument("--workers", type=int, default=int(os.getenv("SIQ_WORKERS", "1")))
    common.add_argument("--out", help="output path prefix (defaults to 'out' in the config)")

    parser = argparse.ArgumentParser(
        prog="siq",
        description="S/I/Q epidemic model on activity-driven networks: simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    engines = [engine.value for engine in Engine]

    run = sub.add_parser("run", parents=[common], help="simulate one configuration")
    run.add_argument("--config", required=True)
    run.add_argument("--engine", choices=engines)
    run.add_argument("--seed-offset", type=int, default=0)

    analyze_cmd = sub.add_parser("analyze", parents=[common], help="closed-form report only")
    analyze_cmd.add_argument("--config", required=True)

    sweep_cmd = sub.add_parser("sweep", parents=[common], help="two-parameter analytic sweep")
    sweep_cmd.add_argument("--config", required=True)

    conv = sub.add_parser("convergence", parents=[common], help="ensemble mean vs mean-field for growing n")
    conv.add_argument("--config", required=True)
    conv.add_argument("--n", type=int, nargs="+")
    conv.add_argument("--engine", choices=engines)
    conv.add_argument("--seed-offset", type=int, default=0)

    compare = sub.add_parser("compare", parents=[common], help="aggregate vs activation engine")
    compare.add_argument("--config", required=True)
    compare.add_argument("--seed-offset", type=int, default=0)

    example = sub.add_parser("example-config", parents=[common], help="write a scenario config")
    example.add_argument("--preset", required=True, choices=PRESET_NAMES)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and map failures to exit codes."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, ConfigError) as e:
        logger.error(f"Validation error: {e}")
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
