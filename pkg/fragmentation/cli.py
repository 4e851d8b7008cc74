#!/usr/bin/env python3
"""
Command-line interface for fragmentation experiments.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from .config import ConfigurationError, ExperimentConfig, get_config_manager
from .fragmenter import evolve, evolve_log
from .limits import (
    annealed_endpoint_table,
    build_rate_profile,
    bulk_deviation,
    endpoint_deviation,
    estimate_quenched_rate,
    make_bulk_scaling,
    rate_table,
)
from .logger import setup_logger
from .models import FragmentationError, RuleKind, SplittingRule
from .proportions import flip_rule, limit_measure, parse_rule_spec, realize_environment
from .result_manager import FLOAT_FORMAT, ResultManager, build_metadata
from .verification import suite_from_settings
from .walk import simulate_walk, walk_distribution

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_INPUT = 2

DEFAULT_BULK_GRID = ((0.25, 0.75), (0.1, 0.9), (0.05, 0.5), (0.5, 0.95))
DEFAULT_XS = tuple(np.round(np.arange(0.55, 0.951, 0.05), 2).tolist())
DEFAULT_ALPHA_FRACTIONS = tuple(np.round(np.arange(0.05, 0.951, 0.05), 2).tolist())


def _common_options() -> argparse.ArgumentParser:
    """Options shared by every subcommand; None means "not given"."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--rule', help='Rule spec, e.g. const:p=0.5 or full:dist=uniform')
    common.add_argument('--n', type=int, help='Number of fragmentation steps')
    common.add_argument('--seed', type=int, help='Seed for random rules')
    common.add_argument('--replicas', type=int, help='Monte Carlo walk replicas')
    common.add_argument('--seeds', type=int, help='Number of environments in empirical modes')
    common.add_argument('--out', help='Output CSV path (stdout if omitted)')
    common.add_argument('--config', help='YAML/JSON file whose keys mirror these flags')
    common.add_argument('--atoms', type=int, help='Atoms used to discretize Uniform01 limits')
    common.add_argument('--flip', action='store_true', default=None,
                        help='Reflect the rule (p -> 1 - p) to study the right endpoint')
    closure = common.add_mutually_exclusive_group()
    closure.add_argument('--closed', dest='closure', action='store_const', const='closed',
                         help='Query intervals [x, y] (default)')
    closure.add_argument('--half-open', dest='closure', action='store_const', const='half-open',
                         help='Query intervals [x, y)')
    common.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')
    common.add_argument('--quiet', '-q', action='store_true', help='Suppress output except errors')
    return common


def setup_argument_parser() -> argparse.ArgumentParser:
    """Set up command-line argument parser."""
    parser = argparse.ArgumentParser(
        prog='fragmentation',
        description='Fragmentation with erasure: simulation and verification',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Break points after two steps of a constant rule
  fragmentation fragment --rule const:p=0.5 --n 2

  # The two-step worked example from a table file
  fragmentation fragment --rule table:file=data/two_step_table.csv --n 2

  # Bulk scaling diagnostics
  fragmentation bulk --rule const:p=0.5 --n 100000 --grid 0.25:0.75

  # Left-endpoint rate function of a stratified rule
  fragmentation rate --rule strat:dist=twopoint,v1=0.2,v2=0.8,w1=0.5

  # Full oracle battery
  fragmentation verify
        """
    )
    common = _common_options()
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    subparsers.add_parser('fragment', parents=[common], help='Evolve a partition and print k,a,log_a')

    bulk_parser = subparsers.add_parser('bulk', parents=[common], help='Bulk vague-limit deviation')
    bulk_parser.add_argument('--grid', help='Interval pairs x:y,x:y inside (0, 1)')

    endpoint_parser = subparsers.add_parser('endpoint', parents=[common],
                                            help='Transformed-measure endpoint deviation')
    endpoint_parser.add_argument('--xs', help='Comma-separated x values in (0, 1)')
    endpoint_parser.add_argument('--exact-rate', action='store_true', default=None,
                                 help='Demand the exact limit (rejected for fully random rules)')

    rate_parser = subparsers.add_parser('rate', parents=[common], help='Tabulate alpha, theta, I')
    rate_parser.add_argument('--alphas', help='Comma-separated alpha values')
    rate_parser.add_argument('--skip-invalid', action='store_true', default=None,
                             help='Skip alphas outside the solvable range')
    rate_parser.add_argument('--empirical', action='store_true', default=None,
                             help='Estimate the quenched rate of a fully random rule')

    subparsers.add_parser('walk', parents=[common], help='Exact walk law and optional samples')

    verify_parser = subparsers.add_parser('verify', parents=[common], help='Run the oracle battery')
    verify_parser.add_argument('--perturb', type=float,
                               help='Shift break points before comparison (harness self-test)')
    verify_parser.add_argument('--max-enum-n', type=int, help='Largest n for path enumeration')

    return parser


def _flags(args: argparse.Namespace) -> Dict:
    skip = {'command', 'config', 'verbose', 'quiet'}
    return {key: value for key, value in vars(args).items() if key not in skip}


def _load_rule(cfg: ExperimentConfig) -> SplittingRule:
    rule = parse_rule_spec(cfg.rule)
    return flip_rule(rule) if cfg.flip else rule


def _result_manager() -> ResultManager:
    """ResultManager configured by the ``output:`` section."""
    output = get_config_manager().get_output_config()
    return ResultManager(
        base_dir=output.get("base_dir", "results"),
        float_format=output.get("float_format", FLOAT_FORMAT),
    )


def _emit(cfg: ExperimentConfig, frame: pd.DataFrame, **extra) -> None:
    """Write a table to --out (relative paths under output.base_dir) with its sidecar, or to stdout."""
    manager = _result_manager()
    if cfg.out:
        manager.save_table(frame, cfg.out, build_metadata(cfg.command, cfg.to_dict(), **extra))
    else:
        ResultManager.write_table(frame, float_format=manager.float_format)


def cmd_fragment(cfg: ExperimentConfig) -> int:
    """Evolve the partition and write k,a,log_a."""
    env = realize_environment(_load_rule(cfg), cfg.n, cfg.seed)
    partition = evolve(env, cfg.n)
    log_partition = evolve_log(env, cfg.n)
    logger.info(f"Evolved {env.rule.label} for {cfg.n} steps")
    _emit(cfg, partition.to_frame(log_partition.logpoints))
    return EXIT_OK


def cmd_bulk(cfg: ExperimentConfig) -> int:
    """Compare scaled bulk masses with Q(y) - Q(x)."""
    rule = _load_rule(cfg)
    scaling = make_bulk_scaling(rule, cfg.n)
    partition = evolve(realize_environment(rule, cfg.n, cfg.seed), cfg.n)
    frame = bulk_deviation(
        partition, scaling, cfg.grid or DEFAULT_BULK_GRID,
        left_closed=cfg.left_closed, right_closed=cfg.right_closed,
    )
    _emit(cfg, frame, m_n=scaling.m_n, sigma_n=scaling.sigma_n)
    return EXIT_OK


def cmd_endpoint(cfg: ExperimentConfig) -> int:
    """Compare the transformed empirical CDF with its limit (or the annealed envelope)."""
    rule = _load_rule(cfg)
    xs = cfg.xs or DEFAULT_XS
    log_partition = evolve_log(realize_environment(rule, cfg.n, cfg.seed), cfg.n)

    if rule.kind is RuleKind.FULLY_RANDOM:
        if cfg.exact_rate:
            raise ConfigurationError(
                "The exact quenched rate is not available for fully random rules; "
                "omit --exact-rate to get the annealed envelope"
            )
        p_bar = rule.distribution.mean()
        _emit(cfg, annealed_endpoint_table(log_partition, p_bar, xs), p_bar=p_bar)
        return EXIT_OK

    profile = build_rate_profile(limit_measure(rule, cfg.atoms))
    frame = endpoint_deviation(log_partition, profile, xs)
    _emit(cfg, frame, p_bar=profile.p_bar, I0=profile.I0, x_star=profile.x_star)
    return EXIT_OK


def cmd_rate(cfg: ExperimentConfig) -> int:
    """Tabulate theta(alpha) and I(alpha), or estimate the quenched rate."""
    rule = _load_rule(cfg)

    if rule.kind is RuleKind.FULLY_RANDOM:
        if not cfg.empirical:
            raise ConfigurationError(
                "The exact quenched rate is not available for fully random rules; "
                "use --empirical for a seed-averaged estimate"
            )
        p_bar = rule.distribution.mean()
        alphas = cfg.alphas or tuple(f * p_bar for f in DEFAULT_ALPHA_FRACTIONS)
        seeds = range(cfg.seed, cfg.seed + cfg.seeds)
        _emit(cfg, estimate_quenched_rate(rule, cfg.n, alphas, seeds), p_bar=p_bar)
        return EXIT_OK

    profile = build_rate_profile(limit_measure(rule, cfg.atoms))
    span = profile.p_bar - profile.alpha_lo
    alphas = cfg.alphas or tuple(profile.alpha_lo + f * span for f in DEFAULT_ALPHA_FRACTIONS)
    frame = rate_table(profile, alphas, skip_invalid=cfg.skip_invalid)
    _emit(cfg, frame, p_bar=profile.p_bar, I0=profile.I0, x_star=profile.x_star)
    return EXIT_OK


def cmd_walk(cfg: ExperimentConfig) -> int:
    """Write the exact walk law; with --replicas also Monte Carlo samples."""
    env = realize_environment(_load_rule(cfg), cfg.n, cfg.seed)
    _emit(cfg, walk_distribution(env, cfg.n).to_frame())

    if cfg.replicas > 0:
        sample = simulate_walk(env, cfg.n, cfg.replicas, cfg.seed)
        if not cfg.out:
            logger.warning("Walk samples are only written when --out is given")
            return EXIT_OK
        out = Path(cfg.out)
        samples_name = out.with_name(f"{out.stem}_samples{out.suffix or '.csv'}")
        _result_manager().save_table(
            sample.to_frame(), str(samples_name), build_metadata(cfg.command, cfg.to_dict())
        )
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig) -> int:
    """Run every oracle; exit 1 if any check fails."""
    settings = get_config_manager().get_verification_config()
    suite = suite_from_settings(settings, perturb=cfg.perturb, max_enum_n=cfg.max_enum_n, seed=cfg.seed)
    report = suite.run()

    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if cfg.out:
        out = _result_manager().get_results_path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)

    if not report:
        logger.error(str(report))
        return EXIT_VERIFICATION_FAILED
    logger.info(str(report))
    return EXIT_OK


COMMAND_HANDLERS = {
    'fragment': cmd_fragment,
    'bulk': cmd_bulk,
    'endpoint': cmd_endpoint,
    'rate': cmd_rate,
    'walk': cmd_walk,
    'verify': cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = setup_argument_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_INVALID_INPUT

    config_manager = get_config_manager()
    level = 'DEBUG' if args.verbose else 'ERROR' if args.quiet else None
    setup_logger(config_manager.get_logging_config(), level=level)

    try:
        defaults = {
            **config_manager.get_simulation_config(),
            'max_enum_n': config_manager.get('verification.max_enum_n'),
        }
        cfg = ExperimentConfig.build(args.command, _flags(args), args.config, defaults)
        return COMMAND_HANDLERS[args.command](cfg)
    except (FragmentationError, ConfigurationError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except KeyboardInterrupt:
        print("\nOperation cancelled by user", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
