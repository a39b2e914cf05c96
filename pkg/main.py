#!/usr/bin/env python3
"""
Main entry point for csf-sim
"""
import sys
import os
import argparse
import logging
from pathlib import Path

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from pydantic import ValidationError as PydanticValidationError

from ui.commands import EXIT_DOMAIN, RunConfig, available_policies, cmd_explain, cmd_list, cmd_run, cmd_validate


def _add_run_options(parser: argparse.ArgumentParser):
    parser.add_argument('--scenario', required=True, metavar='PATH',
                        help='scenario file, or the name of a built-in scenario')
    parser.add_argument('--ticks', type=int, default=10, metavar='N', help='number of ticks to run (default: 10)')
    parser.add_argument('--seed', type=int, default=0, metavar='N', help='seed for scripted stochastic events')
    parser.add_argument('--epsilon', type=float, metavar='F', help='override the salience threshold')
    parser.add_argument('--alpha', type=float, metavar='F', help='override the default fitness/preference balance')
    parser.add_argument('--policy', choices=available_policies(), help='override the deployment policy')
    parser.add_argument('--lambda', dest='decay_lambda', type=float, metavar='F', help='override the decay step')
    parser.add_argument('--theta', dest='decay_theta', type=float, metavar='F', help='override the decay floor')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='csf-sim', description='csf-sim: cognitive social frames agent simulator')
    parser.add_argument('-v', '--verbose', action='store_true', default=False, help='log debug output to stderr')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='run a scenario and write its trace')
    _add_run_options(run)
    run.add_argument('--trace', type=str, metavar='PATH', help='trace output file (default: traces/<name>_seed<N>.jsonl)')

    explain = commands.add_parser('explain', help="show one agent's salience decision at one tick")
    _add_run_options(explain)
    explain.add_argument('--trace', type=str, metavar='PATH', help='read this trace instead of re-running')
    explain.add_argument('--tick', type=int, required=True, metavar='N')
    explain.add_argument('--agent', required=True, metavar='ID')

    validate = commands.add_parser('validate', help='check a scenario file')
    validate.add_argument('--scenario', required=True, metavar='PATH')

    commands.add_parser('list', help='list built-in scenarios')
    return parser


def _configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )


def _run_config(args) -> RunConfig:
    return RunConfig(
        scenario=args.scenario,
        ticks=args.ticks,
        seed=args.seed,
        trace=args.trace if args.command == 'run' else None,
        epsilon=args.epsilon,
        alpha=args.alpha,
        policy=args.policy,
        decay_lambda=args.decay_lambda,
        decay_theta=args.decay_theta,
    )


def main(argv=None) -> int:
    """
    Main function to start csf-sim
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    if args.command == 'list':
        return cmd_list()
    if args.command == 'validate':
        return cmd_validate(args.scenario)

    try:
        config = _run_config(args)
    except PydanticValidationError as e:
        print(f"error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_DOMAIN

    if args.command == 'run':
        return cmd_run(config)
    return cmd_explain(config, args.tick, args.agent, Path(args.trace) if args.trace else None)


if __name__ == "__main__":
    sys.exit(main())
