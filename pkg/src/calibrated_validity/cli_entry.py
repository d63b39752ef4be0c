"""Entry point for the application
"""
from typing import Any, Dict, List, Optional
import argparse
import pathlib
import sys
from .lib.config import build_config
from .lib.errors import ValidityError
from .lib.logger import setup_logger
from .run import run_simulation_study, run_validation


def _comma_list(value: str) -> List[str]:
    return [v.strip() for v in value.split(',') if v.strip()]


def _add_run_args(parser: argparse.ArgumentParser) -> None:
    """Flags shared by the validate and simulate commands

    :param parser: The sub command parser
    """
    parser.add_argument('--config', dest='config', type=pathlib.Path,
                        help='JSON run configuration')
    parser.add_argument('--scenario', dest='scenario',
                        help='Simulated scenario, scenario1 to scenario6')
    parser.add_argument('--replicates', dest='replicates', type=int,
                        help='Number of simulated data sets')
    parser.add_argument('--methods', dest='methods', type=_comma_list,
                        help='Comma separated clustering methods')
    parser.add_argument('--kmin', dest='kmin', type=int,
                        help='Smallest number of clusters')
    parser.add_argument('--kmax', dest='kmax', type=int,
                        help='Largest number of clusters')
    parser.add_argument('--indexes', dest='indexes', type=_comma_list,
                        help='Comma separated indexes to report')
    parser.add_argument('--composites', dest='composites', type=_comma_list,
                        help='Comma separated composites')
    parser.add_argument('--B', dest='b', type=int,
                        help='Random clusterings per generator and K')
    parser.add_argument('--A', dest='a', type=int,
                        help='Resampling repetitions for stability')
    parser.add_argument('--kappa', dest='kappa', type=int,
                        help='Neighbourhood size of CVNN')
    parser.add_argument('--p', dest='p', type=float,
                        help='Border share of the separation index')
    parser.add_argument('--seed', dest='seed', type=int, help='Master seed')
    parser.add_argument('--regime', dest='regime',
                        choices=['pooled', 'perk'],
                        help='Calibrate over all K together or per K')
    parser.add_argument('--out', dest='out', help='Output directory')
    parser.add_argument('--workers', dest='workers', type=int,
                        help='Worker processes')


def _add_args() -> argparse.ArgumentParser:
    """Set up the script arguments using argparser

    :return: The argparse parser object
    """
    parser = argparse.ArgumentParser(
        description='Calibrated internal validation of clusterings')
    parser.add_argument('-d', '--debug', dest='debug', action='store_true',
                        default=False, help='Switch debugging on')
    parser.add_argument('-l', '--log-file', dest='log_file',
                        type=pathlib.Path,
                        help='File path to output the logs to')
    commands = parser.add_subparsers(dest='command', required=True)
    validate = commands.add_parser('validate',
                                   help='Validate clusterings of one data set')
    validate.add_argument('--data', dest='data_csv',
                          help='CSV file with one row per object')
    validate.add_argument('--no-header', dest='header', action='store_false',
                          default=None, help='The CSV has no header row')
    validate.add_argument('--class-column', dest='class_column',
                          action='store_true', default=None,
                          help='The last CSV column holds true classes')
    _add_run_args(validate)
    simulate = commands.add_parser('simulate',
                                   help='Run a simulation study')
    _add_run_args(simulate)
    return parser


def _overrides(arg: argparse.Namespace) -> Dict[str, Any]:
    skip = {'debug', 'log_file', 'command', 'config'}
    return {k: v for k, v in vars(arg).items() if k not in skip}


def main(argv: Optional[List[str]] = None) -> int:
    """Run the validate or simulate command

    :param argv: Command line arguments, sys.argv when omitted
    :return: The exit status
    """
    parser = _add_args()
    arg = parser.parse_args(argv)
    logger = setup_logger(arg.debug, file_path=arg.log_file)
    try:
        config = build_config(logger, arg.config, _overrides(arg))
        if arg.command == 'simulate':
            logger.info('cli_entry.py: Starting simulation study')
            run_simulation_study(config, logger)
        else:
            logger.info('cli_entry.py: Starting validation')
            run_validation(config, logger)
    except ValidityError as exc:
        logger.error(f"cli_entry.py: {exc}")
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
