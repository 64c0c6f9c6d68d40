"""
Command-line front end.

    majoranalib run <config.toml> [--output-dir DIR] [-v | -q]
    majoranalib list

Exit codes: 0 success, 2 configuration error, 3 numerical contract violation,
4 internal-consistency failure. Anything else propagates with a traceback.

"""
import argparse
import logging
import sys
from typing import List, Optional

import msgspec

from . import __version__, constants, experiments
from .fock_rep import DimensionError
from .model_builders import ConfigurationError
from .spectral import ContractError
from .zero_modes import KernelConsistencyError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='majoranalib',
                                     description='Majorana edge zero modes of interacting chains and ladders.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='more logging (repeatable)')
    parser.add_argument('-q', '--quiet', action='store_true', help='only log errors')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='run the experiment described by a TOML config file')
    run.add_argument('config', help='path to the run configuration')
    run.add_argument('--output-dir', default=None,
                     help=f'output directory (overrides ${constants.OUTPUT_DIR_ENV} and output_dir)')

    commands.add_parser('list', help='list experiments, their keys and data.csv columns')
    return parser


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def _run(config_path: str, output_dir: Optional[str]) -> int:
    try:
        config = experiments.load_config(config_path)
    except (OSError, msgspec.DecodeError, msgspec.ValidationError, ConfigurationError) as error:
        logger.error('config: %s', error)
        return constants.EXIT_CONFIG_ERROR
    try:
        target = experiments.execute(config, output_dir)
    except ConfigurationError as error:
        logger.error('%s', error)
        return constants.EXIT_CONFIG_ERROR
    except (ContractError, DimensionError) as error:
        logger.error('%s', error)
        return constants.EXIT_CONTRACT_ERROR
    except KernelConsistencyError as error:
        logger.error('%s', error)
        return constants.EXIT_INTERNAL_ERROR
    print(target)
    return constants.EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    if args.command == 'list':
        sys.stdout.write(experiments.list_experiments())
        return constants.EXIT_OK
    return _run(args.config, args.output_dir)


if __name__ == '__main__':
    sys.exit(main())
