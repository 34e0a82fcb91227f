#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""User command line interface of bnmfse."""

import argparse
import configparser
import logging
import logging.config
from importlib import import_module

import yaml

from bnmfse import __version__
from bnmfse.exceptions import (
    ContractError, DegenerateError, FormatError, NumericalError, ShapeError
)

from .xdgdirs import config_paths
from .logconf import logconf

_logger = logging.getLogger("bnmfse")

EXIT_OK = 0
EXIT_ARGUMENTS = 2
EXIT_FORMAT = 3
EXIT_NUMERICAL = 4

COMMANDS = ['clitrain', 'clienhance', 'climix', 'clieval', 'clitoy', 'climodel']


def build_parser(config):
    parser = argparse.ArgumentParser(
        description='Bayesian NMF speech enhancement',
        prog='bnmfse',
        epilog="For detailed help pass --help to a target"
        )
    parser.add_argument(
        '--version', action='version', version=f'%(prog)s {__version__}'
        )
    parser.add_argument(
        '-l', action="store", dest="logging", metavar="FILE",
        help="FILE with logging configuration"
        )
    parser.add_argument(
        '-d', '--debug',
        action="store_true",
        dest="debug", default=False,
        help="make lots of noise"
        )

    subparsers = parser.add_subparsers(
        title='Targets',
        description='These are valid commands you can ask bnmfse to do.'
        )

    for cmd in COMMANDS:
        cmd_mod = import_module(f'.{cmd}', 'bnmfse.user')
        register = getattr(cmd_mod, 'register', None)
        if register is not None:
            register(subparsers, config)
    return parser


def configure_logging(args, config):
    try:
        if args.logging is not None:
            loggingf = args.logging
        else:
            loggingf = config.get('bnmfse', 'logging')

        with open(loggingf) as logfile:
            settings = yaml.safe_load(logfile)
            logging.config.dictConfig(settings)
    except configparser.Error:
        logging.config.dictConfig(logconf(args.debug))
        return

    if args.debug:
        _logger.setLevel(logging.DEBUG)


def main(args=None):
    """Entry point for the bnmfse CLI. Returns the exit code."""

    # Configuration args from a text file
    config = configparser.ConfigParser()
    config.add_section('bnmfse')
    config.read(config_paths())

    parser = build_parser(config)
    try:
        args = parser.parse_args(args)
    except SystemExit as exit_error:
        # argparse exits with 2 on errors, 0 on --help
        return exit_error.code

    try:
        configure_logging(args, config)
    except (OSError, yaml.YAMLError, ValueError) as error:
        print(f'bnmfse: cannot configure logging: {error}')
        return EXIT_FORMAT

    command = getattr(args, 'command', None)
    if command is None:
        parser.print_help()
        return EXIT_ARGUMENTS

    try:
        result = command(args)
    except NumericalError as error:
        return _fail(args, error, EXIT_NUMERICAL)
    except DegenerateError as error:
        return _fail(args, error, EXIT_NUMERICAL)
    except FormatError as error:
        return _fail(args, error, EXIT_FORMAT)
    except (ContractError, ShapeError) as error:
        return _fail(args, error, EXIT_ARGUMENTS)
    except OSError as error:
        return _fail(args, error, EXIT_FORMAT)
    except ValueError as error:
        return _fail(args, error, EXIT_ARGUMENTS)
    return EXIT_OK if result is None else result


def _fail(args, error, code):
    if args.debug:
        _logger.exception('%s', error)
    else:
        _logger.error('%s', error)
    return code
