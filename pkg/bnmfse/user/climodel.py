#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Show the contents of model files."""

from bnmfse.nmf import load_model


def register(subparsers, config):
    parser_info = subparsers.add_parser(
        'model-info',
        help='show information of model files'
        )

    parser_info.set_defaults(command=show_models)

    parser_info.add_argument(
        'models', nargs='+', metavar='MODEL',
        help='model files'
        )
    parser_info.add_argument(
        '--history', action='store_true',
        help='show the training history'
        )
    return parser_info


def show_models(args):
    for path in args.models:
        model = load_model(path)
        print_model(path, model, args.history)


def print_model(path, model, history=False):
    print(f'Model: {model.label!r} ({path})')
    print(' frequency bins:', model.nbins)
    print(' basis vectors:', model.num_basis)
    print(' activation shape:', f'{model.activation_shape:.6g}')
    print(' sample rate:', model.sample_rate)
    print(' frame length:', model.frame_len)
    if history:
        print(' history:')
        for line in model.history:
            print('  ', line)
