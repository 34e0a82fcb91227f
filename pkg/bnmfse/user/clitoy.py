#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Noise basis adaptation demonstration."""

import numpy

from bnmfse.enhance.toy import run_toy
from bnmfse.nmf import load_model


def register(subparsers, config):
    parser_toy = subparsers.add_parser(
        'toy-fig3',
        help='online adaptation to a switching two-tone noise'
        )

    parser_toy.set_defaults(command=mode_toy)

    parser_toy.add_argument(
        '-o', '--trajectory', default=None, metavar='CSV',
        help='write the noise basis of every frame as CSV, one row per frame'
        )
    parser_toy.add_argument(
        '--speech-model', default=None, metavar='MODEL',
        help='speech model, trained on synthetic speech if missing'
        )
    parser_toy.add_argument(
        '--seed', type=int, default=0,
        help='seed of the synthetic signals'
        )
    return parser_toy


def mode_toy(args):
    speech_model = None
    if args.speech_model is not None:
        speech_model = load_model(args.speech_model)
    report = run_toy(speech_model, seed=args.seed)
    print(f'SDR noisy      {report.sdr_noisy:8.2f} dB')
    print(f'SDR enhanced   {report.sdr_enhanced:8.2f} dB')
    print(f'SDR improvement {report.sdr_improvement:7.2f} dB')
    print(f'switch at frame {report.switch_frame}, latency {report.latency} frames')
    print(f'runtime {report.runtime:.1f} s')
    if args.trajectory is not None:
        nbins = report.trajectory.shape[1]
        header = 'frame,' + ','.join(f'bin{k}' for k in range(nbins))
        rows = numpy.column_stack([numpy.arange(len(report.trajectory)),
                                   report.trajectory])
        numpy.savetxt(args.trajectory, rows, fmt=['%d'] + ['%.9e'] * nbins,
                      delimiter=',', header=header, comments='')
