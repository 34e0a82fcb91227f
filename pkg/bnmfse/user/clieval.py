#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Evaluate an enhanced signal against its references."""

import numpy

from bnmfse.audio import read_wav
from bnmfse.evaluation import evaluate

REPORT_HEADER = 'estimate,sdr_db,sir_db,sar_db,segsnr_db,degenerate'
WINDOW_HEADER = 'window,sdr_db'


def register(subparsers, config):
    parser_eval = subparsers.add_parser(
        'eval',
        help='compute SDR, SIR, SAR and segmental SNR'
        )

    parser_eval.set_defaults(command=mode_eval)

    parser_eval.add_argument('estimate', metavar='ESTIMATE', help='enhanced WAV')
    parser_eval.add_argument('speech', metavar='SPEECH', help='reference speech WAV')
    parser_eval.add_argument('noise', metavar='NOISE', help='reference noise WAV')
    parser_eval.add_argument(
        '-o', '--output', default=None, metavar='CSV',
        help='write the report as CSV'
        )
    parser_eval.add_argument(
        '--windows', default=None, metavar='CSV',
        help='write the SDR of consecutive 5 s windows as CSV'
        )
    return parser_eval


def mode_eval(args):
    estimate = read_wav(args.estimate)
    speech = read_wav(args.speech)
    noise = read_wav(args.noise)
    report = evaluate(estimate, speech, noise, windows=args.windows is not None)

    print_report(args.estimate, report)
    if args.output is not None:
        with open(args.output, 'w') as fd:
            fd.write(REPORT_HEADER + '\n')
            fd.write(format_row(args.estimate, report) + '\n')
    if args.windows is not None:
        rows = numpy.array([(idx, sdr) for sdr, idx in report.per_window]).reshape(-1, 2)
        numpy.savetxt(args.windows, rows, fmt=['%d', '%.6f'], delimiter=',',
                      header=WINDOW_HEADER, comments='')


def format_row(name, report):
    values = [report.sdr_db, report.sir_db, report.sar_db, report.segsnr_db]
    return ','.join([name] + [f'{v:.6f}' for v in values] + [str(int(report.degenerate))])


def print_report(name, report):
    print(f'Evaluation of {name}')
    print(f' SDR    {report.sdr_db:8.2f} dB')
    print(f' SIR    {report.sir_db:8.2f} dB')
    print(f' SAR    {report.sar_db:8.2f} dB')
    print(f' SegSNR {report.segsnr_db:8.2f} dB')
    if report.degenerate:
        print(' degenerate: reference without energy')
    for sdr, idx in report.per_window:
        print(f' window {idx:3d} SDR {sdr:8.2f} dB')
