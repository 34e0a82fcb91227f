#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Mix speech and noise at a given SNR."""

from bnmfse.audio import read_wav, write_wav
from bnmfse.evaluation import mix_at_snr


def register(subparsers, config):
    parser_mix = subparsers.add_parser(
        'mix',
        help='add noise to speech at a given SNR'
        )

    parser_mix.set_defaults(command=mode_mix)

    parser_mix.add_argument('speech', metavar='SPEECH', help='clean speech WAV')
    parser_mix.add_argument('noise', metavar='NOISE', help='noise WAV, looped if short')
    parser_mix.add_argument(
        '--snr', type=float, required=True,
        help='SNR in dB over the whole utterance'
        )
    parser_mix.add_argument(
        '-o', '--output', required=True, metavar='FILE',
        help='noisy WAV'
        )
    parser_mix.add_argument(
        '--noise-output', default=None, metavar='FILE',
        help='WAV with the scaled noise, the reference for evaluation'
        )
    return parser_mix


def mode_mix(args):
    speech = read_wav(args.speech)
    noise = read_wav(args.noise)
    noisy, scaled = mix_at_snr(speech, noise, args.snr)
    write_wav(args.output, noisy)
    if args.noise_output is not None:
        write_wav(args.noise_output, scaled)
    print(f'mixed at {args.snr:g} dB, {len(noisy)} samples')
