#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Train a BNMF model from WAV files."""

import logging
from dataclasses import replace

from bnmfse.audio import read_wav
from bnmfse.constants import FRAME_LEN, HOP
from bnmfse.enhance.pipeline import EnhancementConfig, training_spectrogram
from bnmfse.exceptions import ContractError
from bnmfse.nmf import TrainingConfig, train_model, save_model

_logger = logging.getLogger(__name__)

SPEECH_RANK = 60
NOISE_RANK = 100


def register(subparsers, config):
    parser_train = subparsers.add_parser(
        'train',
        help='train a speech or noise model'
        )

    parser_train.set_defaults(command=mode_train)

    parser_train.add_argument(
        'audio', nargs='+', metavar='WAV',
        help='training audio, 16 kHz mono 16-bit PCM'
        )
    parser_train.add_argument(
        '-o', '--output', required=True, metavar='FILE',
        help='name of the model file'
        )
    parser_train.add_argument(
        '-r', '--rank', type=int, default=None,
        help=f'number of basis vectors ({SPEECH_RANK} for speech, '
             f'{NOISE_RANK} with --noise)'
        )
    parser_train.add_argument(
        '--noise', action='store_true',
        help='train a noise model'
        )
    parser_train.add_argument(
        '--label', default=None,
        help='name of the source stored in the model'
        )
    parser_train.add_argument(
        '--seed', type=int, default=0,
        help='seed of the initialization'
        )
    parser_train.add_argument(
        '--max-iter', type=int, default=200,
        help='maximum number of VB iterations'
        )
    parser_train.add_argument(
        '--frame-len', dest='frame_len', type=int, default=FRAME_LEN,
        help='STFT frame length in samples'
        )
    parser_train.add_argument(
        '--hop', type=int, default=HOP,
        help='STFT hop in samples, half the frame length'
        )
    parser_train.add_argument(
        '--optimize-priors', action='store_true',
        help='refine the prior hyperparameters'
        )
    return parser_train


def mode_train(args):
    rank = args.rank
    if rank is None:
        rank = NOISE_RANK if args.noise else SPEECH_RANK
    if rank < 1:
        raise ContractError('the rank must be positive')
    label = args.label
    if label is None:
        label = 'noise' if args.noise else 'speech'
    training = TrainingConfig(max_iter=args.max_iter,
                              optimize_hyperparameters=args.optimize_priors)

    config = EnhancementConfig(frame_len=args.frame_len, hop=args.hop)
    signals = [read_wav(path) for path in args.audio]
    data = training_spectrogram(signals, config)
    model = train_model(data, rank, label=label, config=training, seed=args.seed)
    model = replace(model, frame_len=config.frame_len, target_max=config.target_max)
    save_model(model, args.output)
    print(f'model {label!r}: {model.nbins} bins, {model.num_basis} basis vectors, '
          f'{data.shape[1]} frames')
    print(f'written to {args.output}')
