#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Enhance and classify noisy speech."""

import logging

import numpy

from bnmfse.audio import read_wav, write_wav
from bnmfse.enhance import HmmDenoiser, enhance_file, online_enhance, supervised_enhance
from bnmfse.exceptions import ContractError
from bnmfse.nmf import load_model

from .runconfig import load_run_config, check_outputs, RunConfig

_logger = logging.getLogger(__name__)

# command line flags overriding run configuration keys
_OVERRIDES = [
    ('n1', int), ('n2', int), ('q', int), ('noise_rank', int),
    ('psi_flatten', float), ('phi_speech', float), ('phi_noise', float),
    ('transition_diagonal', float), ('classifier_smoothing', float),
    ('max_iter', int), ('tol', float), ('target_max', float),
    ('frame_len', int), ('hop', int),
]


def add_run_arguments(parser):
    parser.add_argument(
        '-c', '--config', default=None, metavar='FILE',
        help='run configuration file with key = value lines'
        )
    parser.add_argument(
        '--speech-model', dest='speech_model', default=None, metavar='MODEL',
        help='speech model file'
        )
    parser.add_argument(
        '--noise-model', dest='noise_models', action='append', default=None,
        metavar='MODEL', help='noise model file, may be repeated'
        )
    parser.add_argument(
        '--model-list', dest='model_list', default=None, metavar='FILE',
        help='text file listing noise model files'
        )
    parser.add_argument(
        '--seed', type=int, default=None,
        help='seed of the online noise basis initialization'
        )
    for key, kind in _OVERRIDES:
        parser.add_argument(
            '--' + key.replace('_', '-'), dest=key, type=kind, default=None,
            help=f'override {key}'
            )


def register(subparsers, config):
    parser_enhance = subparsers.add_parser(
        'enhance',
        help='enhance a noisy WAV file'
        )
    parser_enhance.set_defaults(command=mode_enhance)
    parser_enhance.add_argument('noisy', metavar='NOISY', help='noisy WAV')
    parser_enhance.add_argument('output', metavar='OUTPUT', help='enhanced WAV')
    parser_enhance.add_argument(
        '-m', '--mode', choices=['supervised', 'hmm', 'online'], default=None,
        help='enhancement method'
        )
    parser_enhance.add_argument(
        '--class-trace', dest='class_trace', default=None, metavar='CSV',
        help='write the noise class probabilities of every frame (hmm mode)'
        )
    add_run_arguments(parser_enhance)

    parser_classify = subparsers.add_parser(
        'classify',
        help='classify the noise of a WAV file frame by frame'
        )
    parser_classify.set_defaults(command=mode_classify, mode='hmm')
    parser_classify.add_argument('noisy', metavar='NOISY', help='noisy WAV')
    parser_classify.add_argument(
        '-o', '--output', dest='class_trace', required=True, metavar='CSV',
        help='class probabilities of every frame'
        )
    add_run_arguments(parser_classify)
    return parser_enhance


def run_config_from_args(args):
    overrides = {key: getattr(args, key, None) for key in RunConfig.keys()}
    if overrides['noise_models'] is not None:
        overrides['noise_models'] = ','.join(overrides['noise_models'])
    return load_run_config(args.config, overrides)


def load_models(run):
    paths = run.validate()
    if run.class_trace is not None and run.mode != 'hmm':
        raise ContractError('the class trace needs hmm mode')
    speech = load_model(run.speech_model)
    noises = [load_model(path) for path in paths]
    for path, model in zip([run.speech_model] + paths, [speech] + noises):
        if model.frame_len != run.frame_len:
            raise ContractError(
                f'model {path} uses frames of {model.frame_len} samples, '
                f'not {run.frame_len}'
            )
    return speech, noises


def mode_enhance(args):
    run = run_config_from_args(args)
    speech, noises = load_models(run)
    check_outputs(args.output, run.class_trace)
    noisy = read_wav(args.noisy)
    config = run.enhancement_config()

    trace = None
    if run.mode == 'online':
        enhanced, result = online_enhance(noisy, speech, config, run.online_config())
    elif run.mode == 'supervised':
        enhanced, result = supervised_enhance(noisy, speech, noises[0], config)
    else:
        denoiser = HmmDenoiser.create(speech, noises, config)
        enhanced, trace, result = enhance_file(denoiser, noisy)

    write_wav(args.output, enhanced)
    if trace is not None and run.class_trace is not None:
        write_class_trace(run.class_trace, trace, class_names(noises))

    print(f'mode {run.mode}, {result.nframes} frames, {result.runtime:.2f} s')
    if result.snr_db is not None:
        print(f'estimated long-term SNR {result.snr_db:.1f} dB')
    else:
        print('estimated long-term SNR not available, signal shorter than 1 s')


def mode_classify(args):
    run = run_config_from_args(args)
    speech, noises = load_models(run)
    check_outputs(run.class_trace)
    noisy = read_wav(args.noisy)
    denoiser = HmmDenoiser.create(speech, noises, run.enhancement_config())
    _, trace, _ = enhance_file(denoiser, noisy)
    names = class_names(noises)
    write_class_trace(run.class_trace, trace, names)
    counts = numpy.bincount(numpy.argmax(trace, axis=0), minlength=len(names))
    for name, count in zip(names, counts):
        print(f'{name}: {count} frames')


def class_names(models):
    return [model.label or f'class{idx}' for idx, model in enumerate(models)]


def write_class_trace(path, trace, names):
    """CSV with the frame index and one probability column per class."""
    header = ','.join(['frame'] + names)
    rows = numpy.column_stack([numpy.arange(trace.shape[1]), trace.T])
    numpy.savetxt(path, rows, fmt=['%d'] + ['%.9f'] * len(names),
                  delimiter=',', header=header, comments='')
