#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Enhancement with a single known noise model."""

import logging

import numpy

from bnmfse.exceptions import ShapeError
from bnmfse.nmf.mlnmf import ml_enhance
from .hmm import frame_posterior, state_gain, next_priors
from .pipeline import EnhancementConfig, run_stream, run_block

_logger = logging.getLogger(__name__)


class SupervisedProcessor:
    """BNMF MMSE estimator with one speech and one noise model.

    Uses the same informative activation priors as the BNMF-HMM.
    """

    def __init__(self, speech_model, noise_model, config=None):
        if speech_model.nbins != noise_model.nbins:
            raise ShapeError('speech and noise models differ in frequency bins')
        self.speech_model = speech_model
        self.noise_model = noise_model
        self.config = config if config is not None else EnhancementConfig()
        self.basis = speech_model.basis_posterior.concat(noise_model.basis_posterior)
        self.priors = None
        self.means = None

    def process(self, y_t, alpha):
        config = self.config
        speech_count = self.speech_model.num_basis
        shapes = [(self.noise_model.num_basis, self.noise_model.activation_shape)]
        self.priors = next_priors(self.priors, self.means, y_t, alpha, speech_count,
                                  shapes, config.phi_speech, [self.basis],
                                  config.theta_floor)
        posterior = frame_posterior(y_t, self.basis, self.priors[0].prior(),
                                    config.max_iter, config.tol)
        self.means = (posterior.activations.mean[:, 0],)
        gain = numpy.clip(state_gain(posterior, speech_count), 0.0, 1.0)
        return gain * y_t


def supervised_enhance(noisy, speech_model, noise_model, config=None):
    """Enhance a signal knowing its noise type."""
    processor = SupervisedProcessor(speech_model, noise_model, config)
    result = run_stream(noisy, processor, processor.config)
    return result.enhanced, result


def oracle_ml_enhance(noisy, speech_model, noise_model, config=None,
                      iterations=100):
    """Maximum likelihood baseline with the basis posterior means.

    Activations are estimated by KL-NMF with the concatenated basis
    held fixed, the speech follows from the Wiener-type filter.
    """
    if config is None:
        config = EnhancementConfig()
    speech = speech_model.basis_mean
    noise = noise_model.basis_mean
    if speech.shape[0] != noise.shape[0]:
        raise ShapeError('speech and noise models differ in frequency bins')

    def function(y):
        return ml_enhance(y, speech, noise, iterations=iterations)

    return run_block(noisy, function, config)
