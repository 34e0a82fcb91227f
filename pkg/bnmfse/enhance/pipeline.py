#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Causal frame-by-frame enhancement driver.

The noisy signal is analysed, quantized with a signal independent
gain, and handed to a frame processor one column at a time. The
enhanced magnitudes are combined with the noisy phase and synthesized
by overlap-add.
"""

import logging
import time
from dataclasses import dataclass, field

import numpy

from bnmfse.audio import stft, istft, quantize, reference_gain
from bnmfse.constants import FRAME_LEN, HOP, TARGET_MAX
from bnmfse.exceptions import ContractError
from .priors import alpha_for_snr
from .snr import SnrTracker

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnhancementConfig:
    """Parameters shared by the BNMF enhancers.

    ``theta_floor`` is the smallest prior activation mean, in
    quantization steps.
    """
    frame_len: int = FRAME_LEN
    hop: int = HOP
    target_max: float = TARGET_MAX
    phi_speech: float = 0.01
    theta_floor: float = 1.0
    max_iter: int = 50
    tol: float = 1e-5
    alpha_low: tuple = (-5.0, 0.98)
    alpha_high: tuple = (15.0, 0.1)
    initial_alpha: float = 0.9
    snr_window: float = 10.0
    snr_cadence: float = 1.0
    transition_diagonal: float = 0.99
    classifier_smoothing: float = 0.95

    def __post_init__(self):
        if self.hop * 2 != self.frame_len:
            raise ContractError('hop must be half the frame length')
        if self.target_max < 100:
            raise ContractError('target_max must be at least 100')
        if self.phi_speech <= 0:
            raise ContractError('phi_speech must be positive')
        if self.theta_floor <= 0:
            raise ContractError('theta_floor must be positive')
        if self.max_iter < 1 or self.tol <= 0:
            raise ContractError('invalid iteration settings')
        if not 0 <= self.initial_alpha <= 1:
            raise ContractError('initial_alpha must be in [0, 1]')
        for snr, alpha in (self.alpha_low, self.alpha_high):
            if not 0 <= alpha <= 1:
                raise ContractError('alpha breakpoints must be in [0, 1]')
        if self.alpha_low[0] >= self.alpha_high[0]:
            raise ContractError('alpha breakpoints must have increasing SNR')
        if self.alpha_low[1] < self.alpha_high[1]:
            raise ContractError('alpha must not increase with the SNR')
        if not 0 < self.transition_diagonal <= 1:
            raise ContractError('transition_diagonal must be in (0, 1]')
        if not 0 <= self.classifier_smoothing < 1:
            raise ContractError('classifier_smoothing must be in [0, 1)')

    def alpha(self, snr_db):
        if snr_db is None:
            return self.initial_alpha
        return alpha_for_snr(snr_db, self.alpha_low, self.alpha_high)


@dataclass
class StreamResult:
    """Output of a causal enhancement run."""
    enhanced: object
    magnitudes: numpy.ndarray
    nframes: int
    snr_db: float = None
    runtime: float = 0.0
    extra: dict = field(default_factory=dict)


def analyse(noisy, config):
    """Quantized magnitude spectrogram with the reference gain."""
    spec = stft(noisy, config.frame_len, config.hop)
    gain = reference_gain(config.frame_len, config.target_max)
    return quantize(spec, config.target_max, gain=gain)


def run_stream(noisy, processor, config):
    """Enhance a signal frame by frame.

    Parameters
    ----------
    noisy : AudioSignal
    processor : object
        Has a method ``process(y_t, alpha)`` returning the enhanced
        quantized magnitudes of one frame.
    config : EnhancementConfig

    Returns
    -------
    StreamResult

    """
    noisy.check_rate()
    start_time = time.perf_counter()
    mags = analyse(noisy, config)
    tracker = SnrTracker(noisy.samples, noisy.sample_rate,
                         config.snr_window, config.snr_cadence)
    nframes = mags.shape[1]
    enhanced = numpy.empty_like(mags.magnitudes)
    for t in range(nframes):
        end = t * config.hop + config.frame_len
        alpha = config.alpha(tracker.observe(end))
        enhanced[:, t] = processor.process(mags.magnitudes[:, t], alpha)

    signal = istft(mags.with_magnitudes(enhanced))
    runtime = time.perf_counter() - start_time
    _logger.info('enhanced %d frames in %.2f s', nframes, runtime)
    return StreamResult(signal, enhanced, nframes, tracker.snr, runtime)


def run_block(noisy, function, config):
    """Enhance all magnitudes at once with ``function(y) -> s_hat``."""
    noisy.check_rate()
    mags = analyse(noisy, config)
    enhanced = function(mags.magnitudes)
    return istft(mags.with_magnitudes(enhanced))


def training_spectrogram(signals, config=None):
    """Quantized magnitudes of several signals, frames side by side.

    Uses the reference gain, so models and enhancement share a scale.
    """
    if config is None:
        config = EnhancementConfig()
    blocks = []
    for signal in signals:
        signal.check_rate()
        blocks.append(analyse(signal, config).magnitudes)
    if not blocks:
        raise ContractError('no training signals')
    return numpy.hstack(blocks)
