#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Demonstration of the online noise basis adaptation.

Speech-like signal plus a two-harmonic noise whose frequencies change
abruptly halfway, mixed at 0 dB. The noise is modelled online with a
single basis vector.
"""

import logging
import time
from dataclasses import dataclass

import numpy

from bnmfse.audio import AudioSignal, stft, quantize, reference_gain
from bnmfse.audio.synth import speech_like, speech_corpus, switching_harmonic_noise
from bnmfse.evaluation import bss_eval, mix_at_snr
from bnmfse.nmf import TrainingConfig, kl_nmf, train_model
from .online import OnlineConfig, online_enhance
from .pipeline import EnhancementConfig, training_spectrogram

_logger = logging.getLogger(__name__)

FIRST_TONES = (1500.0, 3000.0)
SECOND_TONES = (2250.0, 4500.0)


@dataclass
class ToyReport:
    """Outcome of the adaptation demonstration."""
    sdr_noisy: float
    sdr_enhanced: float
    latency: int
    switch_frame: int
    trajectory: numpy.ndarray
    errors: numpy.ndarray
    runtime: float

    @property
    def sdr_improvement(self):
        return self.sdr_enhanced - self.sdr_noisy


def toy_speech_model(seed=0, duration=10.0, num_basis=60, config=None):
    """Speech model trained on synthetic speech-like signals."""
    if config is None:
        config = EnhancementConfig()
    signals = speech_corpus(5, duration / 5, seed=seed)
    data = training_spectrogram(signals, config)
    training = TrainingConfig(max_iter=100, tol=1e-4)
    model = train_model(data, num_basis, label='speech', config=training, seed=seed)
    return model


def reconstruction_errors(target, speech_mean, trajectory, iterations=100):
    """KL error of the best fit of `target` for every noise basis.

    Parameters
    ----------
    target : numpy.ndarray
        K-vector, the spectrum to be explained.
    speech_mean : numpy.ndarray
        K x I speech basis.
    trajectory : numpy.ndarray
        T x K x I_n noise bases.

    """
    target = numpy.asarray(target, dtype='float64')[:, numpy.newaxis]
    errors = numpy.empty(len(trajectory))
    for idx, noise in enumerate(trajectory):
        basis = numpy.hstack([speech_mean, noise])
        factors = kl_nmf(target, iterations=iterations, fixed_basis=basis)
        errors[idx] = factors.divergences[-1]
    return errors


def adaptation_latency(errors, switch_frame):
    """Frames after the switch until the error is half its value at the switch.

    Returns -1 if the error never halves.
    """
    reference = errors[switch_frame]
    after = numpy.flatnonzero(errors[switch_frame:] <= 0.5 * reference)
    if len(after) == 0:
        return -1
    return int(after[0])


def run_toy(speech_model=None, duration=6.0, switch_time=3.0, snr_db=0.0,
            seed=0, config=None, online_config=None):
    """Run the demonstration.

    Returns
    -------
    ToyReport
        The trajectory holds the noise basis used at every frame, T x K.

    """
    if config is None:
        config = EnhancementConfig()
    if online_config is None:
        online_config = OnlineConfig(noise_rank=1, seed=seed)
    start_time = time.perf_counter()
    if speech_model is None:
        speech_model = toy_speech_model(seed, config=config)

    speech = speech_like(duration, seed=seed + 1000)
    noise = switching_harmonic_noise(duration, FIRST_TONES, SECOND_TONES, switch_time)
    noisy, scaled_noise = mix_at_snr(speech, noise, snr_db)

    enhanced, result = online_enhance(noisy, speech_model, config, online_config,
                                      keep_trajectory=True)
    trajectory = result.extra['trajectory']
    sdr_noisy, _, _ = bss_eval(noisy, speech, scaled_noise)
    sdr_enhanced, _, _ = bss_eval(enhanced, speech, scaled_noise)

    switch_sample = int(round(switch_time * noisy.sample_rate))
    switch_frame = switch_sample // config.hop
    gain = reference_gain(config.frame_len, config.target_max)
    tail = scaled_noise.samples[switch_sample:]
    noise_mags = quantize(stft(AudioSignal(tail), config.frame_len, config.hop),
                          config.target_max, gain=gain)
    target = numpy.rint(noise_mags.magnitudes.mean(axis=1))
    errors = reconstruction_errors(target, speech_model.basis_mean, trajectory)
    latency = adaptation_latency(errors, switch_frame)
    runtime = time.perf_counter() - start_time

    _logger.info('SDR %.2f dB -> %.2f dB, latency %d frames, %.1f s',
                 sdr_noisy, sdr_enhanced, latency, runtime)
    return ToyReport(sdr_noisy, sdr_enhanced, latency, switch_frame,
                     trajectory[:, :, 0], errors, runtime)
