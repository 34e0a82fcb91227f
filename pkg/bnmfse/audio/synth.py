#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Synthetic speech-like signals and noises.

The speech-like generator produces voiced syllables: a harmonic complex
following a slowly varying pitch contour, shaped by a vowel formant
envelope and a syllabic amplitude envelope, separated by pauses. It is
good enough to train and exercise the models without a licensed corpus.
"""

import logging

import numpy
import scipy.signal

from bnmfse.constants import SAMPLE_RATE
from .wavio import AudioSignal

_logger = logging.getLogger(__name__)

# Formant frequencies (Hz) of a few vowels
VOWEL_FORMANTS = numpy.array([
    [730.0, 1090.0, 2440.0],
    [270.0, 2290.0, 3010.0],
    [300.0, 870.0, 2240.0],
    [530.0, 1840.0, 2480.0],
    [570.0, 840.0, 2410.0],
    [440.0, 1020.0, 2240.0],
    [660.0, 1720.0, 2410.0],
])
FORMANT_BANDWIDTHS = numpy.array([90.0, 110.0, 170.0])
FORMANT_GAINS = numpy.array([1.0, 0.5, 0.25])

# RMS of every generated signal
_LEVEL = 0.1
_PEAK = 0.9


def _normalize(samples, level=_LEVEL):
    rms = numpy.sqrt(numpy.mean(samples ** 2))
    if rms > 0:
        samples = samples * (level / rms)
    return samples


def formant_envelope(freqs, formants):
    """Amplitude of a harmonic at each frequency for a set of formants."""
    freqs = numpy.asarray(freqs)[..., numpy.newaxis]
    resonance = FORMANT_GAINS / (1 + ((freqs - formants) / FORMANT_BANDWIDTHS) ** 2)
    return resonance.sum(axis=-1) + 0.01


def speech_like(duration, seed=0, sample_rate=SAMPLE_RATE, f0=None,
                pause_prob=0.25, max_freq=4000.0):
    """A speech-like signal of the given duration in seconds.

    Parameters
    ----------
    duration : float
        Length of the signal in seconds.
    seed : int
        Seed of the random generator. Equal seeds give equal signals.
    sample_rate : int
    f0 : float, optional
        Mean pitch in Hz, drawn in [100, 200] by default.
    pause_prob : float
        Probability of a pause after each syllable.
    max_freq : float
        Highest harmonic frequency.

    Returns
    -------
    AudioSignal

    """
    rng = numpy.random.default_rng(seed)
    nsamples = int(round(duration * sample_rate))
    if f0 is None:
        f0 = rng.uniform(100.0, 200.0)

    samples = numpy.zeros(nsamples)
    pos = int(rng.uniform(0.0, 0.1) * sample_rate)
    phase = 0.0
    while pos < nsamples:
        length = int(rng.uniform(0.15, 0.3) * sample_rate)
        length = min(length, nsamples - pos)
        # pitch glides linearly inside a syllable
        start, end = f0 * (1 + rng.uniform(-0.15, 0.15, size=2))
        pitch = numpy.linspace(start, end, length)
        inst_phase = phase + 2 * numpy.pi * numpy.cumsum(pitch) / sample_rate
        phase = inst_phase[-1] if length > 0 else phase

        formants = VOWEL_FORMANTS[rng.integers(len(VOWEL_FORMANTS))]
        nharm = int(max_freq // max(start, end))
        syllable = numpy.zeros(length)
        for h in range(1, nharm + 1):
            amp = formant_envelope(h * pitch, formants)
            syllable += amp * numpy.sin(h * inst_phase)

        envelope = scipy.signal.windows.tukey(length, alpha=0.6)
        samples[pos:pos + length] = syllable * envelope * rng.uniform(0.5, 1.0)
        pos += length
        if rng.uniform() < pause_prob:
            pos += int(rng.uniform(0.1, 0.3) * sample_rate)

    samples = _normalize(samples)
    peak = numpy.abs(samples).max(initial=0.0)
    if peak > _PEAK:
        samples *= _PEAK / peak
    return AudioSignal(samples, sample_rate)


def harmonic_noise(duration, frequencies, amplitudes=None,
                   sample_rate=SAMPLE_RATE):
    """Sum of stationary sinusoids."""
    nsamples = int(round(duration * sample_rate))
    time = numpy.arange(nsamples) / sample_rate
    frequencies = numpy.atleast_1d(frequencies)
    if amplitudes is None:
        amplitudes = numpy.ones_like(frequencies, dtype='float64')
    samples = numpy.zeros(nsamples)
    for freq, amp in zip(frequencies, amplitudes):
        samples += amp * numpy.sin(2 * numpy.pi * freq * time)
    return AudioSignal(_normalize(samples), sample_rate)


def switching_harmonic_noise(duration, first, second, switch_time,
                             amplitudes=None, sample_rate=SAMPLE_RATE):
    """Harmonic noise whose frequencies change abruptly at switch_time.

    Both halves have the same RMS level.
    """
    before = harmonic_noise(duration, first, amplitudes, sample_rate)
    after = harmonic_noise(duration, second, amplitudes, sample_rate)
    split = int(round(switch_time * sample_rate))
    samples = numpy.concatenate([before.samples[:split], after.samples[split:]])
    return AudioSignal(samples, sample_rate)


def band_noise(duration, band, seed=0, sample_rate=SAMPLE_RATE, order=6):
    """Gaussian noise filtered to a frequency band (low, high) in Hz."""
    rng = numpy.random.default_rng(seed)
    nsamples = int(round(duration * sample_rate))
    white = rng.standard_normal(nsamples)
    low, high = band
    nyquist = sample_rate / 2.0
    if low <= 0 and high >= nyquist:
        return AudioSignal(_normalize(white), sample_rate)
    if low <= 0:
        sos = scipy.signal.butter(order, high, btype='lowpass',
                                  fs=sample_rate, output='sos')
    elif high >= nyquist:
        sos = scipy.signal.butter(order, low, btype='highpass',
                                  fs=sample_rate, output='sos')
    else:
        sos = scipy.signal.butter(order, [low, high], btype='bandpass',
                                  fs=sample_rate, output='sos')
    return AudioSignal(_normalize(scipy.signal.sosfilt(sos, white)), sample_rate)


def speech_corpus(count, duration, seed=0, sample_rate=SAMPLE_RATE):
    """A list of speech-like signals with different speakers."""
    rng = numpy.random.default_rng(seed)
    seeds = rng.integers(0, 2 ** 31, size=count)
    _logger.debug('generating %d speech-like signals of %.1f s', count, duration)
    return [speech_like(duration, seed=int(s), sample_rate=sample_rate)
            for s in seeds]


def concatenate(signals):
    """Join signals end to end."""
    if not signals:
        return AudioSignal(numpy.zeros(0))
    rate = signals[0].sample_rate
    return AudioSignal(numpy.concatenate([s.samples for s in signals]), rate)
