#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Long-term SNR estimation from the waveform amplitude distribution.

Clean speech amplitudes are well described by a gamma distribution
with shape 0.4, Gaussian noise amplitudes by a larger shape. The
maximum likelihood shape of the noisy amplitudes is mapped to an SNR
through a table simulated once per process.
"""

import functools
import logging

import numpy

from bnmfse.constants import SAMPLE_RATE
from bnmfse.exceptions import ContractError
from bnmfse.nmf.gamma import gamma_shape_newton

_logger = logging.getLogger(__name__)

SPEECH_SHAPE = 0.4
SNR_MIN = -10.0
SNR_MAX = 35.0

_GRID = numpy.arange(-20.0, 45.5, 1.0)
_TABLE_SAMPLES = 200000
_TABLE_SEED = 4321


def amplitude_shape(samples):
    """ML gamma shape of the absolute values of the nonzero samples.

    Returns None if fewer than two samples are nonzero or if all
    nonzero amplitudes are equal.
    """
    amp = numpy.abs(numpy.asarray(samples, dtype='float64'))
    amp = amp[amp > 0]
    if len(amp) < 2:
        return None
    stat = numpy.log(amp.mean()) - numpy.log(amp).mean()
    if not stat > 0:
        return None
    return gamma_shape_newton(stat)


@functools.lru_cache(maxsize=None)
def snr_table(seed=_TABLE_SEED, nsamples=_TABLE_SAMPLES):
    """Gamma shape of the amplitudes of simulated mixtures, per SNR.

    Speech is simulated as gamma(0.4) amplitudes with random sign,
    noise as white Gaussian samples, both with unit power.

    Returns
    -------
    shapes : numpy.ndarray
        Increasing shapes.
    snrs : numpy.ndarray
        Corresponding SNR values in dB, decreasing.

    """
    rng = numpy.random.default_rng(seed)
    speech = rng.gamma(SPEECH_SHAPE, 1.0, size=nsamples)
    speech *= rng.choice([-1.0, 1.0], size=nsamples)
    speech /= numpy.sqrt(numpy.mean(speech ** 2))
    noise = rng.standard_normal(nsamples)
    noise /= numpy.sqrt(numpy.mean(noise ** 2))

    shapes = numpy.empty_like(_GRID)
    for idx, snr in enumerate(_GRID):
        mixture = speech * 10 ** (snr / 20) + noise
        shapes[idx] = amplitude_shape(mixture)

    # shapes decrease with the SNR; remove simulation jitter
    shapes = numpy.minimum.accumulate(shapes)
    _logger.debug('SNR table, shape %.4f at %g dB to %.4f at %g dB',
                  shapes[0], _GRID[0], shapes[-1], _GRID[-1])
    return shapes[::-1].copy(), _GRID[::-1].copy()


def snr_from_shape(shape):
    """Long-term SNR in dB for an amplitude shape, clamped."""
    shapes, snrs = snr_table()
    snr = numpy.interp(shape, shapes, snrs)
    return float(numpy.clip(snr, SNR_MIN, SNR_MAX))


def estimate_long_term_snr(noisy):
    """Long-term SNR in dB of a noisy signal of at least one second.

    Silent signals get the lower clamp.
    """
    samples = getattr(noisy, 'samples', noisy)
    rate = getattr(noisy, 'sample_rate', SAMPLE_RATE)
    if len(samples) < rate:
        raise ContractError('long-term SNR needs at least one second of audio')
    shape = amplitude_shape(samples)
    if shape is None:
        return SNR_MIN
    return snr_from_shape(shape)


class SnrTracker:
    """Causal long-term SNR, updated once per second of signal.

    The estimate is computed on the last `window` seconds of samples
    available at the end of the current frame.
    """

    def __init__(self, samples, sample_rate=SAMPLE_RATE, window=10.0, cadence=1.0):
        self.samples = samples
        self.sample_rate = sample_rate
        self.window = int(round(window * sample_rate))
        self.cadence = int(round(cadence * sample_rate))
        self.updates = 0
        self.snr = None

    def observe(self, end):
        """Advance to sample index `end`; return the current estimate or None."""
        count = end // self.cadence
        if count > self.updates:
            self.updates = count
            start = max(0, end - self.window)
            chunk = self.samples[start:end]
            shape = amplitude_shape(chunk)
            self.snr = SNR_MIN if shape is None else snr_from_shape(shape)
            _logger.debug('long-term SNR %.2f dB at sample %d', self.snr, end)
        return self.snr
