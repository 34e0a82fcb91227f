#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Reading and writing 16-bit PCM mono WAV files."""

import logging
from dataclasses import dataclass

import numpy
from scipy.io import wavfile

from bnmfse.constants import SAMPLE_RATE
from bnmfse.exceptions import FormatError, SampleRateError, ContractError


_logger = logging.getLogger(__name__)

# Full scale of 16-bit PCM
_PCM_SCALE = 32768.0


@dataclass(frozen=True)
class AudioSignal:
    """Real samples in [-1, 1] with their sampling rate in Hz."""
    samples: numpy.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        samples = numpy.asarray(self.samples, dtype='float64')
        if samples.ndim != 1:
            raise ContractError('audio samples must be one dimensional')
        if not numpy.all(numpy.isfinite(samples)):
            raise ContractError('audio samples must be finite')
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'sample_rate', int(self.sample_rate))

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        """Duration in seconds."""
        return len(self.samples) / self.sample_rate

    def check_rate(self, rate=SAMPLE_RATE):
        if self.sample_rate != rate:
            raise SampleRateError(
                f'sample rate is {self.sample_rate} Hz, {rate} Hz required'
            )
        return self


def read_wav(path):
    """Read a 16-bit PCM mono WAV file sampled at 16 kHz.

    Parameters
    ----------
    path : str or path-like
        Name of the WAV file.

    Returns
    -------
    AudioSignal
        Samples normalized to [-1, 1).

    Raises
    ------
    FormatError
        If the file is not 16-bit PCM or has more than one channel.
    SampleRateError
        If the sample rate is not 16 kHz. Nothing is resampled.

    """
    try:
        rate, data = wavfile.read(path)
    except ValueError as error:
        raise FormatError(f'{path}: {error}') from error

    if data.dtype != numpy.int16:
        raise FormatError(f'{path}: encoding {data.dtype} is not 16-bit PCM')
    if data.ndim != 1:
        raise FormatError(f'{path}: {data.shape[1]} channels, mono required')
    if rate != SAMPLE_RATE:
        raise SampleRateError(
            f'{path}: sample rate is {rate} Hz, {SAMPLE_RATE} Hz required'
        )

    samples = data.astype('float64') / _PCM_SCALE
    _logger.debug('read %d samples from %s', len(samples), path)
    return AudioSignal(samples, rate)


def write_wav(path, signal):
    """Write a signal as a 16-bit PCM mono WAV file.

    Samples outside [-1, 1] are saturated and a warning is logged.
    """
    samples = numpy.asarray(signal.samples, dtype='float64')
    if not numpy.all(numpy.isfinite(samples)):
        raise ContractError('audio samples must be finite')

    nclip = numpy.count_nonzero(numpy.abs(samples) > 1.0)
    if nclip > 0:
        _logger.warning('%d samples clipped to full scale in %s', nclip, path)

    pcm = numpy.clip(
        numpy.round(samples * _PCM_SCALE), -_PCM_SCALE, _PCM_SCALE - 1
    ).astype(numpy.int16)
    wavfile.write(path, int(signal.sample_rate), pcm)
    _logger.debug('wrote %d samples to %s', len(pcm), path)
