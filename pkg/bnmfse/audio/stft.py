#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Short-time Fourier analysis, overlap-add synthesis and quantization.

Frames are not zero-padded: the last incomplete frame of a signal is
dropped, so the number of frames is ``(len - frame_len) // hop + 1``.
Synthesis uses the analysis window again and divides the overlap-add
result by the accumulated squared window.
"""

from dataclasses import dataclass

import numpy
import scipy.signal
from numpy.lib.stride_tricks import sliding_window_view

from bnmfse.constants import FRAME_LEN, HOP, SAMPLE_RATE, TARGET_MAX
from bnmfse.exceptions import ContractError, ShapeError
from .wavio import AudioSignal


# The overlap-add envelope is divided out only down to this fraction of
# its maximum. A 50% overlap Hann envelope stays above half its maximum
# away from the signal ends, so only the first and last hop are tapered.
_ENVELOPE_FLOOR = 0.5


@dataclass(frozen=True)
class ComplexSpectrogram:
    """K x T complex STFT with the parameters used to compute it."""
    values: numpy.ndarray
    frame_len: int = FRAME_LEN
    hop: int = HOP
    window: str = 'hann'
    length: int = 0
    sample_rate: int = SAMPLE_RATE

    @property
    def shape(self):
        return self.values.shape

    @property
    def nframes(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class MagnitudeSpectrogram:
    """Integer-valued magnitudes, their quantization gain and the phase.

    Magnitudes are stored as float64 arrays holding integer values.
    """
    magnitudes: numpy.ndarray
    gain: float
    phase: numpy.ndarray
    frame_len: int = FRAME_LEN
    hop: int = HOP
    window: str = 'hann'
    length: int = 0
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        if not self.gain > 0:
            raise ContractError('quantization gain must be positive')
        if self.magnitudes.shape != self.phase.shape:
            raise ShapeError('magnitudes and phase differ in shape')

    @property
    def shape(self):
        return self.magnitudes.shape

    def with_magnitudes(self, magnitudes):
        """Complex spectrogram from new quantized magnitudes and this phase."""
        magnitudes = numpy.asarray(magnitudes, dtype='float64')
        if magnitudes.shape != self.phase.shape:
            raise ShapeError('magnitudes and phase differ in shape')
        values = dequantize(magnitudes, self.gain) * numpy.exp(1j * self.phase)
        return ComplexSpectrogram(values, self.frame_len, self.hop,
                                  self.window, self.length, self.sample_rate)


def analysis_window(frame_len=FRAME_LEN, window='hann'):
    """Periodic analysis window."""
    return scipy.signal.get_window(window, frame_len, fftbins=True)


def frame_count(length, frame_len=FRAME_LEN, hop=HOP):
    """Number of complete frames in a signal of given length."""
    if length < frame_len:
        return 0
    return (length - frame_len) // hop + 1


def stft(signal, frame_len=FRAME_LEN, hop=HOP, window='hann'):
    """Short-time Fourier transform of a signal.

    Column t is the DFT of the windowed frame starting at sample
    ``t * hop``. Only the ``frame_len // 2 + 1`` nonnegative frequencies
    are kept.

    Parameters
    ----------
    signal : AudioSignal
    frame_len : int
        Frame length in samples.
    hop : int
        Hop between frames in samples.
    window : str
        Window name understood by `scipy.signal.get_window`.

    Returns
    -------
    ComplexSpectrogram

    Raises
    ------
    ContractError
        If the signal is shorter than one frame.

    """
    samples = numpy.asarray(signal.samples, dtype='float64')
    if len(samples) < frame_len:
        raise ContractError(
            f'signal of {len(samples)} samples is shorter than a frame'
        )
    win = analysis_window(frame_len, window)
    nframes = frame_count(len(samples), frame_len, hop)
    frames = sliding_window_view(samples, frame_len)[::hop][:nframes]
    values = numpy.fft.rfft(frames * win, axis=1).T
    return ComplexSpectrogram(values, frame_len, hop, window,
                              len(samples), signal.sample_rate)


def _synthesis_envelope(nframes, frame_len, hop, win, length):
    envelope = numpy.zeros(length)
    wsq = win * win
    for t in range(nframes):
        start = t * hop
        envelope[start:start + frame_len] += wsq
    return envelope


def istft(spectrogram):
    """Inverse STFT by weighted overlap-add.

    The output has the length of the analysed signal; samples not
    covered by any frame are zero. Where the accumulated squared window
    falls below half its maximum, at both ends of the signal, it is
    replaced by that floor, so the ends fade out instead of amplifying
    modified spectra.

    Raises
    ------
    ShapeError
        If the number of rows does not match the frame length.

    """
    values = numpy.asarray(spectrogram.values)
    frame_len = spectrogram.frame_len
    hop = spectrogram.hop
    if values.ndim != 2 or values.shape[0] != frame_len // 2 + 1:
        raise ShapeError(
            f'spectrogram with shape {values.shape} does not match '
            f'frame length {frame_len}'
        )
    nframes = values.shape[1]
    covered = (nframes - 1) * hop + frame_len if nframes > 0 else 0
    length = max(spectrogram.length, covered)

    win = analysis_window(frame_len, spectrogram.window)
    frames = numpy.fft.irfft(values.T, n=frame_len, axis=1) * win
    output = numpy.zeros(length)
    for t in range(nframes):
        start = t * hop
        output[start:start + frame_len] += frames[t]

    envelope = _synthesis_envelope(nframes, frame_len, hop, win, length)
    if nframes > 0:
        floor = _ENVELOPE_FLOOR * envelope.max()
        output /= numpy.maximum(envelope, floor)
    return AudioSignal(output, spectrogram.sample_rate)


def reference_gain(frame_len=FRAME_LEN, target_max=TARGET_MAX):
    """Signal independent quantization gain.

    A full-scale sinusoid at a bin center reaches ``target_max``.
    """
    return target_max / (frame_len / 4.0)


def quantize(spectrogram, target_max=TARGET_MAX, gain=None):
    """Scale magnitudes and round them to the closest integer.

    Parameters
    ----------
    spectrogram : ComplexSpectrogram
    target_max : float
        Value of the largest magnitude after scaling, at least 100.
    gain : float, optional
        Fixed gain. By default ``target_max / max|values|``, or 1 for an
        all-zero spectrogram.

    Returns
    -------
    MagnitudeSpectrogram

    """
    if target_max < 100:
        raise ContractError('target_max must be at least 100')
    values = numpy.asarray(spectrogram.values)
    mags = numpy.abs(values)
    if gain is None:
        peak = mags.max() if mags.size > 0 else 0.0
        gain = target_max / peak if peak > 0 else 1.0
    magnitudes = numpy.rint(gain * mags)
    return MagnitudeSpectrogram(
        magnitudes, float(gain), numpy.angle(values),
        spectrogram.frame_len, spectrogram.hop, spectrogram.window,
        spectrogram.length, spectrogram.sample_rate
    )


def dequantize(magnitudes, gain):
    """Undo the quantization scaling."""
    return numpy.asarray(magnitudes, dtype='float64') / gain
