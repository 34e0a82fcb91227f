#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Energy ratio measures of an estimated speech signal.

The SDR, SIR and SAR decomposition uses time-invariant projections:
the target is the projection of the estimate on the reference speech,
the interference is the remainder of its projection on the span of
the reference speech and noise, the artifacts are what is left. The
full BSS-Eval toolkit uses 512-tap projection filters instead.
"""

import logging
from dataclasses import dataclass, field

import numpy
from numpy.lib.stride_tricks import sliding_window_view

from bnmfse.audio import AudioSignal
from bnmfse.constants import DB_CAP, SAMPLE_RATE, FRAME_LEN, HOP
from bnmfse.exceptions import ShapeError, DegenerateError

_logger = logging.getLogger(__name__)

SEGSNR_MIN = -10.0
SEGSNR_MAX = 30.0
SILENCE_RATIO = 1e-6


def _samples(signal):
    return numpy.asarray(getattr(signal, 'samples', signal), dtype='float64')


def _check_lengths(*arrays):
    if len({len(a) for a in arrays}) != 1:
        raise ShapeError('signals must have equal lengths')


def ratio_db(num, den, cap=DB_CAP):
    """Energy ratio in dB, limited to +-cap."""
    if den <= 0:
        return cap if num > 0 else float('nan')
    if num <= 0:
        return -cap
    return float(numpy.clip(10 * numpy.log10(num / den), -cap, cap))


def bss_eval(estimate, reference_speech, reference_noise):
    """SDR, SIR and SAR in dB.

    Returns NaN values when the reference speech has no energy.
    """
    est = _samples(estimate)
    speech = _samples(reference_speech)
    noise = _samples(reference_noise)
    _check_lengths(est, speech, noise)

    speech_energy = speech @ speech
    if speech_energy <= 0:
        _logger.debug('reference speech has no energy')
        return float('nan'), float('nan'), float('nan')

    target = (est @ speech) / speech_energy * speech
    sources = numpy.column_stack([speech, noise])
    coefs, *_ = numpy.linalg.lstsq(sources, est, rcond=None)
    projection = sources @ coefs
    interf = projection - target
    artif = est - projection

    target_energy = target @ target
    sdr = ratio_db(target_energy, numpy.sum((interf + artif) ** 2))
    sir = ratio_db(target_energy, interf @ interf)
    sar = ratio_db(numpy.sum((target + interf) ** 2), artif @ artif)
    return sdr, sir, sar


def segsnr(estimate, reference, frame=FRAME_LEN, hop=HOP):
    """Segmental SNR in dB.

    Per-frame SNRs are clamped to [-10, 30] dB and averaged over the
    frames whose reference energy exceeds a silence threshold. NaN if
    the reference is silent.
    """
    est = _samples(estimate)
    ref = _samples(reference)
    _check_lengths(est, ref)
    if len(ref) < frame:
        frame = len(ref)
        hop = max(len(ref), 1)
    if frame == 0:
        return float('nan')
    ref_frames = sliding_window_view(ref, frame)[::hop]
    err_frames = sliding_window_view(est - ref, frame)[::hop]
    ref_energy = numpy.sum(ref_frames ** 2, axis=1)
    err_energy = numpy.sum(err_frames ** 2, axis=1)
    mean_energy = ref_energy.mean()
    if mean_energy <= 0:
        return float('nan')
    active = ref_energy > SILENCE_RATIO * mean_energy
    values = [ratio_db(r, e, cap=SEGSNR_MAX) for r, e in
              zip(ref_energy[active], err_energy[active])]
    return float(numpy.mean(numpy.clip(values, SEGSNR_MIN, SEGSNR_MAX)))


def mix_at_snr(speech, noise, snr_db):
    """Add noise to speech at a given SNR over the whole utterance.

    The noise is looped or truncated to the length of the speech.

    Returns
    -------
    noisy : AudioSignal
    scaled_noise : AudioSignal

    Raises
    ------
    DegenerateError
        If the speech or the noise has no power.

    """
    rate = getattr(speech, 'sample_rate', SAMPLE_RATE)
    s = _samples(speech)
    n = _samples(noise)
    if len(n) == 0:
        raise DegenerateError('the noise is empty')
    n = numpy.resize(n, len(s))
    p_speech = numpy.mean(s ** 2) if len(s) else 0.0
    p_noise = numpy.mean(n ** 2)
    if p_speech <= 0 or p_noise <= 0:
        raise DegenerateError('cannot mix signals with zero power')
    gain = numpy.sqrt(p_speech / (p_noise * 10 ** (snr_db / 10)))
    scaled = gain * n
    return AudioSignal(s + scaled, rate), AudioSignal(scaled, rate)


def windowed_sdr(estimate, reference_speech, reference_noise, window=5.0,
                 sample_rate=SAMPLE_RATE):
    """SDR on consecutive windows, as (sdr_db, window_index) pairs.

    A final partial window is kept if it is at least half a window long.
    """
    est = _samples(estimate)
    speech = _samples(reference_speech)
    noise = _samples(reference_noise)
    _check_lengths(est, speech, noise)
    size = int(round(window * sample_rate))
    result = []
    for idx, start in enumerate(range(0, len(est), size)):
        stop = min(start + size, len(est))
        if stop - start < size // 2 and idx > 0:
            break
        sdr, _, _ = bss_eval(est[start:stop], speech[start:stop], noise[start:stop])
        result.append((sdr, idx))
    return result


@dataclass
class EvalReport:
    sdr_db: float
    sir_db: float
    sar_db: float
    segsnr_db: float
    per_window: list = field(default_factory=list)
    degenerate: bool = False

    def as_dict(self):
        return {'sdr_db': self.sdr_db, 'sir_db': self.sir_db,
                'sar_db': self.sar_db, 'segsnr_db': self.segsnr_db,
                'degenerate': int(self.degenerate)}


def evaluate(estimate, reference_speech, reference_noise, windows=False,
             window=5.0):
    """All measures of an estimate against its references."""
    sdr, sir, sar = bss_eval(estimate, reference_speech, reference_noise)
    seg = segsnr(estimate, reference_speech)
    per_window = []
    if windows:
        rate = getattr(reference_speech, 'sample_rate', SAMPLE_RATE)
        per_window = windowed_sdr(estimate, reference_speech, reference_noise,
                                  window, rate)
    values = (sdr, sir, sar, seg)
    degenerate = not all(numpy.isfinite(values))
    if degenerate:
        _logger.warning('degenerate evaluation, reference without energy')
    return EvalReport(sdr, sir, sar, seg, per_window, degenerate)


def sdr_improvement(enhanced, noisy, reference_speech, reference_noise):
    """SDR of the enhanced signal minus SDR of the noisy signal."""
    after, _, _ = bss_eval(enhanced, reference_speech, reference_noise)
    before, _, _ = bss_eval(noisy, reference_speech, reference_noise)
    return after - before
