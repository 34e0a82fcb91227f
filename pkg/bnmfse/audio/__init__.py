#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Audio input/output, time-frequency analysis and synthetic signals."""

from .wavio import AudioSignal, read_wav, write_wav
from .stft import ComplexSpectrogram, MagnitudeSpectrogram
from .stft import stft, istft, quantize, dequantize, reference_gain
