#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#


"""Constants for the bnmfse package."""


# Sampling rate accepted by every pipeline entry point
SAMPLE_RATE = 16000

# Canonical analysis parameters, 32 ms frames with 50% overlap
FRAME_LEN = 512
HOP = 256

# Largest quantized magnitude
TARGET_MAX = 10000.0

# Floor for denominators in multiplicative updates
EPS = 1e-12

# Decibel values reported for infinite energy ratios
DB_CAP = 100.0
