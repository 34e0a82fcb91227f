#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Objective quality measures and SNR controlled mixing."""

from .metrics import EvalReport, bss_eval, segsnr, mix_at_snr
from .metrics import windowed_sdr, evaluate, sdr_improvement
