#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Causal speech enhancement with BNMF models."""

from .pipeline import EnhancementConfig, StreamResult, run_stream, training_spectrogram
from .priors import ActivationPriorState, update_activation_prior, alpha_for_snr
from .snr import estimate_long_term_snr, SnrTracker
from .hmm import HmmDenoiser, ForwardState, state_likelihood, forward_update
from .hmm import mmse_state_estimate, enhance_frame, enhance_file
from .supervised import supervised_enhance, oracle_ml_enhance
from .online import OnlineConfig, FrameBuffers, OnlineLearner, OnlineEnhancer
from .online import push_frame, update_noise_basis, online_enhance
