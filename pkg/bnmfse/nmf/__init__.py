#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Nonnegative matrix factorization, maximum likelihood and Bayesian."""

from .gamma import GammaMatrix
from .mlnmf import NmfFactors, kl_divergence, kl_nmf, wiener_enhance, ml_enhance
from .bnmf import VbPosterior, TrainingConfig, vb_infer, train_model
from .bnmf import expected_latent_weights, speech_weights
from .model import BnmfModel, save_model, load_model
