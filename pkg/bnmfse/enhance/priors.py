#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Informative activation priors updated frame by frame."""

from dataclasses import dataclass, replace

import numpy

from bnmfse.constants import EPS
from bnmfse.exceptions import ContractError, ShapeError
from bnmfse.nmf import GammaMatrix, kl_nmf


@dataclass(frozen=True)
class ActivationPriorState:
    """Prior means of the activations of the next frame.

    ``phi`` holds the gamma shape of every component, the speech
    shape for the speech components and the noise shape for the rest.
    ``floor`` bounds ``theta`` from below. A state built from a silent
    frame is not ``primed`` and is rebuilt at the first frame with
    counts.
    """
    theta: numpy.ndarray
    phi: numpy.ndarray
    alpha: float = 0.9
    floor: float = EPS
    primed: bool = True

    def __post_init__(self):
        theta = numpy.asarray(self.theta, dtype='float64')
        phi = numpy.broadcast_to(
            numpy.asarray(self.phi, dtype='float64'), theta.shape
        ).copy()
        if not 0 <= self.alpha <= 1:
            raise ContractError('alpha must be in [0, 1]')
        if numpy.any(theta <= 0) or numpy.any(phi <= 0) or self.floor <= 0:
            raise ContractError('prior parameters must be positive')
        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'phi', phi)

    @classmethod
    def initial(cls, y_t, phi_speech, phi_noise, speech_count, noise_count,
                alpha=0.9, basis=None, floor=EPS, iterations=30):
        """Priors for the first frame, at the scale of the frame.

        With a K x I `basis` the prior means are the KL-NMF activations
        of the frame on that basis. Without one, the frame total is
        shared evenly between the components.
        """
        y_t = numpy.ravel(numpy.asarray(y_t, dtype='float64'))
        num = speech_count + noise_count
        total = float(numpy.sum(y_t))
        if basis is not None and total > 0:
            basis = numpy.asarray(basis, dtype='float64')
            if basis.shape != (len(y_t), num):
                raise ShapeError(f'basis {basis.shape} does not match {(len(y_t), num)}')
            factors = kl_nmf(y_t[:, numpy.newaxis], fixed_basis=basis,
                             iterations=iterations)
            theta = factors.activations[:, 0]
        else:
            theta = numpy.full(num, total / num)
        phi = numpy.concatenate([numpy.full(speech_count, phi_speech),
                                 numpy.full(noise_count, phi_noise)])
        return cls(numpy.maximum(theta, floor), phi, alpha, floor, total > 0)

    @property
    def phi_speech(self):
        return self.phi[0]

    @property
    def phi_noise(self):
        return self.phi[-1]

    def with_alpha(self, alpha):
        return replace(self, alpha=alpha)

    def prior(self):
        """Gamma prior of the activations of one frame, I x 1."""
        return GammaMatrix.from_mean(self.phi[:, numpy.newaxis],
                                     self.theta[:, numpy.newaxis])


def update_activation_prior(state, frame_posterior_means):
    """Recursive smoothing of the prior means.

    ``theta = alpha * theta + (1 - alpha) * E[V]``
    """
    means = numpy.ravel(frame_posterior_means)
    theta = state.alpha * state.theta + (1 - state.alpha) * means
    return replace(state, theta=numpy.maximum(theta, state.floor))


def alpha_for_snr(snr_db, low=(-5.0, 0.98), high=(15.0, 0.1)):
    """Prior smoothing factor for a long-term SNR in dB.

    Piecewise linear, constant below ``low[0]`` and above ``high[0]``.
    """
    if not numpy.isfinite(snr_db):
        raise ContractError('SNR must be finite')
    return float(numpy.interp(snr_db, [low[0], high[0]], [low[1], high[1]]))
