#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Online learning of the noise basis from the noisy signal.

Incoming frames go through a local buffer. Every time it has received
N2 new frames, the q frames with the lowest energy are appended to a
main buffer of N1 frames and the noise basis is learned again on the
main buffer, the speech basis held fixed. The prior of the new noise
basis is the previous posterior, flattened to a fixed shape.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy

from bnmfse.constants import EPS
from bnmfse.exceptions import ContractError, NumericalError, ShapeError
from bnmfse.nmf import GammaMatrix, kl_nmf, vb_infer
from .hmm import frame_posterior, state_gain, next_priors
from .pipeline import EnhancementConfig, run_stream

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OnlineConfig:
    """Buffers and noise basis learning parameters."""
    n1: int = 50
    n2: int = 15
    q: int = 5
    noise_rank: int = 30
    psi_flatten: float = 500.0
    phi_noise: float = 1.0
    prior_floor: float = 0.01
    buffer_activation_shape: float = 0.1
    kl_iterations: int = 30
    max_iter: int = 200
    tol: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if not self.n1 >= self.n2 >= self.q >= 1:
            raise ContractError('buffer sizes must satisfy n1 >= n2 >= q >= 1')
        if self.noise_rank < 1:
            raise ContractError('noise_rank must be positive')
        if self.psi_flatten <= 0 or self.phi_noise <= 0:
            raise ContractError('gamma shapes must be positive')
        if not 0 <= self.prior_floor < 1:
            raise ContractError('prior_floor must be in [0, 1)')


@dataclass(frozen=True)
class FrameBuffers:
    """Main (at most n1 frames) and local (at most n2 frames) buffers.

    Columns are ordered from the oldest to the newest frame.
    """
    main: numpy.ndarray
    local: numpy.ndarray
    n1: int = 50
    n2: int = 15
    q: int = 5
    new_frames: int = 0

    @classmethod
    def empty(cls, nbins, n1=50, n2=15, q=5):
        if not n1 >= n2 >= q >= 1:
            raise ContractError('buffer sizes must satisfy n1 >= n2 >= q >= 1')
        return cls(numpy.zeros((nbins, 0)), numpy.zeros((nbins, 0)), n1, n2, q, 0)


def push_frame(buffers, y_t):
    """Store a frame in the local buffer, feeding the main buffer when due.

    Returns
    -------
    buffers : FrameBuffers
    trigger : bool
        True when the main buffer received new frames.

    """
    y_t = numpy.asarray(y_t, dtype='float64')
    if y_t.shape != (buffers.local.shape[0],):
        raise ShapeError('frame length does not match the buffers')
    local = numpy.column_stack([buffers.local, y_t])[:, -buffers.n2:]
    new_frames = buffers.new_frames + 1
    if new_frames < buffers.n2:
        return replace(buffers, local=local, new_frames=new_frames), False

    energy = numpy.sum(local ** 2, axis=0)
    # stable sort, older frames first on ties
    chosen = numpy.sort(numpy.argsort(energy, kind='stable')[:buffers.q])
    main = numpy.column_stack([buffers.main, local[:, chosen]])[:, -buffers.n1:]
    return replace(buffers, main=main, local=local, new_frames=0), True


def initial_noise_basis(y_t, rank, shape, seed=0):
    """Noise basis posterior proportional to one frame."""
    base = numpy.asarray(y_t, dtype='float64') + 1.0
    base = base / base.sum()
    means = numpy.tile(base[:, numpy.newaxis], (1, rank))
    if rank > 1:
        rng = numpy.random.default_rng(seed)
        means *= rng.uniform(0.5, 1.5, size=means.shape)
        means /= means.sum(axis=0)
    return GammaMatrix.from_mean(numpy.full(means.shape, shape), means)


def flattened_prior(posterior, shape, floor=0.01):
    """Prior with the posterior mean, floored, and a fixed shape.

    Every column mean is floored at `floor` times its maximum and then
    scaled back to unit sum.
    """
    mean = posterior.mean
    mean = numpy.maximum(mean, floor * mean.max(axis=0))
    mean = mean / mean.sum(axis=0)
    return GammaMatrix.from_mean(numpy.full(mean.shape, shape), mean)


@dataclass
class OnlineLearner:
    """Buffers and current noise basis posterior."""
    speech_model: object
    config: OnlineConfig = field(default_factory=OnlineConfig)
    buffers: FrameBuffers = None
    noise_basis_posterior: GammaMatrix = None
    updates: int = 0

    def __post_init__(self):
        if self.buffers is None:
            cfg = self.config
            self.buffers = FrameBuffers.empty(self.speech_model.nbins, cfg.n1, cfg.n2, cfg.q)

    @property
    def flatten_shape(self):
        return self.config.psi_flatten

    def start(self, y_t):
        """Initial noise basis from the first frame, if not set yet."""
        if self.noise_basis_posterior is None:
            self.noise_basis_posterior = initial_noise_basis(
                y_t, self.config.noise_rank, self.config.psi_flatten, self.config.seed
            )
        return self.noise_basis_posterior

    def observe(self, y_t):
        """Push a frame and update the noise basis when triggered.

        Returns True if the noise basis changed.
        """
        self.start(y_t)
        self.buffers, trigger = push_frame(self.buffers, y_t)
        if trigger:
            self.noise_basis_posterior = update_noise_basis(self)
            self.updates += 1
        return trigger


def update_noise_basis(learner):
    """Noise basis posterior learned on the main buffer.

    KL-NMF on the main buffer, with the speech basis fixed, gives the
    starting point; variational Bayes then runs under the flattened
    prior. The returned columns have unit sum means. If inference
    fails the previous basis is kept.

    Returns
    -------
    GammaMatrix
        K x I noise basis posterior.

    """
    config = learner.config
    data = learner.buffers.main
    previous = learner.noise_basis_posterior
    if data.shape[1] == 0:
        raise ContractError('the main buffer is empty')

    speech = learner.speech_model.basis_posterior
    speech_count = speech.dims[1]
    rank = previous.dims[1]
    num = speech_count + rank

    factors = kl_nmf(data, rank, iterations=config.kl_iterations,
                     fixed_columns=speech.mean, init_basis=previous.mean,
                     seed=config.seed)
    noise_prior = flattened_prior(previous, config.psi_flatten, config.prior_floor)
    basis_prior = speech.concat(noise_prior)
    basis_init = speech.concat(
        GammaMatrix.from_mean(config.psi_flatten, factors.basis[:, speech_count:])
    )
    act_mean = max(data.mean() * data.shape[0] / num, EPS)
    activation_prior = GammaMatrix.from_mean(
        numpy.full((num, data.shape[1]), config.buffer_activation_shape), act_mean
    )
    activation_init = GammaMatrix.from_mean(1.0, numpy.maximum(factors.activations, EPS))
    try:
        posterior = vb_infer(data, basis_prior, activation_prior,
                             max_iter=config.max_iter, tol=config.tol,
                             basis_init=basis_init, activation_init=activation_init,
                             fixed_columns=speech_count)
        noise_basis = posterior.basis[:, speech_count:].normalized()
    except NumericalError as error:
        _logger.warning('noise basis update failed, keeping the previous basis: %s', error)
        return previous
    _logger.debug('noise basis updated, %d VB iterations', posterior.iterations)
    return noise_basis


class OnlineEnhancer:
    """Enhancement with the noise basis learned on the fly."""

    def __init__(self, speech_model, config=None, online_config=None, keep_trajectory=False):
        self.config = config if config is not None else EnhancementConfig()
        online_config = online_config if online_config is not None else OnlineConfig()
        self.learner = OnlineLearner(speech_model, online_config)
        self.speech_model = speech_model
        self.priors = None
        self.means = None
        self.basis = None
        self.keep_trajectory = keep_trajectory
        self.trajectory = []

    def process(self, y_t, alpha):
        learner = self.learner
        if self.basis is None:
            self.basis = self.speech_model.basis_posterior.concat(learner.start(y_t))

        speech_count = self.speech_model.num_basis
        shapes = [(learner.config.noise_rank, learner.config.phi_noise)]
        self.priors = next_priors(self.priors, self.means, y_t, alpha, speech_count,
                                  shapes, self.config.phi_speech, [self.basis],
                                  self.config.theta_floor)
        posterior = frame_posterior(y_t, self.basis, self.priors[0].prior(),
                                    self.config.max_iter, self.config.tol)
        self.means = (posterior.activations.mean[:, 0],)
        s_hat = numpy.clip(state_gain(posterior, speech_count), 0.0, 1.0) * y_t

        if self.keep_trajectory:
            self.trajectory.append(learner.noise_basis_posterior.mean.copy())
        if learner.observe(y_t):
            self.basis = None
        return s_hat


def online_enhance(noisy, speech_model, config=None, online_config=None,
                   keep_trajectory=False):
    """Enhance a signal of unknown noise, learning the noise basis online.

    Returns
    -------
    enhanced : AudioSignal
    result : StreamResult
        ``extra['trajectory']`` holds the noise basis mean used at
        every frame when `keep_trajectory` is set.

    """
    processor = OnlineEnhancer(speech_model, config, online_config, keep_trajectory)
    result = run_stream(noisy, processor, processor.config)
    result.extra['updates'] = processor.learner.updates
    if keep_trajectory:
        result.extra['trajectory'] = numpy.stack(processor.trajectory, axis=0) \
            if processor.trajectory else numpy.zeros((0, speech_model.nbins, 0))
    _logger.info('noise basis updated %d times', processor.learner.updates)
    return result.enhanced, result
