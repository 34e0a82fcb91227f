#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Joint noise classification and enhancement with a BNMF-HMM.

Every hidden state is a noise type. Its output density is the BNMF
model made of the shared speech basis followed by the basis of that
noise. The enhanced frame is the MMSE combination of the per-state
estimates, weighted by the forward posterior of the states.
"""

import logging
from dataclasses import dataclass, replace

import numpy
from scipy.special import logsumexp
from scipy.stats import poisson

from bnmfse.constants import EPS
from bnmfse.exceptions import NumericalError, ShapeError, ContractError
from bnmfse.nmf.bnmf import vb_infer, speech_weights
from .pipeline import EnhancementConfig, run_stream
from .priors import ActivationPriorState, update_activation_prior

_logger = logging.getLogger(__name__)


def transition_matrix(num_states, diagonal=0.99):
    """Row stochastic matrix with a constant diagonal."""
    if num_states == 1:
        return numpy.ones((1, 1))
    off = (1.0 - diagonal) / (num_states - 1)
    trans = numpy.full((num_states, num_states), off)
    numpy.fill_diagonal(trans, diagonal)
    return trans


@dataclass(frozen=True)
class HmmDenoiser:
    """Speech model, one model per noise type and the state dynamics."""
    speech_model: object
    noise_models: tuple
    transition: numpy.ndarray
    initial: numpy.ndarray
    classifier_smoothing: float = 0.95
    config: EnhancementConfig = EnhancementConfig()

    def __post_init__(self):
        if len(self.noise_models) < 1:
            raise ContractError('at least one noise model is required')
        nbins = self.speech_model.nbins
        for model in self.noise_models:
            if model.nbins != nbins:
                raise ShapeError(
                    f'noise model {model.label!r} has {model.nbins} bins, '
                    f'speech model has {nbins}'
                )
        trans = numpy.asarray(self.transition, dtype='float64')
        init = numpy.asarray(self.initial, dtype='float64')
        num = len(self.noise_models)
        if trans.shape != (num, num) or init.shape != (num,):
            raise ShapeError('transition and initial do not match the states')
        if not numpy.allclose(trans.sum(axis=1), 1, rtol=0, atol=1e-12):
            raise ContractError('transition rows must sum to 1')
        if not numpy.isclose(init.sum(), 1, rtol=0, atol=1e-12):
            raise ContractError('initial probabilities must sum to 1')
        object.__setattr__(self, 'noise_models', tuple(self.noise_models))
        object.__setattr__(self, 'transition', trans)
        object.__setattr__(self, 'initial', init)
        bases = tuple(self.speech_model.basis_posterior.concat(m.basis_posterior)
                      for m in self.noise_models)
        object.__setattr__(self, '_bases', bases)

    @classmethod
    def create(cls, speech_model, noise_models, config=None):
        """Denoiser with the default transition and uniform initial states."""
        if config is None:
            config = EnhancementConfig()
        num = len(noise_models)
        return cls(speech_model, tuple(noise_models),
                   transition_matrix(num, config.transition_diagonal),
                   numpy.full(num, 1.0 / max(num, 1)),
                   config.classifier_smoothing, config)

    @property
    def num_states(self):
        return len(self.noise_models)

    @property
    def labels(self):
        return [model.label for model in self.noise_models]

    @property
    def bases(self):
        return self._bases

    def basis(self, state):
        """Concatenated speech and noise basis posterior of a state."""
        return self._bases[state]


@dataclass(frozen=True)
class ForwardState:
    """Predictive and filtered state probabilities."""
    predictive: numpy.ndarray
    posterior: numpy.ndarray
    log_scale: float = 0.0
    frames: int = 0

    @classmethod
    def start(cls, initial):
        initial = numpy.asarray(initial, dtype='float64')
        return cls(initial, initial, 0.0, 0)


def frame_posterior(y_t, basis, activation_prior, max_iter=50, tol=1e-5):
    """VB posterior of the activations of one frame, basis held fixed."""
    return vb_infer(y_t, None, activation_prior, fixed_basis_posterior=basis,
                    max_iter=max_iter, tol=tol)


def state_likelihood(y_t, state_model, speech_model, activation_prior,
                     max_iter=50, tol=1e-5, basis=None):
    """Log-likelihood of a frame under one noise state.

    The Poisson likelihood is evaluated at the posterior means of the
    basis and the activations.

    Returns
    -------
    log_likelihood : float
    posterior : VbPosterior

    """
    if basis is None:
        if state_model.nbins != speech_model.nbins:
            raise ShapeError('speech and noise models differ in frequency bins')
        basis = speech_model.basis_posterior.concat(state_model.basis_posterior)
    posterior = frame_posterior(y_t, basis, activation_prior, max_iter, tol)
    rates = posterior.reconstruction()[:, 0]
    y_t = numpy.ravel(y_t)
    loglik = float(numpy.sum(poisson.logpmf(y_t, rates)))
    return loglik, posterior


def forward_update(forward_state, log_likelihoods, transition):
    """One step of the forward recursion in the log domain.

    The first step uses the initial probabilities as predictive
    distribution.

    Raises
    ------
    NumericalError
        If every state has zero likelihood.

    """
    if forward_state.frames == 0:
        predictive = forward_state.predictive
    else:
        predictive = transition.T @ forward_state.posterior
        predictive = predictive / predictive.sum()
    with numpy.errstate(divide='ignore'):
        joint = numpy.asarray(log_likelihoods, dtype='float64') + numpy.log(predictive)
    norm = logsumexp(joint)
    if not numpy.isfinite(norm):
        raise NumericalError('all state likelihoods are zero', forward_state.frames + 1)
    posterior = numpy.exp(joint - norm)
    posterior /= posterior.sum()
    return ForwardState(predictive, posterior, forward_state.log_scale + norm,
                        forward_state.frames + 1)


def state_gain(frame_posterior, speech_count):
    """Per-bin share of speech in the expected latent counts."""
    return speech_weights(frame_posterior.elog_basis,
                          frame_posterior.elog_activations, speech_count)[:, 0]


def mmse_state_estimate(y_t, frame_posterior, speech_count):
    """MMSE estimate of the speech magnitudes given one state."""
    return state_gain(frame_posterior, speech_count) * numpy.ravel(y_t)


@dataclass(frozen=True)
class HmmState:
    """Everything carried from one frame to the next."""
    forward: ForwardState
    smoothed: numpy.ndarray
    priors: tuple = None
    means: tuple = None


def start_state(denoiser):
    return HmmState(ForwardState.start(denoiser.initial), denoiser.initial.copy())


def next_priors(priors, means, y_t, alpha, speech_count, noise_shapes, phi_speech,
                bases=None, floor=EPS):
    """Activation priors of the current frame, one per state.

    Until a frame with counts arrives the priors are rebuilt from the
    current frame, fitted on the basis posterior means of each state.
    """
    if priors is None or not priors[0].primed:
        if bases is None:
            bases = [None] * len(noise_shapes)
        return tuple(
            ActivationPriorState.initial(
                y_t, phi_speech, phi, speech_count, num, alpha,
                None if basis is None else basis.mean, floor
            )
            for (num, phi), basis in zip(noise_shapes, bases)
        )
    return tuple(update_activation_prior(prior.with_alpha(alpha), mean)
                 for prior, mean in zip(priors, means))


def enhance_frame(denoiser, state, y_t, alpha=None):
    """Enhance one frame and update the state probabilities.

    Parameters
    ----------
    denoiser : HmmDenoiser
    state : HmmState
    y_t : numpy.ndarray
        Quantized noisy magnitudes of the frame.
    alpha : float, optional
        Smoothing factor of the activation priors.

    Returns
    -------
    s_hat : numpy.ndarray
    state : HmmState
    class_posterior : numpy.ndarray
        Smoothed state posterior.

    """
    config = denoiser.config
    if alpha is None:
        alpha = config.initial_alpha
    speech_count = denoiser.speech_model.num_basis
    noise_shapes = [(m.num_basis, m.activation_shape) for m in denoiser.noise_models]
    priors = next_priors(state.priors, state.means, y_t, alpha, speech_count,
                         noise_shapes, config.phi_speech, denoiser.bases,
                         config.theta_floor)

    logliks = numpy.empty(denoiser.num_states)
    gains = numpy.empty((len(y_t), denoiser.num_states))
    means = []
    for x in range(denoiser.num_states):
        logliks[x], posterior = state_likelihood(
            y_t, denoiser.noise_models[x], denoiser.speech_model,
            priors[x].prior(), config.max_iter, config.tol, denoiser.basis(x)
        )
        gains[:, x] = state_gain(posterior, speech_count)
        means.append(posterior.activations.mean[:, 0])

    forward = forward_update(state.forward, logliks, denoiser.transition)
    gain = numpy.clip(gains @ forward.posterior, 0.0, 1.0)
    s_hat = gain * y_t

    coef = denoiser.classifier_smoothing
    smoothed = coef * state.smoothed + (1 - coef) * forward.posterior
    smoothed /= smoothed.sum()
    new_state = replace(state, forward=forward, smoothed=smoothed,
                        priors=priors, means=tuple(means))
    return s_hat, new_state, smoothed


class HmmProcessor:
    """Frame processor collecting the classifier trace."""

    def __init__(self, denoiser):
        self.denoiser = denoiser
        self.state = start_state(denoiser)
        self.trace = []

    def process(self, y_t, alpha):
        s_hat, self.state, smoothed = enhance_frame(self.denoiser, self.state, y_t, alpha)
        self.trace.append(smoothed)
        return s_hat


def enhance_file(denoiser, noisy):
    """Enhance a noisy signal and classify its noise frame by frame.

    Returns
    -------
    enhanced : AudioSignal
    class_trace : numpy.ndarray
        M x T smoothed state posteriors.
    result : StreamResult

    """
    processor = HmmProcessor(denoiser)
    result = run_stream(noisy, processor, denoiser.config)
    if processor.trace:
        class_trace = numpy.column_stack(processor.trace)
    else:
        class_trace = numpy.zeros((denoiser.num_states, 0))
    result.extra['class_trace'] = class_trace
    counts = numpy.bincount(numpy.argmax(class_trace, axis=0),
                            minlength=denoiser.num_states)
    for label, count in zip(denoiser.labels, counts):
        _logger.info('noise %r most probable in %d frames', label, count)
    return result.enhanced, class_trace, result
