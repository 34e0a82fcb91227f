#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Gamma-Poisson Bayesian NMF with variational Bayes inference.

The data y (K x T, integer counts) are modelled as the sum over i of
latent Poisson counts with means ``B_ki V_it``. B and V have
independent gamma priors. The mean-field posterior keeps B and V
gamma distributed and the latent counts multinomial.
"""

import logging
from dataclasses import dataclass

import numpy
from scipy.special import gammaln, logsumexp, rel_entr

from bnmfse.constants import EPS
from bnmfse.exceptions import ContractError, NumericalError, ShapeError
from bnmfse.exceptions import UndefinedWeightError
from bnmfse.logger import log_to_history
from .gamma import GammaMatrix, gamma_term, fit_gamma_prior
from .mlnmf import kl_nmf
from .model import BnmfModel

_logger = logging.getLogger(__name__)

# Floor of the shifted reconstruction before taking logs
_TINY = 1e-300


@dataclass(frozen=True)
class VbPosterior:
    """Variational posterior of the basis and the activations."""
    basis: GammaMatrix
    activations: GammaMatrix
    bound_trace: tuple = ()
    iterations: int = 0

    @property
    def elog_basis(self):
        return self.basis.elog

    @property
    def elog_activations(self):
        return self.activations.elog

    @property
    def bound(self):
        return self.bound_trace[-1] if self.bound_trace else numpy.nan

    def reconstruction(self):
        """Poisson means at the posterior means."""
        return self.basis.mean @ self.activations.mean


def as_counts(y):
    """Data as a float64 matrix, checking integer nonnegative values."""
    y = getattr(y, 'magnitudes', y)
    y = numpy.asarray(y, dtype='float64')
    if y.ndim == 1:
        y = y[:, numpy.newaxis]
    if y.ndim != 2:
        raise ShapeError('data must be a K x T matrix')
    if numpy.any(y < 0) or numpy.any(y != numpy.rint(y)):
        raise ContractError('data must be nonnegative integers')
    return y


def _shifted_exp(elog_basis, elog_act):
    """exp(E log B) and exp(E log V) shifted to avoid underflow.

    Rows of the basis and columns of the activations are shifted by
    their maxima; the shifts are returned so the log reconstruction
    can be recovered.
    """
    row_shift = elog_basis.max(axis=1, keepdims=True)
    col_shift = elog_act.max(axis=0, keepdims=True)
    return (numpy.exp(elog_basis - row_shift), numpy.exp(elog_act - col_shift),
            row_shift, col_shift)


def expected_counts(y, posterior):
    """Posterior means of the latent counts, a K x I x T array."""
    y = as_counts(y)
    lb, lv, _, _ = _shifted_exp(posterior.elog_basis, posterior.elog_activations)
    weights = lb[:, :, numpy.newaxis] * lv[numpy.newaxis, :, :]
    total = weights.sum(axis=1, keepdims=True)
    return weights / numpy.maximum(total, _TINY) * y[:, numpy.newaxis, :]


def lower_bound(y, basis_prior, activation_prior, basis, activations):
    """Variational lower bound with the optimal latent count posterior."""
    eb, ev = basis.mean, activations.mean
    elog_b, elog_v = basis.elog, activations.elog
    lb, lv, row_shift, col_shift = _shifted_exp(elog_b, elog_v)
    log_recon = numpy.log(numpy.maximum(lb @ lv, _TINY)) + row_shift + col_shift
    bound = numpy.sum(y * log_recon - gammaln(y + 1))
    bound -= numpy.sum(eb.sum(axis=0) * ev.sum(axis=1))
    bound += gamma_term(activation_prior, activations, ev, elog_v)
    bound += gamma_term(basis_prior, basis, eb, elog_b)
    return float(bound)


def vb_infer(y, basis_prior, activation_prior, fixed_basis_posterior=None,
             max_iter=200, tol=1e-5, basis_init=None, activation_init=None,
             fixed_columns=0, seed=0):
    """Variational Bayes posterior of a gamma-Poisson NMF model.

    Every iteration updates the activation posterior and then, unless
    the basis is fixed, the basis posterior, recomputing the latent
    count responsibilities before each update. Iterations stop when
    the relative change of the lower bound falls below `tol`.

    Parameters
    ----------
    y : MagnitudeSpectrogram or array_like
        Integer counts, K x T.
    basis_prior : GammaMatrix or None
        Prior of the K x I basis. May be None with a fixed basis.
    activation_prior : GammaMatrix
        Prior of the I x T activations.
    fixed_basis_posterior : GammaMatrix, optional
        Basis posterior held fixed; only activations are inferred.
    max_iter : int
    tol : float
    basis_init, activation_init : GammaMatrix, optional
        Starting posteriors. By default the activations start at the
        prior mean with unit shape and the basis at the prior mean times
        U(0.5, 1.5), also with unit shape. Starting at a prior of small
        shape would give those components no responsibility at all.
    fixed_columns : int
        The first `fixed_columns` basis columns keep their value in
        `basis_init`.
    seed : int
        Seed of the default basis start.

    Returns
    -------
    VbPosterior

    Raises
    ------
    ContractError
        If y is not made of nonnegative integers.
    NumericalError
        If non finite values appear; the iteration is reported.

    """
    y = as_counts(y)
    nbins, nframes = y.shape
    update_basis = fixed_basis_posterior is None
    if basis_prior is None and update_basis:
        raise ContractError('a basis prior is required to learn the basis')

    if fixed_basis_posterior is not None:
        basis = fixed_basis_posterior
    elif basis_init is not None:
        basis = basis_init
    else:
        rng = numpy.random.default_rng(seed)
        jitter = rng.uniform(0.5, 1.5, size=basis_prior.dims)
        basis = GammaMatrix.from_mean(1.0, basis_prior.mean * jitter)

    if basis.dims[0] != nbins:
        raise ShapeError(f'basis with {basis.dims[0]} rows for data with {nbins} rows')
    num = basis.dims[1]
    if activation_prior.dims != (num, nframes):
        raise ShapeError(
            f'activation prior {activation_prior.dims} does not match {(num, nframes)}'
        )
    if update_basis and basis_prior.dims != (nbins, num):
        raise ShapeError('basis prior does not match the basis')
    if fixed_columns > 0 and basis_init is None:
        raise ContractError('fixed columns need an initial basis')

    if activation_init is not None:
        activations = activation_init
    else:
        activations = GammaMatrix.from_mean(1.0, activation_prior.mean)
    if basis_prior is None:
        basis_prior = basis
    if update_basis:
        kept_shape = basis.shape[:, :fixed_columns]
        kept_scale = basis.scale[:, :fixed_columns]

    prior_rate_v = activation_prior.rate
    trace = []
    it = 0
    for it in range(1, max_iter + 1):
        lb, lv, _, _ = _shifted_exp(basis.elog, activations.elog)
        ratio = y / numpy.maximum(lb @ lv, _TINY)
        shape_v = activation_prior.shape + lv * (lb.T @ ratio)
        rate_v = prior_rate_v + basis.mean.sum(axis=0)[:, numpy.newaxis]
        activations = _checked(shape_v, rate_v, it)

        if update_basis:
            lb, lv, _, _ = _shifted_exp(basis.elog, activations.elog)
            ratio = y / numpy.maximum(lb @ lv, _TINY)
            shape_b = basis_prior.shape + lb * (ratio @ lv.T)
            rate_b = basis_prior.rate + activations.mean.sum(axis=1)
            if fixed_columns > 0:
                shape_b[:, :fixed_columns] = kept_shape
                rate_b = numpy.broadcast_to(rate_b, shape_b.shape).copy()
                rate_b[:, :fixed_columns] = 1.0 / kept_scale
            basis = _checked(shape_b, rate_b, it)

        bound = lower_bound(y, basis_prior, activation_prior, basis, activations)
        if not numpy.isfinite(bound):
            raise NumericalError('lower bound is not finite', it)
        trace.append(bound)
        if len(trace) > 1:
            change = abs(trace[-1] - trace[-2])
            if change <= tol * max(abs(trace[-2]), EPS):
                break

    return VbPosterior(basis, activations, tuple(trace), it)


def _checked(shape, rate, iteration):
    if not (numpy.all(numpy.isfinite(shape)) and numpy.all(numpy.isfinite(rate))):
        raise NumericalError('non finite gamma parameters', iteration)
    try:
        return GammaMatrix(shape, 1.0 / rate)
    except ContractError as error:
        raise NumericalError(str(error), iteration) from error


def expected_latent_weights(elog_basis_row, elog_activation_col, speech_count):
    """Share of the speech components in the expected latent counts.

    Parameters
    ----------
    elog_basis_row : array_like
        ``E[log B_ki]`` for one frequency bin k, all I components.
    elog_activation_col : array_like
        ``E[log V_it]`` for one frame t.
    speech_count : int
        Number of leading components that belong to speech.

    Returns
    -------
    speech_weight : float
        Weight in [0, 1].
    weights : numpy.ndarray
        Normalized weight of every component.

    Raises
    ------
    UndefinedWeightError
        If every exponent is -inf.

    """
    exponents = numpy.asarray(elog_basis_row, dtype='float64') + \
        numpy.asarray(elog_activation_col, dtype='float64')
    with numpy.errstate(invalid='ignore'):
        norm = logsumexp(exponents)
    if not numpy.isfinite(norm):
        raise UndefinedWeightError('all latent weight exponents are -inf')
    weights = numpy.exp(exponents - norm)
    speech = float(numpy.clip(weights[:speech_count].sum(), 0.0, 1.0))
    return speech, weights


def speech_weights(elog_basis, elog_activations, speech_count):
    """Speech weights for every bin of every frame, a K x T matrix.

    Frame by frame equivalent of `expected_latent_weights`.
    """
    elog_basis = numpy.asarray(elog_basis, dtype='float64')
    elog_activations = numpy.asarray(elog_activations, dtype='float64')
    nbins, nframes = elog_basis.shape[0], elog_activations.shape[1]
    result = numpy.empty((nbins, nframes))
    for t in range(nframes):
        exponents = elog_basis + elog_activations[:, t]
        with numpy.errstate(invalid='ignore'):
            norm = logsumexp(exponents, axis=1)
        if not numpy.all(numpy.isfinite(norm)):
            raise UndefinedWeightError('all latent weight exponents are -inf')
        speech = logsumexp(exponents[:, :speech_count], axis=1)
        result[:, t] = numpy.exp(speech - norm)
    return numpy.clip(result, 0.0, 1.0)


@dataclass(frozen=True)
class TrainingConfig:
    """Priors and iteration limits of model training.

    The prior means are set from the data: ``1 / K`` for the basis and
    ``mean(y) K / I`` for the activations.
    """
    basis_shape: float = 0.1
    activation_shape: float = 0.1
    init_iterations: int = 30
    max_iter: int = 200
    tol: float = 1e-5
    max_restarts: int = 3
    collapse_ratio: float = 1e-10
    optimize_hyperparameters: bool = False
    hyper_rounds: int = 3

    def __post_init__(self):
        if self.basis_shape <= 0 or self.activation_shape <= 0:
            raise ContractError('prior shapes must be positive')
        if self.init_iterations < 0 or self.max_iter < 1:
            raise ContractError('iteration counts must be positive')
        if self.tol <= 0:
            raise ContractError('tolerance must be positive')


def training_priors(y, num_basis, config):
    """Broad basis and activation priors scaled to the data."""
    nbins, nframes = y.shape
    basis_prior = GammaMatrix.from_mean(
        numpy.full((nbins, num_basis), config.basis_shape), 1.0 / nbins
    )
    act_mean = y.mean() * nbins / num_basis
    activation_prior = GammaMatrix.from_mean(
        numpy.full((num_basis, nframes), config.activation_shape), act_mean
    )
    return basis_prior, activation_prior


def collapsed_columns(posterior, ratio=1e-10):
    """Indices of basis columns whose mean collapsed to almost zero."""
    col_mean = posterior.basis.mean.mean(axis=0)
    threshold = ratio * numpy.median(col_mean)
    return numpy.flatnonzero(col_mean < threshold)


def _reseed(y, posterior, columns):
    """Restart collapsed columns from the worst reconstructed frames."""
    recon = posterior.reconstruction()
    error = numpy.sum(rel_entr(y, numpy.maximum(recon, EPS)) - y + recon, axis=0)
    order = numpy.argsort(-error, kind='stable')
    b_shape = posterior.basis.shape.copy()
    b_mean = posterior.basis.mean.copy()
    v_shape = posterior.activations.shape.copy()
    v_mean = posterior.activations.mean.copy()
    for col, frame in zip(columns, order):
        total = y[:, frame].sum()
        b_mean[:, col] = (y[:, frame] + 1.0) / (total + y.shape[0])
        b_shape[:, col] = 1.0
        v_mean[col] = EPS
        v_mean[col, frame] = max(total, 1.0)
        v_shape[col] = 1.0
        _logger.info('basis vector %d restarted from frame %d', col, frame)
    return (GammaMatrix.from_mean(b_shape, b_mean),
            GammaMatrix.from_mean(v_shape, v_mean))


@log_to_history(_logger)
def train_model(spectrogram, num_basis, label='', config=None, seed=0):
    """Train the basis posterior of one source.

    The posterior means start from a few KL-NMF iterations, then
    variational Bayes runs to convergence under broad priors.

    Parameters
    ----------
    spectrogram : MagnitudeSpectrogram or array_like
        Quantized K x T training data.
    num_basis : int
        Number of basis vectors.
    label : str
        Name of the source.
    config : TrainingConfig, optional
    seed : int
        Seed of the KL-NMF initialization.

    Returns
    -------
    BnmfModel

    """
    if config is None:
        config = TrainingConfig()
    if num_basis < 1:
        raise ContractError('the number of basis vectors must be positive')
    y = as_counts(spectrogram)
    nbins, nframes = y.shape
    if y.size == 0:
        raise ContractError('empty training spectrogram')
    if not numpy.any(y > 0):
        raise ContractError('training spectrogram is all zero')

    _logger.info('training model %r, %d basis vectors, %d x %d data',
                 label, num_basis, nbins, nframes)
    basis_prior, activation_prior = training_priors(y, num_basis, config)

    factors = kl_nmf(y, num_basis, iterations=config.init_iterations, seed=seed)
    _logger.info('KL-NMF start, %d iterations, divergence %.6e',
                 config.init_iterations, factors.divergences[-1])
    basis_init = GammaMatrix.from_mean(1.0, numpy.maximum(factors.basis, EPS))
    act_init = GammaMatrix.from_mean(1.0, numpy.maximum(factors.activations, EPS))

    posterior = vb_infer(y, basis_prior, activation_prior,
                         max_iter=config.max_iter, tol=config.tol,
                         basis_init=basis_init, activation_init=act_init)
    _logger.info('VB, %d iterations, bound %.9e', posterior.iterations, posterior.bound)

    for _ in range(config.max_restarts):
        columns = collapsed_columns(posterior, config.collapse_ratio)
        if len(columns) == 0:
            break
        basis_init, act_init = _reseed(y, posterior, columns)
        posterior = vb_infer(y, basis_prior, activation_prior,
                             max_iter=config.max_iter, tol=config.tol,
                             basis_init=basis_init, activation_init=act_init)
        _logger.info('VB, %d iterations, bound %.9e', posterior.iterations, posterior.bound)

    if config.optimize_hyperparameters:
        for _ in range(config.hyper_rounds):
            basis_prior, activation_prior = refine_priors(posterior)
            posterior = vb_infer(y, basis_prior, activation_prior,
                                 max_iter=config.max_iter, tol=config.tol,
                                 basis_init=posterior.basis,
                                 activation_init=posterior.activations)
            _logger.info('VB with refined priors, bound %.9e', posterior.bound)

    activation_shape = float(posterior.activations.shape.mean())
    _logger.info('activation shape %.6g', activation_shape)
    return BnmfModel(posterior.basis, activation_shape, label=label)


def refine_priors(posterior):
    """Tied gamma priors fitted to the current posterior expectations."""
    b_shape, b_mean = fit_gamma_prior(posterior.basis.mean, posterior.basis.elog)
    v_shape, v_mean = fit_gamma_prior(posterior.activations.mean,
                                      posterior.activations.elog)
    _logger.info('refined priors, basis shape %.6g, activation shape %.6g',
                 b_shape, v_shape)
    basis_prior = GammaMatrix.from_mean(
        numpy.full(posterior.basis.dims, b_shape), b_mean
    )
    activation_prior = GammaMatrix.from_mean(
        numpy.full(posterior.activations.dims, v_shape), v_mean
    )
    return basis_prior, activation_prior
