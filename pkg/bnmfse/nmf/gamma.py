#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Elementwise gamma distributions over matrices."""

from dataclasses import dataclass

import numpy
from scipy.special import digamma, gammaln, polygamma

from bnmfse.exceptions import ContractError, NumericalError


@dataclass(frozen=True)
class GammaMatrix:
    """Independent gamma distributions, one per matrix element.

    Parameters are shape and scale; the rate is ``1 / scale``.
    Arrays are broadcast against each other and stored with the
    common shape.
    """
    shape: numpy.ndarray
    scale: numpy.ndarray

    def __post_init__(self):
        shape, scale = numpy.broadcast_arrays(
            numpy.asarray(self.shape, dtype='float64'),
            numpy.asarray(self.scale, dtype='float64')
        )
        if not (numpy.all(shape > 0) and numpy.all(scale > 0)):
            raise ContractError('gamma parameters must be positive')
        object.__setattr__(self, 'shape', numpy.array(shape))
        object.__setattr__(self, 'scale', numpy.array(scale))

    @classmethod
    def from_mean(cls, shape, mean):
        """Gamma distributions with given shape and mean."""
        shape = numpy.asarray(shape, dtype='float64')
        return cls(shape, numpy.asarray(mean, dtype='float64') / shape)

    @property
    def dims(self):
        return self.shape.shape

    @property
    def rate(self):
        return 1.0 / self.scale

    @property
    def mean(self):
        return self.shape * self.scale

    @property
    def variance(self):
        return self.shape * self.scale ** 2

    @property
    def elog(self):
        """Expected value of the logarithm."""
        return digamma(self.shape) + numpy.log(self.scale)

    def __getitem__(self, key):
        return GammaMatrix(self.shape[key], self.scale[key])

    def normalized(self):
        """Same shapes, scales set so every column mean sums to one."""
        total = self.mean.sum(axis=0)
        if numpy.any(total <= 0) or not numpy.all(numpy.isfinite(total)):
            raise NumericalError('column means cannot be normalized')
        return GammaMatrix(self.shape, self.scale / total)

    def concat(self, other, axis=1):
        """Join with another GammaMatrix, by default along columns."""
        return GammaMatrix(
            numpy.concatenate([self.shape, other.shape], axis=axis),
            numpy.concatenate([self.scale, other.scale], axis=axis)
        )


def gamma_term(prior, posterior, mean=None, elog=None):
    """Sum of E_q[log p(x)] - E_q[log q(x)] over the elements.

    ``prior`` is broadcast against ``posterior``.
    """
    if mean is None:
        mean = posterior.mean
    if elog is None:
        elog = posterior.elog
    a0 = prior.shape
    b0 = prior.rate
    a = posterior.shape
    b = posterior.rate
    value = (
        (a0 - a) * elog - (b0 - b) * mean
        + a0 * numpy.log(b0) - gammaln(a0)
        - a * numpy.log(b) + gammaln(a)
    )
    return numpy.sum(numpy.broadcast_to(value, posterior.dims))


def gamma_shape_newton(stat, max_iter=100, tol=1e-12):
    """Maximum likelihood gamma shape from ``log mean(x) - mean(log x)``.

    Solves ``log a - digamma(a) = stat`` with generalized Newton
    iterations on ``1 / a``, starting from the usual closed-form
    approximation.

    Parameters
    ----------
    stat : float or array
        Positive statistic ``log mean(x) - mean(log x)``.

    Returns
    -------
    float or array
        Shape parameter.

    Raises
    ------
    ContractError
        If the statistic is not positive.
    NumericalError
        If the iteration does not converge.

    """
    stat = numpy.asarray(stat, dtype='float64')
    if not numpy.all(stat > 0):
        raise ContractError('gamma shape statistic must be positive')
    shape = (3 - stat + numpy.sqrt((stat - 3) ** 2 + 24 * stat)) / (12 * stat)
    for it in range(max_iter):
        fval = numpy.log(shape) - digamma(shape) - stat
        deriv = 1.0 / shape - polygamma(1, shape)
        new = 1.0 / (1.0 / shape + fval / (shape ** 2 * deriv))
        if not numpy.all(numpy.isfinite(new)) or numpy.any(new <= 0):
            raise NumericalError('gamma shape iteration diverged', it)
        done = numpy.all(numpy.abs(new - shape) <= tol * shape)
        shape = new
        if done:
            break
    else:
        raise NumericalError('gamma shape iteration did not converge', max_iter)
    if shape.ndim == 0:
        return float(shape)
    return shape


def fit_gamma_prior(mean, elog):
    """Tied gamma prior maximizing the expected log density.

    Given expectations ``E[x]`` and ``E[log x]`` of a set of variables,
    returns the shape and the mean of the single gamma distribution
    maximizing the sum of their expected log densities.
    """
    mean = numpy.asarray(mean, dtype='float64')
    elog = numpy.asarray(elog, dtype='float64')
    avg = mean.mean()
    stat = numpy.log(avg) - elog.mean()
    return gamma_shape_newton(stat), avg
