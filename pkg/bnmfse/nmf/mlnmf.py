#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Maximum likelihood NMF with the generalized Kullback-Leibler divergence."""

import logging
from dataclasses import dataclass

import numpy
from scipy.special import rel_entr

from bnmfse.constants import EPS
from bnmfse.exceptions import ContractError, ShapeError

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NmfFactors:
    """Basis (K x I) and activations (I x T) of a factorization."""
    basis: numpy.ndarray
    activations: numpy.ndarray
    divergences: tuple = ()

    @property
    def num_basis(self):
        return self.basis.shape[1]

    def reconstruction(self):
        return self.basis @ self.activations


def kl_divergence(y, yhat):
    """Generalized Kullback-Leibler divergence D(y || yhat).

    ``0 log 0`` is taken as 0. The result is infinite if ``yhat`` is
    zero where ``y`` is positive.
    """
    y = numpy.asarray(y, dtype='float64')
    yhat = numpy.asarray(yhat, dtype='float64')
    if y.shape != yhat.shape:
        raise ShapeError(f'shapes {y.shape} and {yhat.shape} differ')
    return float(numpy.sum(rel_entr(y, yhat) - y + yhat))


def _check_counts(y):
    y = numpy.asarray(y, dtype='float64')
    if y.ndim != 2:
        raise ShapeError('data must be a K x T matrix')
    if numpy.any(y < 0):
        raise ContractError('data must be nonnegative')
    return y


def _initial_activations(rng, y, basis):
    """Random activations matching the data scale column by column.

    Values are drawn frame after frame, so the first columns do not
    depend on the number of frames.
    """
    num, nframes = basis.shape[1], y.shape[1]
    draws = rng.uniform(0.5, 1.5, size=(nframes, num)).T
    scale = y.sum(axis=0) / max(basis.sum(), EPS)
    return draws * numpy.maximum(scale, EPS)


def kl_nmf(y, num_basis=None, iterations=30, fixed_basis=None,
           fixed_columns=None, init_basis=None, seed=0):
    """KL-NMF with multiplicative updates.

    Learned basis columns are normalized to unit L1 norm after every
    update, the activations absorbing the scale. All denominators are
    floored at 1e-12.

    Parameters
    ----------
    y : array_like
        Nonnegative K x T data.
    num_basis : int
        Number of learned basis vectors. Ignored if `fixed_basis` is given.
    iterations : int
        Number of multiplicative updates.
    fixed_basis : array_like, optional
        K x I basis. Only the activations are updated.
    fixed_columns : array_like, optional
        K x J block of basis columns held fixed in front of the
        learned ones.
    init_basis : array_like, optional
        Starting value for the learned columns.
    seed : int
        Seed of the random initialization.

    Returns
    -------
    NmfFactors
        The divergence after initialization and after every iteration
        is kept in `divergences`.

    """
    y = _check_counts(y)
    nbins, nframes = y.shape
    rng = numpy.random.default_rng(seed)

    if fixed_basis is not None:
        fixed = numpy.asarray(fixed_basis, dtype='float64')
        num_learned = 0
    else:
        if fixed_columns is None:
            fixed = numpy.zeros((nbins, 0))
        else:
            fixed = numpy.asarray(fixed_columns, dtype='float64')
        num_learned = num_basis if num_basis is not None else 0
        if num_learned < 1 and fixed.shape[1] == 0:
            raise ContractError('the number of basis vectors must be positive')

    if fixed.shape[0] != nbins:
        raise ShapeError(f'basis with {fixed.shape[0]} rows for data with {nbins} rows')

    num_total = fixed.shape[1] + num_learned
    if num_learned > 0 and num_total > min(nbins, nframes):
        _logger.warning('%d basis vectors for a %d x %d matrix', num_total, nbins, nframes)

    if num_learned > 0:
        if init_basis is not None:
            learned = numpy.asarray(init_basis, dtype='float64').copy()
            if learned.shape != (nbins, num_learned):
                raise ShapeError('initial basis has the wrong shape')
            learned = numpy.maximum(learned, EPS)
        else:
            learned = rng.uniform(0.5, 1.5, size=(nbins, num_learned))
        learned /= learned.sum(axis=0)
    else:
        learned = numpy.zeros((nbins, 0))

    if not numpy.any(y > 0):
        if num_learned > 0:
            learned = numpy.full((nbins, num_learned), 1.0 / nbins)
        basis = numpy.hstack([fixed, learned])
        return NmfFactors(basis, numpy.zeros((num_total, nframes)), (0.0,))

    basis = numpy.hstack([fixed, learned])
    if num_learned > 0 and fixed.shape[1] == 0:
        draws = rng.uniform(0.5, 1.5, size=(num_total, nframes))
        act = draws * (y.mean() * nbins / num_total)
    else:
        act = _initial_activations(rng, y, basis)

    nfix = fixed.shape[1]
    divergences = [kl_divergence(y, basis @ act)]
    for _ in range(iterations):
        ratio = y / numpy.maximum(basis @ act, EPS)
        act *= (basis.T @ ratio) / numpy.maximum(basis.sum(axis=0), EPS)[:, numpy.newaxis]

        if num_learned > 0:
            ratio = y / numpy.maximum(basis @ act, EPS)
            sub = basis[:, nfix:]
            sub *= (ratio @ act[nfix:].T) / numpy.maximum(act[nfix:].sum(axis=1), EPS)
            sub = numpy.maximum(sub, EPS)
            norm = sub.sum(axis=0)
            basis[:, nfix:] = sub / norm
            act[nfix:] *= norm[:, numpy.newaxis]

        divergences.append(kl_divergence(y, basis @ act))

    _logger.debug('KL-NMF, %d iterations, divergence %g', iterations, divergences[-1])
    return NmfFactors(basis, act, tuple(divergences))


def wiener_enhance(y, speech_basis, noise_basis, v_s, v_n):
    """Wiener-type estimate of the speech part of y.

    The gain is the share of the speech reconstruction in the total
    reconstruction. Bins with a zero total reconstruction get gain 0.
    Works on a single frame or on a K x T matrix.
    """
    y = numpy.asarray(y, dtype='float64')
    speech = numpy.asarray(speech_basis) @ numpy.asarray(v_s)
    noise = numpy.asarray(noise_basis) @ numpy.asarray(v_n)
    if speech.shape != y.shape or noise.shape != y.shape:
        raise ShapeError('reconstructions do not match the data')
    total = speech + noise
    gain = numpy.divide(speech, total, out=numpy.zeros_like(total), where=total > 0)
    return numpy.clip(gain, 0.0, 1.0) * y


def ml_enhance(y, speech_basis, noise_basis, iterations=100, seed=0):
    """Oracle ML enhancement of a K x T magnitude matrix.

    Activations are estimated frame by frame with KL-NMF over the
    fixed concatenated basis; the speech part follows from the
    Wiener-type filter.
    """
    speech_basis = numpy.asarray(speech_basis, dtype='float64')
    noise_basis = numpy.asarray(noise_basis, dtype='float64')
    basis = numpy.hstack([speech_basis, noise_basis])
    factors = kl_nmf(y, iterations=iterations, fixed_basis=basis, seed=seed)
    nspeech = speech_basis.shape[1]
    act = factors.activations
    return wiener_enhance(y, speech_basis, noise_basis, act[:nspeech], act[nspeech:])
