#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Trained BNMF models and their FITS container."""

import logging
from dataclasses import dataclass

import numpy
from astropy.io import fits

from bnmfse.constants import FRAME_LEN, SAMPLE_RATE, TARGET_MAX
from bnmfse.exceptions import ContractError, FormatError
from .gamma import GammaMatrix

_logger = logging.getLogger(__name__)

MAGIC = 'BNMF'
FORMAT_VERSION = 1


@dataclass(frozen=True)
class BnmfModel:
    """Posterior of the basis matrix of one source.

    ``activation_shape`` is the mean posterior shape of the activations
    seen in training; it becomes the activation prior shape of the
    source during enhancement.
    """
    basis_posterior: GammaMatrix
    activation_shape: float
    label: str = ''
    sample_rate: int = SAMPLE_RATE
    frame_len: int = FRAME_LEN
    target_max: float = TARGET_MAX
    history: tuple = ()

    def __post_init__(self):
        if not self.activation_shape > 0:
            raise ContractError('activation shape must be positive')
        if not (self.label.isascii() and self.label.isprintable()):
            raise ContractError('model label must be printable ASCII')

    @property
    def nbins(self):
        return self.basis_posterior.dims[0]

    @property
    def num_basis(self):
        return self.basis_posterior.dims[1]

    @property
    def basis_mean(self):
        return self.basis_posterior.mean


def save_model(model, path):
    """Write a model as a FITS file.

    Floating point scalars are stored as text with `repr`, so they
    are read back exactly.
    """
    header = fits.Header()
    header['MAGIC'] = (MAGIC, 'bnmfse model file')
    header['FMTVERS'] = (FORMAT_VERSION, 'format version')
    header['LABEL'] = (model.label, 'source label')
    header['NFREQ'] = (model.nbins, 'frequency bins K')
    header['NBASIS'] = (model.num_basis, 'basis vectors I')
    header['PHISRC'] = (repr(float(model.activation_shape)), 'activation shape')
    header['SRATE'] = (model.sample_rate, 'sample rate [Hz]')
    header['FRAMELEN'] = (model.frame_len, 'frame length [samples]')
    header['TARGMAX'] = (repr(float(model.target_max)), 'quantization target max')
    for line in model.history:
        header.add_history(line)

    hdus = fits.HDUList([
        fits.PrimaryHDU(header=header),
        fits.ImageHDU(model.basis_posterior.shape, name='SHAPE'),
        fits.ImageHDU(model.basis_posterior.scale, name='SCALE'),
    ])
    hdus.writeto(path, overwrite=True)
    _logger.debug('model %r written to %s', model.label, path)


def load_model(path):
    """Read a model written by `save_model`.

    Raises
    ------
    FormatError
        If the file is not a model file of a supported version.

    """
    try:
        with fits.open(path, memmap=False) as hdul:
            header = hdul[0].header
            if header.get('MAGIC') != MAGIC:
                raise FormatError(f'{path} is not a model file')
            if header.get('FMTVERS') != FORMAT_VERSION:
                raise FormatError(
                    f'{path}: unsupported model format version {header.get("FMTVERS")}'
                )
            shape = numpy.array(hdul['SHAPE'].data, dtype='float64')
            scale = numpy.array(hdul['SCALE'].data, dtype='float64')
            history = tuple(str(card) for card in header.get('HISTORY', []))
            model = BnmfModel(
                GammaMatrix(shape, scale),
                activation_shape=float(header['PHISRC']),
                label=header['LABEL'],
                sample_rate=int(header['SRATE']),
                frame_len=int(header['FRAMELEN']),
                target_max=float(header['TARGMAX']),
                history=history,
            )
            if shape.shape != (header['NFREQ'], header['NBASIS']):
                raise FormatError(f'{path}: basis dimensions do not match the header')
    except FileNotFoundError:
        raise
    except (KeyError, ValueError) as error:
        raise FormatError(f'{path}: malformed model file, {error}') from error
    except OSError as error:
        raise FormatError(f'{path}: {error}') from error
    return model


def read_model_list(path):
    """Model paths listed in a text file, one per line.

    Empty lines and lines starting with '#' are skipped.
    """
    paths = []
    with open(path) as fd:
        for line in fd:
            line = line.strip()
            if line and not line.startswith('#'):
                paths.append(line)
    if not paths:
        raise FormatError(f'{path}: no model paths listed')
    return paths
