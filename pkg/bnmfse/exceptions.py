#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#


"""Exceptions for the bnmfse package."""


class Error(Exception):
    """Base class for exceptions in the bnmfse package."""
    pass


class FormatError(Error):
    """Unsupported or malformed file contents."""
    pass


class SampleRateError(FormatError):
    """Audio sampled at a rate other than the pipeline rate."""
    pass


class ShapeError(Error, ValueError):
    """Inconsistent array dimensions."""
    pass


class ContractError(Error, ValueError):
    """A precondition of an operation does not hold."""
    pass


class NumericalError(Error):
    """Non finite values during an iterative computation."""

    def __init__(self, msg, iteration=None):
        super().__init__(msg)
        self.iteration = iteration

    def __str__(self):
        msg = super().__str__()
        if self.iteration is None:
            return msg
        return f'{msg} (iteration {self.iteration})'


class UndefinedWeightError(NumericalError):
    """Latent weights with every exponent equal to -inf."""
    pass


class DegenerateError(Error):
    """Inputs with zero power where a positive power is required."""
    pass
