#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#


"""Extra logging handlers for the bnmfse logging system."""


import dataclasses
import functools
import logging


class HistoryHandler(logging.Handler):
    """Logging handler storing formatted records in a list.

    The records end up as HISTORY cards of the model file.
    """
    def __init__(self, history=None):
        logging.Handler.__init__(self)
        self.history = [] if history is None else history
        self.setFormatter(logging.Formatter('%(message)s'))

    def emit(self, record):
        msg = self.format(record)
        self.history.append(msg)


def log_to_history(logger, name='history'):
    """Decorate a function returning a model, storing its log as history."""

    def log_to_history_decorator(method):

        @functools.wraps(method)
        def l2h_method(*args, **kwds):
            fh = HistoryHandler()
            fh.setLevel(logging.INFO)
            logger.addHandler(fh)
            # the logger may be silent by default
            old_level = logger.level
            if logger.getEffectiveLevel() > logging.INFO:
                logger.setLevel(logging.INFO)

            try:
                result = method(*args, **kwds)
                previous = tuple(getattr(result, name, ()))
                return dataclasses.replace(
                    result, **{name: previous + tuple(fh.history)}
                )
            finally:
                logger.setLevel(old_level)
                logger.removeHandler(fh)
        return l2h_method

    return log_to_history_decorator
