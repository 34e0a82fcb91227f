#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#


"""Speech enhancement with Bayesian nonnegative matrix factorization."""


import logging

from .version import version

__version__ = version

# Top level NullHandler
logging.getLogger("bnmfse").addHandler(logging.NullHandler())
