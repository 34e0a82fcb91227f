#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Default logging configuration for the bnmfse CLI.

Messages go to stderr so that report tables written to stdout stay
machine readable. Training progress from ``bnmfse.nmf`` carries a
timestamp, everything else is terse.
"""


def logconf(debug=False):
    """Return a :func:`logging.config.dictConfig` dictionary."""
    level = 'DEBUG' if debug else 'INFO'
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'terse': {'format': '%(levelname)s: %(message)s'},
            'progress': {'format': '%(asctime)s %(name)s %(levelname)s %(message)s'},
        },
        'handlers': {
            'stderr': {
                'class': 'logging.StreamHandler',
                'formatter': 'terse',
                'stream': 'ext://sys.stderr',
                'level': level,
            },
            'stderr_progress': {
                'class': 'logging.StreamHandler',
                'formatter': 'progress',
                'stream': 'ext://sys.stderr',
                'level': level,
            },
        },
        'loggers': {
            'bnmfse': {'handlers': ['stderr'], 'level': level, 'propagate': False},
            'bnmfse.nmf': {'handlers': ['stderr_progress'], 'level': level, 'propagate': False},
        },
        'root': {'handlers': ['stderr'], 'level': 'WARNING'},
    }
