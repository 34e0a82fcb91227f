#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Where the CLI looks for its ``bnmfse.cfg`` settings file."""

import os


def xdg_config_home(environ=None):
    environ = os.environ if environ is None else environ
    default = os.path.join(environ.get('HOME', '/'), '.config')
    return environ.get('XDG_CONFIG_HOME') or default


def config_paths(environ=None):
    """Candidate settings files, later entries override earlier ones."""
    return [
        os.path.join(xdg_config_home(environ), 'bnmfse', 'bnmfse.cfg'),
        '.bnmfse.cfg',
    ]
