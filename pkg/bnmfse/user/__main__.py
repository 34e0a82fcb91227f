#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Command line interface of bnmfse."""

if __name__ == '__main__':
    import sys

    from bnmfse.user.cli import main

    sys.exit(main())
