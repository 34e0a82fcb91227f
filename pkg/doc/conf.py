# -*- coding: utf-8 -*-
#
# bnmfse documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

sys.path.insert(0, os.path.abspath('../'))

# -- General configuration ----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.doctest',
              'sphinx.ext.intersphinx', 'sphinx.ext.todo',
              'sphinx.ext.imgmath', 'sphinx.ext.napoleon']

source_suffix = '.rst'

master_doc = 'index'

project = u'bnmfse'
copyright = u'2025-2026, The bnmfse developers'

version = '0.3'
release = '0.3.dev0'

exclude_patterns = ['_build']

pygments_style = 'sphinx'

modindex_common_prefix = ['bnmfse.']

# -- Options for HTML output --------------------------------------------------

html_theme = 'default'

htmlhelp_basename = 'bnmfsedoc'

man_pages = [
    ('index', 'bnmfse', u'bnmfse Documentation',
     [u'The bnmfse developers'], 1)
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None)}
