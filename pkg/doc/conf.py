# -*- coding: utf-8 -*-
#
# Sphinx configuration for the AdelicOkounkov documentation.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']
autodoc_default_options = {"members": True, "inherited-members": True,
                           "show-inheritance": True}
autodoc_member_order = "bysource"
autoclass_content = "both"

source_suffix = '.rst'
master_doc = 'index'

project = u'AdelicOkounkov'
copyright = u'2026, AdelicOkounkov developers'
version = '1.0.0'
release = '1.0.0'

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'nature'
htmlhelp_basename = 'AdelicOkounkovdoc'

man_pages = [
    ('index', 'adelic_okounkov', u'AdelicOkounkov Documentation',
     [u'AdelicOkounkov developers'], 1)
]
