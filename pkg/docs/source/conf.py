# Sphinx configuration for the tvauction API docs.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath('../..'))

project = 'tvauction'
copyright = '2018, Yu Yin'
author = 'Yu Yin'
version = ''
release = '0.1'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
]

autoclass_content = 'both'
autodoc_default_options = {'members': True, 'undoc-members': True}
autodoc_member_order = 'groupwise'

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']
pygments_style = 'friendly'

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'pandas': ('https://pandas.pydata.org/docs/', None),
}
