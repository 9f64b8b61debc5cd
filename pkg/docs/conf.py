# pmelab.py documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os
import re

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
]

autodoc_member_order = 'bysource'
autodoc_typehints = 'none'

intersphinx_mapping = {
    'py': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'pmelab.py'
copyright = '2022-现在, foxwhite25'

# The short X.Y version.
version = ''
with open('../pmelab/__init__.py') as f:
    version = re.search(r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]', f.read(), re.MULTILINE).group(1)

# The full version, including alpha/beta/rc tags.
release = version

language = 'zh_CN'
exclude_patterns = ['_build']
pygments_style = 'friendly'

# -- Options for HTML output ----------------------------------------------

html_theme = 'basic'
htmlhelp_basename = 'pmelab.pydoc'
