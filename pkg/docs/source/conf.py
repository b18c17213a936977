# Configuration file for the Sphinx documentation builder of dcopt.
import os
import sys

import dcopt

sys.path.append(os.path.dirname(os.path.realpath(__file__)))

project = 'dcopt'
copyright = '2026, dcopt developers'  # noqa
author = 'dcopt developers'

version = dcopt.__version__
release = dcopt.__version__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.viewcode',
    'nbsphinx',
]

templates_path = ['_templates']
source_suffix = ['.rst', '.md']
source_parsers = {
    '.md': 'recommonmark.parser.CommonMarkParser',
}
master_doc = 'index'
language = None
exclude_patterns = ['_build', '**.ipynb_checkpoints']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'dcoptdoc'

latex_documents = [
    (master_doc, 'dcopt.tex', 'dcopt Documentation', author, 'manual'),
]
man_pages = [
    (master_doc, 'dcopt', 'dcopt Documentation', [author], 1)
]
texinfo_documents = [
    (master_doc, 'dcopt', 'dcopt Documentation',
     author, 'dcopt', 'Decentralized composite optimization simulator.',
     'Miscellaneous'),
]
intersphinx_mapping = {'https://docs.python.org/': None}


def setup(app):
    # Hack to import something from this dir. Apparently we're in a weird
    # situation where you get a __name__  is not in globals KeyError
    # if you just try to do a relative import...
    sys.path.append(os.path.dirname(os.path.realpath(__file__)))
