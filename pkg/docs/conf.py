# Django Curve Surfacing documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import os
import sys

import django


here = os.path.abspath(os.path.dirname(__file__))
sys.path.insert(0, here)
sys.path.insert(0, os.path.dirname(here))

os.environ["DJANGO_SETTINGS_MODULE"] = "tests.settings"

django.setup()

import curve_surfacing  # noqa: E402


# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.todo', 'sphinx.ext.coverage', 'sphinx.ext.intersphinx']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'Django Curve Surfacing'
copyright = u'2026, Django Curve Surfacing contributors'

version = curve_surfacing.__version__
release = version

exclude_patterns = ['_build']

pygments_style = 'sphinx'

intersphinx_mapping = {
    'python3': ('https://docs.python.org/3', None),
    'django': ('https://docs.djangoproject.com/en/stable/', 'https://docs.djangoproject.com/en/stable/_objects/'),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}


# -- Options for HTML output ---------------------------------------------------

html_theme = 'classic'

html_static_path = []

htmlhelp_basename = 'DjangoCurveSurfacingdoc'


# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
  ('index', 'DjangoCurveSurfacing.tex', u'Django Curve Surfacing Documentation',
   u'Django Curve Surfacing contributors', 'manual'),
]


# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'djangocurvesurfacing', u'Django Curve Surfacing Documentation',
     [u'Django Curve Surfacing contributors'], 1)
]
