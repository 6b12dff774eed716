# flake8: noqa
# Configuration file for the Sphinx documentation builder.
#
# This file only contains a selection of the most common options. For a full
# list see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

from importlib.metadata import PackageNotFoundError, version as package_version

# -- Project information ------------------------------------------------------

project = "qnet"
copyright = "2026"
author = "qnet developers"

# The full version, including alpha/beta/rc tags
try:
    release = package_version("qnet")
except PackageNotFoundError:
    release = "0.1.0"
# The short X.Y version.
version = release.rsplit(".", 1)[0]

# -- General configuration ----------------------------------------------------

extensions = [
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.autodoc",
    "sphinx.ext.autosectionlabel",
    "sphinx.ext.mathjax",
    "myst_parser",
]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

autodoc_member_order = "bysource"

# -- Options for HTML output --------------------------------------------------

html_theme = "sphinx_book_theme"
html_title = "qnet"
html_theme_options = {
    "home_page_in_toc": True,
    "show_toc_level": 1,
    "toc_title": "Navigation",
    "use_download_button": False,
}
