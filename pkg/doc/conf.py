#!/usr/bin/env python3
#
# tqgate documentation build configuration file.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

extensions = [
    "recommonmark",
    "sphinx.ext.mathjax",
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "numpydoc",
]
numpydoc_show_class_members = False

templates_path = ["_templates"]

source_suffix = {
    ".rst": "restructuredtext",
    ".md": "markdown",
}

main_doc = "index"

project = "tqgate"
copyright = "2026, The tqgate Team"
author = "The tqgate Team"

with open(os.path.join("..", "tqgate", "__init__.py")) as f:
    version = next(
        (line.split('"')[1] for line in f if line.startswith("__version__")),
        "vUndefined",
    )
release = version

exclude_patterns = ["_build"]

pygments_style = "sphinx"

# -- Options for HTML output ----------------------------------------------

on_rtd = os.environ.get("READTHEDOCS", None) == "True"
if not on_rtd:
    html_theme = "sphinx_rtd_theme"

htmlhelp_basename = "tqgatedoc"

# -- Options for LaTeX and manual page output -----------------------------

latex_documents = [
    (main_doc, "tqgate.tex", "tqgate Documentation", author, "manual"),
]

man_pages = [(main_doc, "tqgate", "tqgate Documentation", [author], 1)]
