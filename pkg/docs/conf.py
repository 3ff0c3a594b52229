# cochannel documentation build configuration file.
#
# Only the settings that differ from the Sphinx defaults are listed.

import cochannel

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.intersphinx', 'sphinx.ext.mathjax']

source_suffix = '.rst'
master_doc = 'index'

project = 'cochannel'
copyright = 'cochannel authors'
version = cochannel.__version__
release = version

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'default'
htmlhelp_basename = 'cochanneldoc'

autodoc_member_order = 'bysource'
autodoc_typehints = 'description'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'sklearn': ('https://scikit-learn.org/stable/', None),
}


def setup(app):
    app.connect('autodoc-skip-member', skip_member)


def skip_member(app, what, name, obj, skip, options):
    # undocumented helpers and anything marked private stay out of the API page
    return skip or getattr(obj, '__doc__', None) is None or getattr(obj, '__private__', False) is True
