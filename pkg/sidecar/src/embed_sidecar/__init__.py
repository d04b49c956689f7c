"""Model-inference sidecar: embeds sentences for the lexicon pipeline and
emits its binary embedding format, as files or over HTTP.
"""

__version__ = "0.1.0"
