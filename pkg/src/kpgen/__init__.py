"""Unsupervised keyphrase generation.

Candidate phrases come from noun-phrase chunking of the input document and
from precomputed candidates of BM25-retrieved related documents; ranking
multiplies a phraseness probability, an aggregated term-importance score,
and an early-position bonus.
"""

from kpgen.errors import ConfigError, DataError, KpgenError

__all__ = ["ConfigError", "DataError", "KpgenError"]

__version__ = "0.1.0"
