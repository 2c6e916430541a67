"""Finitely presented groups at desk scale: words, solvers, Rips and fibre products."""

__version__ = "0.1.0"

from .words import GenMap, Presentation, Word, parse_presentation, parse_word

__all__ = ["GenMap", "Presentation", "Word", "parse_presentation", "parse_word", "__version__"]
