"""catmodel: finite marked categories, pre-additive categories, and their
model-structure constructions, executable at desk scale."""

__version__ = "0.1.0"
