"""Exact cohomology and positivity computations on nilmanifold models."""

from .algebra import ComplexCoframe, Form, OperatorSet, build_operators
from .scalars import GaussRat

__version__ = "0.1.0"

__all__ = ["ComplexCoframe", "Form", "GaussRat", "OperatorSet", "build_operators"]
