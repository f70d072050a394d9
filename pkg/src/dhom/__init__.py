"""Witness supersets for the intersection of two algebraic components
via the intrinsic diagonal homotopy cascade."""

__version__ = "0.1.0"
