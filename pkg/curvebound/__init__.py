# curvebound/__init__.py
"""Bound states of Schrodinger operators with delta interactions on closed curves"""

__version__ = "0.1.0"
