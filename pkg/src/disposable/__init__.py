"""Disposable positions and factors in squarefree words."""

__version__ = "0.1.0"
