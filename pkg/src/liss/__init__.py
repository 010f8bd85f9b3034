"""Programmatic policy synthesis in syntax and library-induced search spaces."""

__version__ = "0.1.0"
