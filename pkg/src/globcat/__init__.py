"""Finite category theory and global homotopy theory on desk-scale instances."""
__version__ = "0.1.0"
