"""Desk-scale laboratory for adversarial attacks on cooperative learners."""

__version__ = "0.1.0"
