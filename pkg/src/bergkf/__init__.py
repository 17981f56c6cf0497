"""Bergman and Kobayashi-Fuks geometry on model domains via Wirtinger jets."""

__version__ = "0.1.0"
