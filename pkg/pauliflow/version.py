"""
Copyright (c) 2024 The pauliflow authors.
"""

__version__ = "0.1.0"
