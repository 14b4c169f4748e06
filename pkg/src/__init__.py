"""
Leggett Toolkit
Crypto-nonlocality, Werner models and Bell-local membership for two-qubit correlations
"""

__version__ = "0.1.0"
