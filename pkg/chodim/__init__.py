"""
chodim - volume contraction laboratory for the hyperbolic Cahn-Hilliard-Oono equation
"""

__version__ = "1.0.0"
