"""Two-phase radially layered conductors in the unit n-ball"""

__version__ = "1.0.0"
