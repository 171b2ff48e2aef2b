"""Exact arithmetic for length-two ramified Witt vectors, pi-derivations,
arithmetic jet spaces, and Frobenius-lift obstruction classes, with a small
library of glued schemes to run them on and closed-form arithmetic bounds.
"""

__version__ = "0.1.0"
