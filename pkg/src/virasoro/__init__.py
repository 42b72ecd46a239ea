"""Virasoro uniformization toolkit.

Exact symbolic algebra for Witt/Virasoro differential operators in explicit
uniformization charts, numeric genus-1 kernels on flat cylinders,
zeta-regularized determinants, discrete random-walk loop measures and chordal
SLE simulation, with every identity turned into an automated check.
"""

__version__ = "0.1.0"
