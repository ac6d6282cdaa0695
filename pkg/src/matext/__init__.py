"""Matroid extension properties and secret-sharing information-ratio bounds.

Modules:
  masks      bitmask subset arithmetic over ground sets of up to 16 points
  matroid    rank-table matroids: minors, duality, flats, axiom checking
  catalog    built-in matroids and the text exchange format
  extension  modular cuts and single-point extensions
  lp         exact-rational linear programs and certificates
  lpfloat    float-assisted solving with exact certificate reconstruction
  akci       Ahlswede-Korner / common-information extension checks
  dl         quasi-intersection (Dress-Lovasz) extension checks
  psm        pseudomodularity checks
  secret     matroid ports and information-ratio lower bounds
  cli        command-line interface
"""

from .matroid import Matroid, MatroidError

__all__ = ["Matroid", "MatroidError"]

__version__ = "0.1.0"
