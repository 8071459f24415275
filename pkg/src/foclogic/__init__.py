"""Exact interpreter and cross-compiler between message-passing GNNs and
first-order logic with counting.

The package is organised around six areas:

- ``dyadic``: signed dyadic rationals, r-tuples, continuous rational
  piecewise-linear functions, and certified PL approximations of smooth
  activations.
- ``graphs``: labelled graphs, dyadic vertex signals, enumeration, file I/O.
- ``syntax`` / ``semantics`` / ``fragments``: the two-sorted counting logic --
  AST, parser/printer, exact evaluation, fragment classification.
- ``formulas``: builders that emit genuine ASTs for bit-level and rational
  arithmetic inside the logic, at PURE and SEMANTIC fidelity.
- ``nn``: feedforward and graph networks with exact evaluation, growth and
  Lipschitz bounds, gadget constructions, certified approximation.
- ``compilers``: network-to-formula and formula-to-network translations,
  the random-initialisation pipeline, and round-trip verification.
"""

from foclogic.dyadic import DyadicRational, PiecewiseLinear, RTuple

__all__ = ["DyadicRational", "PiecewiseLinear", "RTuple"]
