"""Desk-scale laboratory for monotone-circuit separation constructions.

Builds the explicit objects behind three families of separations --
expander-graph polynomials with depth-3 circuits, rank functions of
well-behaved binary codes, and sparse real rank functions -- and checks
every finitely-testable claim about them against independent brute-force
oracles.
"""

__version__ = "0.1.0"
