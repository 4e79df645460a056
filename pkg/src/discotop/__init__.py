"""Finite-sample toolkit for quantified nonembeddability: complexes, GF(2)
homology, Vietoris-Rips complexes, discrete moduli of discontinuity, angle
bounds and explicit discontinuous witnesses."""

__version__ = "0.1.0"
