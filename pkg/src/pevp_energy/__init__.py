"""Monte Carlo laboratory for the logarithmic energy of random polynomial-eigenvalue points.

The roots of ``det(sum_i G_i sqrt(binom(d, i)) z**i)``, with ``r x r`` complex
Gaussian ``G_i``, are projected to the sphere and their logarithmic energy is
compared with its closed-form expectation.
"""
from .pevp import EnsembleParams, MatrixPolynomial, RootSet, pevp_roots
from .sampling import RngStream, substream
from .theory import TheoryPrediction, expected_energy

__version__ = "0.1.0"

__all__ = [
    "EnsembleParams",
    "MatrixPolynomial",
    "RootSet",
    "RngStream",
    "TheoryPrediction",
    "expected_energy",
    "pevp_roots",
    "substream",
]
