"""Numerical toolkit for Hecke-Maass cusp forms on the modular surface.

Special functions (imaginary-order K-Bessel, Airy), Hecke coefficients,
waveform evaluation, restriction norms and QUE functionals, nodal domain
census, and the random-wave model for zeros on horocycles.
"""
from .coeffs import HeckeData, extend_hecke
from .errors import (ArgumentError, ConsistencyError, DomainError, FormatError, IncompleteSeedError,
                     NodalAtlasError, OutOfRangeError, PrecisionError, ResourceError)
from .fileio import load_form, read_coefficients, write_coefficients
from .specfun import airy_zero, bessel_k_scaled, bessel_k_zero
from .waveform import MaassForm, eval_automorphic, eval_direct

__version__ = "0.1.0"
