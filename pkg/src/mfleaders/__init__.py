"""Wavelet-leader multifractal analysis for 1-d signals on [0, 1).

Core pipeline: sample or construct a signal, decompose it into an
L-infinity-normalized coefficient pyramid, take wavelet leaders, then read
off pointwise Holder/irregularity exponents (local leaders), scaling
functions (partition sums), and Legendre spectrum bounds.  Companion modules
generate the classical reference constructions (Weierstrass-type series,
prescribed-exponent series, Davenport series, multiplicative cascades and
their transference series) with ground truth attached.
"""

__version__ = "0.1.0"

from . import dyadic, formalism, generators, leaders, measures, wavelet
from .dyadic import Cube, cube_of_point, expand, neighbors3, rho_phi, shift_sigma, theta_p
from .formalism import (
    ScalingFunction,
    SpectrumEstimate,
    StructureFunction,
    TauFunction,
    legendre_spectrum,
    measure_legendre,
    measure_tau,
    predicted_scaling,
    scaling_function,
    structure_function,
    transference_H,
)
from .generators import (
    GroundTruth,
    HolderProfile,
    davenport,
    prescribed_series,
    sawtooth,
    transference_series,
    two_exponent_series,
    weierstrass,
)
from .leaders import (
    ExponentEstimate,
    LeaderPyramid,
    LocalLeaderSeries,
    compute_leaders,
    estimate_exponent,
    irregularity_certificate,
    local_leaders,
    oscillation,
    oscillation_exponents,
)
from .measures import BAdicMeasure, CascadeSpec, cascade, measure_alpha, multinomial, quasi_bernoulli_constant
from .wavelet import CoefficientPyramid, Signal, WaveletSpec, analyze, daubechies, renormalize, synthesize
