"""radarkat: known-answer-test workbench for a fixed-point radar DSP chain.

The package models a small radar DSP device (MTI, range FFT, Doppler FFT,
CFAR, angle estimation) bit-accurately, mirrors it with a floating-point
golden model, generates data scenarios, and runs step-isolated and full-chain
known-answer tests against them.
"""

__version__ = "0.1.0"

from .fixedpoint import Q0_23, Q2_21, Q8_8, Q12_4, Fixed, QFormat  # noqa: F401
