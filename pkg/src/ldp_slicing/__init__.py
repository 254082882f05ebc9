"""Pixel-level local differential privacy for images via bit-plane randomized response."""

from .analysis import (
    PrivacyReport,
    advantage_bound,
    blocklevel_to_pixel_epsilon,
    exact_tv_reduced,
    privacy_report,
    psnr,
    tv_bound,
)
from .bitplane import BitPlaneStack, reconstruct, slice_planes
from .budget import BudgetAllocation, WeightTable, allocate, solve_numeric, uniform_allocation
from .color import PixelImage, rgb_to_ycbcr, ycbcr_to_rgb
from .errors import CertificationFailure, InvalidInputError, NumericFailure
from .mechanism import FlipProbabilities, empirical_flip_rate, privatize, rr_bit
from .rng import RandomnessSpec
from .verify import LdpTestResult, certify_bit_ldp, certify_pixel_pipeline, monotone_psnr_sweep
from .wavelet import SubbandSet, haar_dwt, haar_idwt, ll_prune, perceptual_obfuscate

__version__ = "0.1.0"
