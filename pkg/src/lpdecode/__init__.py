"""Soft-decision list decoding of Reed-Solomon codes under l_p noise."""
from .channels import ChannelSpec, TrialReport, adversarial_error, run_experiment, sample_error
from .decoder import DecodeResult, decode_lp, soft_decode
from .estimators import LpListDecoder, LpWeightTransformer
from .field import PrimeField, Poly, solve_nullspace
from .grs import CodeSpec, encode, subclass_alpha_alpha
from .lattice import LpParams, lattice_sum
from .rates import RatePlan, comparison_curves, crossover, failure_prob, rate_ac, rate_wc
from .weights import ReceivedWord, WeightVector, build_weights, correlation

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec", "TrialReport", "adversarial_error", "run_experiment", "sample_error",
    "DecodeResult", "decode_lp", "soft_decode", "LpListDecoder", "LpWeightTransformer",
    "PrimeField", "Poly", "solve_nullspace", "CodeSpec", "encode", "subclass_alpha_alpha",
    "LpParams", "lattice_sum", "RatePlan", "comparison_curves", "crossover", "failure_prob",
    "rate_ac", "rate_wc", "ReceivedWord", "WeightVector", "build_weights", "correlation",
]
