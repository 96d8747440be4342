"""Correlation measures, causal models of shared randomness, and key-distribution simulations."""

from .infotheory import (
    JointDistribution,
    SymbolSequence,
    conditional_mutual_information,
    dirac,
    entropy,
    marginal,
    mix,
    total_correlation,
    total_variation,
)
from .quantum_sim import DensityOperator, POVM, PureState, cerf_monotone
from .causal_model import CausalModel, LatentSpec

__version__ = "0.1.0"
