"""Exact and certified computations for (x+1)^k + ... + (2x)^k = y^n."""
from .exact import perfect_power_witnesses, power_sum_S, power_sum_T
from .valuation import exponent_bound, predict_v2_T, predict_v3_S, predict_v3_T

__all__ = [
    "exponent_bound",
    "perfect_power_witnesses",
    "power_sum_S",
    "power_sum_T",
    "predict_v2_T",
    "predict_v3_S",
    "predict_v3_T",
]
