"""ell-adic statistics of reduced Mordell-Weil subgroups of elliptic curves over Q."""
from .ec_fp import CurveFp, FpPoint, SubgroupLStats, count_points, generated_lpart_stats
from .ec_q import CurveQ, RationalPoint, add_q, good_primes, is_torsion, reduce_point, torsion_order
from .errors import MWFError
from .fingerprint import (
    DensityQuery,
    compare,
    estimate_density,
    isogeny_invariance_check,
    lemma_isogenous_check,
    product_sweep,
    sweep,
    theorem_demo,
)
from .fp import FpElement, PrimeModulus, mod_inverse, primes_in_range, sqrt_mod
from .heights import canonical_height, is_almost_free, regulator
from .isogeny import Isogeny, dual_check, pushforward, velu_2isogeny, velu_odd_isogeny

__version__ = "0.1.0"

__all__ = [
    "CurveFp",
    "FpPoint",
    "SubgroupLStats",
    "count_points",
    "generated_lpart_stats",
    "CurveQ",
    "RationalPoint",
    "add_q",
    "good_primes",
    "is_torsion",
    "reduce_point",
    "torsion_order",
    "MWFError",
    "DensityQuery",
    "compare",
    "estimate_density",
    "isogeny_invariance_check",
    "lemma_isogenous_check",
    "product_sweep",
    "sweep",
    "theorem_demo",
    "FpElement",
    "PrimeModulus",
    "mod_inverse",
    "primes_in_range",
    "sqrt_mod",
    "canonical_height",
    "is_almost_free",
    "regulator",
    "Isogeny",
    "dual_check",
    "pushforward",
    "velu_2isogeny",
    "velu_odd_isogeny",
]
