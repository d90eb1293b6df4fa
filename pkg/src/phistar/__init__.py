"""phistar: integers divisible by their unitary totient.

The unitary totient of N is the product of p**e - 1 over the prime powers
p**e exactly dividing N.  This package verifies and enumerates the N with
phi*(N) | N under configurable prime and prime-power bounds, certifies
smoothness of a**k - 1 through its cyclotomic factors, and emits replayable
elimination certificates for the exhausted branches of the search.
"""

__version__ = "0.1.0"

from .arith import (DomainError, EffortBudget, EffortExceeded, Factorization,
                    cyclotomic_value, factorize, is_prime,
                    largest_prime_factor, multiplicative_order, smooth_part)
from .cache import FactorCache
from .kernels import BACKEND as KERNEL_BACKEND

__all__ = [
    "DomainError", "EffortBudget", "EffortExceeded", "Factorization",
    "FactorCache", "KERNEL_BACKEND", "cyclotomic_value", "factorize",
    "is_prime", "largest_prime_factor", "multiplicative_order", "smooth_part",
    "__version__",
]
