"""Farey fractions with restricted denominators and their pair correlation."""

__version__ = "0.1.0"

from .arith import SieveTables, build_sieve, divisors, prime_iter, primes_upto
from .errors import (
    CapacityError,
    ConfigurationError,
    FareyCorrError,
    OutOfRangeError,
    PreconditionError,
)
from .farey import (
    ALL,
    PRIME,
    SQUAREFREE,
    DenominatorPredicate,
    FareySequence,
    coprime_to,
    count_asymptotic,
    count_exact,
    enumerate_farey,
    exponential_sum_direct,
    exponential_sum_formula,
)
from .analytic import (
    CurveSpec,
    EulerProductValue,
    FmValue,
    Route,
    base_product_C,
    carefree_delta,
    curve_eval,
    fm_closed,
    fm_closed_corrected,
    fm_factorization,
    g2,
    g2_curve,
    g2_integral,
    g2_integral_exact,
)
from .empirical import (
    CorrelationHistogram,
    LatticeRegion,
    WindowSpec,
    lattice_count,
    pair_correlation,
    pair_correlation_naive,
    s_lambda,
)
