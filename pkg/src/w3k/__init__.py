"""Quadratic lower bounds for the van der Waerden numbers w(3, k).

Builds 3-AP-free subsets of [p^2 - p] from a 3-AP-free base set via the
CRT splitting Z/(p^2-p) = Z/p x Z/(p-1) with random fibre translates, and
checks everything against brute-force oracles and exact small cases.
"""

from .apfree import (
    APDescriptor,
    IntegerSet,
    ResidueSet,
    erdos_turan_count,
    erdos_turan_set,
    find_3ap_int,
    find_3ap_mod,
    find_kap_int,
    freiman_pushforward,
    r3_exact,
)
from .arith import CrtPair, PrngState, crt_combine, crt_split, is_prime, prev_prime, prng_next, uniform_below
from .certificate import Certificate
from .construction import (
    ConstructionRecipe,
    ConstructionResult,
    ProductSet,
    build_A,
    count_kaps,
    estimate_miss_probability,
    miss_probability,
    product_union,
    threshold_scan,
    union_bound_certifies,
)
from .search import (
    Coloring,
    ValidityReport,
    lower_bound_report,
    unhit_kaps,
    validate_coloring,
    verify_certificate,
    w3k_exact,
)

__version__ = "0.1.0"
