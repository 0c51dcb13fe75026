"""Coherence measures (l1 norm, relative entropy, robustness, convex roof) and the inequalities between them."""

from .bounds import (
    BoundReport,
    InequalityRecord,
    evaluate_all_bounds,
    extremal_pure_max,
    extremal_pure_min,
    isotropic_like_state,
    mixed_cr_upper,
    prop6_state,
    pseudopure_state,
    pure_cr_crude_bounds,
    pure_cr_tight_bounds,
    pure_gap,
    pure_gap_upper,
    qubit_cr_bounds,
    robustness_cr_floor,
)
from .conjecture import (
    ConjectureCertificate,
    PerturbationFamily,
    Verdict,
    certify,
    cr_derivative_hf,
    family_state,
    find_ordering_witness,
    integral_bound,
    region_scan,
    spectral_condition,
)
from .core import (
    CoherenceError,
    ConvergenceError,
    DomainError,
    ValidationError,
    as_density,
    as_pure,
    binary_entropy,
    dephase,
    majorizes,
    maximally_coherent,
    random_density,
    random_pure,
    renyi_entropy,
    shannon_entropy,
)
from .measures import (
    c_l1,
    c_log,
    c_r,
    c_robustness,
    c_robustness_pure,
    convex_roof_qubit,
    convex_roof_upper,
    negativity_mc,
)

__version__ = "0.1.0"
