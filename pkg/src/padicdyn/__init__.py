"""Fixed-precision p-adic integer arithmetic and exact ergodicity verdicts for
the power maps x -> x^n on the spheres around 1 in Z_p."""

__version__ = "0.1.0"

from .errors import DomainError, IntegrityError, PadicDynError, ResourceError
from .padic import Ball, PadicInt, Sphere, Valuation, is_prime
from .analysis import padic_exp, padic_log, pow_padic, roots_of_unity, teichmuller
from .unitgroups import (
    GeneratorConsistencyReport,
    UnitGroupReport,
    density_check,
    generated_set,
    generator_consistency,
    is_generator_mod_p2,
    multiplicative_order,
    noncyclic_2adic_check,
    unit_group_report,
)
from .dynamics import (
    BallIndicator,
    BallPartition,
    BirkhoffResult,
    DigitValue,
    MonomialSystem,
    PermutationAction,
    PerturbedSystem,
    Polynomial,
    Verdict,
    birkhoff_average,
    conjugated_verdict,
    fixed_points,
    haar_ball_measure,
    haar_integral,
    induced_permutation,
    isometry_scaling_check,
    minimality_verdict,
    observe_marginal_perturbation,
    orbit_residues,
    perturbed_analysis,
    perturbed_ball_map,
    product_nonmixing_report,
    sphere_partition,
)
from .oracle import (
    Certificate,
    certify_generator_consistency,
    certify_log_isometry,
    certify_minimality_criterion,
    certify_power_scaling,
    certify_unique_invariance,
    rational_nullspace,
)

__all__ = [
    "__version__",
    "PadicDynError",
    "DomainError",
    "IntegrityError",
    "ResourceError",
    "PadicInt",
    "Valuation",
    "Ball",
    "Sphere",
    "is_prime",
    "padic_log",
    "padic_exp",
    "pow_padic",
    "teichmuller",
    "roots_of_unity",
    "UnitGroupReport",
    "GeneratorConsistencyReport",
    "multiplicative_order",
    "unit_group_report",
    "is_generator_mod_p2",
    "generated_set",
    "generator_consistency",
    "noncyclic_2adic_check",
    "density_check",
    "MonomialSystem",
    "PerturbedSystem",
    "Polynomial",
    "BallPartition",
    "PermutationAction",
    "Verdict",
    "BallIndicator",
    "DigitValue",
    "BirkhoffResult",
    "sphere_partition",
    "induced_permutation",
    "minimality_verdict",
    "haar_ball_measure",
    "haar_integral",
    "birkhoff_average",
    "orbit_residues",
    "fixed_points",
    "conjugated_verdict",
    "product_nonmixing_report",
    "perturbed_analysis",
    "perturbed_ball_map",
    "observe_marginal_perturbation",
    "isometry_scaling_check",
    "Certificate",
    "certify_power_scaling",
    "certify_minimality_criterion",
    "certify_unique_invariance",
    "certify_generator_consistency",
    "certify_log_isometry",
    "rational_nullspace",
]
