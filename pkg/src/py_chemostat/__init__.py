from .dynamics import (
    CycleKind,
    CycleReport,
    Trajectory,
    detect_cycle,
    hsu_derivative,
    integrate,
    lyapunov_monitor_e0,
    lyapunov_monitor_e1,
    persistence_check,
)
from .equilibria import (
    EquilibriumSet,
    Point,
    branch_derivatives,
    break_even,
    coexistence,
    equilibrium_set,
    holling2_nutrient,
    lambda_prime,
    mu_c1,
    predator_bound,
    single_species,
)
from .errors import ChemostatError
from .export import export_document, export_rows
from .helpers import NormalizedDict, StrAutoEnum
from .hopf import (
    HopfCertificate,
    RealPartCurve,
    appendix_bound_check,
    default_bracket,
    find_hopf,
    hypothesis_predicates,
    locate_hopf,
    real_part_curve,
    scan_crossings,
)
from .responses import CustomResponse, HollingII, HollingIII, Parameters, Response
from .stability import (
    ABCReport,
    CubicCoeffs,
    SpectrumFactorization,
    Stability,
    abc_equal_removal,
    boundary_eigenvalues,
    char_coeffs,
    char_coeffs_e2,
    classify_spectrum,
    eigenvalues,
    factorize,
    jacobian,
    routh_hurwitz,
)

__all__ = [
    "Response",
    "HollingII",
    "HollingIII",
    "CustomResponse",
    "Parameters",
    "Point",
    "EquilibriumSet",
    "break_even",
    "lambda_prime",
    "mu_c1",
    "single_species",
    "coexistence",
    "equilibrium_set",
    "holling2_nutrient",
    "branch_derivatives",
    "predator_bound",
    "Stability",
    "CubicCoeffs",
    "SpectrumFactorization",
    "ABCReport",
    "jacobian",
    "char_coeffs",
    "char_coeffs_e2",
    "routh_hurwitz",
    "classify_spectrum",
    "eigenvalues",
    "factorize",
    "abc_equal_removal",
    "boundary_eigenvalues",
    "RealPartCurve",
    "HopfCertificate",
    "real_part_curve",
    "scan_crossings",
    "default_bracket",
    "find_hopf",
    "locate_hopf",
    "hypothesis_predicates",
    "appendix_bound_check",
    "Trajectory",
    "CycleKind",
    "CycleReport",
    "integrate",
    "lyapunov_monitor_e0",
    "lyapunov_monitor_e1",
    "hsu_derivative",
    "detect_cycle",
    "persistence_check",
    "ChemostatError",
    "StrAutoEnum",
    "NormalizedDict",
    "export_rows",
    "export_document",
]
