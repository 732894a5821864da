"""tovkit: stellar structure for polytropes and EOS parameter bounds.

Integrates the relativistic hydrostatic equations and their Newtonian
polytrope limit, models mass-radius relations (monomial, rational,
Newtonian polytrope), and turns mass/radius/causality constraints into
verified bounds on equation-of-state parameters.
"""

from .bounds import (
    BoundResult,
    VerificationReport,
    amplitude_bound_from_mass_radius,
    causal_k_bound_monomial,
    causal_k_bound_rational,
    central_density_from_newtonian_relation,
    density_bound_from_mass_derivative,
    newtonian_causal_k_bound,
    radius_regime,
    verify_bound_by_bruteforce,
)
from .catalog import CatalogRecord, FitResult, fit_monomial, fit_rational, load_catalog
from .eos import CausalityVerdict, ConstantDensityEos, PolytropicEos, eos_from_text, eos_to_text
from .errors import (
    CatalogError,
    DomainError,
    FoldPointError,
    HorizonApproachError,
    InversionError,
    NoFiniteRadiusError,
    NonConvergenceError,
    OutOfBranchError,
    SingularPointError,
    TovkitError,
    UnderdeterminedError,
    UnknownUnitError,
)
from .relations import (
    MonomialRelation,
    NewtonianPolytropeRelation,
    RationalRelation,
    monomial_density,
    monomial_sound_speed_squared,
    newtonian_A,
    rational_density,
    rational_invert_for_mass,
    rational_radius,
    solve_monomial_for_a,
)
from .scan import AxisSpec, ScanPoint, ScanSpec, mass_radius_curve, parse_scan_config, run_scan
from .structure import (
    IntegrationOptions,
    LaneEmdenSolution,
    StellarProfile,
    integrate_lane_emden,
    integrate_tov,
    newtonian_star,
    profile_to_csv,
    surface_data,
)
from .units import (
    Dimension,
    GeomQuantity,
    from_geometrized,
    geometrized_factor,
    polytropic_k_from_geometrized,
    polytropic_k_to_geometrized,
    to_geometrized,
)

__version__ = "0.1.0"

__all__ = [
    "AxisSpec",
    "BoundResult",
    "CatalogError",
    "CatalogRecord",
    "CausalityVerdict",
    "ConstantDensityEos",
    "Dimension",
    "DomainError",
    "FitResult",
    "FoldPointError",
    "GeomQuantity",
    "HorizonApproachError",
    "IntegrationOptions",
    "InversionError",
    "LaneEmdenSolution",
    "MonomialRelation",
    "NewtonianPolytropeRelation",
    "NoFiniteRadiusError",
    "NonConvergenceError",
    "OutOfBranchError",
    "PolytropicEos",
    "RationalRelation",
    "ScanPoint",
    "ScanSpec",
    "SingularPointError",
    "StellarProfile",
    "TovkitError",
    "UnderdeterminedError",
    "UnknownUnitError",
    "VerificationReport",
    "amplitude_bound_from_mass_radius",
    "causal_k_bound_monomial",
    "causal_k_bound_rational",
    "central_density_from_newtonian_relation",
    "density_bound_from_mass_derivative",
    "eos_from_text",
    "eos_to_text",
    "fit_monomial",
    "fit_rational",
    "from_geometrized",
    "geometrized_factor",
    "integrate_lane_emden",
    "integrate_tov",
    "load_catalog",
    "mass_radius_curve",
    "monomial_density",
    "monomial_sound_speed_squared",
    "newtonian_A",
    "newtonian_causal_k_bound",
    "newtonian_star",
    "parse_scan_config",
    "polytropic_k_from_geometrized",
    "polytropic_k_to_geometrized",
    "profile_to_csv",
    "radius_regime",
    "rational_density",
    "rational_invert_for_mass",
    "rational_radius",
    "run_scan",
    "solve_monomial_for_a",
    "surface_data",
    "to_geometrized",
    "verify_bound_by_bruteforce",
]
