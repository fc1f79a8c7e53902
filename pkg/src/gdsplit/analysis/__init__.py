"""DS/GDS classification, Lyapunov spectra, recurrence and measure averages."""

from .domination import (
    AsymptoticBoundReport,
    DominationReport,
    GdsParams,
    UniformNegativityResult,
    asymptotic_ratio_bound_check,
    check_dominated,
    check_gds,
    uniform_negativity_search,
)
from .ergodic import (
    EmpiricalMeasure,
    ProofBoundReport,
    RecurrenceRecord,
    a_epsilon_membership,
    convergence_trace,
    liminf_probe,
    measure_average_inf,
    measure_average_profile,
    proof_bound_check,
    recurrence_analysis,
    s_step_orbit,
)
from .lyapunov import lyapunov_spectra, lyapunov_spectrum
from .minimality import declared_minimality, minimality_probe, visited_boxes

__all__ = [
    "AsymptoticBoundReport", "DominationReport", "EmpiricalMeasure", "GdsParams",
    "ProofBoundReport", "RecurrenceRecord", "UniformNegativityResult",
    "a_epsilon_membership", "asymptotic_ratio_bound_check", "check_dominated", "check_gds",
    "convergence_trace", "declared_minimality", "liminf_probe", "lyapunov_spectra",
    "lyapunov_spectrum", "measure_average_inf", "measure_average_profile", "minimality_probe",
    "proof_bound_check", "recurrence_analysis", "s_step_orbit", "uniform_negativity_search",
    "visited_boxes",
]
