"""Release-schedule simulation and optimization for reduced mosquito-population models."""

from ._core import (
    MosqoptError,
    SitParams,
    WolParams,
    check_assumptions,
    derive_carrying_capacity,
    eigenvalues,
    gradient,
    project_admissible,
    run_scenario,
    simulate,
    sit_equilibria,
    sit_rhs,
    solve,
    total_release,
    wol_equilibria,
    wol_rhs,
    __version__,
)

__all__ = [
    "MosqoptError",
    "SitParams",
    "WolParams",
    "check_assumptions",
    "derive_carrying_capacity",
    "eigenvalues",
    "gradient",
    "project_admissible",
    "run_scenario",
    "simulate",
    "sit_equilibria",
    "sit_rhs",
    "solve",
    "total_release",
    "wol_equilibria",
    "wol_rhs",
    "__version__",
]
