"""Species-richness prediction under two-parameter Poisson-Dirichlet priors.

Exact finite-sample laws (species counts, new-species counts and occupancy,
conditional moments, credible intervals), their large-sample limit law with
density/moment/sampler views, a seating-process simulator that provides
Monte Carlo ground truth, and an exact-rational oracle for desk-scale
verification.
"""

__version__ = "0.1.0"

from .backend import BACKEND
from .prior import PDParams, PartitionData, eppf_log, fit_params, kn_mean, kn_moment, kn_pmf
from .pmf import Pmf
from .conditional import (
    PredictionQuery,
    credible_interval,
    km_given_sm_pmf,
    km_mean,
    km_moment,
    km_pmf,
    new_species_prob,
    sm_pmf,
)
from .asymptotics import (
    LimitLaw,
    alt_decomposition_moment,
    km_moment_asymptotic,
    limit_density,
    limit_moment,
    ml_density,
    sample_limit,
    sm_local_density,
    stable_density,
    tilted_ml_density,
)
from .simulate import SeatState, continue_sample, crp_sample, deletion_check
from .stirling import (
    LogTable,
    gen_rising_factorial,
    noncentral_stirling1_table,
    noncentral_stirling2_table,
    rising_factorial,
    stirling1_table,
)

__all__ = [
    "BACKEND",
    "LimitLaw",
    "LogTable",
    "PDParams",
    "PartitionData",
    "Pmf",
    "PredictionQuery",
    "SeatState",
    "alt_decomposition_moment",
    "continue_sample",
    "credible_interval",
    "crp_sample",
    "deletion_check",
    "eppf_log",
    "fit_params",
    "gen_rising_factorial",
    "km_given_sm_pmf",
    "km_mean",
    "km_moment",
    "km_moment_asymptotic",
    "km_pmf",
    "kn_mean",
    "kn_moment",
    "kn_pmf",
    "limit_density",
    "limit_moment",
    "ml_density",
    "new_species_prob",
    "noncentral_stirling1_table",
    "noncentral_stirling2_table",
    "rising_factorial",
    "sample_limit",
    "sm_local_density",
    "sm_pmf",
    "stable_density",
    "stirling1_table",
    "tilted_ml_density",
]
