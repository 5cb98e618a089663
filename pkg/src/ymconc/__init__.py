"""Concentration of the normalized lattice Yang-Mills action under Haar measure."""

from ._accel import backend
from .haar import RngStream, sample_haar_unitary
from .lattice import LatticeShape, GaugeConfig, identity_config, random_config
from .action import action_t, gauge_transform, plaquette_holonomy, wilson_weight
from .moments import exact_moment_t, leading_moment
from .pairings import count_pairings_bruteforce, count_pairings_closed
from .concentration import empirical_moments, gaussian_limit_density, ks_statistic, sample_t
from .thermo import (
    gaussian_free_energy,
    mc_log_partition,
    reference_free_energy_d2,
    weak_coupling_free_energy,
    weak_scaling_exponent,
)

__version__ = "0.1.0"
