"""Conditioned and unconditioned qubit dynamics under non-classical driving.

Simulates the stochastic master equations of a two-level system monitored
by homodyne or photon-counting detection while driven by vacuum, a
single-photon wavepacket or a superposition of coherent states, together
with the matching master equations and purity dynamics.
"""

__version__ = "0.1.0"

from .engine import (IntegratorConfig, TrajectoryRecord, integrate_diffusive,
                     integrate_jump, integrate_ode, jump_increment,
                     rng_stream, wiener_increment, wiener_increments)
from .ensemble import (EnsembleResult, Scenario, compare_to_me, run_ensemble,
                       run_me_trajectory, run_trajectory, transient_metrics)
from .fields import (CatStateInput, GaussianWavepacket, PulseAmplitude,
                     SinglePhotonInput, VacuumInput, coherent_overlap,
                     normalize_cat_weights, wavepacket_value)
from .filters import (FieldDecomposition, cat_hd_fields, cat_pd_fields,
                      initial_state, me_fields, photon_hd_fields,
                      photon_pd_fields, physical_bloch, sme_fields,
                      vacuum_hd_fields, vacuum_pd_fields)
from .operators import (SystemTriple, bloch_to_density, commutator,
                        density_to_bloch, lindblad_generator, pauli,
                        purity_density)
from .purity import (empirical_conditioned_purity, purity_bloch,
                     purity_rate_general_conditioned_hd,
                     purity_rate_general_unconditioned, purity_rate_qubit_hd,
                     purity_rate_qubit_me, purity_state)
from .scenarios import builtin_names, builtin_scenario

__all__ = [
    "CatStateInput", "EnsembleResult", "FieldDecomposition",
    "GaussianWavepacket", "IntegratorConfig", "PulseAmplitude", "Scenario",
    "SinglePhotonInput", "SystemTriple", "TrajectoryRecord", "VacuumInput",
    "bloch_to_density", "builtin_names", "builtin_scenario", "cat_hd_fields",
    "cat_pd_fields", "coherent_overlap", "commutator", "compare_to_me",
    "density_to_bloch", "empirical_conditioned_purity", "initial_state",
    "integrate_diffusive", "integrate_jump", "integrate_ode",
    "jump_increment", "lindblad_generator", "me_fields",
    "normalize_cat_weights", "pauli", "photon_hd_fields", "photon_pd_fields",
    "physical_bloch", "purity_bloch", "purity_density",
    "purity_rate_general_conditioned_hd", "purity_rate_general_unconditioned",
    "purity_rate_qubit_hd", "purity_rate_qubit_me", "purity_state",
    "rng_stream", "run_ensemble", "run_me_trajectory", "run_trajectory",
    "sme_fields", "transient_metrics", "vacuum_hd_fields", "vacuum_pd_fields",
    "wavepacket_value", "wiener_increment", "wiener_increments",
]
