"""qlgas: hybrid quantum-classical lattice-gas simulation toolkit.

Per-node density-matrix collisions with classical streaming between nodes,
a checker for the unitary-to-stochastic-matrix correspondence constraint,
a real-valued lattice-Boltzmann reference path, and finite-ensemble
measurement emulation.
"""

from . import cli, complexlin, ensemble, kernels, lattice, node, oracle, prng
from .ensemble import EnsembleConfig, capacity_check, estimate_f, sample_measurements
from .errors import InputError, InvariantViolation, QLGasError
from .lattice import (
    CollisionMode,
    TimeSeries,
    density_profile,
    profile_moments,
    run,
    step,
    stream,
)
from .node import (
    ConstraintReport,
    boltzmann_probabilities,
    builtin_diffusion_unitary,
    builtin_violating_unitary,
    check_collision_constraint,
    collide,
    density_from_pure,
    diagonal_update_decomposition,
    encode_mixed,
    encode_pure,
    induced_stochastic,
    random_constrained_unitary,
    random_particle_conserving_unitary,
    readout,
)
from .oracle import compare_runs, lb_collide, lb_run, markov_power_iterate

__version__ = "0.1.0"
