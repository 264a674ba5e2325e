"""Finite-ensemble measurement emulation.

Exact diagonal readout assumes an unbounded ensemble. Here readout is
replaced by sampling ``members`` simulated measurements per node from the
density-matrix diagonal (inverse-CDF in index order over the deterministic
per-(site, time) streams of :mod:`qlgas.prng`), exposing the 1/sqrt(M)
estimator noise and the one-member-per-state capacity bound.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, node, prng
from .errors import InputError

_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble size per node and the master seed of the stream family."""

    members: int
    seed: int = 0

    def __post_init__(self):
        if self.members < 1:
            raise InputError(f"ensemble members must be >= 1, got {self.members}")
        if not 0 <= self.seed <= _MAX_SEED:
            raise InputError("seed must be a 64-bit unsigned integer")


def sample_measurements(rho, cfg: EnsembleConfig, site: int = 0, time: int = 0,
                        backend=None) -> np.ndarray:
    """Counts of ``cfg.members`` basis-state measurements of ``rho``.

    Draws are independent across (site, time) pairs and reproducible given
    (seed, site, time, members, rho). Diagonal entries within tolerance
    below zero are clipped before the CDF is formed.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InputError(f"density matrix must be square, got shape {rho.shape}")
    diag = np.diagonal(rho)
    if np.abs(diag.imag).max() > node.DEFAULT_EPS:
        raise InputError("density-matrix diagonal is not real")
    d = diag.real
    if d.min() < -node.DEFAULT_EPS or abs(d.sum() - 1.0) > node.DEFAULT_EPS:
        raise InputError("diagonal is not a probability vector within tolerance")
    key = prng.stream_key(cfg.seed, site, time)
    clean = np.ascontiguousarray(np.maximum(d, 0.0))
    return np.asarray(kernels.get(backend).sample_counts(clean, cfg.members, key))


def estimate_f(counts) -> tuple[np.ndarray, np.ndarray]:
    """Occupation estimates and their binomial standard errors.

    f_hat[i] = (measurements with channel i occupied) / members,
    std_err[i] = sqrt(f_hat[i] (1 - f_hat[i]) / members).
    """
    counts = np.asarray(counts)
    if counts.ndim != 1 or counts.size < 2:
        raise InputError(f"counts must be a vector of 2**b entries, got {counts.shape}")
    if np.any(counts < 0):
        raise InputError("counts must be nonnegative")
    members = int(counts.sum())
    if members < 1:
        raise InputError("counts are empty")
    b = counts.size.bit_length() - 1
    if 1 << b != counts.size:
        raise InputError(f"counts length must be a power of two, got {counts.size}")
    f_hat = (counts @ node.occupation_bits(b).astype(np.float64)) / members
    std_err = np.sqrt(f_hat * (1.0 - f_hat) / members)
    return f_hat, std_err


def capacity_check(b: int, members: int) -> tuple[bool, int]:
    """Whether ``members`` can resolve all 2**b states (at least one member
    per state), and the exact state count.

    The inequality is evaluated literally in integer arithmetic; e.g.
    2**60 > 10**18, so an ensemble of 10**18 members falls one power of two
    short of 60 qubits even though the two are equal to rounding.
    """
    if b < 1:
        raise InputError(f"qubit count must be positive, got {b}")
    if members < 1:
        raise InputError(f"ensemble size must be positive, got {members}")
    states = 1 << b
    return members >= states, states
