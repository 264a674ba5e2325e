"""Classical lattice-Boltzmann reference path and Markov-chain utilities.

This module is the ground truth the quantum path is compared against, so
its collision never touches complex arithmetic: occupations are expanded
into product-form state probabilities, multiplied by the doubly stochastic
collision matrix, and contracted back to marginals, all in real floating
point and with its own index bookkeeping. Agreement with the density-matrix
path is therefore evidence, not tautology.
"""

import numpy as np

from . import complexlin, lattice
from .errors import InputError, InvariantViolation
from .lattice import TimeSeries

_STOCH_EPS = 1e-10


def _state_bit_table(b: int) -> np.ndarray:
    # channel i occupies bit (b - 1 - i) of the state index, channel 0 highest
    masks = np.left_shift(1, np.arange(b - 1, -1, -1))
    return ((np.arange(1 << b)[:, None] & masks[None, :]) != 0).astype(np.float64)


def validate_stochastic(a, eps: float = _STOCH_EPS) -> np.ndarray:
    """Check a collision matrix is doubly stochastic with entries in [0, 1]."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"collision matrix must be square, got shape {a.shape}")
    if a.min() < -eps or a.max() > 1.0 + eps:
        raise InputError("collision matrix entries must lie in [0, 1]")
    if np.abs(a.sum(axis=1) - 1.0).max() > eps:
        raise InputError("collision matrix rows must sum to 1")
    if np.abs(a.sum(axis=0) - 1.0).max() > eps:
        raise InputError("collision matrix columns must sum to 1")
    return a


def _expand(f: np.ndarray, bits: np.ndarray) -> np.ndarray:
    # (L, b) occupations -> (L, 2**b) product probabilities
    n = np.ones((f.shape[0], bits.shape[0]))
    for i in range(f.shape[1]):
        n *= np.where(bits[:, i] > 0, f[:, i : i + 1], 1.0 - f[:, i : i + 1])
    return n


def lb_collide(f, a) -> np.ndarray:
    """One classical collision: expand, apply the matrix, take marginals."""
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 1:
        raise InputError(f"occupations must be a vector, got shape {f.shape}")
    if not np.all(np.isfinite(f)) or f.min() < 0.0 or f.max() > 1.0:
        raise InputError("occupations must lie in [0, 1]")
    a = validate_stochastic(a)
    if a.shape[0] != 1 << f.size:
        raise InputError(
            f"matrix dimension {a.shape[0]} does not match 2**b for b={f.size}"
        )
    bits = _state_bit_table(f.size)
    n = _expand(f[None, :], bits)[0]
    return np.clip(a @ n @ bits, 0.0, 1.0)


def _lb_sweep(f: np.ndarray, a: np.ndarray, bits: np.ndarray) -> np.ndarray:
    n = _expand(f, bits)
    return np.clip((n @ a.T) @ bits, 0.0, 1.0)


def lb_run(initial, a, vmap=None, steps: int = 0, record_every: int = 1) -> TimeSeries:
    """Classical run with the same stream/record pipeline as ``lattice.run``."""
    if steps < 0:
        raise InputError(f"steps must be nonnegative, got {steps}")
    if record_every < 1:
        raise InputError(f"record_every must be >= 1, got {record_every}")
    f = lattice.validate_state(initial)
    a = validate_stochastic(a)
    b = f.shape[1]
    if a.shape[0] != 1 << b:
        raise InputError(
            f"matrix dimension {a.shape[0]} does not match 2**b for b={b}"
        )
    if vmap is None:
        vmap = lattice.default_velocity_map(b)
    v = lattice.validate_velocity_map(vmap, b, f.shape[0])
    bits = _state_bit_table(b)
    times = [0]
    frames = [f.copy()]
    for t in range(steps):
        f = lattice.stream(_lb_sweep(f, a, bits), v)
        now = t + 1
        if now % record_every == 0 or now == steps:
            times.append(now)
            frames.append(f.copy())
    return TimeSeries(np.asarray(times, dtype=np.int64), np.stack(frames))


def compare_runs(series_a: TimeSeries, series_b: TimeSeries):
    """Maximum absolute deviation between two runs and where it occurs.

    Returns ``(max_abs_deviation, (site, time))``.
    """
    if series_a.frames.shape != series_b.frames.shape:
        raise InputError(
            f"series shapes differ: {series_a.frames.shape} vs {series_b.frames.shape}"
        )
    if not np.array_equal(series_a.times, series_b.times):
        raise InputError("series snapshot times differ")
    dev = np.abs(series_a.frames - series_b.frames)
    k, x, _ = np.unravel_index(int(dev.argmax()), dev.shape)
    return float(dev.max()), (int(x), int(series_a.times[k]))


def markov_power_iterate(a, p0, steps: int = 1) -> np.ndarray:
    """Apply a doubly stochastic matrix ``steps`` times to a distribution."""
    a = validate_stochastic(a)
    p = np.asarray(p0, dtype=np.float64).copy()
    if p.ndim != 1 or p.size != a.shape[0]:
        raise InputError(
            f"distribution length {p.shape} does not match matrix dim {a.shape[0]}"
        )
    if p.min() < 0.0 or abs(p.sum() - 1.0) > 1e-12:
        raise InputError("initial distribution must be nonnegative and sum to 1")
    if steps < 0:
        raise InputError(f"steps must be nonnegative, got {steps}")
    for _ in range(steps):
        p = a @ p
        if abs(p.sum() - 1.0) > 1e-12:
            raise InvariantViolation("Markov step lost normalization")
    return p


def random_doubly_stochastic(dim: int, rng: np.random.Generator) -> np.ndarray:
    """|entries|**2 of a Haar-random unitary: a doubly stochastic matrix of
    exactly the semi-detailed-balance class the collision analysis studies."""
    u = complexlin.random_unitary(dim, rng)
    return u.real**2 + u.imag**2
