"""1-D periodic lattice: state, collide-then-stream steps, observables.

The lattice holds an (L, b) array of channel occupations. A time step
collides every site independently (pure, mixed, or ensemble-sampled
readout) and then streams channel ``i`` by its signed displacement with
periodic wrap-around. Collisions are value-semantic per site, so the sweep
may be partitioned across workers freely; streaming is a permutation
applied after the whole sweep.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, node
from .errors import InputError

_MODE_KINDS = ("pure", "mixed", "ensemble")
_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class CollisionMode:
    """How the per-site readout is performed.

    ``pure`` and ``mixed`` read exact marginals from the corresponding
    encoding; ``ensemble`` replaces the exact readout by the empirical
    frequencies of ``members`` simulated measurements per site, drawn from
    the deterministic per-(site, time) streams derived from ``seed``.
    """

    kind: str
    members: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _MODE_KINDS:
            raise InputError(f"unknown collision mode {self.kind!r}")
        if self.kind == "ensemble":
            if self.members < 1:
                raise InputError(f"ensemble members must be >= 1, got {self.members}")
            if not 0 <= self.seed <= _MAX_SEED:
                raise InputError("seed must be a 64-bit unsigned integer")

    @classmethod
    def pure(cls):
        return cls("pure")

    @classmethod
    def mixed(cls):
        return cls("mixed")

    @classmethod
    def ensemble(cls, members: int, seed: int = 0):
        return cls("ensemble", members, seed)


@dataclass
class TimeSeries:
    """Recorded snapshots of a run: ``frames[k]`` is the state at ``times[k]``."""

    times: np.ndarray  # (n,) int64
    frames: np.ndarray  # (n, L, b) float64

    @property
    def length(self) -> int:
        return self.frames.shape[1]

    @property
    def channels(self) -> int:
        return self.frames.shape[2]


def validate_state(f) -> np.ndarray:
    """Coerce to a C-contiguous (L, b) float array with entries in [0, 1]."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] < 1 or f.shape[1] < 1:
        raise InputError(f"lattice state must be (L, b) with L, b >= 1, got {f.shape}")
    if f.shape[1] > node.MAX_QUBITS_PER_NODE:
        raise InputError(
            f"at most {node.MAX_QUBITS_PER_NODE} channels per node, got {f.shape[1]}"
        )
    if not np.all(np.isfinite(f)):
        raise InputError("lattice state contains NaN or Inf")
    if f.min() < 0.0 or f.max() > 1.0:
        raise InputError("lattice occupations must lie in [0, 1]")
    return f


def default_velocity_map(b: int) -> np.ndarray:
    """Two channels get the standard right/left movers (+1, -1)."""
    if b == 2:
        return np.array([1, -1], dtype=np.int64)
    raise InputError(
        f"no default velocity map for b={b}; pass displacements explicitly"
    )


def validate_velocity_map(vmap, b: int, length: int) -> np.ndarray:
    v = np.asarray(vmap, dtype=np.int64)
    if v.ndim != 1 or v.size != b:
        raise InputError(f"velocity map must have one displacement per channel ({b})")
    if np.abs(v).max() > length:
        raise InputError("displacement magnitude exceeds the lattice length")
    return v


def stream(f, vmap) -> np.ndarray:
    """Propagate: f_i(x) <- f_i((x - displacement_i) mod L)."""
    f = validate_state(f)
    v = validate_velocity_map(vmap, f.shape[1], f.shape[0])
    out = np.empty_like(f)
    for i in range(f.shape[1]):
        out[:, i] = np.roll(f[:, i], int(v[i]))
    return out


def _collision_sweep(f, u, mode, time, kern):
    if mode.kind == "pure":
        return kern.collide_pure(f, u)
    if mode.kind == "mixed":
        return kern.collide_mixed(f, u)
    return kern.collide_ensemble(f, u, mode.members, mode.seed, time)


def _prepare(f, u, vmap, mode):
    f = validate_state(f)
    u = np.ascontiguousarray(node.validate_unitary(u))
    b = f.shape[1]
    if u.shape[0] != (1 << b):
        raise InputError(
            f"operator dimension {u.shape[0]} does not match 2**b for b={b}"
        )
    if vmap is None:
        vmap = default_velocity_map(b)
    v = validate_velocity_map(vmap, b, f.shape[0])
    if not isinstance(mode, CollisionMode):
        raise InputError(f"mode must be a CollisionMode, got {type(mode).__name__}")
    return f, u, v


def step(f, u, vmap=None, mode=CollisionMode.pure(), time: int = 0, backend=None):
    """One full update: collide every site, then stream.

    ``time`` feeds the per-(site, time) random streams in ensemble mode
    and is ignored otherwise.
    """
    f, u, v = _prepare(f, u, vmap, mode)
    collided = _collision_sweep(f, u, mode, time, kernels.get(backend))
    return stream(collided, v)


def run(
    initial,
    u,
    vmap=None,
    mode=CollisionMode.pure(),
    steps: int = 0,
    record_every: int = 1,
    backend=None,
) -> TimeSeries:
    """Iterate collide-then-stream ``steps`` times, recording snapshots.

    The initial state is always recorded at t=0; thereafter states are
    recorded post-stream at every multiple of ``record_every`` and at the
    final step. Deterministic for pure/mixed; reproducible for ensemble
    mode given the seed.
    """
    if steps < 0:
        raise InputError(f"steps must be nonnegative, got {steps}")
    if record_every < 1:
        raise InputError(f"record_every must be >= 1, got {record_every}")
    f, u, v = _prepare(initial, u, vmap, mode)
    kern = kernels.get(backend)
    times = [0]
    frames = [f.copy()]
    for t in range(steps):
        f = _collision_sweep(f, u, mode, t, kern)
        f = stream(f, v)
        now = t + 1
        if now % record_every == 0 or now == steps:
            times.append(now)
            frames.append(f.copy())
    return TimeSeries(np.asarray(times, dtype=np.int64), np.stack(frames))


def density_profile(f) -> np.ndarray:
    """Per-site total occupation (the macroscopic density)."""
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 2:
        raise InputError(f"expected an (L, b) state, got shape {f.shape}")
    return f.sum(axis=1)


def profile_moments(profile) -> tuple[float, float, float]:
    """Mass, mean, and variance of a density profile on the ring.

    Site coordinates are unwrapped into a window centered on the circular
    mean before the moments are taken, so a localized profile gets ordinary
    line moments no matter where it sits relative to the wrap-around point.
    """
    p = np.asarray(profile, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise InputError(f"profile must be a vector, got shape {p.shape}")
    mass = float(p.sum())
    if mass <= 0.0:
        raise InputError("profile has nonpositive total mass")
    length = p.size
    angles = 2.0 * np.pi * np.arange(length) / length
    cos_sum = float((p * np.cos(angles)).sum())
    sin_sum = float((p * np.sin(angles)).sum())
    theta = np.arctan2(sin_sum, cos_sum) if (cos_sum or sin_sum) else 0.0
    center = (theta % (2.0 * np.pi)) * length / (2.0 * np.pi)
    x = np.arange(length, dtype=np.float64)
    unwrapped = (x - center + length / 2.0) % length - length / 2.0 + center
    mean = float((p * unwrapped).sum() / mass)
    var = float((p * (unwrapped - mean) ** 2).sum() / mass)
    return mass, mean, var
