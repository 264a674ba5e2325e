"""Counter-based random streams for ensemble sampling.

Every (site, time) pair gets an independent stream derived from the master
seed, so parallel schedules and sampling short-cuts at other sites can
never change the draws at a given site. The scheme is fixed so golden
values reproduce across implementations and languages:

* ``mix64`` is the splitmix64 output scrambler:
  ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31`` (all mod 2**64).
* The stream key is
  ``k = mix64(seed ^ 0x243F6A8885A308D3)``,
  ``k = mix64(k ^ (site * GOLDEN))``, ``k = mix64(k ^ (time * GOLDEN))``
  with ``GOLDEN = 0x9E3779B97F4A7C15``.
* Draw ``j`` (0-based) of a stream is
  ``mix64(key + (j + 1) * GOLDEN)``, i.e. the splitmix64 sequence seeded
  at the key, mapped to [0, 1) by taking the top 53 bits:
  ``(z >> 11) * 2.0**-53``.

The compiled kernel reimplements the same arithmetic in C; a parity test
keeps the two in lock-step.
"""

import numpy as np

from .errors import InputError

GOLDEN = 0x9E3779B97F4A7C15
_SEED_SALT = 0x243F6A8885A308D3
_MASK = (1 << 64) - 1

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 2.0**-53


def mix64(z: int) -> int:
    """splitmix64 output scrambler on a 64-bit integer."""
    z &= _MASK
    z ^= z >> 30
    z = (z * _M1) & _MASK
    z ^= z >> 27
    z = (z * _M2) & _MASK
    return z ^ (z >> 31)


def _check_u64(value: int, what: str) -> int:
    value = int(value)
    if not 0 <= value <= _MASK:
        raise InputError(f"{what} must be a 64-bit unsigned integer, got {value}")
    return value


def stream_key(seed: int, site: int, time: int) -> int:
    """Derive the 64-bit key of the (site, time) stream from the seed."""
    seed = _check_u64(seed, "seed")
    site = _check_u64(site, "site index")
    time = _check_u64(time, "time index")
    k = mix64(seed ^ _SEED_SALT)
    k = mix64(k ^ ((site * GOLDEN) & _MASK))
    k = mix64(k ^ ((time * GOLDEN) & _MASK))
    return k


def stream_keys(seed: int, sites: np.ndarray, time: int) -> np.ndarray:
    """Vectorized ``stream_key`` over an array of site indices."""
    seed = _check_u64(seed, "seed")
    time = _check_u64(time, "time index")
    s = np.asarray(sites, dtype=np.uint64)
    with np.errstate(over="ignore"):
        k = np.uint64(mix64(seed ^ _SEED_SALT)) ^ (s * np.uint64(GOLDEN))
        k = _mix64_array(k)
        k = _mix64_array(k ^ np.uint64((time * GOLDEN) & _MASK))
    return k


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def uniforms(key: int, n: int) -> np.ndarray:
    """First ``n`` unit-interval draws of the stream with the given key."""
    key = _check_u64(key, "stream key")
    if n < 0:
        raise InputError(f"draw count must be nonnegative, got {n}")
    with np.errstate(over="ignore"):
        z = np.uint64(key) + np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GOLDEN)
        z = _mix64_array(z)
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT
