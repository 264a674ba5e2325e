"""NumPy implementation of the hot lattice-sweep kernels.

Fallback backend, selected when the compiled extension is unavailable.
Each function takes the full (L, b) occupation array and the collision
unitary and returns the post-collision occupations; streaming is applied
by the caller. Semantics are defined here, the Cython backend mirrors
them site by site.
"""

import numpy as np

from . import node, prng

BACKEND_NAME = "python"
COMPILED = False


def _bits_float(b):
    return node.occupation_bits(b).astype(np.float64)


def _encode_amplitudes(f, bits):
    # (L, b) occupations -> (L, d) real product amplitudes
    amp = np.ones((f.shape[0], bits.shape[0]))
    for i in range(f.shape[1]):
        amp *= np.where(bits[:, i], np.sqrt(f[:, i : i + 1]), np.sqrt(1.0 - f[:, i : i + 1]))
    return amp


def _product_probabilities(f, bits):
    n = np.ones((f.shape[0], bits.shape[0]))
    for i in range(f.shape[1]):
        n *= np.where(bits[:, i], f[:, i : i + 1], 1.0 - f[:, i : i + 1])
    return n


def collide_pure(f, u):
    """Pure-state sweep: encode, conjugate, read exact marginals."""
    bits = node.occupation_bits(f.shape[1])
    psi = _encode_amplitudes(f, bits)
    phi = psi @ u.T
    prob = phi.real**2 + phi.imag**2
    return np.clip(prob @ bits.astype(np.float64), 0.0, 1.0)


def collide_mixed(f, u):
    """Mixed-state sweep: diagonal density matrix conjugated by U."""
    bits = node.occupation_bits(f.shape[1])
    n = _product_probabilities(f, bits)
    # diagonal of U diag(n) U† per site
    diag = np.einsum("pm,xm,pm->xp", u, n, u.conj()).real
    return np.clip(diag @ bits.astype(np.float64), 0.0, 1.0)


def sample_counts(diag, members, key):
    """Multinomial counts from ``members`` inverse-CDF draws over ``diag``.

    A point-mass diagonal (an entry exactly 1.0) short-circuits to a
    deterministic count vector; the draws it would consume are private to
    this (site, time) stream, so skipping them cannot shift any other
    stream.
    """
    diag = np.asarray(diag, dtype=np.float64)
    d = diag.size
    counts = np.zeros(d, dtype=np.int64)
    peak = int(np.argmax(diag))
    if diag[peak] == 1.0:
        counts[peak] = members
        return counts
    cdf = np.cumsum(diag)
    u01 = prng.uniforms(key, members)
    idx = np.minimum(np.searchsorted(cdf, u01, side="right"), d - 1)
    return np.bincount(idx, minlength=d).astype(np.int64)


def collide_ensemble(f, u, members, seed, time):
    """Ensemble sweep: pure collision followed by sampled readout."""
    L = f.shape[0]
    bits = node.occupation_bits(f.shape[1])
    psi = _encode_amplitudes(f, bits)
    phi = psi @ u.T
    prob = phi.real**2 + phi.imag**2
    keys = prng.stream_keys(seed, np.arange(L, dtype=np.uint64), time)
    counts = np.empty((L, bits.shape[0]), dtype=np.int64)
    for x in range(L):
        counts[x] = sample_counts(prob[x], members, int(keys[x]))
    return (counts @ bits.astype(np.float64)) / float(members)
