# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled lattice-sweep kernels.

Site-by-site C implementation of the sweeps defined in ``_kernels_py``;
the random-stream arithmetic matches ``prng`` bit for bit.
"""

import numpy as np

from libc.math cimport sqrt
from libc.stdint cimport int64_t, uint64_t

BACKEND_NAME = "compiled"
COMPILED = True

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15u
cdef uint64_t SEED_SALT = 0x243F6A8885A308D3u
cdef uint64_t MIX_M1 = 0xBF58476D1CE4E5B9u
cdef uint64_t MIX_M2 = 0x94D049BB133111EBu
cdef double TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z ^= z >> 30
    z *= MIX_M1
    z ^= z >> 27
    z *= MIX_M2
    return z ^ (z >> 31)


cdef inline uint64_t _stream_key(uint64_t seed, uint64_t site, uint64_t time) nogil:
    cdef uint64_t k = _mix64(seed ^ SEED_SALT)
    k = _mix64(k ^ (site * GOLDEN))
    return _mix64(k ^ (time * GOLDEN))


def stream_key(seed, site, time):
    """C stream-key derivation, exposed for parity tests against prng."""
    return int(_stream_key(<uint64_t> seed, <uint64_t> site, <uint64_t> time))


cdef inline void _encode_site(const double* frow, int b, int d,
                              double* s0, double* s1, double* psi) nogil:
    cdef int i, s
    cdef double a
    for i in range(b):
        s1[i] = sqrt(frow[i])
        s0[i] = sqrt(1.0 - frow[i])
    for s in range(d):
        a = 1.0
        for i in range(b):
            if (s >> (b - 1 - i)) & 1:
                a *= s1[i]
            else:
                a *= s0[i]
        psi[s] = a


cdef inline void _product_site(const double* frow, int b, int d, double* n) nogil:
    cdef int i, s
    cdef double a
    for s in range(d):
        a = 1.0
        for i in range(b):
            if (s >> (b - 1 - i)) & 1:
                a *= frow[i]
            else:
                a *= 1.0 - frow[i]
        n[s] = a


cdef inline double _clamp01(double v) nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def collide_pure(double[:, ::1] f, double complex[:, ::1] u):
    cdef Py_ssize_t L = f.shape[0]
    cdef int b = <int> f.shape[1]
    cdef int d = <int> u.shape[0]
    out_arr = np.zeros((L, b), dtype=np.float64)
    psi_arr = np.empty(d, dtype=np.float64)
    s0_arr = np.empty(b, dtype=np.float64)
    s1_arr = np.empty(b, dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] psi = psi_arr, s0 = s0_arr, s1 = s1_arr
    cdef Py_ssize_t x
    cdef int i, p, m
    cdef double complex acc
    cdef double w
    with nogil:
        for x in range(L):
            _encode_site(&f[x, 0], b, d, &s0[0], &s1[0], &psi[0])
            for p in range(d):
                acc = 0
                for m in range(d):
                    acc = acc + u[p, m] * psi[m]
                w = acc.real * acc.real + acc.imag * acc.imag
                for i in range(b):
                    if (p >> (b - 1 - i)) & 1:
                        out[x, i] += w
            for i in range(b):
                out[x, i] = _clamp01(out[x, i])
    return out_arr


def collide_mixed(double[:, ::1] f, double complex[:, ::1] u):
    cdef Py_ssize_t L = f.shape[0]
    cdef int b = <int> f.shape[1]
    cdef int d = <int> u.shape[0]
    out_arr = np.zeros((L, b), dtype=np.float64)
    n_arr = np.empty(d, dtype=np.float64)
    # |U|^2 weights: the conjugation restricted to a diagonal input
    usq_arr = np.ascontiguousarray(
        np.asarray(u).real ** 2 + np.asarray(u).imag ** 2
    )
    cdef double[:, ::1] out = out_arr
    cdef double[::1] n = n_arr
    cdef double[:, ::1] usq = usq_arr
    cdef Py_ssize_t x
    cdef int i, p, m
    cdef double w
    with nogil:
        for x in range(L):
            _product_site(&f[x, 0], b, d, &n[0])
            for p in range(d):
                w = 0.0
                for m in range(d):
                    w += usq[p, m] * n[m]
                for i in range(b):
                    if (p >> (b - 1 - i)) & 1:
                        out[x, i] += w
            for i in range(b):
                out[x, i] = _clamp01(out[x, i])
    return out_arr


cdef void _sample_site(const double* prob, int d, long long members,
                       uint64_t key, double* cdf, int64_t* counts) nogil:
    cdef int s, smax = 0
    cdef long long j
    cdef uint64_t z
    cdef double u01, run
    for s in range(d):
        counts[s] = 0
    for s in range(1, d):
        if prob[s] > prob[smax]:
            smax = s
    if prob[smax] == 1.0:
        counts[smax] = members
        return
    run = 0.0
    for s in range(d):
        run += prob[s]
        cdf[s] = run
    for j in range(members):
        z = key + (<uint64_t> (j + 1)) * GOLDEN
        z ^= z >> 30
        z *= MIX_M1
        z ^= z >> 27
        z *= MIX_M2
        z ^= z >> 31
        u01 = <double> (z >> 11) * TO_UNIT
        s = 0
        while s < d - 1 and u01 >= cdf[s]:
            s += 1
        counts[s] += 1


def sample_counts(double[::1] diag, long long members, key):
    cdef int d = <int> diag.shape[0]
    counts_arr = np.zeros(d, dtype=np.int64)
    cdf_arr = np.empty(d, dtype=np.float64)
    cdef int64_t[::1] counts = counts_arr
    cdef double[::1] cdf = cdf_arr
    cdef uint64_t k = <uint64_t> key
    with nogil:
        _sample_site(&diag[0], d, members, k, &cdf[0], &counts[0])
    return counts_arr


def collide_ensemble(double[:, ::1] f, double complex[:, ::1] u,
                     long long members, seed, time):
    cdef Py_ssize_t L = f.shape[0]
    cdef int b = <int> f.shape[1]
    cdef int d = <int> u.shape[0]
    out_arr = np.zeros((L, b), dtype=np.float64)
    psi_arr = np.empty(d, dtype=np.float64)
    prob_arr = np.empty(d, dtype=np.float64)
    cdf_arr = np.empty(d, dtype=np.float64)
    s0_arr = np.empty(b, dtype=np.float64)
    s1_arr = np.empty(b, dtype=np.float64)
    counts_arr = np.zeros(d, dtype=np.int64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] psi = psi_arr, prob = prob_arr, cdf = cdf_arr
    cdef double[::1] s0 = s0_arr, s1 = s1_arr
    cdef int64_t[::1] counts = counts_arr
    cdef uint64_t seed_c = <uint64_t> seed
    cdef uint64_t time_c = <uint64_t> time
    cdef uint64_t key
    cdef Py_ssize_t x
    cdef int i, p, m, s
    cdef double complex acc
    cdef double members_d = <double> members
    with nogil:
        for x in range(L):
            _encode_site(&f[x, 0], b, d, &s0[0], &s1[0], &psi[0])
            for p in range(d):
                acc = 0
                for m in range(d):
                    acc = acc + u[p, m] * psi[m]
                prob[p] = acc.real * acc.real + acc.imag * acc.imag
            key = _stream_key(seed_c, <uint64_t> x, time_c)
            _sample_site(&prob[0], d, members, key, &cdf[0], &counts[0])
            for s in range(d):
                if counts[s] == 0:
                    continue
                for i in range(b):
                    if (s >> (b - 1 - i)) & 1:
                        out[x, i] += <double> counts[s]
            for i in range(b):
                out[x, i] /= members_d
    return out_arr
