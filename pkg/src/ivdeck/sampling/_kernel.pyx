# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled record sampler; mirrors sampling._fallback bit for bit.

See _fallback.py for the stream contract. Any change here must be made
there too; the test suite diffs their outputs.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t


cdef inline uint64_t _word(uint64_t key, uint64_t ctr) nogil:
    cdef uint64_t z = key + ctr * <uint64_t>0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _unit(uint64_t w) nogil:
    return <double>(w >> 11) * (1.0 / 9007199254740992.0)


def sample_records(double[::1] t, double[::1] t_star,
                   double[::1] c, double[::1] c_star,
                   double assign_prob, Py_ssize_t n,
                   unsigned long long seed, unsigned long long offset=0):
    """Draw records [offset, offset+n); same contract as the fallback."""
    u_arr = np.empty(n, dtype=np.int64)
    a_arr = np.empty(n, dtype=np.uint8)
    t_arr = np.empty(n, dtype=np.uint8)
    c_arr = np.empty(n, dtype=np.uint8)
    cdef int64_t[::1] u = u_arr
    cdef uint8_t[::1] assign = a_arr
    cdef uint8_t[::1] take = t_arr
    cdef uint8_t[::1] cure = c_arr
    cdef uint64_t key = <uint64_t>seed
    cdef uint64_t base
    cdef Py_ssize_t i, ui
    cdef Py_ssize_t size = t.shape[0]
    cdef double p_take, p_cure
    cdef int ai, ti, ci
    with nogil:
        for i in range(n):
            base = (<uint64_t>offset + <uint64_t>i) * <uint64_t>4
            ui = <Py_ssize_t>(_word(key, base + 1) % <uint64_t>size)
            ai = _unit(_word(key, base + 2)) < assign_prob
            p_take = t[ui] if ai else t_star[ui]
            ti = _unit(_word(key, base + 3)) < p_take
            p_cure = c[ui] if ti else c_star[ui]
            ci = _unit(_word(key, base + 4)) < p_cure
            u[i] = <int64_t>ui
            assign[i] = <uint8_t>ai
            take[i] = <uint8_t>ti
            cure[i] = <uint8_t>ci
    return u_arr, a_arr, t_arr, c_arr
