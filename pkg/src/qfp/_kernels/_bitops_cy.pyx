# cython: language_level=3
"""Compiled bit kernels: popcount scans and sign-packed dot products.

Bit convention matches the rest of the package: bit j of a string lives
in word j // 64 at position j % 64 (little-endian within words).
"""

import numpy as np

cdef extern from *:
    """
    #define qfp_popcountll __builtin_popcountll
    """
    int qfp_popcountll(unsigned long long x) nogil


def popcounts(const unsigned long long[:, ::1] words):
    """Hamming weight of each packed row."""
    cdef Py_ssize_t n = words.shape[0], w = words.shape[1]
    cdef Py_ssize_t i, j
    cdef long long acc
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for i in range(n):
            acc = 0
            for j in range(w):
                acc += qfp_popcountll(words[i, j])
            o[i] = acc
    return out


def hamming_matrix(const unsigned long long[:, ::1] a,
                   const unsigned long long[:, ::1] b):
    """Pairwise Hamming distances between packed rows of a and b."""
    if a.shape[1] != b.shape[1]:
        raise ValueError("word counts differ")
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], w = a.shape[1]
    cdef Py_ssize_t i, j, t
    cdef long long acc
    out = np.empty((na, nb), dtype=np.int64)
    cdef long long[:, ::1] o = out
    with nogil:
        for i in range(na):
            for j in range(nb):
                acc = 0
                for t in range(w):
                    acc += qfp_popcountll(a[i, t] ^ b[j, t])
                o[i, j] = acc
    return out


def pair_max_abs_dev(const unsigned long long[:, ::1] words, long long center):
    """max over unordered row pairs of |hamming(row_i, row_j) - center|."""
    cdef Py_ssize_t n = words.shape[0], w = words.shape[1]
    cdef Py_ssize_t i, j, t
    cdef long long acc, dev, best = 0
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0
                for t in range(w):
                    acc += qfp_popcountll(words[i, t] ^ words[j, t])
                dev = acc - center
                if dev < 0:
                    dev = -dev
                if dev > best:
                    best = dev
    return int(best)


def signed_dots(const unsigned long long[:, ::1] words, Py_ssize_t nbits,
                const double complex[::1] v):
    """For each packed row b: sum_i (-1)^{b_i} v_i over the first nbits bits."""
    if nbits > words.shape[1] * 64 or nbits != v.shape[0]:
        raise ValueError("bit count does not match")
    cdef Py_ssize_t n = words.shape[0], i, j, base, lim
    cdef Py_ssize_t nw = (nbits + 63) // 64
    cdef unsigned long long word
    cdef double complex total = 0, acc
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t t
    with nogil:
        for j in range(nbits):
            total = total + v[j]
        for i in range(n):
            acc = 0
            for t in range(nw):
                word = words[i, t]
                if word == 0:
                    continue
                base = t * 64
                lim = nbits - base
                if lim > 64:
                    lim = 64
                for j in range(lim):
                    if (word >> j) & 1:
                        acc = acc + v[base + j]
            o[i] = total - 2 * acc
    return out


def unpack_signs(const unsigned long long[:, ::1] words, Py_ssize_t nbits):
    """Expand packed rows into a dense matrix of +/-1 (bit set -> -1)."""
    if nbits > words.shape[1] * 64:
        raise ValueError("bit count exceeds storage")
    cdef Py_ssize_t n = words.shape[0], i, j
    cdef unsigned long long word
    out = np.empty((n, nbits), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(n):
            for j in range(nbits):
                word = words[i, j >> 6]
                o[i, j] = -1.0 if (word >> (j & 63)) & 1 else 1.0
    return out
