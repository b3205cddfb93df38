"""Pure numpy fallback for the compiled bit kernels.

Same contracts as ``_bitops_cy``; relies on ``np.bitwise_count`` and BLAS
matmuls instead of explicit popcount loops.
"""

import numpy as np

_U64 = np.uint64


def popcounts(words):
    return np.bitwise_count(words).sum(axis=1).astype(np.int64)


def hamming_matrix(a, b):
    if a.shape[1] != b.shape[1]:
        raise ValueError("word counts differ")
    # chunk rows of a to keep the (na, nb, w) xor temporary bounded
    na = a.shape[0]
    out = np.empty((na, b.shape[0]), dtype=np.int64)
    step = max(1, (1 << 22) // max(1, b.shape[0] * a.shape[1]))
    for lo in range(0, na, step):
        hi = min(na, lo + step)
        x = a[lo:hi, None, :] ^ b[None, :, :]
        out[lo:hi] = np.bitwise_count(x).sum(axis=2, dtype=np.int64)
    return out


def pair_max_abs_dev(words, center):
    n = words.shape[0]
    if n < 2:
        return 0
    best = 0
    step = max(1, (1 << 22) // max(1, n * words.shape[1]))
    for lo in range(0, n - 1, step):
        hi = min(n - 1, lo + step)
        x = words[lo:hi, None, :] ^ words[None, lo + 1:, :]
        d = np.bitwise_count(x).sum(axis=2, dtype=np.int64)
        # mask the lower triangle (pairs with j <= i)
        rows = np.arange(lo, hi)[:, None]
        cols = np.arange(lo + 1, n)[None, :]
        dev = np.abs(d - center)
        dev[cols <= rows] = 0
        m = int(dev.max()) if dev.size else 0
        if m > best:
            best = m
    return best


def unpack_signs(words, nbits):
    if nbits > words.shape[1] * 64:
        raise ValueError("bit count exceeds storage")
    bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return 1.0 - 2.0 * bits[:, :nbits].astype(np.float64)


def signed_dots(words, nbits, v):
    if nbits > words.shape[1] * 64 or nbits != v.shape[0]:
        raise ValueError("bit count does not match")
    return unpack_signs(words, nbits) @ np.ascontiguousarray(v, dtype=np.complex128)
