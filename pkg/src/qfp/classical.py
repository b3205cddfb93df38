"""Classical baseline: 2-universal hashing and the leakage lower bound.

The hash family is h_s(x) = A x XOR b over GF(2) with s = (A, b), A an
m x n bit matrix and b an m-bit offset. Exhaustive computations
enumerate the matrix space; the offset b only relabels hash values and
therefore never changes collision probabilities or entropies, which
keeps the full joint table tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .codes import BitString, ScaleGuardError

MATRIX_SPACE_GUARD = 20  # largest m*n for exhaustive matrix enumeration


@dataclass(frozen=True)
class HashScheme:
    """Affine GF(2) hash family from n bits to m bits."""

    n: int
    m: int
    family_seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n >= 1 and m >= 1 required")

    @property
    def matrix_bits(self) -> int:
        return self.m * self.n


@dataclass(frozen=True)
class ClassicalLeakageReport:
    eps_plus: float
    eps_minus: float
    mi_bits: float
    lower_bound_bits: float
    zero_error: bool = False

    def to_json(self) -> dict:
        return {
            "eps_plus": self.eps_plus,
            "eps_minus": self.eps_minus,
            "mi_bits": self.mi_bits,
            "lower_bound_bits": self.lower_bound_bits,
            "zero_error": self.zero_error,
        }


def hash_value(rows: tuple[int, ...], offset: int, x: int) -> int:
    """h_s(x) for s = (rows of A, offset b), inputs as packed integers."""
    h = offset
    for j, row in enumerate(rows):
        h ^= (bin(row & x).count("1") & 1) << j
    return h


def draw_key(scheme: HashScheme, rng: Generator) -> tuple[tuple[int, ...], int]:
    rows = tuple(int(v) for v in rng.integers(0, 2 ** scheme.n, size=scheme.m))
    offset = int(rng.integers(0, 2 ** scheme.m))
    return rows, offset


def classical_fingerprint(scheme: HashScheme, x: BitString, rng: Generator):
    """Randomized fingerprint (s, h_s(x)) with s uniform over the family."""
    if x.length != scheme.n:
        raise ValueError(f"input has {x.length} bits, expected {scheme.n}")
    key = draw_key(scheme, rng)
    return key, hash_value(key[0], key[1], x.to_int())


def _parity_table(n: int) -> np.ndarray:
    """parity(row & x) for every (row, x), both over 2^n values."""
    rows = np.arange(2 ** n, dtype=np.uint32)
    masked = rows[:, None] & rows[None, :]
    return np.bitwise_count(masked).astype(np.uint8) & 1


def classical_error(scheme: HashScheme) -> tuple[float, float]:
    """Exact worst-case collision probability over all input pairs.

    For every difference z = x1 XOR x2 != 0 the collision event is
    A z = 0; the probability over the family factorizes over rows and
    is evaluated by enumerating all rows. eps_minus is 0 by
    construction (equal inputs always hash equally).
    """
    if scheme.n > 10 or scheme.matrix_bits > MATRIX_SPACE_GUARD:
        raise ScaleGuardError("family too large for exhaustive error scan")
    par = _parity_table(scheme.n)
    zero_frac = (par[1:] == 0).mean(axis=1)  # per z != 0, over rows
    eps_plus = float((zero_frac ** scheme.m).max())
    return eps_plus, 0.0


def classical_mi(scheme: HashScheme) -> float:
    """Exact I(X; (S, H)) in bits for X uniform, from the joint table.

    Enumerates every matrix A; the offset b is marginalized in closed
    form since N_{(A,b)}(h) = N_A(h XOR b) preserves preimage-count
    multisets. I = n - E[log2 |preimage|]."""
    if scheme.matrix_bits > MATRIX_SPACE_GUARD:
        raise ScaleGuardError("family too large for exhaustive joint table")
    n, m = scheme.n, scheme.m
    par = _parity_table(n)
    inputs = 2 ** n
    # h values for every (row_0..row_{m-1}, x), built row by row
    shape_rows = [2 ** n] * m
    h = np.zeros(shape_rows + [inputs], dtype=np.uint32)
    for j in range(m):
        idx = [None] * (m + 1)
        idx[j] = slice(None)
        idx[m] = slice(None)
        h |= (par.astype(np.uint32) << j)[tuple(idx)]
    flat = h.reshape(-1, inputs)
    counts = np.zeros((flat.shape[0], 2 ** m), dtype=np.int64)
    rows_idx = np.repeat(np.arange(flat.shape[0]), inputs)
    np.add.at(counts, (rows_idx, flat.reshape(-1)), 1)
    nz = counts > 0
    p = counts / (flat.shape[0] * inputs)
    cond_entropy = float((p[nz] * np.log2(counts[nz])).sum())
    return n - cond_entropy


def exhaustive_family_error(n: int, keys, hash_fn) -> tuple[float, float]:
    """Collision probabilities for an arbitrary finite hash family by
    direct enumeration of keys and input pairs. Oracle-grade: quadratic
    in 2^n times the family size."""
    keys = list(keys)
    eps_plus = 0.0
    for x in range(2 ** n):
        for y in range(x + 1, 2 ** n):
            hits = sum(hash_fn(s, x) == hash_fn(s, y) for s in keys)
            eps_plus = max(eps_plus, hits / len(keys))
    return eps_plus, 0.0


def exhaustive_family_mi(n: int, keys, hash_fn) -> float:
    """I(X; (S, H)) in bits for an arbitrary finite hash family from the
    fully enumerated joint table."""
    keys = list(keys)
    inputs = 2 ** n
    total = len(keys) * inputs
    cond = 0.0
    for s in keys:
        counts: dict[int, int] = {}
        for x in range(inputs):
            h = hash_fn(s, x)
            counts[h] = counts.get(h, 0) + 1
        cond += sum(c * math.log2(c) for c in counts.values()) / total
    return n - cond


def impossibility_bound(eps_plus: float, eps_minus: float,
                        n: int | None = None) -> float:
    """(1 - eps_minus) * log2(1 / eps_plus) bits; the zero-error
    convention returns n (the fingerprint determines x)."""
    if not 0.0 <= eps_plus <= 1.0:
        raise ValueError(f"eps_plus {eps_plus} outside [0, 1]")
    if not 0.0 <= eps_minus <= 1.0:
        raise ValueError(f"eps_minus {eps_minus} outside [0, 1]")
    if eps_plus == 0.0:
        if n is None:
            raise ValueError("zero-error convention needs n")
        return float(n)
    return (1.0 - eps_minus) * math.log2(1.0 / eps_plus)


def classical_report(scheme: HashScheme) -> ClassicalLeakageReport:
    eps_plus, eps_minus = classical_error(scheme)
    mi = classical_mi(scheme)
    zero = eps_plus == 0.0
    bound = impossibility_bound(eps_plus, eps_minus, n=scheme.n)
    return ClassicalLeakageReport(eps_plus, eps_minus, mi, bound, zero)
