import numpy as np
import pytest

from qfp import codes
from qfp.rng import master_stream


@pytest.fixture
def rng():
    return master_stream(20260809)


def make_code(n, k, r, d, seed=0, distinct=False):
    params = codes.CodeParams(n=n, k=k, r=r, d=d)
    stream = master_stream(seed)
    if distinct:
        return codes.sample_distinct_column_code(params, stream, seed=seed)
    return codes.sample_code(params, stream, seed=seed)


def zero_code(n, k, r, d):
    """All-zero code: every message encodes to the zero codeword."""
    params = codes.CodeParams(n=n, k=k, r=r, d=d)
    linear = np.zeros((2 ** d, (params.column_bits + 63) // 64), dtype=np.uint64)
    nonlinear = np.zeros((2 ** r, (2 ** d + 63) // 64), dtype=np.uint64)
    return codes.QuasiLinearCode(params, linear, nonlinear)


def binom_sigma(p, n):
    q = min(1.0, max(0.0, p))
    return (q * (1.0 - q) / n) ** 0.5
