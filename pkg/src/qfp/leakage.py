"""Information leakage of fingerprinting schemes.

Covers the scaled-ensemble completeness check, the outcome
distributions mu_v, the relative-entropy functional and its multistart
maximization, exact accessible-information computations for rank-one
POVMs, and the generic random-basis extraction attack.

All internal information quantities are in nats (natural log); only the
extraction attack converts to bits at its boundary, since that is the
unit its callers report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .codes import BitString, QuasiLinearCode, ScaleGuardError, distinct_columns
from .fingerprint import _check_rank_exponent, fingerprint_matrix, message_value
from .linalg import (DensityOperator, DimensionMismatchError, UnitVector,
                     haar_matrix, haar_unit_vector, pure_trace_distance)
from .rng import parallel_map, substream

LABEL_GUARD = 12          # largest label length for 2^n label sums
EXTRACTION_LABEL_GUARD = 2 ** 12
LOG_CLAMP = 1e-300        # probabilities clamped here before logs
PURE_EXPECTATION_BOUND = 23.0  # numerator of the k=0 expectation bound


class InvalidPovmError(ValueError):
    pass


class HypothesisError(ValueError):
    """An analytic precondition (distinct columns, trace-distance range) fails."""


@dataclass(frozen=True)
class MuDistribution:
    """Outcome weights mu_v(a) = <v| rho'_a |v> over all labels a."""

    v: np.ndarray
    values: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return {a: float(p) for a, p in enumerate(self.values)}

    @property
    def total(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True)
class RankOnePovm:
    """Rank-one POVM {alpha_j |v_j><v_j|}; rows of ``vectors`` are v_j."""

    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        v = np.asarray(self.vectors, dtype=np.complex128)
        if w.ndim != 1 or v.ndim != 2 or v.shape[0] != w.shape[0]:
            raise InvalidPovmError("weights and vectors do not line up")
        if (w <= 0).any():
            raise InvalidPovmError("weights must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def completeness_defect(self) -> float:
        acc = (self.vectors.conj().T * self.weights) @ self.vectors
        return float(np.abs(acc - np.eye(self.dim)).max())


@dataclass(frozen=True)
class LeakageReport:
    functional_max_nats: float
    restarts: int
    iacc_bound_nats: float
    extraction_mi_bits: float
    bases: int
    seed: int

    def to_json(self) -> dict:
        return {
            "functional_max_nats": self.functional_max_nats,
            "iacc_bound_nats": self.iacc_bound_nats,
            "extraction_mi_bits": self.extraction_mi_bits,
            "bases": self.bases,
            "restarts": self.restarts,
            "seed": self.seed,
            "estimate": True,
        }


def _label_setup(code: QuasiLinearCode, k: int):
    label_bits = _check_rank_exponent(code, k)
    if label_bits > LABEL_GUARD:
        raise ScaleGuardError(f"label length {label_bits} exceeds {LABEL_GUARD}")
    return label_bits, 2 ** label_bits


def completeness_defect(code: QuasiLinearCode, k: int) -> float:
    """Operator norm of (sum_a rho'_a - I), rho'_a = 2^(d-n) rho_a.

    Uses the Gram matrix of the fingerprint family instead of
    accumulating 2^n dense operators; when there are fewer fingerprints
    than dimensions the sum is rank deficient and the defect is at
    least 1.
    """
    label_bits, _ = _label_setup(code, k)
    p = code.params
    u = fingerprint_matrix(code)
    scale = 2.0 ** (p.d - label_bits - k)
    if u.shape[0] < u.shape[1]:
        gram = scale * (u @ u.T)
        eigs = np.linalg.eigvalsh(gram)
        return max(1.0, float(np.abs(eigs - 1.0).max()))
    acc = scale * (u.T @ u)
    return float(np.abs(np.linalg.eigvalsh(acc) - 1.0).max())


def _mu_values(code: QuasiLinearCode, k: int, v: np.ndarray,
               label_bits: int) -> np.ndarray:
    u = fingerprint_matrix(code)
    amps = u @ np.asarray(v, dtype=np.complex128)
    w = (amps.real ** 2 + amps.imag ** 2).reshape(2 ** label_bits, 2 ** k)
    return 2.0 ** (code.params.d - label_bits - k) * w.sum(axis=1)


def mu_distribution(code: QuasiLinearCode, k: int, v) -> MuDistribution:
    """mu_v(a) = 2^(d-n-k) sum_i |<v|u_{i.a}>|^2 for every label a."""
    label_bits, _ = _label_setup(code, k)
    vec = v.amplitudes if isinstance(v, UnitVector) else np.asarray(v)
    if vec.shape != (code.params.codeword_bits,):
        raise DimensionMismatchError(f"vector shape {vec.shape}")
    return MuDistribution(vec, _mu_values(code, k, vec, label_bits))


def _relent(mu: np.ndarray, label_bits: int) -> float:
    clamped = np.maximum(mu, LOG_CLAMP)
    terms = np.where(mu > 0.0,
                     mu * (label_bits * math.log(2) + np.log(clamped)), 0.0)
    return float(terms.sum())


def relent_functional(code: QuasiLinearCode, k: int, v) -> float:
    """sum_a mu_v(a) ln(2^n mu_v(a)) in nats, with 0 ln 0 = 0.

    Relative entropy of mu_v from uniform whenever mu_v is normalized.
    """
    label_bits, _ = _label_setup(code, k)
    vec = v.amplitudes if isinstance(v, UnitVector) else np.asarray(v)
    return _relent(_mu_values(code, k, vec, label_bits), label_bits)


def _ascend(code: QuasiLinearCode, k: int, v0: np.ndarray, iters: int,
            label_bits: int):
    """Fixed-point ascent v <- normalize(G v), G = sum_a c_a rho'_a with
    c_a = 1 + ln(2^n mu_v(a)); a heuristic for the first-order condition.
    Keeps the best value seen, which lower-bounds the true maximum."""
    u = fingerprint_matrix(code)
    scale = 2.0 ** (code.params.d - label_bits - k)
    v = np.asarray(v0, dtype=np.complex128)
    best_v, best = v, _relent(_mu_values(code, k, v, label_bits), label_bits)
    val = best
    for _ in range(iters):
        amps = u @ v
        mu = scale * (amps.real ** 2 + amps.imag ** 2).reshape(-1, 2 ** k).sum(axis=1)
        coef = 1.0 + label_bits * math.log(2) + np.log(np.maximum(mu, LOG_CLAMP))
        w = u.T @ (np.repeat(coef, 2 ** k) * amps) * scale
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            break
        v = w / nrm
        new = _relent(_mu_values(code, k, v, label_bits), label_bits)
        if new > best:
            best_v, best = v, new
        if new - val < 1e-10:
            break
        val = new
    return best_v, best


def functional_max(code: QuasiLinearCode, k: int, restarts: int, iters: int,
                   seed: int, threads: int | None = None,
                   extra_starts=None) -> tuple[UnitVector, float]:
    """Multistart lower bound on max_v of the relative-entropy functional.

    Haar-random starts (one substream per restart index) refined by
    fixed-point ascent; ``extra_starts`` vectors are refined as well.
    The returned value is an estimate: a certified lower bound on the
    true maximum, not the maximum itself.
    """
    label_bits, _ = _label_setup(code, k)
    dim = code.params.codeword_bits
    starts = [] if extra_starts is None else [np.asarray(s, dtype=np.complex128)
                                              for s in extra_starts]
    if restarts + len(starts) < 1:
        raise ValueError("need at least one start")

    def one(i: int):
        if i < restarts:
            v0 = haar_unit_vector(dim, substream(seed, i)).amplitudes
        else:
            v0 = starts[i - restarts]
        return _ascend(code, k, v0, iters, label_bits)

    results = parallel_map(one, restarts + len(starts), threads)
    best_v, best = results[0]
    for v, val in results[1:]:
        if val > best:
            best_v, best = v, val
    return UnitVector.normalized(best_v), best


def _conditional_outcomes(code: QuasiLinearCode, k: int,
                          vectors: np.ndarray, label_bits: int) -> np.ndarray:
    """p(j|a) / alpha_j: matrix of <v_j| rho_a |v_j>."""
    u = fingerprint_matrix(code)
    g = vectors.conj() @ u.T
    w = (g.real ** 2 + g.imag ** 2).reshape(g.shape[0], 2 ** label_bits, 2 ** k)
    return w.sum(axis=2) * 2.0 ** (-k)


def _entropy(p: np.ndarray, axis=None) -> np.ndarray:
    q = np.maximum(p, LOG_CLAMP)
    return -(np.where(p > 0, p * np.log(q), 0.0)).sum(axis=axis)


def mutual_information_povm(code: QuasiLinearCode, k: int,
                            povm: RankOnePovm) -> float:
    """Exact I(A;J) in nats for uniform labels measured by the POVM."""
    label_bits, labels = _label_setup(code, k)
    if povm.dim != code.params.codeword_bits:
        raise DimensionMismatchError("POVM dimension differs from scheme")
    defect = povm.completeness_defect()
    if defect > 1e-6:
        raise InvalidPovmError(f"completeness defect {defect:.3g} exceeds 1e-6")
    cond = povm.weights[:, None] * _conditional_outcomes(
        code, k, povm.vectors, label_bits)
    marginal = cond.mean(axis=1)
    h_j = _entropy(marginal)
    h_j_given_a = _entropy(cond, axis=0).mean()
    return float(h_j - h_j_given_a)


def iacc_bound_check(code: QuasiLinearCode, k: int, povm: RankOnePovm,
                     tol: float = 1e-7) -> bool:
    """Convexity step of the accessible-information bound: the POVM's
    mutual information never exceeds the functional at its own best
    vector. Requires distinct columns (the completeness hypothesis)."""
    if not distinct_columns(code):
        raise HypothesisError("code columns are not distinct")
    label_bits, _ = _label_setup(code, k)
    mi = mutual_information_povm(code, k, povm)
    # mu_v(a) = 2^(d-n) <v|rho_a|v>; the 2^(-k) mixture weight is already
    # inside the conditional outcomes
    scale = 2.0 ** (code.params.d - label_bits)
    mu_all = scale * _conditional_outcomes(code, k, povm.vectors, label_bits)
    rhs = max(_relent(row, label_bits) for row in mu_all)
    return mi <= rhs + tol


@dataclass(frozen=True)
class ExtractionResult:
    mean_bits: float
    per_basis_bits: np.ndarray

    @property
    def bases(self) -> int:
        return len(self.per_basis_bits)


def _state_components(state: DensityOperator):
    if state.components is not None:
        w = np.array([c[0] for c in state.components])
        m = np.array([c[1].amplitudes for c in state.components])
        return w, m
    eigvals, eigvecs = np.linalg.eigh(state.matrix)
    keep = eigvals > 1e-12
    return eigvals[keep], eigvecs[:, keep].T


def extraction_attack(states: dict, bases: int, seed: int,
                      threads: int | None = None,
                      base_offset: int = 0) -> ExtractionResult:
    """Mean information (bits) extracted by Haar-random complete
    projective measurements, exact per basis.

    Works on any ensemble of density operators, not only quasi-linear
    fingerprints. Basis b is drawn from substream (seed, base_offset+b),
    so partial runs recompose deterministically.
    """
    items = sorted(states.items(), key=lambda kv: _label_sort_key(kv[0]))
    if len(items) > EXTRACTION_LABEL_GUARD:
        raise ScaleGuardError(f"more than {EXTRACTION_LABEL_GUARD} labels")
    dims = {s.dim for _, s in items}
    if len(dims) != 1:
        raise DimensionMismatchError(f"mixed dimensions {sorted(dims)}")
    dim = dims.pop()
    comps = [_state_components(s) for _, s in items]
    weights = np.concatenate([w for w, _ in comps])
    stacked = np.vstack([m for _, m in comps])
    owner_slices = []
    pos = 0
    for w, _ in comps:
        owner_slices.append(slice(pos, pos + len(w)))
        pos += len(w)

    def one(b: int) -> float:
        basis = haar_matrix(dim, substream(seed, base_offset + b)).T
        g = basis.conj() @ stacked.T
        contrib = (g.real ** 2 + g.imag ** 2) * weights
        cond = np.stack([contrib[:, sl].sum(axis=1) for sl in owner_slices], axis=1)
        h_j = _entropy(cond.mean(axis=1))
        return float(h_j - _entropy(cond, axis=0).mean()) / math.log(2)

    per_basis = np.array(parallel_map(one, bases, threads))
    return ExtractionResult(float(per_basis.mean()), per_basis)


def _label_sort_key(label):
    if isinstance(label, BitString):
        return label.to_int()
    return label


def scheme_states(code: QuasiLinearCode, k: int) -> dict[int, DensityOperator]:
    """Ensemble {a -> rho_a} of the mixed scheme, component form."""
    label_bits, labels = _label_setup(code, k)
    u = fingerprint_matrix(code)
    dim = code.params.codeword_bits
    out = {}
    w = 2.0 ** (-k)
    for a in range(labels):
        comps = tuple(
            (w, UnitVector(dim, u[message_value(i, a, k)]))
            for i in range(2 ** k))
        out[a] = DensityOperator(dim, components=comps)
    return out


def lipschitz_check(code: QuasiLinearCode, k: int, v, w,
                    slack: float = 1e-7) -> bool:
    """Near-Lipschitz continuity of the functional:
    |F(v) - F(w)| <= 2^(d-1) * eps * ln(2/eps) for eps = ||vv - ww||_1."""
    if not distinct_columns(code):
        raise HypothesisError("code columns are not distinct")
    vec_v = v.amplitudes if isinstance(v, UnitVector) else np.asarray(v)
    vec_w = w.amplitudes if isinstance(w, UnitVector) else np.asarray(w)
    eps = pure_trace_distance(vec_v, vec_w)
    if eps > 2.0 / math.e:
        raise HypothesisError(f"trace distance {eps:.4f} exceeds 2/e")
    lhs = abs(relent_functional(code, k, vec_v) - relent_functional(code, k, vec_w))
    rhs = 0.0 if eps == 0.0 else 2.0 ** (code.params.d - 1) * eps * math.log(2.0 / eps)
    return lhs <= rhs + slack


def expectation_bound_mc(params, v, a0: BitString, samples: int, seed: int,
                         threads: int | None = None, return_values: bool = False):
    """Monte Carlo over random codes of max{0, mu_v(a0) ln(2^n mu_v(a0))}.

    Returns (empirical mean, analytic bound); the bound 23/2^n applies
    to the pure scheme only, so it is None when params.k > 0. With
    ``return_values`` the per-sample terms are appended for error bars.
    """
    from . import _kernels as kernels
    from .codes import sample_code

    k = params.k
    label_bits = params.n
    vec = v.amplitudes if isinstance(v, UnitVector) else np.asarray(v, np.complex128)
    if a0.length != label_bits:
        raise DimensionMismatchError(f"label has {a0.length} bits, expected {label_bits}")
    a_val = a0.to_int()
    scale = 2.0 ** (params.d - label_bits - k)
    nbits = params.codeword_bits
    ln2n = label_bits * math.log(2)

    def one(i: int) -> float:
        code = sample_code(params, substream(seed, i))
        rows = np.vstack([code.encode_value(message_value(j, a_val, k))
                          for j in range(2 ** k)])
        amps = kernels.signed_dots(rows, nbits, vec) * 2.0 ** (-params.d / 2)
        mu = scale * float((amps.real ** 2 + amps.imag ** 2).sum())
        return max(0.0, mu * (ln2n + math.log(max(mu, LOG_CLAMP))))

    values = np.array(parallel_map(one, samples, threads))
    mean = float(values.mean())
    bound = PURE_EXPECTATION_BOUND / 2 ** label_bits if k == 0 else None
    if return_values:
        return mean, bound, values
    return mean, bound


def random_rank_one_povm(dim: int, rng: Generator,
                         parts: int | None = None) -> RankOnePovm:
    """Convex mixture of 1-3 Haar projective measurements: a valid
    rank-one POVM whose weights sum to the dimension."""
    m = int(parts) if parts else int(rng.integers(1, 4))
    lam = rng.dirichlet(np.ones(m))
    vectors = np.vstack([haar_matrix(dim, rng).T for _ in range(m)])
    weights = np.repeat(lam, dim)
    return RankOnePovm(weights, vectors)
