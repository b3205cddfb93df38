"""Concentration-bound formulas and their Monte Carlo falsification suites.

Each analytic bound is an evaluable function; each suite samples the
corresponding experiment and checks the empirical statistic against the
bound with three binomial standard deviations of slack. A suite whose
bound is too small to resolve at the requested sample count reports
status "insufficient-power" instead of a vacuous pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.random import Generator
from scipy import stats

from .linalg import DensityOperator, DimensionMismatchError
from .rng import standard_complex, substream

POWER_SAMPLE_LIMIT = 10 ** 7
_TAIL_EVENTS_NEEDED = 10.0


class BoundValue(NamedTuple):
    raw: float
    clamped: float


def hoeffding_bound(t: float, ranges) -> BoundValue:
    """Two-sided Hoeffding tail 2 exp(-2 t^2 / sum (b_i - a_i)^2)."""
    if t <= 0:
        raise ValueError("t > 0 required")
    denom = sum((b - a) ** 2 for a, b in ranges)
    if denom <= 0:
        raise ValueError("degenerate ranges")
    raw = 2.0 * math.exp(-2.0 * t * t / denom)
    return BoundValue(raw, min(1.0, raw))


def complex_hoeffding_bound(t: float, moduli) -> float:
    """Tail bound 4 exp(-t^2 / (4 sum |c_i|^2)) for centered complex sums."""
    if t <= 0:
        raise ValueError("t > 0 required")
    s = sum(abs(c) ** 2 for c in moduli)
    if s <= 0:
        raise ValueError("degenerate moduli")
    return 4.0 * math.exp(-t * t / (4.0 * s))


def mgf_bound(h: float, c: float, alpha: float, beta: float) -> float:
    """exp(c + (ln(2 beta / c))^2 h^2 / (2 alpha^2)), valid for
    exponential-tailed centered variables with h in (0, alpha/2],
    c in (0, 2]."""
    if alpha <= 0:
        raise ValueError("alpha > 0 required")
    if not 0 < h <= alpha / 2:
        raise ValueError("h outside (0, alpha/2]")
    if not 0 < c <= 2:
        raise ValueError("c outside (0, 2]")
    if beta < 1:
        raise ValueError("beta >= 1 required")
    return math.exp(c + (math.log(2 * beta / c)) ** 2 * h * h / (2 * alpha * alpha))


def relaxed_chernoff_bound(n: int, t: float, alpha: float, beta: float) -> float:
    """exp(-n t^2 alpha^2 / (244 (ln(beta / (t alpha)))^2)) for mean
    deviations of exponential-tailed i.i.d. sums, t in (0, 1/(7 alpha)]."""
    if alpha <= 0:
        raise ValueError("alpha > 0 required")
    if beta < 1:
        raise ValueError("beta >= 1 required")
    if not 0 < t <= 1.0 / (7.0 * alpha):
        raise ValueError("t outside (0, 1/(7 alpha)]")
    if n < 1:
        raise ValueError("n >= 1 required")
    log_term = math.log(beta / (t * alpha))
    return math.exp(-n * t * t * alpha * alpha / (244.0 * log_term * log_term))


def eps_net_size_bound(dim: int, eps: float) -> float:
    """(4 / eps)^(2 (D - 1)): maximal-packing net size for pure states."""
    if not 0 < eps <= 2:
        raise ValueError("eps outside (0, 2]")
    if dim < 1:
        raise ValueError("dimension >= 1 required")
    return (4.0 / eps) ** (2 * (dim - 1))


@dataclass(frozen=True)
class TailCheckResult:
    """Outcome of one Monte Carlo suite.

    ``statistic`` names what ``empirical_tail`` holds: a tail
    probability, a sample mean, a frequency matched two-sided against
    an exact value, a goodness-of-fit p-value, or a positivity witness.
    """

    suite: str
    bound_value: float
    empirical_tail: float
    samples: int
    passed: bool
    statistic: str = "tail"
    status: str = "ok"

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "bound_value": self.bound_value,
            "empirical_tail": self.empirical_tail,
            "samples": self.samples,
            "passed": self.passed,
            "statistic": self.statistic,
            "status": self.status,
        }


def _binom_sigma(p: float, n: int) -> float:
    q = min(1.0, max(0.0, p))
    return math.sqrt(q * (1.0 - q) / n)


def _tail_result(suite: str, bound: float, freq: float, n: int) -> TailCheckResult:
    if bound < _TAIL_EVENTS_NEEDED / POWER_SAMPLE_LIMIT and n * bound < _TAIL_EVENTS_NEEDED:
        return TailCheckResult(suite, bound, freq, n, False, "tail",
                               "insufficient-power")
    passed = freq <= bound + 3.0 * _binom_sigma(bound, n)
    return TailCheckResult(suite, bound, freq, n, passed)


def _match_result(suite: str, target: float, freq: float, n: int) -> TailCheckResult:
    sigma = _binom_sigma(target, n)
    passed = abs(freq - target) <= 3.0 * sigma
    return TailCheckResult(suite, target, freq, n, passed, "match")


def hoeffding_suite(samples: int, rng: Generator, n: int = 100,
                    t: float = 20.0) -> TailCheckResult:
    """Sums of n fair +/-1 coins against the Hoeffding tail at t."""
    bound = hoeffding_bound(t, [(-1.0, 1.0)] * n).clamped
    sums = 2.0 * rng.binomial(n, 0.5, size=samples) - n
    freq = float((np.abs(sums) >= t).mean())
    return _tail_result("hoeffding", bound, freq, samples)


def complex_hoeffding_suite(samples: int, rng: Generator, n: int = 64,
                            t: float = 24.0) -> TailCheckResult:
    """Sums of n unit-modulus random phases against the complex bound."""
    bound = min(1.0, complex_hoeffding_bound(t, [1.0] * n))
    freq = 0.0
    done = 0
    while done < samples:
        chunk = min(samples - done, 1 << 18)
        phases = np.exp(2j * np.pi * rng.random((chunk, n)))
        freq += float((np.abs(phases.sum(axis=1)) >= t).sum())
        done += chunk
    return _tail_result("complex_hoeffding", bound, freq / samples, samples)


def mgf_suite(samples: int, rng: Generator, alpha: float = 4.0,
              beta: float = 4.0, h: float = 1.0, c: float = 1.0) -> TailCheckResult:
    """E[exp(h Y)] for the centered exponential Y = Exp(alpha) - 1/alpha,
    which satisfies the tail hypothesis with a = -1/alpha, against the
    moment-generating-function bound."""
    bound = mgf_bound(h, c, alpha, beta)
    y = rng.exponential(scale=1.0 / alpha, size=samples) - 1.0 / alpha
    vals = np.exp(h * y)
    mean = float(vals.mean())
    sem = float(vals.std(ddof=1) / math.sqrt(samples))
    return TailCheckResult("mgf", bound, mean, samples,
                           mean <= bound + 3.0 * sem, "mean")


def relaxed_chernoff_suite(trials: int, rng: Generator, n: int = 10 ** 4,
                           alpha: float = 2.0, beta: float = 2.0,
                           t: float = 0.05) -> TailCheckResult:
    """Mean deviations of centered Exp(alpha) sums against the relaxed
    Chernoff bound."""
    bound = min(1.0, relaxed_chernoff_bound(n, t, alpha, beta))
    mu = 0.0
    exceed = 0
    for start in range(0, trials, 64):
        m = min(64, trials - start)
        x = rng.exponential(scale=1.0 / alpha, size=(m, n)) - 1.0 / alpha
        exceed += int((x.mean(axis=1) >= mu + t).sum())
    return _tail_result("relaxed_chernoff", bound, exceed / trials, trials)


def haar_tail_suite(samples: int, rng: Generator, dim: int = 8,
                    xs=(0.1, 0.3, 0.5)) -> list[TailCheckResult]:
    """P[|<u|w>|^2 >= x] for Haar u against the exact (1-x)^(D-1)."""
    w = standard_complex(rng, dim)
    w /= np.linalg.norm(w)
    z = standard_complex(rng, (samples, dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    ov = np.abs(z @ w.conj()) ** 2
    out = []
    for x in xs:
        target = (1.0 - x) ** (dim - 1)
        freq = float((ov >= x).mean())
        out.append(_match_result(f"haar_tail_x{x:g}", target, freq, samples))
    return out


def simplex_uniformity_suite(samples: int, rng: Generator, grid: int = 8,
                             significance: float = 0.001) -> TailCheckResult:
    """Chi-square goodness of fit of (|v_1|^2, |v_2|^2) for Haar v in C^3
    against the uniform density on the probability simplex, binned into
    grid^2 congruent sub-triangles."""
    z = standard_complex(rng, (samples, 3))
    p = np.abs(z) ** 2
    p /= p.sum(axis=1, keepdims=True)
    u, w = grid * p[:, 0], grid * p[:, 1]
    i = np.minimum(u.astype(int), grid - 1)
    j = np.minimum(w.astype(int), grid - 1)
    down = ((u - i) + (w - j)) > 1.0
    cell = (i * grid + j) * 2 + down
    valid_up = [(a * grid + b) * 2 for a in range(grid) for b in range(grid)
                if a + b <= grid - 1]
    valid_down = [(a * grid + b) * 2 + 1 for a in range(grid) for b in range(grid)
                  if a + b <= grid - 2]
    cells = np.array(sorted(valid_up + valid_down))
    counts = np.bincount(cell, minlength=2 * grid * grid)[cells]
    pvalue = float(stats.chisquare(counts).pvalue)
    return TailCheckResult("simplex_uniformity", significance, pvalue,
                           samples, pvalue >= significance, "pvalue")


def projection_anticoncentration_check(dim: int, subset_size: int,
                                       samples: int, rng: Generator) -> TailCheckResult:
    """Coordinate-subset mass of a Haar vector: mean pinned at |A|/D and
    positive probability of exceeding |A|/D + 1/(88 D^2 ln D)."""
    if not 1 <= subset_size < dim:
        raise ValueError("need 1 <= subset_size < dim")
    z = standard_complex(rng, (samples, dim))
    p = np.abs(z) ** 2
    p /= p.sum(axis=1, keepdims=True)
    mass = p[:, :subset_size].sum(axis=1)
    target_mean = subset_size / dim
    eta1 = 1.0 / (88.0 * dim * dim * math.log(dim))
    sem = float(mass.std(ddof=1) / math.sqrt(samples))
    mean_ok = abs(float(mass.mean()) - target_mean) <= 3.0 * sem
    exceed = float((mass >= target_mean + eta1).mean())
    return TailCheckResult("projection_anticoncentration", eta1, exceed,
                           samples, mean_ok and exceed > 0.0, "positivity")


def sample_outcome_vectors(rho: DensityOperator, samples: int,
                           rng: Generator) -> np.ndarray:
    """Outcomes of Haar-random complete measurements applied to rho:
    draw a Haar basis, then pick column j with probability <v_j|rho|v_j>."""
    dim = rho.dim
    dense = rho.to_dense()
    z = standard_complex(rng, (samples, dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    q = q * (diag / np.abs(diag))[:, None, :]
    probs = np.einsum("sij,ik,skj->sj", q.conj(), dense, q).real
    probs = np.maximum(probs, 0.0)
    probs /= probs.sum(axis=1, keepdims=True)
    picks = (probs.cumsum(axis=1) < rng.random((samples, 1))).sum(axis=1)
    picks = np.minimum(picks, dim - 1)
    return q[np.arange(samples), :, picks]


def distinguishing_probability_estimate(s1: DensityOperator, s2: DensityOperator,
                                        rho: DensityOperator, xi_grid,
                                        samples: int, rng: Generator) -> dict:
    """Frequency of <v|s1|v> >= (1 + xi) <v|s2|v> for outcomes v of
    Haar-random measurements of rho, per xi in the grid."""
    if not s1.dim == s2.dim == rho.dim:
        raise DimensionMismatchError("state dimensions differ")
    v = sample_outcome_vectors(rho, samples, rng)
    d1, d2 = s1.to_dense(), s2.to_dense()
    f1 = np.einsum("si,ij,sj->s", v.conj(), d1, v).real
    f2 = np.einsum("si,ij,sj->s", v.conj(), d2, v).real
    return {float(xi): float((f1 >= (1.0 + xi) * f2).mean()) for xi in xi_grid}


def distinguishing_positivity_suite(samples: int, rng: Generator,
                                    dim: int = 4, xi: float = 0.1) -> TailCheckResult:
    """Random-measurement distinguishing of orthogonal pure states stays
    possible even when the measured state is chosen adversarially equal
    to one of them; positivity is the claim under test."""
    s1 = np.zeros((dim, dim), dtype=complex)
    s1[0, 0] = 1.0
    s2 = np.zeros((dim, dim), dtype=complex)
    s2[1, 1] = 1.0
    sigma1 = DensityOperator(dim, matrix=s1)
    sigma2 = DensityOperator(dim, matrix=s2)
    freqs = [
        distinguishing_probability_estimate(sigma1, sigma2,
                                            DensityOperator(dim, matrix=np.eye(dim) / dim),
                                            [xi], samples, rng)[xi],
        distinguishing_probability_estimate(sigma1, sigma2, sigma2,
                                            [xi], samples, rng)[xi],
    ]
    worst = min(freqs)
    return TailCheckResult("distinguishing_positivity", 0.0, worst,
                           2 * samples, worst > 0.0, "positivity")


def greedy_eps_net(dim: int, eps: float, rng: Generator,
                   candidates: int = 4000) -> np.ndarray:
    """Greedy maximal packing of pure states at pairwise trace distance
    >= eps; maximality makes it an eps-net. Oracle-scale only (D <= 3)."""
    if dim > 3:
        raise ValueError("greedy net builder is restricted to D <= 3")
    if not 0 < eps <= 2:
        raise ValueError("eps outside (0, 2]")
    kept: list[np.ndarray] = []
    min_ov = 1.0 - (eps / 2.0) ** 2  # distance >= eps iff overlap <= this
    for _ in range(candidates):
        z = standard_complex(rng, dim)
        z /= np.linalg.norm(z)
        if all(abs(np.vdot(m, z)) ** 2 <= min_ov + 1e-15 for m in kept):
            kept.append(z)
    return np.array(kept)


def run_validation_suites(seed: int, samples: int = 10 ** 6,
                          chernoff_trials: int = 10 ** 4,
                          haar_samples: int = 10 ** 5) -> list[TailCheckResult]:
    """The shipped Monte Carlo suites with their default experiment sizes."""
    results = [
        hoeffding_suite(samples, substream(seed, 0)),
        complex_hoeffding_suite(samples, substream(seed, 1)),
        mgf_suite(samples, substream(seed, 2)),
        relaxed_chernoff_suite(chernoff_trials, substream(seed, 3)),
    ]
    results.extend(haar_tail_suite(haar_samples, substream(seed, 4)))
    results.append(simplex_uniformity_suite(haar_samples, substream(seed, 5)))
    results.append(projection_anticoncentration_check(
        8, 4, haar_samples, substream(seed, 6)))
    results.append(distinguishing_positivity_suite(
        min(haar_samples, 2 * 10 ** 4), substream(seed, 7)))
    return results
