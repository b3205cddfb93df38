"""Pure and mixed fingerprints, verification measurements, error scans.

A pure fingerprint of a message x is the unit vector with entries
(-1)^{C(x)_i} 2^{-d/2}; it is stored as the sign bits (the codeword
itself) so overlaps reduce to popcounts of XORed codewords. The mixed
fingerprint of a label a is the uniform rank-2^k mixture over the
messages i.a, and its verification measurement projects onto the span
of the corresponding pure states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from . import _kernels as kernels
from .codes import (BitString, LengthMismatchError, QuasiLinearCode,
                    ScaleGuardError, encode)
from .linalg import GS_DROP_TOL, UnitVector, DensityOperator, gram_schmidt

EXHAUSTIVE_GUARD = 12  # largest label length for exhaustive error scans


def _check_rank_exponent(code: QuasiLinearCode, k: int) -> int:
    p = code.params
    if k < 0 or k > p.r or k > p.d or k >= p.message_bits:
        raise LengthMismatchError(
            f"rank exponent k={k} invalid for code with r={p.r} d={p.d} "
            f"message length {p.message_bits}")
    return p.message_bits - k  # label length


def message_value(prefix: int, label: int, k: int) -> int:
    """Message integer for the concatenation prefix.label."""
    return prefix | (label << k)


@dataclass(frozen=True)
class PureFingerprint:
    """Sign-packed pure fingerprint of one message."""

    code: QuasiLinearCode
    input: BitString
    signs: BitString

    @property
    def dim(self) -> int:
        return self.code.params.codeword_bits

    @property
    def state(self) -> np.ndarray:
        scale = 2.0 ** (-self.code.params.d / 2)
        return kernels.unpack_signs(self.signs.words[None, :], self.dim)[0] * scale

    def unit_vector(self) -> UnitVector:
        return UnitVector(self.dim, self.state)


@dataclass(frozen=True)
class MixedFingerprint:
    """Uniform mixture of the 2^k pure fingerprints of i.a, i = 0..2^k-1."""

    code: QuasiLinearCode
    input: BitString
    k: int
    components: tuple[PureFingerprint, ...]

    @property
    def dim(self) -> int:
        return self.code.params.codeword_bits

    @property
    def weight(self) -> float:
        return 2.0 ** (-self.k)

    def density(self) -> DensityOperator:
        w = self.weight
        return DensityOperator.from_mixture(
            [(w, c.unit_vector()) for c in self.components])


@dataclass(frozen=True)
class EqualityProjector:
    """Orthonormal frame spanning the accept subspace for a target label."""

    target: BitString
    frame: np.ndarray
    dropped_count: int

    @property
    def rank(self) -> int:
        return self.frame.shape[0]


@dataclass(frozen=True)
class ErrorReport:
    eps_plus: float
    eps_minus: float
    pairs_scanned: int
    exhaustive: bool

    def to_json(self) -> dict:
        return {
            "eps_plus": self.eps_plus,
            "eps_minus": self.eps_minus,
            "pairs_scanned": self.pairs_scanned,
            "exhaustive": self.exhaustive,
        }


def pure_fingerprint(code: QuasiLinearCode, x: BitString) -> PureFingerprint:
    if x.length != code.params.message_bits:
        raise LengthMismatchError(
            f"message has {x.length} bits, expected {code.params.message_bits}")
    return PureFingerprint(code, x, encode(code, x))


def mixed_fingerprint(code: QuasiLinearCode, a: BitString, k: int) -> MixedFingerprint:
    label_bits = _check_rank_exponent(code, k)
    if a.length != label_bits:
        raise LengthMismatchError(
            f"label has {a.length} bits, expected {label_bits}")
    a_val = a.to_int()
    comps = []
    for i in range(2 ** k):
        msg = BitString.from_int(message_value(i, a_val, k), code.params.message_bits)
        comps.append(pure_fingerprint(code, msg))
    return MixedFingerprint(code, a, k, tuple(comps))


def overlap(code: QuasiLinearCode, x1: BitString, x2: BitString) -> float:
    """|<u_x1|u_x2>| = |2 d_H(C(x1), C(x2)) / 2^d - 1|, popcount only."""
    if x1.length != x2.length:
        raise LengthMismatchError("message lengths differ")
    b1, b2 = encode(code, x1), encode(code, x2)
    dh = (b1 ^ b2).hamming_weight()
    return abs(2.0 * dh / code.params.codeword_bits - 1.0)


def fingerprint_matrix(code: QuasiLinearCode) -> np.ndarray:
    """All 2^(n+k) pure fingerprints as rows (entries +/- 2^(-d/2))."""
    cached = getattr(code, "_fp_matrix", None)
    if cached is None:
        table = code.codeword_table()
        cached = kernels.unpack_signs(table, code.params.codeword_bits)
        cached *= 2.0 ** (-code.params.d / 2)
        code._fp_matrix = cached
    return cached


def equality_projector(code: QuasiLinearCode, y: BitString, k: int,
                       tol: float = GS_DROP_TOL) -> EqualityProjector:
    """Gram-Schmidt frame over (u_{i.y}) in prefix order i = 0..2^k-1."""
    label_bits = _check_rank_exponent(code, k)
    if y.length != label_bits:
        raise LengthMismatchError(
            f"label has {y.length} bits, expected {label_bits}")
    u = fingerprint_matrix(code)
    y_val = y.to_int()
    rows = [u[message_value(i, y_val, k)] for i in range(2 ** k)]
    frame, dropped = gram_schmidt(rows, tol=tol)
    return EqualityProjector(y, np.ascontiguousarray(frame.real), len(dropped))


def accept_probability(fp: PureFingerprint | MixedFingerprint,
                       proj: EqualityProjector) -> float:
    """tr(P rho) = sum over frame v, components u of weight * <v|u>^2."""
    if isinstance(fp, PureFingerprint):
        comps, weight = [fp], 1.0
    else:
        comps, weight = list(fp.components), fp.weight
    if proj.frame.shape[1] != comps[0].dim:
        raise LengthMismatchError("projector and state dimensions differ")
    states = np.array([c.state for c in comps])
    g = proj.frame @ states.T
    return float(weight * np.sum(g * g))


def sample_verdict(fp, proj, shots: int, rng: Generator) -> int:
    """Accept count over ``shots`` two-outcome measurements."""
    if shots < 1:
        raise ValueError("shots >= 1 required")
    p = min(1.0, max(0.0, accept_probability(fp, proj)))
    return int(rng.binomial(shots, p))


def _error_scan_pure(code: QuasiLinearCode) -> tuple[float, float]:
    table = code.codeword_table()
    dev = kernels.pair_max_abs_dev(table, 2 ** (code.params.d - 1))
    ov = 2.0 * dev / code.params.codeword_bits
    return ov * ov, 0.0


def _error_scan_mixed(code: QuasiLinearCode, k: int, labels: int):
    u = fingerprint_matrix(code)
    frames = []
    offsets = [0]
    for y in range(labels):
        rows = [u[message_value(i, y, k)] for i in range(2 ** k)]
        frame, _ = gram_schmidt(rows)
        frames.append(np.ascontiguousarray(frame.real))
        offsets.append(offsets[-1] + frame.shape[0])
    stacked = np.vstack(frames)
    g2 = (stacked @ u.T) ** 2
    # columns are messages i + (x << k); fold prefix i into the label x
    per_label = g2.reshape(g2.shape[0], labels, 2 ** k).sum(axis=2)
    t = np.add.reduceat(per_label, offsets[:-1], axis=0) * 2.0 ** (-k)
    eps_minus = max(0.0, 1.0 - float(np.diagonal(t).min()))
    np.fill_diagonal(t, -1.0)
    return float(t.max()), eps_minus


def error_scan(code: QuasiLinearCode, k: int, mode: str = "exhaustive",
               budget: int | None = None,
               rng: Generator | None = None) -> ErrorReport:
    """Worst-case error probabilities of the scheme over label pairs.

    eps_minus is the largest false-reject probability over scanned
    labels and eps_plus the largest false-accept probability over
    scanned ordered pairs.
    """
    label_bits = _check_rank_exponent(code, k)
    labels = 2 ** label_bits
    if mode == "exhaustive":
        if label_bits > EXHAUSTIVE_GUARD:
            raise ScaleGuardError(
                f"n={label_bits} exceeds exhaustive guard {EXHAUSTIVE_GUARD}")
        if k == 0:
            eps_plus, eps_minus = _error_scan_pure(code)
        else:
            eps_plus, eps_minus = _error_scan_mixed(code, k, labels)
        return ErrorReport(eps_plus, eps_minus, labels * (labels - 1), True)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if budget is None or rng is None:
        raise ValueError("sampled mode needs budget and rng")
    eps_plus = 0.0
    eps_minus = 0.0
    proj_cache: dict[int, EqualityProjector] = {}
    for _ in range(budget):
        x_val = int(rng.integers(labels))
        y_val = int(rng.integers(labels - 1))
        if y_val >= x_val:
            y_val += 1
        x = BitString.from_int(x_val, label_bits)
        fp = mixed_fingerprint(code, x, k)
        for target in (y_val, x_val):
            if target not in proj_cache:
                proj_cache[target] = equality_projector(
                    code, BitString.from_int(target, label_bits), k)
        eps_plus = max(eps_plus, accept_probability(fp, proj_cache[y_val]))
        eps_minus = max(eps_minus, 1.0 - accept_probability(fp, proj_cache[x_val]))
    return ErrorReport(eps_plus, max(0.0, eps_minus), budget, False)


def fingerprint_to_json(fp: PureFingerprint | MixedFingerprint) -> dict:
    if isinstance(fp, PureFingerprint):
        return {"input": fp.input.to_hex(), "k": 0,
                "signs": [fp.signs.to_hex()]}
    return {"input": fp.input.to_hex(), "k": fp.k,
            "signs": [c.signs.to_hex() for c in fp.components]}
