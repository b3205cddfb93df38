"""Random quasi-linear codes over GF(2).

A code with parameters (n, k, r, d) maps messages of n+k bits to
codewords of 2^d bits: an arbitrary code (the "nonlinear rows"
d_1..d_{2^r}) applied to the first r message bits, XORed with a linear
code (the "columns" c_1..c_{2^d}) applied to the remaining n+k-r bits.
The split n / k separates the fingerprinted label length from the rank
exponent of the mixed scheme; the code itself only sees n+k.

Bit conventions, fixed for serialization:
  * bit j of a string is stored little-endian in 64-bit words
    (word j // 64, position j % 64); position i of the codeword
    definition maps to bit i - 1;
  * the integer value of a string weights bit j by 2^j, so packed words
    are the limbs of that integer;
  * prefix enumeration ("i in {0,1}^k in order") walks prefix values
    0 .. 2^k - 1 under this integer correspondence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.random import Generator

from . import _kernels as kernels

PAIR_SCAN_GUARD = 16  # largest n+k for exhaustive pair enumeration

_U64 = np.uint64


class InfeasibleParamsError(ValueError):
    """Code parameters violating a CodeParams invariant."""


class LengthMismatchError(ValueError):
    pass


class ScaleGuardError(ValueError):
    """Operation refused because the exhaustive scan would blow up."""


@dataclass(frozen=True)
class CodeParams:
    """Parameters of an (n+k, r, 2^d)-quasi-linear code.

    n: fingerprinted string length, k: rank exponent (0 for pure
    schemes), r: nonlinear prefix length, d: log2 of codeword length.
    """

    n: int
    k: int
    r: int
    d: int

    def __post_init__(self):
        checks = [
            (self.n >= 1, "n >= 1"),
            (self.k >= 0, "k >= 0"),
            (self.r >= 1, "r >= 1"),
            (self.r < self.n + self.k, "r < n + k"),
            (self.n + self.k < 2 ** self.d, "n + k < 2^d"),
            (self.d >= self.k, "d >= k"),
            (self.r >= self.k, "r >= k"),
        ]
        for ok, rule in checks:
            if not ok:
                raise InfeasibleParamsError(
                    f"invariant {rule} violated by n={self.n} k={self.k} "
                    f"r={self.r} d={self.d}")

    @property
    def message_bits(self) -> int:
        return self.n + self.k

    @property
    def column_bits(self) -> int:
        return self.n + self.k - self.r

    @property
    def codeword_bits(self) -> int:
        return 2 ** self.d


def _n_words(bits: int) -> int:
    return (bits + 63) // 64


def _mask_tail(words: np.ndarray, bits: int) -> None:
    rem = bits % 64
    if rem and words.size:
        words[..., -1] &= _U64((1 << rem) - 1)


class BitString:
    """Fixed-length bit string packed into uint64 words."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: np.ndarray):
        words = np.ascontiguousarray(words, dtype=_U64)
        if words.shape != (_n_words(length),):
            raise LengthMismatchError(
                f"{length} bits need {_n_words(length)} words, got {words.shape}")
        _mask_tail(words, length)
        self.length = length
        self.words = words

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitString":
        if value < 0 or value >> length:
            raise ValueError(f"value does not fit in {length} bits")
        w = [(value >> (64 * i)) & 0xFFFFFFFFFFFFFFFF for i in range(_n_words(length))]
        return cls(length, np.array(w, dtype=_U64))

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        bits = list(bits)
        value = sum(1 << j for j, b in enumerate(bits) if int(b))
        return cls.from_int(value, len(bits))

    @classmethod
    def from_hex(cls, text: str, length: int) -> "BitString":
        return cls.from_int(int(text, 16) if text else 0, length)

    def to_int(self) -> int:
        return sum(int(w) << (64 * i) for i, w in enumerate(self.words))

    def to_hex(self) -> str:
        nib = max(1, (self.length + 3) // 4)
        return format(self.to_int(), f"0{nib}x")

    def bit(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return int(self.words[j >> 6] >> _U64(j & 63)) & 1

    def bits(self) -> np.ndarray:
        full = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return full[: self.length].astype(np.uint8)

    def hamming_weight(self) -> int:
        return int(kernels.popcounts(self.words[None, :])[0])

    def __xor__(self, other: "BitString") -> "BitString":
        if self.length != other.length:
            raise LengthMismatchError("lengths differ")
        return BitString(self.length, self.words ^ other.words)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitString) and other.length == self.length
                and bool(np.array_equal(self.words, other.words)))

    def __hash__(self):
        return hash((self.length, self.words.tobytes()))

    def __repr__(self):
        return f"BitString({self.length}, 0x{self.to_hex()})"


def hamming_distance(a: BitString, b: BitString) -> int:
    return (a ^ b).hamming_weight()


class QuasiLinearCode:
    """Sampled quasi-linear code: packed columns and nonlinear rows.

    ``linear`` holds the 2^d column vectors c_i (one packed row each,
    n+k-r bits), ``nonlinear`` the 2^r rows d_j (2^d bits each).
    """

    def __init__(self, params: CodeParams, linear: np.ndarray,
                 nonlinear: np.ndarray, seed: int | None = None):
        linear = np.ascontiguousarray(linear, dtype=_U64)
        nonlinear = np.ascontiguousarray(nonlinear, dtype=_U64)
        if linear.shape != (2 ** params.d, _n_words(params.column_bits)):
            raise LengthMismatchError(f"linear part shape {linear.shape}")
        if nonlinear.shape != (2 ** params.r, _n_words(params.codeword_bits)):
            raise LengthMismatchError(f"nonlinear part shape {nonlinear.shape}")
        _mask_tail(linear, params.column_bits)
        _mask_tail(nonlinear, params.codeword_bits)
        self.params = params
        self.linear = linear
        self.nonlinear = nonlinear
        self.seed = seed

    def column(self, i: int) -> BitString:
        return BitString(self.params.column_bits, self.linear[i].copy())

    def nonlinear_row(self, j: int) -> BitString:
        return BitString(self.params.codeword_bits, self.nonlinear[j].copy())

    @cached_property
    def generator_rows(self) -> np.ndarray:
        """Row t = (<c_i, e_t>)_i: bit t of every column, packed to 2^d bits."""
        p = self.params
        rows = np.zeros((p.column_bits, _n_words(p.codeword_bits)), dtype=_U64)
        for t in range(p.column_bits):
            col_bit = (self.linear[:, t >> 6] >> _U64(t & 63)) & _U64(1)
            packed = np.packbits(col_bit.astype(np.uint8), bitorder="little")
            buf = packed.tobytes().ljust(rows.shape[1] * 8, b"\0")
            rows[t] = np.frombuffer(buf, dtype=_U64)
        return rows

    @cached_property
    def _linear_table(self) -> np.ndarray:
        """XOR-closure of the generator rows over all 2^(n+k-r) suffixes."""
        p = self.params
        out = np.zeros((2 ** p.column_bits, _n_words(p.codeword_bits)), dtype=_U64)
        g = self.generator_rows
        for j in range(1, 2 ** p.column_bits):
            low = (j & -j).bit_length() - 1
            out[j] = out[j & (j - 1)] ^ g[low]
        return out

    def codeword_table(self) -> np.ndarray:
        """Packed codewords C(x) for every message value x, row x."""
        p = self.params
        x = np.arange(2 ** p.message_bits)
        return self.nonlinear[x & (2 ** p.r - 1)] ^ self._linear_table[x >> p.r]

    def encode_value(self, x: int) -> np.ndarray:
        p = self.params
        if not 0 <= x < 2 ** p.message_bits:
            raise LengthMismatchError(f"message value {x} out of range")
        return self.nonlinear[x & (2 ** p.r - 1)] ^ self._linear_table[x >> p.r]


def sample_code(params: CodeParams, rng: Generator,
                seed: int | None = None) -> QuasiLinearCode:
    """All column and row bits i.i.d. uniform."""
    linear = rng.integers(0, 2 ** 64, dtype=_U64,
                          size=(2 ** params.d, _n_words(params.column_bits)))
    nonlinear = rng.integers(0, 2 ** 64, dtype=_U64,
                             size=(2 ** params.r, _n_words(params.codeword_bits)))
    return QuasiLinearCode(params, linear, nonlinear, seed=seed)


def sample_distinct_column_code(params: CodeParams, rng: Generator,
                                seed: int | None = None) -> QuasiLinearCode:
    """Uniform code conditioned on all columns c_i being distinct.

    Needs 2^(n+k-r) >= 2^d; columns are a uniform sample without
    replacement, rows stay i.i.d. uniform.
    """
    space = 2 ** params.column_bits
    if space < 2 ** params.d:
        raise InfeasibleParamsError(
            "distinct columns impossible: 2^(n+k-r) < 2^d")
    if params.column_bits > 30:
        raise ScaleGuardError("column space too large to permute")
    vals = rng.permutation(space)[: 2 ** params.d]
    linear = vals.astype(_U64)[:, None]  # column space guard keeps one word
    nonlinear = rng.integers(0, 2 ** 64, dtype=_U64,
                             size=(2 ** params.r, _n_words(params.codeword_bits)))
    return QuasiLinearCode(params, linear, nonlinear, seed=seed)


def encode(code: QuasiLinearCode, x: BitString) -> BitString:
    """C(x) = d_{x^(1)} XOR (<c_i, x^(2)>)_i, bitwise over 2^d positions."""
    p = code.params
    if x.length != p.message_bits:
        raise LengthMismatchError(
            f"message has {x.length} bits, code expects {p.message_bits}")
    return BitString(p.codeword_bits, code.encode_value(x.to_int()).copy())


def gamma(code: QuasiLinearCode) -> int:
    """Generalized minimum distance: max over message pairs of
    |d_H(C(a1), C(a2)) - 2^(d-1)|, exact."""
    p = code.params
    if p.message_bits > PAIR_SCAN_GUARD:
        raise ScaleGuardError(
            f"n+k={p.message_bits} exceeds pair-scan guard {PAIR_SCAN_GUARD}")
    table = code.codeword_table()
    return int(kernels.pair_max_abs_dev(table, 2 ** (p.d - 1)))


def distinct_columns(code: QuasiLinearCode) -> bool:
    """True iff the columns c_1..c_{2^d} are pairwise distinct."""
    return np.unique(code.linear, axis=0).shape[0] == code.linear.shape[0]


@dataclass(frozen=True)
class RecipeValues:
    """Output of the parameter recipe: formula values plus feasibility.

    The asymptotic recipe violates the CodeParams invariants for every
    desk-scale n (r grows like 63c*lg n while n+k stays near n), so the
    values are reported as-is and ``feasible`` says whether they form a
    valid CodeParams.
    """

    n: int
    k: int
    r: int
    d: int
    feasible: bool
    violation: str | None

    def to_params(self) -> CodeParams:
        return CodeParams(self.n, self.k, self.r, self.d)


def parameter_recipe(n: int, c: float, pure: bool = False) -> RecipeValues:
    """k = ceil(4c lg n), d = ceil((18c+1) lg n), r = ceil((60c+3) lg n).

    ``pure`` returns k = 0 with the same d and r: the pure-scheme
    variant has no separately tuned constants, so the mixed-scheme
    values are reused as-is.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    if c <= 0:
        raise ValueError("c > 0 required")
    lg = math.log2(n)
    k = 0 if pure else math.ceil(4 * c * lg)
    d = math.ceil((18 * c + 1) * lg)
    r = math.ceil((60 * c + 3) * lg)
    try:
        CodeParams(n, k, r, d)
        return RecipeValues(n, k, r, d, True, None)
    except InfeasibleParamsError as exc:
        return RecipeValues(n, k, r, d, False, str(exc))


def desk_profile(n: int, pure: bool = False) -> CodeParams:
    """Small feasible parameters for desk-scale experiments."""
    lg = math.ceil(math.log2(max(2, n)))
    k = 0 if pure else lg
    return CodeParams(n=n, k=k, r=k + lg, d=lg + 7)


def code_to_json(code: QuasiLinearCode) -> dict:
    p = code.params
    col_nib = max(1, (p.column_bits + 3) // 4)
    row_nib = max(1, (p.codeword_bits + 3) // 4)
    return {
        "n": p.n,
        "k": p.k,
        "r": p.r,
        "d": p.d,
        "linear": [format(_words_to_int(row), f"0{col_nib}x") for row in code.linear],
        "nonlinear": [format(_words_to_int(row), f"0{row_nib}x")
                      for row in code.nonlinear],
        "seed": code.seed,
    }


def code_from_json(obj: dict) -> QuasiLinearCode:
    params = CodeParams(int(obj["n"]), int(obj["k"]), int(obj["r"]), int(obj["d"]))
    linear = np.array(
        [_int_to_words(int(h, 16), params.column_bits) for h in obj["linear"]],
        dtype=_U64)
    nonlinear = np.array(
        [_int_to_words(int(h, 16), params.codeword_bits) for h in obj["nonlinear"]],
        dtype=_U64)
    return QuasiLinearCode(params, linear, nonlinear, seed=obj.get("seed"))


def _words_to_int(words: np.ndarray) -> int:
    return sum(int(w) << (64 * i) for i, w in enumerate(words))


def _int_to_words(value: int, bits: int) -> list[int]:
    return [(value >> (64 * i)) & 0xFFFFFFFFFFFFFFFF for i in range(_n_words(bits))]
