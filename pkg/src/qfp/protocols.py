"""Equality protocols built on the fingerprinting schemes.

SMP: Alice and Bob send pure fingerprints to a referee who applies the
swap test, computed analytically (acceptance (1 + overlap^2) / 2)
rather than via circuit simulation. One-way: Alice sends the mixed
fingerprint, Bob measures with the equality projector. The eavesdrop
hook feeds an intercepted message ensemble to the extraction attack.
"""

from __future__ import annotations

from dataclasses import dataclass

from numpy.random import Generator

from .codes import BitString, LengthMismatchError, QuasiLinearCode
from .fingerprint import (accept_probability, equality_projector,
                          fingerprint_to_json, mixed_fingerprint, overlap,
                          pure_fingerprint, _check_rank_exponent)
from .leakage import ExtractionResult, extraction_attack, scheme_states


@dataclass(frozen=True)
class ProtocolTranscript:
    model: str                      # "smp" or "one-way"
    x: BitString
    y: BitString
    messages: tuple                 # fingerprints sent
    verdict: str                    # "equal" or "not-equal"
    accept_probability: float
    shots: int = 1
    accepts: int = 1

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "x": self.x.to_hex(),
            "y": self.y.to_hex(),
            "messages": [fingerprint_to_json(m) for m in self.messages],
            "verdict": self.verdict,
            "accept_probability": self.accept_probability,
            "shots": self.shots,
            "accepts": self.accepts,
        }


def swap_test_acceptance(ov: float) -> float:
    return (1.0 + ov * ov) / 2.0


def smp_equality(code: QuasiLinearCode, x: BitString, y: BitString,
                 shots: int, rng: Generator) -> ProtocolTranscript:
    """Pure-scheme SMP equality: both parties fingerprint, the referee
    swap-tests. One-sided: x = y always accepts; the verdict is "equal"
    iff every shot accepted."""
    if x.length != y.length or x.length != code.params.message_bits:
        raise LengthMismatchError("inputs must both have the code's message length")
    fx, fy = pure_fingerprint(code, x), pure_fingerprint(code, y)
    p = 1.0 if x == y else swap_test_acceptance(overlap(code, x, y))
    accepts = shots if p >= 1.0 else int(rng.binomial(shots, p))
    verdict = "equal" if accepts == shots else "not-equal"
    return ProtocolTranscript("smp", x, y, (fx, fy), verdict, p, shots, accepts)


def one_way_equality(code: QuasiLinearCode, k: int, x: BitString,
                     y: BitString, rng: Generator) -> ProtocolTranscript:
    """Mixed-scheme one-way equality: one message, one measurement."""
    label_bits = _check_rank_exponent(code, k)
    if x.length != label_bits or y.length != label_bits:
        raise LengthMismatchError(f"labels must have {label_bits} bits")
    fx = mixed_fingerprint(code, x, k)
    proj = equality_projector(code, y, k)
    p = accept_probability(fx, proj)
    accepted = x == y or rng.random() < p
    verdict = "equal" if accepted else "not-equal"
    return ProtocolTranscript("one-way", x, y, (fx,), verdict, min(p, 1.0),
                              1, int(accepted))


def protocol_cost(transcript: ProtocolTranscript) -> int:
    """Total qubits sent: d per fingerprint message."""
    return sum(m.code.params.d for m in transcript.messages)


def eavesdrop_one_way(code: QuasiLinearCode, k: int, bases: int,
                      seed: int, threads: int | None = None) -> ExtractionResult:
    """Eavesdropper model: intercept Alice's single message and run the
    random-basis extraction attack against the scheme ensemble."""
    return extraction_attack(scheme_states(code, k), bases, seed, threads)
