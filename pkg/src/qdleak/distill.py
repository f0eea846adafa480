"""Privacy amplification of dialogue output into a shared secret key.

Two routes. ``distill_structural`` keeps only Alice's messages: the public
announcement fixes the XOR of the two messages, and conditioned on that XOR
Alice's message alone is still uniform, so the kept half leaks nothing.
``toeplitz_hash`` is the generic route, a GF(2)-linear universal hash.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .adversary import leakage_exact, mm_inputs
from .infotheory import Distribution, JointDistribution, info_gain
from .protocols import ProtocolKind, RoundRecord, run_mm
from .qcore import Qubit


class DistillMethod(enum.Enum):
    STRUCTURAL_HALF = "structural-half"
    TOEPLITZ_HASH = "toeplitz-hash"


@dataclass(frozen=True)
class RawKeyMaterial:
    """Per-round (alice_msg, bob_msg) pairs as held by one party."""

    kind: ProtocolKind
    rounds: tuple[tuple[str, str], ...]

    @classmethod
    def from_records(cls, kind: ProtocolKind, records, party: Qubit) -> RawKeyMaterial:
        """Build one party's view: its own message plus what it decoded."""
        if party is Qubit.A:
            rounds = tuple((r.input.alice_msg, r.alice_decoded) for r in records)
        else:
            rounds = tuple((r.bob_decoded, r.input.bob_msg) for r in records)
        return cls(kind, rounds)

    @property
    def bits(self) -> str:
        return "".join(a + b for a, b in self.rounds)

    def __len__(self):
        return 2 * self.kind.msg_len * len(self.rounds)


@dataclass(frozen=True)
class DistilledKey:
    bits: str
    method: DistillMethod
    input_len: int

    @property
    def output_len(self) -> int:
        return len(self.bits)

    @property
    def hex(self) -> str:
        return bits_to_hex(self.bits)


def bits_to_hex(bits: str) -> str:
    """Lowercase hex, first bit as the MSB of the first byte, zero-padded at the end."""
    if not bits:
        return ""
    arr = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
    return np.packbits(arr).tobytes().hex()


def distill_structural(raw: RawKeyMaterial) -> DistilledKey:
    if not raw.rounds:
        raise ValueError("no raw key material")
    return DistilledKey(
        "".join(a for a, _ in raw.rounds), DistillMethod.STRUCTURAL_HALF, len(raw)
    )


def _bit_array(bits: str, what: str) -> np.ndarray:
    if set(bits) - {"0", "1"}:
        raise ValueError(f"{what} must be a string of 0/1")
    return np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")


def toeplitz_hash(raw_bits: str, hash_seed: str, out_len: int) -> str:
    """Multiply ``raw_bits`` by a Toeplitz matrix over GF(2).

    With n = len(raw_bits) the matrix entries are T[j, i] = hash_seed[j - i + n - 1],
    i.e. the first row is hash_seed[n-1::-1] and the first column is
    hash_seed[n-1:]. That makes output j the (j + n - 1)-th term of the
    convolution of hash_seed with raw_bits.
    """
    n = len(raw_bits)
    if out_len < 1:
        raise ValueError("out_len must be positive")
    if out_len > n:
        raise ValueError(f"out_len {out_len} exceeds input length {n}")
    if len(hash_seed) != n + out_len - 1:
        raise ValueError(f"hash seed needs {n + out_len - 1} bits, got {len(hash_seed)}")
    x = _bit_array(raw_bits, "raw_bits").astype(np.int64)
    s = _bit_array(hash_seed, "hash_seed").astype(np.int64)
    conv = np.convolve(s, x)[n - 1 : n - 1 + out_len] & 1
    return "".join("01"[b] for b in conv)


def random_hash_seed(n: int, out_len: int, rng: np.random.Generator) -> str:
    return "".join("01"[b] for b in rng.integers(0, 2, size=n + out_len - 1))


def distill_toeplitz(raw: RawKeyMaterial, hash_seed: str, out_len: int) -> DistilledKey:
    bits = toeplitz_hash(raw.bits, hash_seed, out_len) if out_len > 0 else ""
    return DistilledKey(bits, DistillMethod.TOEPLITZ_HASH, len(raw))


def leaked_bits(kind: ProtocolKind, rounds: int) -> int:
    # Round up so float noise in the exact leak never shortens the deduction.
    return math.ceil(leakage_exact(kind).i_abe_bits * rounds - 1e-9)


def recommend_output_length(kind: ProtocolKind, rounds: int, safety_margin_bits: int = 0) -> int:
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    if safety_margin_bits < 0:
        raise ValueError("safety margin must be non-negative")
    total = 2 * kind.msg_len * rounds
    return max(0, total - leaked_bits(kind, rounds) - safety_margin_bits)


def structural_leakage(kind: ProtocolKind, rounds: int) -> float:
    """Eve's information (bits) about the structural key from all announcements.

    Exact enumeration over every uniformly weighted input sequence.
    """
    per_round = [(inp, w, run_mm(inp).announcements[0]) for inp, w in mm_inputs(kind)]
    probs: dict = {}
    for seq in itertools.product(per_round, repeat=rounds):
        key = "".join(inp.alice_msg for inp, _, _ in seq)
        anns = tuple(ann for _, _, ann in seq)
        w = math.prod(w for _, w, _ in seq)
        probs[(key, anns)] = probs.get((key, anns), 0.0) + w
    joint = JointDistribution(probs)
    return info_gain(Distribution(joint.secret_marginal()), joint)


def keys_from_records(kind: ProtocolKind, records: list[RoundRecord]):
    """Alice's and Bob's views of the raw material (equal unless decoding failed)."""
    return (
        RawKeyMaterial.from_records(kind, records, Qubit.A),
        RawKeyMaterial.from_records(kind, records, Qubit.B),
    )
