"""Round-level state machines for the three quantum dialogue variants.

All three share one shape: Alice prepares a quantum system, the travelling
part goes to Bob and back, both parties apply an encoding operation, Alice
measures and announces the result on the public channel, and each side
decodes the other's message from its own operation plus the announcement.

An adversary object, when given, sees each quantum-channel leg through
``on_leg(state, rng)`` (for pairs the travelling qubit is always B) and every
announcement through ``hear(announcement)``. It never sees local state.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Iterator, Protocol, Union

import numpy as np

from . import qcore
from .qcore import (
    BASIS_LABELS,
    KET,
    Basis,
    BellOutcome,
    PauliLabel,
    PureState,
    Qubit,
)
from .rng import round_rng

PSI_M, PSI_P, PHI_M, PHI_P = (
    BellOutcome.PSI_MINUS,
    BellOutcome.PSI_PLUS,
    BellOutcome.PHI_MINUS,
    BellOutcome.PHI_PLUS,
)


class ProtocolKind(enum.Enum):
    EPR_QD = "epr-qd"
    DENSE_KEY = "dense-key"
    SINGLE_PHOTON = "single-photon"

    @property
    def msg_len(self) -> int:
        return 2 if self is ProtocolKind.EPR_QD else 1

    @property
    def secret_space_size(self) -> int:
        return 4 ** self.msg_len


class Mode(enum.Enum):
    MM = "MM"
    CM = "CM"


PHOTON_PREPS = ("0", "1", "+", "-")


@functools.cache
def messages(kind: ProtocolKind) -> tuple[str, ...]:
    n = kind.msg_len
    return tuple(format(i, f"0{n}b") for i in range(2**n))


def secret_pairs(kind: ProtocolKind) -> list[tuple[str, str]]:
    """Every (alice_msg, bob_msg), in canonical order."""
    return [(a, b) for a in messages(kind) for b in messages(kind)]


@dataclass(frozen=True)
class RoundInput:
    kind: ProtocolKind
    mode: Mode
    alice_msg: str = ""
    bob_msg: str = ""
    prep: str | None = None

    def __post_init__(self):
        if self.mode is Mode.MM:
            for msg in (self.alice_msg, self.bob_msg):
                if msg not in messages(self.kind):
                    raise ValueError(f"message {msg!r} invalid for {self.kind.value}")
        elif self.alice_msg or self.bob_msg:
            raise ValueError("control-mode rounds carry no messages")
        photon = self.kind is ProtocolKind.SINGLE_PHOTON
        if photon and self.prep not in PHOTON_PREPS:
            raise ValueError(f"single-photon rounds need a preparation, got {self.prep!r}")
        if not photon and self.prep is not None:
            raise ValueError("preparation label only applies to single-photon rounds")


# -- public-channel messages -------------------------------------------------


@dataclass(frozen=True)
class BellResult:
    outcome: BellOutcome

    def label(self) -> str:
        return self.outcome.value


@dataclass(frozen=True)
class PhotonResult:
    prep: str
    outcome: str

    def label(self) -> str:
        return f"{self.prep}>{self.outcome}"

    @property
    def flipped(self) -> bool:
        return self.prep != self.outcome


@dataclass(frozen=True)
class CmResult:
    who: Qubit
    basis: Basis
    outcome: int

    def label(self) -> str:
        return f"CM:{self.who.value}:{self.basis.value}:{self.outcome}"


Announcement = Union[BellResult, PhotonResult, CmResult]


class Transcript:
    """Everything placed on the classical channel, in order.

    Only Announcement values can be appended, which is what keeps message
    bits out of the listener's view.
    """

    def __init__(self):
        self._entries: list[tuple[int, Announcement]] = []

    def append(self, round_index: int, ann: Announcement):
        if not isinstance(ann, (BellResult, PhotonResult, CmResult)):
            raise TypeError(f"not an announcement: {ann!r}")
        self._entries.append((round_index, ann))

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)


@dataclass(frozen=True)
class RoundRecord:
    input: RoundInput
    announcements: tuple[Announcement, ...]
    alice_decoded: str = ""
    bob_decoded: str = ""
    cm_pass: bool | None = None

    @property
    def decoded_ok(self) -> bool:
        return (
            self.alice_decoded == self.input.bob_msg
            and self.bob_decoded == self.input.alice_msg
        )


class Adversary(Protocol):
    def on_leg(self, state: PureState, rng: np.random.Generator) -> PureState: ...

    def hear(self, ann: Announcement) -> None: ...


def _leg(eve, state, rng):
    return state if eve is None else eve.on_leg(state, rng)


def _announce(eve, ann):
    if eve is not None:
        eve.hear(ann)
    return ann


def _default_rng(rng):
    return np.random.default_rng(0) if rng is None else rng


# -- truth table -------------------------------------------------------------

# Published outcomes of sigma_A sigma_B acting on the singlet, keyed by
# (Alice's label, Bob's label). Regenerated by simulation in truth_table().
TABLE_I = {
    ("00", "00"): PSI_M, ("11", "00"): PSI_P, ("01", "00"): PHI_M, ("10", "00"): PHI_P,
    ("01", "01"): PSI_M, ("10", "01"): PSI_P, ("00", "01"): PHI_M, ("11", "01"): PHI_P,
    ("10", "10"): PSI_M, ("01", "10"): PSI_P, ("11", "10"): PHI_M, ("00", "10"): PHI_P,
    ("11", "11"): PSI_M, ("00", "11"): PSI_P, ("10", "11"): PHI_M, ("01", "11"): PHI_P,
}  # fmt: skip


class ClassificationError(RuntimeError):
    """A simulated final state matched no Bell state."""


@dataclass(frozen=True)
class TruthTable:
    rows: tuple[tuple[PauliLabel, PauliLabel, BellOutcome], ...]

    def __post_init__(self):
        object.__setattr__(self, "_map", {(a, b): o for a, b, o in self.rows})
        partners: dict = {}
        for a, b, o in self.rows:
            partners.setdefault((Qubit.A, a, o), []).append(b)
            partners.setdefault((Qubit.B, b, o), []).append(a)
        object.__setattr__(self, "_partners", partners)

    def outcome(self, alice_op: PauliLabel, bob_op: PauliLabel) -> BellOutcome:
        return self._map[(alice_op, bob_op)]

    def partner(self, own_op: PauliLabel, announced: BellOutcome, role: Qubit) -> PauliLabel:
        hits = self._partners.get((role, own_op, announced), [])
        if len(hits) != 1:
            raise ClassificationError(
                f"{len(hits)} partner operations for {own_op} / {announced}"
            )
        return hits[0]

    def coset(self, announced: BellOutcome) -> list[tuple[PauliLabel, PauliLabel]]:
        return [(a, b) for a, b, o in self.rows if o is announced]

    def as_dict(self) -> dict[tuple[str, str], BellOutcome]:
        return {(a.bits, b.bits): o for a, b, o in self.rows}


@functools.cache
def truth_table() -> TruthTable:
    """Simulate both encodings on the singlet and classify each final state."""
    rows = []
    for a in PauliLabel:
        for b in PauliLabel:
            state = qcore.apply_on_qubit(b, Qubit.B, qcore.singlet())
            state = qcore.apply_on_qubit(a, Qubit.A, state)
            outcome = qcore.classify_bell(state)
            if outcome is None:
                raise ClassificationError(f"{a}{b} on the singlet is not a Bell state")
            rows.append((a, b, outcome))
    return TruthTable(tuple(rows))


def decode_epr(own_op: PauliLabel, announced: BellOutcome, role: Qubit) -> PauliLabel:
    """Partner's operation given one's own operation and the announced result."""
    return truth_table().partner(own_op, announced, role)


# -- message mode ------------------------------------------------------------


def _pair_round(alice_op, bob_op, eve, rng):
    state = _leg(eve, qcore.singlet(), rng)
    state = qcore.apply_on_qubit(bob_op, Qubit.B, state)
    state = _leg(eve, state, rng)
    state = qcore.apply_on_qubit(alice_op, Qubit.A, state)
    return _announce(eve, BellResult(qcore.bell_measure(state, rng)))


def run_mm_epr(alice_msg: str, bob_msg: str, eve=None, rng=None) -> RoundRecord:
    inp = RoundInput(ProtocolKind.EPR_QD, Mode.MM, alice_msg, bob_msg)
    a_op, b_op = PauliLabel.from_bits(alice_msg), PauliLabel.from_bits(bob_msg)
    ann = _pair_round(a_op, b_op, eve, _default_rng(rng))
    return RoundRecord(
        inp,
        (ann,),
        alice_decoded=decode_epr(a_op, ann.outcome, Qubit.A).bits,
        bob_decoded=decode_epr(b_op, ann.outcome, Qubit.B).bits,
    )


_DENSE_OP = {"0": PauliLabel.S00, "1": PauliLabel.S01}


def _xor(bit: str, flip: bool) -> str:
    return str(int(bit) ^ int(flip))


def run_mm_dense(alice_bit: str, bob_bit: str, eve=None, rng=None) -> RoundRecord:
    """One-bit dense coding: identity or sigma_x on each side."""
    inp = RoundInput(ProtocolKind.DENSE_KEY, Mode.MM, alice_bit, bob_bit)
    ann = _pair_round(_DENSE_OP[alice_bit], _DENSE_OP[bob_bit], eve, _default_rng(rng))
    differ = ann.outcome is not PSI_M
    return RoundRecord(
        inp,
        (ann,),
        alice_decoded=_xor(alice_bit, differ),
        bob_decoded=_xor(bob_bit, differ),
    )


# i*sigma_y flips the state within both the Z and the X basis.
_PHOTON_OP = {"0": PauliLabel.S00, "1": PauliLabel.S10}


def run_mm_photon(prep: str, alice_bit: str, bob_bit: str, eve=None, rng=None) -> RoundRecord:
    inp = RoundInput(ProtocolKind.SINGLE_PHOTON, Mode.MM, alice_bit, bob_bit, prep=prep)
    rng = _default_rng(rng)
    state = _leg(eve, KET[prep], rng)
    state = qcore.apply_single(_PHOTON_OP[bob_bit], state)
    state = _leg(eve, state, rng)
    state = qcore.apply_single(_PHOTON_OP[alice_bit], state)
    basis = qcore.basis_of(prep)
    bit, _ = qcore.measure_in_basis(state, basis, rng)
    ann = _announce(eve, PhotonResult(prep, BASIS_LABELS[basis][bit]))
    return RoundRecord(
        inp,
        (ann,),
        alice_decoded=_xor(alice_bit, ann.flipped),
        bob_decoded=_xor(bob_bit, ann.flipped),
    )


def run_mm(inp: RoundInput, eve=None, rng=None) -> RoundRecord:
    if inp.mode is not Mode.MM:
        raise ValueError("run_mm needs a message-mode input")
    if inp.kind is ProtocolKind.EPR_QD:
        return run_mm_epr(inp.alice_msg, inp.bob_msg, eve, rng)
    if inp.kind is ProtocolKind.DENSE_KEY:
        return run_mm_dense(inp.alice_msg, inp.bob_msg, eve, rng)
    return run_mm_photon(inp.prep, inp.alice_msg, inp.bob_msg, eve, rng)


def pick(rng: np.random.Generator, options):
    """Uniform choice from a short sequence using a single float draw."""
    return options[int(rng.random() * len(options))]


def random_mm_input(kind: ProtocolKind, rng: np.random.Generator) -> RoundInput:
    msgs = messages(kind)
    a, b = pick(rng, msgs), pick(rng, msgs)
    prep = pick(rng, PHOTON_PREPS) if kind is ProtocolKind.SINGLE_PHOTON else None
    return RoundInput(kind, Mode.MM, a, b, prep=prep)


# -- control mode ------------------------------------------------------------

_BASES = (Basis.Z, Basis.X)


def run_cm(kind: ProtocolKind, eve=None, rng=None) -> RoundRecord:
    """Control round: Bob measures in a random basis and announces it.

    For the pair protocols Alice then measures qubit A in the same basis and
    the round passes when the two bits are anticorrelated. For the single
    photon variant Alice compares Bob's result with her preparation; rounds
    with mismatched bases are discarded (``cm_pass`` is None).
    """
    rng = _default_rng(rng)
    if kind is ProtocolKind.SINGLE_PHOTON:
        prep = pick(rng, PHOTON_PREPS)
        state = _leg(eve, KET[prep], rng)
        basis = pick(rng, _BASES)
        bit, _ = qcore.measure_in_basis(state, basis, rng)
        ann = _announce(eve, CmResult(Qubit.B, basis, bit))
        passed = None
        if basis is qcore.basis_of(prep):
            passed = BASIS_LABELS[basis][bit] == prep
        return RoundRecord(RoundInput(kind, Mode.CM, prep=prep), (ann,), cm_pass=passed)

    state = _leg(eve, qcore.singlet(), rng)
    basis = pick(rng, _BASES)
    bob_bit, rest = qcore.measure_one_of_pair(state, Qubit.B, basis, rng)
    ann = _announce(eve, CmResult(Qubit.B, basis, bob_bit))
    alice_bit, _ = qcore.measure_in_basis(rest, basis, rng)
    return RoundRecord(RoundInput(kind, Mode.CM), (ann,), cm_pass=alice_bit != bob_bit)


def estimate_fidelity(cm_records) -> float:
    """Fraction of checked control rounds that passed."""
    checked = [r.cm_pass for r in cm_records if r.cm_pass is not None]
    if not checked:
        raise ValueError("no checked control-mode rounds")
    return sum(checked) / len(checked)


# -- batch drivers -----------------------------------------------------------


def simulate_mm(kind: ProtocolKind, rounds: int, seed: int, eve=None) -> Iterator[RoundRecord]:
    """Message-mode rounds with uniform random secrets, one rng stream per round."""
    for i in range(rounds):
        rng = round_rng(seed, i)
        yield run_mm(random_mm_input(kind, rng), eve, rng)


def simulate_cm(kind: ProtocolKind, rounds: int, seed: int, eve=None) -> Iterator[RoundRecord]:
    for i in range(rounds):
        yield run_cm(kind, eve, round_rng(seed, i))
