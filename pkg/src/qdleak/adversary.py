"""Eavesdroppers and the classical-channel leakage analysis.

For every protocol the public announcement fixes the bitwise XOR of Alice's
and Bob's messages and nothing else, so a listener who never touches the
quantum channel learns exactly half of the exchanged secret.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .infotheory import (
    Distribution,
    Ensemble,
    JointDistribution,
    holevo_chi,
    info_gain,
    posterior_entropy,
    shannon_entropy,
)
from .protocols import (
    PHOTON_PREPS,
    Announcement,
    Mode,
    PhotonResult,
    pick,
    ProtocolKind,
    RoundInput,
    run_mm,
    secret_pairs,
    simulate_mm,
    truth_table,
)
from .qcore import KET, Basis, BellOutcome, PureState, Qubit

# Secret bits each protocol claims to deliver per message-mode round.
CLAIMED_BITS = {
    ProtocolKind.EPR_QD: 4.0,
    ProtocolKind.DENSE_KEY: 2.0,
    ProtocolKind.SINGLE_PHOTON: 2.0,
}
VIOLATION_TOL = 1e-9


class EveModel(enum.Enum):
    NONE = "none"
    PASSIVE = "passive"
    INTERCEPT_RESEND = "intercept-resend"


def intercept_resend(leg_state: PureState, rng: np.random.Generator) -> PureState:
    """Measure a travelling qubit in a random Z/X basis and forward the eigenstate."""
    basis = pick(rng, (Basis.Z, Basis.X))
    _, collapsed = qcore.measure_in_basis(leg_state, basis, rng)
    return collapsed


class PassiveListener:
    """Reads the classical channel; leaves quantum legs alone and draws no randomness."""

    def __init__(self):
        self.heard: list[Announcement] = []

    def on_leg(self, state: PureState, rng) -> PureState:
        return state

    def hear(self, ann: Announcement):
        self.heard.append(ann)


class InterceptResend(PassiveListener):
    """Intercept-resend on every leg; also listens to the classical channel."""

    def on_leg(self, state: PureState, rng) -> PureState:
        if state.num_qubits == 1:
            return intercept_resend(state, rng)
        basis = pick(rng, (Basis.Z, Basis.X))
        bit, rest_a = qcore.measure_one_of_pair(state, Qubit.B, basis, rng)
        return qcore.tensor(rest_a, basis.eigenstates[bit])


def make_eve(model: EveModel):
    if model is EveModel.NONE:
        return None
    if model is EveModel.PASSIVE:
        return PassiveListener()
    return InterceptResend()


# -- what an announcement reveals --------------------------------------------


def xor_bits(a: str, b: str) -> str:
    return "".join(str(int(x) ^ int(y)) for x, y in zip(a, b))


def _bell_xor() -> dict[BellOutcome, str]:
    table = truth_table()
    out = {}
    for outcome in BellOutcome:
        values = {xor_bits(a.bits, b.bits) for a, b in table.coset(outcome)}
        (out[outcome],) = values  # one XOR value per announcement
    return out


def known_xor(kind: ProtocolKind, ann: Announcement) -> str:
    """XOR of the two secret messages implied by an announcement."""
    if kind is ProtocolKind.EPR_QD:
        return _bell_xor()[ann.outcome]
    if kind is ProtocolKind.DENSE_KEY:
        return "0" if ann.outcome is BellOutcome.PSI_MINUS else "1"
    if not isinstance(ann, PhotonResult):
        raise TypeError(f"expected a photon announcement, got {ann!r}")
    return "1" if ann.flipped else "0"


@dataclass(frozen=True)
class EveGuess:
    known: str  # XOR of alice_msg and bob_msg
    candidates: tuple[tuple[str, str], ...]
    best_guess: tuple[str, str]
    p_correct: float


def eve_guess(kind: ProtocolKind, announcement: Announcement, rng=None) -> EveGuess:
    """Eve's exact knowledge after one announcement, and a guess of the secret pair.

    The guess is uniform over the candidates consistent with the announcement;
    without an rng the first candidate in canonical order is returned.
    """
    known = known_xor(kind, announcement)
    cands = tuple((a, b) for a, b in secret_pairs(kind) if xor_bits(a, b) == known)
    guess = cands[0] if rng is None else pick(rng, cands)
    return EveGuess(known, cands, guess, 1.0 / len(cands))


# -- leakage -----------------------------------------------------------------


@dataclass(frozen=True)
class PosteriorTable:
    """P(secret pair | announcement) for each announcement Eve can hear."""

    rows: dict

    @classmethod
    def from_joint(cls, joint: JointDistribution) -> PosteriorTable:
        rows = {r: Distribution(cond) for r, (_, cond) in joint.conditionals().items()}
        return cls(rows)

    def to_json(self) -> dict:
        return {
            ann.label(): {f"{a},{b}": p for (a, b), p in sorted(dist.probs.items())}
            for ann, dist in sorted(self.rows.items(), key=lambda kv: kv[0].label())
        }


def mm_inputs(kind: ProtocolKind):
    """All message-mode inputs with their prior weights."""
    pairs = secret_pairs(kind)
    if kind is ProtocolKind.SINGLE_PHOTON:
        w = 1.0 / (len(pairs) * len(PHOTON_PREPS))
        return [(RoundInput(kind, Mode.MM, a, b, prep=p), w) for p in PHOTON_PREPS for a, b in pairs]
    w = 1.0 / len(pairs)
    return [(RoundInput(kind, Mode.MM, a, b), w) for a, b in pairs]


def enumerate_joint(kind: ProtocolKind) -> JointDistribution:
    """Exact joint of (secret pair, announcement) under uniform secrets.

    For the single-photon protocol the announced preparation is part of the
    announcement, not of the secret.
    """
    probs: dict = {}
    for inp, w in mm_inputs(kind):
        (ann,) = run_mm(inp).announcements
        key = ((inp.alice_msg, inp.bob_msg), ann)
        probs[key] = probs.get(key, 0.0) + w
    return JointDistribution(probs)


def enumerate_posterior(kind: ProtocolKind) -> PosteriorTable:
    return PosteriorTable.from_joint(enumerate_joint(kind))


def signal_ensemble(kind: ProtocolKind) -> Ensemble:
    """States Alice's final measurement distinguishes, uniformly weighted."""
    if kind is ProtocolKind.SINGLE_PHOTON:
        return Ensemble.uniform_pure(KET[p] for p in PHOTON_PREPS)
    return Ensemble.uniform_pure(b.state for b in BellOutcome)


@dataclass(frozen=True)
class LeakageReport:
    protocol: ProtocolKind
    h_prior_bits: float
    h_posterior_bits: float
    i_abe_bits: float
    holevo_chi_bits: float
    claimed_bits_per_run: float
    holevo_violation: bool
    posterior: PosteriorTable = field(repr=False)
    method: str = "exact"
    rounds: int | None = None
    seed: int | None = None


def _report(kind, prior, joint, method, rounds=None, seed=None) -> LeakageReport:
    h_prior = shannon_entropy(prior)
    h_post = posterior_entropy(joint)
    i_abe = info_gain(prior, joint)
    chi = holevo_chi(signal_ensemble(kind))
    claimed = CLAIMED_BITS[kind]
    return LeakageReport(
        protocol=kind,
        h_prior_bits=h_prior,
        h_posterior_bits=h_post,
        i_abe_bits=i_abe,
        holevo_chi_bits=chi,
        claimed_bits_per_run=claimed,
        holevo_violation=claimed > chi + VIOLATION_TOL,
        posterior=PosteriorTable.from_joint(joint),
        method=method,
        rounds=rounds,
        seed=seed,
    )


def leakage_exact(kind: ProtocolKind) -> LeakageReport:
    prior = Distribution.uniform(secret_pairs(kind))
    return _report(kind, prior, enumerate_joint(kind), "exact")


def leakage_from_records(kind: ProtocolKind, records, seed: int | None = None) -> LeakageReport:
    """Plug-in leakage estimate from observed message-mode rounds."""
    counts: Counter = Counter()
    for rec in records:
        counts[((rec.input.alice_msg, rec.input.bob_msg), rec.announcements[0])] += 1
    if not counts:
        raise ValueError("no message-mode rounds")
    joint = JointDistribution.from_counts(counts)
    prior = Distribution(joint.secret_marginal())
    n = sum(counts.values())
    return _report(kind, prior, joint, "monte-carlo", rounds=n, seed=seed)


def leakage_monte_carlo(kind: ProtocolKind, rounds: int, seed: int) -> LeakageReport:
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    return leakage_from_records(kind, simulate_mm(kind, rounds, seed), seed=seed)


def announcement_space_bits(kind: ProtocolKind) -> float:
    """log2 of the number of distinct announcements, per preparation for photons."""
    if kind is ProtocolKind.SINGLE_PHOTON:
        return 1.0
    outcomes = {ann for (_, ann) in enumerate_joint(kind).probs}
    return math.log2(len(outcomes))

