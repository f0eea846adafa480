"""State-vector mechanics for one and two qubits.

Two-qubit amplitudes are ordered |00>, |01>, |10>, |11> with qubit A first
and qubit B second. Every comparison between states ignores global phase,
since products of Pauli operators routinely introduce factors of -1 and +-i.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-9
PHASE_TOL = 1e-9

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class DimensionError(ValueError):
    """Raised when an operation receives a state with the wrong qubit count."""


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector of one or two qubits."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size not in (2, 4):
            raise DimensionError(f"expected 2 or 4 amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def num_qubits(self) -> int:
        return 1 if self.amps.size == 2 else 2

    def __mul__(self, phase: complex) -> PureState:
        return PureState(self.amps * phase)

    __rmul__ = __mul__

    def __repr__(self):
        body = ", ".join(f"{a.real:+.4f}{a.imag:+.4f}j" for a in self.amps)
        return f"PureState([{body}])"


def _unchecked(amps: np.ndarray) -> PureState:
    # Internal fast path for results of unitary maps on already-valid states.
    state = object.__new__(PureState)
    amps.flags.writeable = False
    object.__setattr__(state, "amps", amps)
    return state


class PauliLabel(enum.Enum):
    """Encoding operations, named by the two message bits they carry."""

    S00 = "00"
    S01 = "01"
    S10 = "10"
    S11 = "11"

    @classmethod
    def from_bits(cls, bits: str) -> PauliLabel:
        return cls(bits)

    @property
    def bits(self) -> str:
        return self.value

    def __str__(self):
        return f"σ{self.value}"


_PAULI = {
    PauliLabel.S00: np.array([[1, 0], [0, 1]], dtype=complex),
    PauliLabel.S01: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliLabel.S10: np.array([[0, 1], [-1, 0]], dtype=complex),  # i*sigma_y
    PauliLabel.S11: np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in _PAULI.values():
    _m.flags.writeable = False


def pauli_matrix(label: PauliLabel) -> np.ndarray:
    """Return the 2x2 matrix of an encoding operation (read-only)."""
    return _PAULI[label]


class Qubit(enum.Enum):
    A = "A"
    B = "B"


class BellOutcome(enum.Enum):
    PSI_MINUS = "Psi-"
    PSI_PLUS = "Psi+"
    PHI_MINUS = "Phi-"
    PHI_PLUS = "Phi+"

    @property
    def state(self) -> PureState:
        return BELL_STATES[self]

    def __str__(self):
        return {"Psi-": "Ψ−", "Psi+": "Ψ+", "Phi-": "Φ−", "Phi+": "Φ+"}[self.value]


BELL_STATES = {
    BellOutcome.PSI_MINUS: PureState(np.array([0, 1, -1, 0]) * _SQRT_HALF),
    BellOutcome.PSI_PLUS: PureState(np.array([0, 1, 1, 0]) * _SQRT_HALF),
    BellOutcome.PHI_MINUS: PureState(np.array([1, 0, 0, -1]) * _SQRT_HALF),
    BellOutcome.PHI_PLUS: PureState(np.array([1, 0, 0, 1]) * _SQRT_HALF),
}
_BELL_ORDER = tuple(BellOutcome)
# Rows are <Bell_k| so that _BELL_BRA @ psi gives the four overlaps at once.
_BELL_BRA = np.array([BELL_STATES[k].amps.conj() for k in _BELL_ORDER])


class Basis(enum.Enum):
    """Single-qubit measurement basis; outcome bit 0 is |0> or |+>."""

    Z = "Z"
    X = "X"

    @property
    def eigenstates(self) -> tuple[PureState, PureState]:
        return _EIGEN[self]


KET = {
    "0": PureState([1, 0]),
    "1": PureState([0, 1]),
    "+": PureState(np.array([1, 1]) * _SQRT_HALF),
    "-": PureState(np.array([1, -1]) * _SQRT_HALF),
}
_EIGEN = {Basis.Z: (KET["0"], KET["1"]), Basis.X: (KET["+"], KET["-"])}

# Label of each basis eigenstate, indexed by outcome bit.
BASIS_LABELS = {Basis.Z: ("0", "1"), Basis.X: ("+", "-")}


def basis_of(label: str) -> Basis:
    """Basis containing the named single-qubit state ``0``, ``1``, ``+`` or ``-``."""
    if label in ("0", "1"):
        return Basis.Z
    if label in ("+", "-"):
        return Basis.X
    raise ValueError(f"unknown state label {label!r}")


def singlet() -> PureState:
    return BELL_STATES[BellOutcome.PSI_MINUS]


def tensor(a: PureState, b: PureState) -> PureState:
    if a.num_qubits != 1 or b.num_qubits != 1:
        raise DimensionError("tensor expects two single-qubit states")
    return _unchecked(np.kron(a.amps, b.amps))


def _require(state: PureState, n: int):
    if state.num_qubits != n:
        raise DimensionError(f"expected a {n}-qubit state, got {state.num_qubits}")


def apply_single(op: PauliLabel, state: PureState) -> PureState:
    _require(state, 1)
    return _unchecked(_PAULI[op] @ state.amps)


def apply_on_qubit(op: PauliLabel, which: Qubit, state: PureState) -> PureState:
    """Apply ``op`` to one qubit of a pair, i.e. (U x I) or (I x U)."""
    _require(state, 2)
    u = _PAULI[op]
    psi = state.amps.reshape(2, 2)
    if which is Qubit.A:
        out = u @ psi
    else:
        out = psi @ u.T
    return _unchecked(out.reshape(4))


def bell_probabilities(state: PureState) -> dict[BellOutcome, float]:
    _require(state, 2)
    p = np.abs(_BELL_BRA @ state.amps) ** 2
    return dict(zip(_BELL_ORDER, p.tolist()))


def _sample(probs, rng: np.random.Generator) -> int:
    # A certain outcome is returned without drawing so deterministic branches
    # never depend on the stream.
    for k, p in enumerate(probs):
        if p > 1.0 - 1e-12:
            return k
    u = rng.random() * sum(probs)
    acc = 0.0
    last = 0
    for k, p in enumerate(probs):
        if p <= 0.0:
            continue
        acc += p
        last = k
        if u < acc:
            return k
    return last


def bell_measure(state: PureState, rng: np.random.Generator) -> BellOutcome:
    """Projective measurement in the Bell basis (Born rule)."""
    _require(state, 2)
    p = np.abs(_BELL_BRA @ state.amps) ** 2
    return _BELL_ORDER[_sample(p.tolist(), rng)]


def classify_bell(state: PureState) -> BellOutcome | None:
    """Bell state equal to ``state`` up to phase, or None."""
    for outcome, p in bell_probabilities(state).items():
        if p > 1.0 - PHASE_TOL:
            return outcome
    return None


def measure_in_basis(
    state: PureState, basis: Basis, rng: np.random.Generator
) -> tuple[int, PureState]:
    _require(state, 1)
    eig = basis.eigenstates
    probs = [abs(np.vdot(e.amps, state.amps)) ** 2 for e in eig]
    bit = _sample(probs, rng)
    return bit, eig[bit]


def measure_one_of_pair(
    state: PureState, which: Qubit, basis: Basis, rng: np.random.Generator
) -> tuple[int, PureState]:
    """Measure qubit ``which`` of a pair; return the bit and the other qubit's state.

    Zero-probability branches are never selected.
    """
    _require(state, 2)
    psi = state.amps.reshape(2, 2)
    if which is Qubit.B:
        psi = psi.T
    # psi[measured, remaining]
    remainders = [e.amps.conj() @ psi for e in basis.eigenstates]
    probs = [float(np.vdot(r, r).real) for r in remainders]
    bit = _sample(probs, rng)
    rem = remainders[bit] / np.sqrt(probs[bit])
    return bit, _unchecked(rem)


def overlap(a: PureState, b: PureState) -> complex:
    if a.num_qubits != b.num_qubits:
        raise DimensionError("states have different dimensions")
    return complex(np.vdot(a.amps, b.amps))


def equal_up_to_phase(a: PureState, b: PureState) -> bool:
    return abs(overlap(a, b)) > 1.0 - PHASE_TOL


def density(state: PureState) -> np.ndarray:
    return np.outer(state.amps, state.amps.conj())
