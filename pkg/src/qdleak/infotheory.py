"""Classical and quantum entropies, in bits.

Eigenvalues of Hermitian matrices come from a cyclic Jacobi solver run on
the real symmetric embedding

    M = A + iB   ->   [[A, -B],
                       [B,  A]]

whose spectrum is that of M with every eigenvalue doubled. Sorting the
doubled spectrum and taking every second value undoes the duplication.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

PROB_TOL = 1e-9
HERM_TOL = 1e-12
NEG_EIG_TOL = 1e-10
JACOBI_OFF_TOL = 1e-13


class ConsistencyError(ValueError):
    """Joint distribution does not agree with the stated prior."""


def _check_probs(values: Iterable[float]):
    total = 0.0
    for p in values:
        if not math.isfinite(p) or p < 0.0:
            raise ValueError(f"invalid probability {p!r}")
        total += p
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class Distribution:
    probs: Mapping[Hashable, float]

    def __post_init__(self):
        _check_probs(self.probs.values())

    @classmethod
    def uniform(cls, labels: Iterable[Hashable]) -> Distribution:
        labels = list(labels)
        return cls({x: 1.0 / len(labels) for x in labels})

    @classmethod
    def from_counts(cls, counts: Mapping[Hashable, int]) -> Distribution:
        n = sum(counts.values())
        return cls({k: c / n for k, c in counts.items()})


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities keyed by ``(secret, result)`` pairs."""

    probs: Mapping[tuple[Hashable, Hashable], float]

    def __post_init__(self):
        _check_probs(self.probs.values())

    @classmethod
    def from_counts(cls, counts: Mapping[tuple, int]) -> JointDistribution:
        n = sum(counts.values())
        return cls({k: c / n for k, c in counts.items()})

    def secret_marginal(self) -> dict:
        out = defaultdict(float)
        for (s, _), p in self.probs.items():
            out[s] += p
        return dict(out)

    def result_marginal(self) -> dict:
        out = defaultdict(float)
        for (_, r), p in self.probs.items():
            out[r] += p
        return dict(out)

    def conditionals(self) -> dict:
        """Map each result r with P(r) > 0 to (P(r), {secret: P(secret|r)})."""
        pr = self.result_marginal()
        cond = defaultdict(dict)
        for (s, r), p in self.probs.items():
            if pr[r] > 0.0:
                cond[r][s] = cond[r].get(s, 0.0) + p / pr[r]
        return {r: (pr[r], cond[r]) for r in cond}


def _entropy(values: Iterable[float]) -> float:
    h = 0.0
    for p in values:
        if p > 0.0:
            h -= p * math.log2(p)
    # -0.0 from a point mass reads badly in reports.
    return h + 0.0


def shannon_entropy(d: Distribution | Mapping) -> float:
    if not isinstance(d, Distribution):
        d = Distribution(d)
    return _entropy(d.probs.values())


def posterior_entropy(j: JointDistribution) -> float:
    """Average over results r of H(secret | r), weighted by P(r)."""
    return sum(pr * _entropy(cond.values()) for pr, cond in j.conditionals().values())


def info_gain(prior: Distribution, joint: JointDistribution) -> float:
    """Entropy drop on the secret after seeing the result."""
    marginal = joint.secret_marginal()
    for s in set(marginal) | set(prior.probs):
        if abs(marginal.get(s, 0.0) - prior.probs.get(s, 0.0)) > PROB_TOL:
            raise ConsistencyError(f"secret marginal disagrees with prior at {s!r}")
    return shannon_entropy(prior) - posterior_entropy(joint)


def _check_hermitian(m: np.ndarray):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > HERM_TOL * scale:
        raise ValueError("matrix is not Hermitian")


def _jacobi_symmetric(s: np.ndarray, max_sweeps: int = 100) -> np.ndarray:
    a = np.array(s, dtype=float)
    n = a.shape[0]
    tol = JACOBI_OFF_TOL * max(1.0, float(np.max(np.abs(a))))
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum((a - np.diag(np.diag(a))) ** 2)))
        if off < tol:
            return np.diag(a).copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * (abs(a[p, p]) + abs(a[q, q])) or abs(apq) < 1e-300:
                    # Negligible against the diagonal; a rotation would overflow theta.
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # theta**2 would overflow
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
    raise RuntimeError("Jacobi iteration did not converge")


def eigvals_hermitian(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, in descending order."""
    m = np.asarray(getattr(m, "entries", m), dtype=complex)
    _check_hermitian(m)
    a, b = m.real, m.imag
    embedded = np.block([[a, -b], [b, a]])
    doubled = np.sort(_jacobi_symmetric(embedded))[::-1]
    # Partners sit next to each other after sorting; average each pair.
    return 0.5 * (doubled[0::2] + doubled[1::2])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"density matrix must be 2x2 or 4x4, got {m.shape}")
        _check_hermitian(m)
        if abs(np.trace(m) - 1.0) > HERM_TOL * m.shape[0]:
            raise ValueError("density matrix must have unit trace")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)
        if eigvals_hermitian(m)[-1] < -NEG_EIG_TOL:
            raise ValueError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def pure(cls, state) -> DensityMatrix:
        amps = np.asarray(getattr(state, "amps", state), dtype=complex)
        return cls(np.outer(amps, amps.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityMatrix:
        return cls(np.eye(dim) / dim)


def vn_entropy(rho: DensityMatrix) -> float:
    lam = np.clip(eigvals_hermitian(rho.entries), 0.0, 1.0)
    return _entropy(lam.tolist())


@dataclass(frozen=True)
class Ensemble:
    members: tuple[tuple[float, DensityMatrix], ...] = field(default_factory=tuple)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("ensemble needs at least one member")
        _check_probs(p for p, _ in members)
        if len({rho.dim for _, rho in members}) != 1:
            raise ValueError("ensemble members differ in dimension")
        object.__setattr__(self, "members", members)

    @classmethod
    def uniform_pure(cls, states) -> Ensemble:
        states = list(states)
        return cls(tuple((1.0 / len(states), DensityMatrix.pure(s)) for s in states))

    def mixture(self) -> DensityMatrix:
        return DensityMatrix(sum(p * rho.entries for p, rho in self.members))


def holevo_chi(e: Ensemble) -> float:
    return vn_entropy(e.mixture()) - sum(p * vn_entropy(rho) for p, rho in e.members)
