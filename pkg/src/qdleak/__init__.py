"""Simulation and leakage analysis of quantum dialogue protocols."""

from .adversary import EveModel, LeakageReport, leakage_exact, leakage_monte_carlo
from .protocols import ProtocolKind, truth_table

__all__ = [
    "EveModel",
    "LeakageReport",
    "ProtocolKind",
    "leakage_exact",
    "leakage_monte_carlo",
    "truth_table",
]
