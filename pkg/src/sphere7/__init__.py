"""Exact algebra and geodesic flows for subriemannian structures on the 7-sphere."""

from __future__ import annotations

from .clifford import CliffordSystem, build_clifford_system
from .liealg import SubalgebraChain, build_chain
from .srgeom import StructureKind, build_hamiltonian

__version__ = "0.1.0"

__all__ = [
    "CliffordSystem",
    "StructureKind",
    "SubalgebraChain",
    "build_chain",
    "build_clifford_system",
    "build_hamiltonian",
]
