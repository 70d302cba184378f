"""Bundled RHF/STO-3G FCIDUMP fixtures."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .fermion import (
    MolecularIntegrals,
    build_fermionic_hamiltonian,
    jordan_wigner_transform,
    parse_fcidump,
)
from .pauli import DEFAULT_PRUNE, PauliHamiltonian

FIXTURES = ("h2", "lih", "h4", "h2o")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files(__package__).joinpath("data", f"{name}.fcidump").read_text()


@lru_cache(maxsize=None)
def fixture_integrals(name: str) -> MolecularIntegrals:
    return parse_fcidump(fixture_text(name))


@lru_cache(maxsize=None)
def fixture_hamiltonian(name: str, prune: float = DEFAULT_PRUNE) -> PauliHamiltonian:
    mi = fixture_integrals(name)
    return jordan_wigner_transform(build_fermionic_hamiltonian(mi), prune)
