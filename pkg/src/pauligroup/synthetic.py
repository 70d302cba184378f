"""Synthetic Hamiltonians for scaling and soundness experiments."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .fermion import (
    MolecularIntegrals,
    build_fermionic_hamiltonian,
    jordan_wigner_transform,
)
from .pauli import DEFAULT_PRUNE, PauliHamiltonian, PauliString


def _interior(lo: int, hi: int) -> list[int]:
    return list(range(lo + 1, hi))


def _string(n: int, axes: dict[int, str], zs) -> PauliString:
    full = {q: "Z" for q in zs}
    full.update(axes)
    return PauliString.from_axes(n, full)


def dense_pattern_strings(n: int) -> list[PauliString]:
    """Every Jordan-Wigner string shape that a molecular Hamiltonian can contain on ``n`` qubits."""
    out = [PauliString.identity(n)]
    out += [_string(n, {}, [i]) for i in range(n)]
    out += [_string(n, {}, [i, j]) for i, j in combinations(range(n), 2)]
    for a, b in combinations(range(n), 2):
        inner = _interior(a, b)
        for ax in "XY":
            ends = {a: ax, b: ax}
            out.append(_string(n, ends, inner))
            out += [_string(n, ends, [i] + inner) for i in range(a)]
            out += [_string(n, ends, inner + [k]) for k in range(b + 1, n)]
            out += [_string(n, ends, [q for q in inner if q != j]) for j in inner]
    for i, j, k, l in combinations(range(n), 4):
        zs = _interior(i, j) + _interior(k, l)
        for pattern in ("XXXX", "YYYY", "XXYY", "YYXX", "XYYX", "YXXY"):
            out.append(_string(n, dict(zip((i, j, k, l), pattern)), zs))
    return out


def dense_pattern_hamiltonian(n: int, seed: int = 0) -> PauliHamiltonian:
    """All pattern strings with random nonzero coefficients (no symmetry zeros)."""
    rng = np.random.default_rng(seed)
    strings = dense_pattern_strings(n)
    coeffs = rng.uniform(0.1, 1.0, size=len(strings)) * rng.choice([-1, 1], size=len(strings))
    return PauliHamiltonian(n, tuple(zip(coeffs.tolist(), strings)))


def random_integrals(n_spatial: int, seed: int, spin: bool = False) -> MolecularIntegrals:
    """Random real integrals with 8-fold symmetry.

    With ``spin=False`` the integrals act directly on ``n_spatial`` orbitals with
    no spin structure, so every index pattern is populated.
    """
    rng = np.random.default_rng(seed)
    m = n_spatial
    h1 = rng.normal(size=(m, m))
    h1 = (h1 + h1.T) / 2
    g = rng.normal(size=(m,) * 4)
    # symmetrize over the 8 real-orbital permutations of (ij|kl)
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    g /= 8
    if spin:
        from .fermion import spin_expand

        return spin_expand(h1, g, core=float(rng.normal()), nelec=m)
    phys = np.einsum("psqr->pqrs", g)
    return MolecularIntegrals(m, h1, phys, float(rng.normal()), m // 2)


def random_molecular_hamiltonian(
    n_orbitals: int, seed: int, spin: bool = False, prune: float = DEFAULT_PRUNE
) -> PauliHamiltonian:
    mi = random_integrals(n_orbitals // 2 if spin else n_orbitals, seed, spin)
    return jordan_wigner_transform(build_fermionic_hamiltonian(mi), prune)


def random_subset(h: PauliHamiltonian, fraction: float, seed: int) -> PauliHamiltonian:
    rng = np.random.default_rng(seed)
    keep = rng.random(len(h)) < fraction
    return PauliHamiltonian(h.n_qubits, tuple(t for t, k in zip(h.terms, keep) if k))
