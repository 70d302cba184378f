"""FCIDUMP ingestion, second-quantized Hamiltonians, and the Jordan-Wigner map.

Spin orbitals are interleaved: spatial orbital ``k`` (1-based in the file)
becomes spin orbitals ``2k-1`` (alpha) and ``2k`` (beta), i.e. 0-based
``2(k-1)`` and ``2(k-1)+1``.

Two-body integrals are stored so that ``two_body[p, q, r, s]`` multiplies
``a_p^dag a_q^dag a_r a_s`` (before the overall 1/2). From chemist-notation
FCIDUMP values ``(ij|kl)`` this is ``two_body[p, q, r, s] = (ps|qr)`` with
matching spins on ``p, s`` and on ``q, r``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .pauli import DEFAULT_PRUNE, PauliHamiltonian, PauliString, conjugate_by_circuit


class FcidumpError(ValueError):
    pass


@dataclass(frozen=True)
class MolecularIntegrals:
    n_orbitals: int
    one_body: np.ndarray
    two_body: np.ndarray
    core_energy: float = 0.0
    n_electrons: int | None = None

    def __post_init__(self):
        n = self.n_orbitals
        if self.one_body.shape != (n, n) or self.two_body.shape != (n, n, n, n):
            raise ValueError("integral shapes do not match n_orbitals")


@dataclass(frozen=True)
class FermionHamiltonian:
    """Sum of ``coefficient * prod(ladder ops)``; a ladder op is ``(orbital, is_dagger)``."""

    n_orbitals: int
    terms: tuple[tuple[float, tuple[tuple[int, bool], ...]], ...]


@dataclass(frozen=True)
class CliffordMap:
    """CNOT-only circuit ``U`` relating two fermion-to-qubit encodings: ``H' = U H U^dag``."""

    circuit: Circuit = field()

    def __post_init__(self):
        bad = [g for g in self.circuit.gates if g.kind != "CNOT"]
        if bad:
            raise ValueError(f"CliffordMap accepts CNOT gates only, got {bad[0].kind}")

    @classmethod
    def identity(cls, n_qubits: int) -> CliffordMap:
        return cls(Circuit.on(n_qubits))

    @classmethod
    def from_product(cls, n_qubits: int, cnots) -> CliffordMap:
        """Build from an operator product ``CNOT(c1,t1) CNOT(c2,t2) ...`` (1-based pairs).

        The rightmost factor acts first, so gates are emitted in reverse.
        """
        c = Circuit.on(n_qubits)
        for control, target in reversed(list(cnots)):
            c.append("CNOT", control - 1, target - 1)
        return cls(c)


# ---- FCIDUMP -----------------------------------------------------------------

_NAMELIST_KEY = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=")


def _parse_header(header: str) -> dict[str, list[str]]:
    body = re.sub(r"^\s*&FCI", "", header, flags=re.IGNORECASE)
    body = re.sub(r"(&END|/)\s*$", "", body.strip(), flags=re.IGNORECASE)
    parts = _NAMELIST_KEY.split(body)
    fields = {}
    for key, value in zip(parts[1::2], parts[2::2]):
        fields[key.upper()] = [v for v in re.split(r"[,\s]+", value.strip()) if v]
    return fields


def parse_fcidump(text: str) -> MolecularIntegrals:
    lines = text.splitlines()
    header_lines = []
    body_start = None
    for i, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip().upper()
        if stripped.endswith("&END") or stripped == "/" or stripped.endswith("/"):
            body_start = i + 1
            break
    if body_start is None or not header_lines[0].strip().upper().startswith("&FCI"):
        raise FcidumpError("line 1: missing &FCI ... &END namelist header")
    fields = _parse_header(" ".join(header_lines))
    for required in ("NORB", "NELEC"):
        if required not in fields or not fields[required]:
            raise FcidumpError(f"header is missing {required}")
    try:
        norb = int(fields["NORB"][0])
        nelec = int(fields["NELEC"][0])
    except ValueError:
        raise FcidumpError("NORB/NELEC must be integers") from None
    if norb < 1:
        raise FcidumpError("NORB must be positive")

    h1 = np.zeros((norb, norb))
    eri = np.zeros((norb,) * 4)
    core = 0.0
    for lineno, line in enumerate(lines[body_start:], body_start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FcidumpError(f"line {lineno}: expected 'value i j k l'")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(v) for v in parts[1:])
        except ValueError:
            raise FcidumpError(f"line {lineno}: non-numeric entry") from None
        if min(i, j, k, l) < 0 or max(i, j, k, l) > norb:
            raise FcidumpError(f"line {lineno}: orbital index outside 1..{norb}")
        if i and j and k and l:
            i, j, k, l = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in (
                (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
            ):
                eri[a, b, c, d] = value
        elif i and j and not k and not l:
            h1[i - 1, j - 1] = h1[j - 1, i - 1] = value
        elif not (i or j or k or l):
            core = value
        # (i, 0, 0, 0) orbital energies carry no Hamiltonian information
    return spin_expand(h1, eri, core, nelec)


def spin_expand(h1: np.ndarray, eri: np.ndarray, core: float = 0.0, nelec=None):
    """Spatial integrals (chemist ``eri``) to interleaved spin-orbital integrals."""
    norb = h1.shape[0]
    n = 2 * norb
    one = np.zeros((n, n))
    two = np.zeros((n,) * 4)
    # phys[P, Q, R, S] = (PS|QR)
    phys = np.einsum("psqr->pqrs", eri)
    for a in (0, 1):
        one[a::2, a::2] = h1
        for b in (0, 1):
            two[a::2, b::2, b::2, a::2] = phys
    return MolecularIntegrals(n, one, two, float(core), nelec)


def write_fcidump(path_or_file, h1, eri, nelec, core=0.0, tol=1e-15) -> None:
    """Write spatial integrals (chemist notation) with 8-fold symmetry reduction."""
    norb = h1.shape[0]
    out = [f" &FCI NORB={norb},NELEC={nelec},MS2=0,", "  ORBSYM=" + "1," * norb, "  ISYM=1,", " &END"]
    for i in range(norb):
        for j in range(i + 1):
            for k in range(norb):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    v = eri[i, j, k, l]
                    if abs(v) > tol:
                        out.append(f"{v: .16e} {i + 1:4d} {j + 1:4d} {k + 1:4d} {l + 1:4d}")
    for i in range(norb):
        for j in range(i + 1):
            if abs(h1[i, j]) > tol:
                out.append(f"{h1[i, j]: .16e} {i + 1:4d} {j + 1:4d}    0    0")
    out.append(f"{core: .16e}    0    0    0    0")
    text = "\n".join(out) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)


# ---- second quantization -----------------------------------------------------


def build_fermionic_hamiltonian(mi: MolecularIntegrals, tol: float = 0.0) -> FermionHamiltonian:
    """One term per nonzero one-body entry and per nonzero two-body entry.

    Two-body entries with ``p == q`` or ``r == s`` are skipped: ``a_p^dag a_p^dag``
    and ``a_r a_r`` vanish identically.
    """
    terms: list = []
    if mi.core_energy:
        terms.append((mi.core_energy, ()))
    for i, j in zip(*np.nonzero(np.abs(mi.one_body) > tol)):
        terms.append((float(mi.one_body[i, j]), ((int(i), True), (int(j), False))))
    for p, q, r, s in zip(*np.nonzero(np.abs(mi.two_body) > tol)):
        if p == q or r == s:
            continue
        ops = ((int(p), True), (int(q), True), (int(r), False), (int(s), False))
        terms.append((0.5 * float(mi.two_body[p, q, r, s]), ops))
    return FermionHamiltonian(mi.n_orbitals, tuple(terms))


# ---- Jordan-Wigner -------------------------------------------------------------


def _mul_raw(a, b):
    """Product of raw ``(x, z, phase)`` triples, same rule as ``pauli.multiply``."""
    x1, z1, k1 = a
    x2, z2, k2 = b
    x, z = x1 ^ x2, z1 ^ z2
    k = (
        k1 + k2 + (x1 & z1).bit_count() + (x2 & z2).bit_count()
        + 2 * (z1 & x2).bit_count() - (x & z).bit_count()
    )
    return x, z, k % 4


def _ladder(j: int, dagger: bool):
    """``a_j -> Z_<j (X_j + iY_j)/2``, ``a_j^dag -> Z_<j (X_j - iY_j)/2`` as two weighted strings."""
    tail = (1 << j) - 1
    bit = 1 << j
    y_coeff = -0.5j if dagger else 0.5j
    return ((0.5, (bit, tail, 0)), (y_coeff, (bit, tail | bit, 0)))


class NonHermitianError(ArithmeticError):
    pass


def jordan_wigner_transform(
    fh: FermionHamiltonian, prune_threshold: float = DEFAULT_PRUNE
) -> PauliHamiltonian:
    if prune_threshold < 0:
        raise ValueError("prune_threshold must be non-negative")
    n = fh.n_orbitals
    ladders = {(j, d): _ladder(j, d) for j in range(n) for d in (False, True)}
    acc: dict[tuple[int, int], complex] = {}
    for coeff, ops in fh.terms:
        partial = [(complex(coeff), (0, 0, 0))]
        for op in ops:
            partial = [
                (c1 * c2, _mul_raw(p1, p2)) for c1, p1 in partial for c2, p2 in ladders[op]
            ]
        for c, (x, z, k) in partial:
            acc[(x, z)] = acc.get((x, z), 0j) + c * (1j ** k)
    terms = []
    for (x, z), c in sorted(acc.items()):
        if abs(c.imag) > 1e-12:
            raise NonHermitianError(
                f"imaginary coefficient {c.imag:.3e} on X={x:b} Z={z:b}: input is not Hermitian"
            )
        if abs(c.real) >= prune_threshold and c.real != 0.0:
            terms.append((c.real, PauliString(n, x, z)))
    return PauliHamiltonian(n, tuple(terms))


def conjugate_hamiltonian(h: PauliHamiltonian, cmap: CliffordMap) -> PauliHamiltonian:
    """Term-by-term ``U P U^dag``; order and count are preserved, signs folded into coefficients."""
    if cmap.circuit.n_qubits != h.n_qubits:
        raise ValueError("CliffordMap qubit count differs from the Hamiltonian")
    out = []
    for c, p in h.terms:
        q = conjugate_by_circuit(p, cmap.circuit)
        out.append((c * q.sign, q.unsigned()))
    return PauliHamiltonian(h.n_qubits, tuple(out))


def hamiltonian_from_fcidump(text: str, prune: float = DEFAULT_PRUNE) -> PauliHamiltonian:
    return jordan_wigner_transform(build_fermionic_hamiltonian(parse_fcidump(text)), prune)
