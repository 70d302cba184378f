"""Dense statevector oracle: circuit application, exact evolution, expectations, variances.

Amplitude index bit ``j`` is qubit ``j``; ancilla registers sit above the
system register, so padding a system state with zeros appends ``|0...0>``
ancillas.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .circuit import Circuit, Gate
from .grouping import Grouping
from .pauli import PauliHamiltonian, PauliString, gate_matrix

MAX_QUBITS = 22
_MAGIC = b"PGSTATE\x00"


class SimulationError(ValueError):
    pass


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_qubits > MAX_QUBITS:
            raise SimulationError(f"{self.n_qubits} qubits exceeds the cap of {MAX_QUBITS}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise SimulationError("amplitude vector length must be 2**n_qubits")

    @classmethod
    def zero(cls, n_qubits: int) -> Statevector:
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> Statevector:
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1
        return cls(n_qubits, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def system_part(self, n_system: int) -> Statevector:
        return Statevector(n_system, self.amplitudes[: 1 << n_system])

    def ancilla_leakage(self, n_system: int) -> float:
        """Probability that any qubit above ``n_system`` is not ``|0>``."""
        return float(np.sum(np.abs(self.amplitudes[1 << n_system:]) ** 2))


def fidelity(a: Statevector, b: Statevector) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


# ---- gate application ------------------------------------------------------------


def _apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """``psi`` has shape ``(batch,) + (2,)*n`` with axis ``1 + n - 1 - q`` for qubit ``q``."""
    ax = [1 + n - 1 - q for q in gate.qubits]
    kind = gate.kind
    if kind == "CNOT":
        c, t = ax
        idx1 = [slice(None)] * psi.ndim
        idx1[c] = 1
        sub = psi[tuple(idx1)]
        t_sub = t - 1 if t > c else t
        psi[tuple(idx1)] = np.flip(sub, axis=t_sub).copy()
        return psi
    if kind == "CZ":
        idx = [slice(None)] * psi.ndim
        idx[ax[0]] = 1
        idx[ax[1]] = 1
        psi[tuple(idx)] *= -1
        return psi
    u = gate_matrix(kind, gate.angle)
    a = ax[0]
    if kind in ("Z", "S", "Sdg", "RZ"):
        for b in (0, 1):
            idx = [slice(None)] * psi.ndim
            idx[a] = b
            psi[tuple(idx)] *= u[b, b]
        return psi
    out = np.tensordot(u, psi, axes=([1], [a]))
    return np.moveaxis(out, 0, a)


def apply_circuit_batch(c: Circuit, states: np.ndarray) -> np.ndarray:
    """Apply ``c`` to each row of ``states`` (shape ``(batch, 2**n_system)``)."""
    n = c.n_qubits
    if n > MAX_QUBITS:
        raise SimulationError(f"circuit needs {n} qubits, cap is {MAX_QUBITS}")
    if any(g.kind == "MEASURE_Z" for g in c.gates):
        raise SimulationError("measurement gates are not unitary; use sample_counts")
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    batch, dim = states.shape
    if dim != 1 << c.n_system and dim != 1 << n:
        raise SimulationError("state size matches neither the system register nor the circuit")
    full = np.zeros((batch, 1 << n), dtype=complex)
    full[:, :dim] = states
    psi = full.reshape((batch,) + (2,) * n)
    for gate in c.gates:
        psi = _apply_gate(psi, gate, n)
    return psi.reshape(batch, 1 << n)


def apply_circuit(c: Circuit, s: Statevector) -> Statevector:
    out = apply_circuit_batch(c, s.amplitudes[None, :])[0]
    return Statevector(c.n_qubits, out)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary on the full register (columns are images of basis states)."""
    dim = 1 << c.n_qubits
    return apply_circuit_batch(c, np.eye(dim, dtype=complex)).T


# ---- Pauli action and exact evolution ------------------------------------------------


def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v >>= 1
    return out


def apply_pauli(p: PauliString, amps: np.ndarray) -> np.ndarray:
    """``P|b> = i**(k + |x&z|) (-1)**|b&z| |b^x>``, vectorized over the last axis."""
    n = p.n_qubits
    idx = _indices(n)
    signs = 1 - 2 * _parity(idx & p.z)
    phase = 1j ** ((p.phase + (p.x & p.z).bit_count()) % 4)
    out = np.empty_like(amps)
    out[..., idx ^ p.x] = phase * signs * amps[..., idx]
    return out


def exact_group_evolution(
    group: list[tuple[float, PauliString]], time: float, s: Statevector
) -> Statevector:
    """Apply ``exp(-i h t P)`` term by term in list order.

    Uses ``exp(-i a P) = cos(a) - i sin(a) P`` (P squares to one), with a
    per-basis-state phase shortcut for Z-only terms.
    """
    amps = s.amplitudes.copy()
    n = s.n_qubits
    idx = _indices(n)
    for h, p in group:
        if p.n_qubits != n:
            raise SimulationError("term and state sizes differ")
        a = h * time * p.sign
        p = p.unsigned()
        if p.is_z_only:
            eig = 1 - 2 * _parity(idx & p.z)
            amps = np.exp(-1j * a * eig) * amps
        else:
            amps = math.cos(a) * amps - 1j * math.sin(a) * apply_pauli(p, amps)
    return Statevector(n, amps)


def expectation(p: PauliString, s: Statevector) -> float:
    if p.n_qubits != s.n_qubits:
        raise SimulationError("operator and state sizes differ")
    return float(np.vdot(s.amplitudes, apply_pauli(p, s.amplitudes)).real)


def hamiltonian_expectation(h: PauliHamiltonian, s: Statevector) -> float:
    return sum(c * expectation(p, s) for c, p in h.terms)


# ---- variance study ---------------------------------------------------------------


@dataclass
class VarianceRecord:
    individual_total: float
    grouped_total: float
    per_group: list[dict]
    n_states: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def variance_report(
    h: PauliHamiltonian, g: Grouping, states: list[Statevector]
) -> VarianceRecord:
    """State-averaged shot-noise proxies for individual vs grouped measurement.

    ``individual = sum_l h_l^2 (1 - <H_l>^2)``;
    ``grouped = sum_n (<A_n^2> - <A_n>^2)`` with ``A_n`` the group's weighted sum.
    """
    if not states:
        raise SimulationError("variance_report needs at least one state")
    labels = list(g.groups)
    ind = np.zeros(len(labels))
    grp = np.zeros(len(labels))
    for s in states:
        amps = s.amplitudes
        for gi, label in enumerate(labels):
            a_psi = np.zeros_like(amps)
            for i in g.groups[label]:
                c, p = h.terms[i]
                pp = apply_pauli(p, amps)
                ev = float(np.vdot(amps, pp).real)
                ind[gi] += c * c * (1 - ev * ev)
                a_psi += c * pp
            mean = float(np.vdot(amps, a_psi).real)
            grp[gi] += max(float(np.vdot(a_psi, a_psi).real) - mean * mean, 0.0)
    m = len(states)
    per_group = [
        {"label": str(lab), "size": len(g.groups[lab]), "individual": ind[k] / m, "grouped": grp[k] / m}
        for k, lab in enumerate(labels)
    ]
    return VarianceRecord(float(ind.sum() / m), float(grp.sum() / m), per_group, m)


def random_particle_conserving_state(n_qubits: int, n_particles: int, seed: int) -> Statevector:
    """Complex-Gaussian amplitudes on the Hamming-weight-``n_particles`` sector, normalized."""
    if not 0 <= n_particles <= n_qubits:
        raise ValueError(f"need 0 <= n_particles <= {n_qubits}")
    rng = np.random.default_rng(seed)
    support = [sum(1 << q for q in occ) for occ in combinations(range(n_qubits), n_particles)]
    vals = rng.normal(size=len(support)) + 1j * rng.normal(size=len(support))
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[support] = vals / np.linalg.norm(vals)
    return Statevector(n_qubits, amps)


def random_state(n_qubits: int, rng: np.random.Generator) -> Statevector:
    v = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return Statevector(n_qubits, v / np.linalg.norm(v))


# ---- shot sampling (demonstration only) --------------------------------------------


def sample_counts(c: Circuit, s: Statevector, shots: int, seed: int) -> dict[int, int]:
    """Run the unitary part of ``c`` then sample its measured qubits; keys are bit masks."""
    measured = [g.qubits[0] for g in c.gates if g.kind == "MEASURE_Z"]
    unitary = Circuit(dict(c.registers), [g for g in c.gates if g.kind != "MEASURE_Z"])
    out = apply_circuit(unitary, s)
    probs = np.abs(out.amplitudes) ** 2
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(probs), size=shots, p=probs)
    mask = sum(1 << q for q in measured)
    counts: dict[int, int] = {}
    for d in draws:
        key = int(d) & mask
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


# ---- binary state dumps ---------------------------------------------------------------


def dump_state(s: Statevector, path) -> None:
    """16-byte header (8-byte magic, little-endian uint64 n_qubits) then complex64 amplitudes."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<Q", s.n_qubits))
        fh.write(s.amplitudes.astype("<c8").tobytes())


def load_state(path) -> Statevector:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if head[:8] != _MAGIC:
            raise SimulationError("not a state dump")
        (n,) = struct.unpack("<Q", head[8:])
        amps = np.frombuffer(fh.read(), dtype="<c8").astype(complex)
    return Statevector(n, amps)
