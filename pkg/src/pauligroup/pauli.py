"""Pauli strings in symplectic form, Pauli Hamiltonians, and Clifford conjugation.

A :class:`PauliString` stores two integer bit masks, ``x`` and ``z`` (bit ``j``
is qubit ``j``, 0-based), plus a phase exponent ``k`` so that the operator is
``i**k`` times the tensor product of X, Y, Z, I read off the masks. Y is the
Hermitian Pauli Y, not ``XZ``.

Text formats are 1-based: ``"X1 Z2 Y4"`` is X on the first qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Gate

DEFAULT_PRUNE = 1e-8
_AXES = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class PauliParseError(ValueError):
    pass


def _popcount(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True, slots=True)
class PauliString:
    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0  # exponent of i, mod 4

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        limit = 1 << self.n_qubits
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bit masks exceed n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_axes(cls, n_qubits: int, axes: dict[int, str], phase: int = 0) -> PauliString:
        """Build from a ``{qubit (0-based): 'X'|'Y'|'Z'}`` mapping."""
        x = z = 0
        for q, a in axes.items():
            bx, bz = _BITS[a]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z, phase)

    @classmethod
    def zstring(cls, n_qubits: int, qubits) -> PauliString:
        z = 0
        for q in qubits:
            z |= 1 << q
        return cls(n_qubits, 0, z)

    @property
    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    @property
    def support(self) -> int:
        return self.x | self.z

    def axis(self, q: int) -> str:
        return _AXES.get(((self.x >> q) & 1, (self.z >> q) & 1), "I")

    def axes(self) -> dict[int, str]:
        return {q: self.axis(q) for q in range(self.n_qubits) if (self.support >> q) & 1}

    def qubits(self) -> list[int]:
        return [q for q in range(self.n_qubits) if (self.support >> q) & 1]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_z_only(self) -> bool:
        return self.x == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError(f"{self!s} has an imaginary phase")
        return 1 if self.phase == 0 else -1

    def unsigned(self) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, 0)

    def with_phase(self, phase: int) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, phase)

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __str__(self) -> str:
        prefix = {0: "", 1: "i ", 2: "- ", 3: "-i "}[self.phase]
        return prefix + format_pauli(self)


def _check_dims(p: PauliString, q: PauliString) -> None:
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"dimension mismatch: {p.n_qubits} vs {q.n_qubits} qubits")


def parse_pauli(text: str, n_qubits: int) -> PauliString:
    axes: dict[int, str] = {}
    for token in text.split():
        axis, digits = token[:1], token[1:]
        if axis not in _BITS or not digits.isdigit():
            raise PauliParseError(f"malformed token {token!r}")
        index = int(digits)
        if not 1 <= index <= n_qubits:
            raise PauliParseError(f"token {token!r}: index out of range 1..{n_qubits}")
        if index - 1 in axes:
            raise PauliParseError(f"token {token!r}: repeated index {index}")
        axes[index - 1] = axis
    return PauliString.from_axes(n_qubits, axes)


def format_pauli(p: PauliString) -> str:
    """Canonical text, tokens sorted by qubit index; identity is the empty string."""
    return " ".join(f"{a}{q + 1}" for q, a in p.axes().items())


def commutes(p: PauliString, q: PauliString) -> bool:
    _check_dims(p, q)
    return _popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def qubit_wise_commutes(p: PauliString, q: PauliString) -> bool:
    _check_dims(p, q)
    differ = (p.x ^ q.x) | (p.z ^ q.z)
    return p.support & q.support & differ == 0


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Product ``p @ q`` with exact phase.

    Writing each operand as ``i**(k + |x&z|) X^x Z^z``, moving ``Z^z1`` past
    ``X^x2`` costs ``(-1)**|z1&x2|``.
    """
    _check_dims(p, q)
    x, z = p.x ^ q.x, p.z ^ q.z
    k = (
        p.phase
        + q.phase
        + _popcount(p.x & p.z)
        + _popcount(q.x & q.z)
        + 2 * _popcount(p.z & q.x)
        - _popcount(x & z)
    )
    return PauliString(p.n_qubits, x, z, k)


def weight(p: PauliString) -> int:
    return _popcount(p.support)


# ---- dense matrices (used by the conjugation tables and by test oracles) ----

_PAULI_2x2 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense ``2**n`` matrix; basis index bit ``j`` is qubit ``j``."""
    out = np.array([[1.0 + 0j]])
    for q in range(p.n_qubits):
        out = np.kron(_PAULI_2x2[p.axis(q)], out)
    return (1j ** p.phase) * out


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Unitary of a gate; two-qubit gates use the (control, target) = (bit 0, bit 1) order."""
    s2 = 1 / math.sqrt(2)
    if kind == "H":
        return np.array([[s2, s2], [s2, -s2]], dtype=complex)
    if kind == "S":
        return np.diag([1, 1j])
    if kind == "Sdg":
        return np.diag([1, -1j])
    if kind in ("X", "Y", "Z"):
        return _PAULI_2x2[kind].copy()
    if kind == "RX":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RZ":
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    if kind == "CNOT":
        # control = bit 0, target = bit 1
        m = np.zeros((4, 4), dtype=complex)
        for b in range(4):
            c, t = b & 1, (b >> 1) & 1
            m[c | ((t ^ c) << 1), b] = 1
        return m
    if kind == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    raise ValueError(f"no matrix for {kind}")


# ---- Clifford conjugation --------------------------------------------------


class UnsupportedGateError(ValueError):
    pass


def _quarter_turns(angle: float) -> int | None:
    turns = angle / (math.pi / 2)
    r = round(turns)
    if abs(turns - r) > 1e-9:
        return None
    return r % 4


def _clifford_key(gate: Gate) -> tuple[str, int | None]:
    if gate.kind in ("RX", "RZ"):
        turns = _quarter_turns(gate.angle)
        if turns is None:
            raise UnsupportedGateError(f"{gate.kind}({gate.angle}) is not Clifford")
        return gate.kind, turns
    if gate.kind == "MEASURE_Z":
        raise UnsupportedGateError("measurement cannot be conjugated through")
    return gate.kind, None


@lru_cache(maxsize=None)
def _conjugation_table(kind: str, turns: int | None) -> tuple[tuple[int, int, int], ...]:
    """For every local Pauli (index x | z << arity), its image U P U^dag as (x, z, phase)."""
    angle = None if turns is None else turns * math.pi / 2
    u = gate_matrix(kind, angle)
    arity = 2 if u.shape[0] == 4 else 1
    table = []
    for x in range(1 << arity):
        for z in range(1 << arity):
            p = PauliString(arity, x, z)
            image = u @ pauli_matrix(p) @ u.conj().T
            for x2 in range(1 << arity):
                for z2 in range(1 << arity):
                    cand = pauli_matrix(PauliString(arity, x2, z2))
                    overlap = np.trace(cand.conj().T @ image) / (1 << arity)
                    if abs(abs(overlap) - 1) < 1e-9:
                        k = int(round(np.angle(overlap) / (math.pi / 2))) % 4
                        table.append((x2, z2, k))
    # order of table entries is (x, z) row-major
    return tuple(table)


def conjugate_gate(p: PauliString, gate: Gate) -> PauliString:
    """Return ``U p U^dag`` for a single Clifford gate."""
    kind, turns = _clifford_key(gate)
    table = _conjugation_table(kind, turns)
    qs = gate.qubits
    arity = len(qs)
    lx = lz = 0
    for i, q in enumerate(qs):
        lx |= ((p.x >> q) & 1) << i
        lz |= ((p.z >> q) & 1) << i
    nx, nz, k = table[lx * (1 << arity) + lz]
    x, z = p.x, p.z
    for i, q in enumerate(qs):
        mask = 1 << q
        x = (x & ~mask) | (((nx >> i) & 1) << q)
        z = (z & ~mask) | (((nz >> i) & 1) << q)
    return PauliString(p.n_qubits, x, z, p.phase + k)


def conjugate_by_circuit(p: PauliString, c: Circuit) -> PauliString:
    """Return ``U p U^dag`` where ``U`` is the unitary of ``c`` (gates in time order).

    ``p`` may be defined on the system register only; it is then extended by
    identity onto any ancilla registers before conjugation and must come back
    supported on the system register.
    """
    n = c.n_qubits
    if p.n_qubits not in (n, c.n_system):
        raise ValueError(f"Pauli on {p.n_qubits} qubits vs circuit on {n}")
    q = PauliString(n, p.x, p.z, p.phase) if p.n_qubits != n else p
    for gate in c.gates:
        q = conjugate_gate(q, gate)
    if q.n_qubits != p.n_qubits:
        if q.support >> p.n_qubits:
            raise ValueError("conjugated operator leaks onto ancilla registers")
        q = PauliString(p.n_qubits, q.x, q.z, q.phase)
    return q


# ---- Hamiltonians ----------------------------------------------------------


@dataclass(frozen=True)
class PauliHamiltonian:
    """Real-weighted sum of Hermitian Pauli strings with no duplicate operators.

    Every stored :class:`PauliString` has phase 0; a ``-1`` phase is folded
    into the coefficient on construction.
    """

    n_qubits: int
    terms: tuple[tuple[float, PauliString], ...]

    @classmethod
    def from_terms(cls, n_qubits: int, terms, prune: float = DEFAULT_PRUNE) -> PauliHamiltonian:
        """Merge duplicates (first-occurrence order) and drop ``|c| < prune``."""
        merged: dict[tuple[int, int], float] = {}
        for coeff, p in terms:
            if p.n_qubits != n_qubits:
                raise ValueError("term qubit count does not match the Hamiltonian")
            coeff = float(coeff) * p.sign
            merged[p.key] = merged.get(p.key, 0.0) + coeff
        kept = tuple(
            (c, PauliString(n_qubits, x, z)) for (x, z), c in merged.items() if abs(c) >= prune
        )
        return cls(n_qubits, kept)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def coefficients(self) -> list[float]:
        return [c for c, _ in self.terms]

    @property
    def operators(self) -> list[PauliString]:
        return [p for _, p in self.terms]

    def sorted(self) -> PauliHamiltonian:
        """Canonical order: ascending ``(x, z)`` bit-vector key."""
        return PauliHamiltonian(self.n_qubits, tuple(sorted(self.terms, key=lambda t: t[1].key)))

    def matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for c, p in self.terms:
            out += c * pauli_matrix(p)
        return out


def format_hamiltonian(h: PauliHamiltonian) -> str:
    lines = [f"# n_qubits {h.n_qubits}"]
    for c, p in h.terms:
        text = format_pauli(p)
        lines.append(f"{c!r} {text}".rstrip())
    return "\n".join(lines) + "\n"


def parse_hamiltonian(text: str, n_qubits: int | None = None, prune: float = 0.0):
    """Parse ``<coefficient> <pauli-text>`` lines.

    The qubit count comes from ``n_qubits`` or a ``# n_qubits N`` comment,
    falling back to the largest index mentioned.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            parts = line[1:].split()
            if n_qubits is None and len(parts) == 2 and parts[0] == "n_qubits":
                n_qubits = int(parts[1])
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            coeff = float(head)
        except ValueError:
            raise PauliParseError(f"line {lineno}: bad coefficient {head!r}") from None
        rows.append((lineno, coeff, rest.strip()))
    if n_qubits is None:
        indices = [int(tok[1:]) for _, _, t in rows for tok in t.split() if tok[1:].isdigit()]
        n_qubits = max(indices, default=1)
    terms = []
    for lineno, coeff, body in rows:
        try:
            terms.append((coeff, parse_pauli(body, n_qubits)))
        except PauliParseError as exc:
            raise PauliParseError(f"line {lineno}: {exc}") from None
    return PauliHamiltonian.from_terms(n_qubits, terms, prune=prune)
