"""Gate-list circuit IR over named registers, plus depth, JSON and OpenQASM 2.0 I/O.

Qubits are addressed by a flat 0-based index. Registers are laid out in
declaration order, so with registers ``system=N, parity=Lp, rotation=Lr`` the
parity qubits occupy ``[N, N+Lp)`` and the rotation qubits ``[N+Lp, N+Lp+Lr)``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

ONE_QUBIT = ("H", "S", "Sdg", "X", "Y", "Z", "RX", "RZ", "MEASURE_Z")
TWO_QUBIT = ("CNOT", "CZ")
ROTATIONS = ("RX", "RZ")
GATE_KINDS = ONE_QUBIT + TWO_QUBIT

REGISTER_ORDER = ("system", "parity", "rotation")

_QASM_NAMES = {
    "H": "h",
    "S": "s",
    "Sdg": "sdg",
    "X": "x",
    "Y": "y",
    "Z": "z",
    "RX": "rx",
    "RZ": "rz",
    "CNOT": "cx",
    "CZ": "cz",
}
_FROM_QASM = {v: k for k, v in _QASM_NAMES.items()}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} operand(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} operands must be distinct, got {self.qubits}")
        if self.kind in ROTATIONS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")

    def inverse(self) -> Gate:
        if self.kind == "S":
            return Gate("Sdg", self.qubits)
        if self.kind == "Sdg":
            return Gate("S", self.qubits)
        if self.kind in ROTATIONS:
            return Gate(self.kind, self.qubits, -self.angle)
        if self.kind == "MEASURE_Z":
            raise ValueError("measurement has no inverse")
        return self

    def shifted(self, offset: int) -> Gate:
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.angle)


@dataclass
class Circuit:
    """Ordered gate list acting on named registers.

    Circuits are built by appending and then treated as values: synthesis
    functions return fresh circuits and never mutate their inputs.
    """

    registers: dict[str, int]
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        unknown = set(self.registers) - set(REGISTER_ORDER)
        if unknown:
            raise ValueError(f"unknown registers {sorted(unknown)}")
        if any(size < 0 for size in self.registers.values()):
            raise ValueError("register sizes must be non-negative")
        self.registers = {name: self.registers.get(name, 0) for name in REGISTER_ORDER}
        self.gates = list(self.gates)
        for gate in self.gates:
            self._check(gate)

    @classmethod
    def on(cls, n_system: int, n_parity: int = 0, n_rotation: int = 0) -> Circuit:
        return cls({"system": n_system, "parity": n_parity, "rotation": n_rotation})

    @property
    def n_system(self) -> int:
        return self.registers["system"]

    @property
    def n_qubits(self) -> int:
        return sum(self.registers.values())

    def offset(self, register: str) -> int:
        total = 0
        for name in REGISTER_ORDER:
            if name == register:
                return total
            total += self.registers[name]
        raise KeyError(register)

    def qubit(self, register: str, index: int) -> int:
        if not 0 <= index < self.registers[register]:
            raise IndexError(f"{register}[{index}] out of range")
        return self.offset(register) + index

    def locate(self, qubit: int) -> tuple[str, int]:
        for name in REGISTER_ORDER:
            size = self.registers[name]
            if qubit < size:
                return name, qubit
            qubit -= size
        raise IndexError("qubit outside every register")

    def _check(self, gate: Gate) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"gate {gate} touches undeclared qubit {q}")

    def append(self, kind: str, *qubits: int, angle: float | None = None) -> None:
        gate = Gate(kind, tuple(qubits), angle)
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates) -> None:
        for gate in gates:
            self._check(gate)
            self.gates.append(gate)

    def compose(self, other: Circuit) -> Circuit:
        """Return ``self`` followed by ``other``; registers are the larger of each."""
        registers = {
            name: max(self.registers[name], other.registers[name]) for name in REGISTER_ORDER
        }
        out = Circuit(registers)
        out.extend(_relocate(g, self, out) for g in self.gates)
        out.extend(_relocate(g, other, out) for g in other.gates)
        return out

    def inverse(self) -> Circuit:
        return Circuit(dict(self.registers), [g.inverse() for g in reversed(self.gates)])

    def copy(self) -> Circuit:
        return Circuit(dict(self.registers), list(self.gates))

    def depth(self, kinds=None) -> int:
        return circuit_depth(self, kinds)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.registers == other.registers and self.gates == other.gates

    # ---- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "registers": dict(self.registers),
            "gates": [
                {"kind": g.kind, "qubits": list(g.qubits), "angle": g.angle} for g in self.gates
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Circuit:
        gates = [Gate(g["kind"], tuple(g["qubits"]), g.get("angle")) for g in data["gates"]]
        return cls(dict(data["registers"]), gates)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def _relocate(gate: Gate, src: Circuit, dst: Circuit) -> Gate:
    qubits = []
    for q in gate.qubits:
        name, index = src.locate(q)
        qubits.append(dst.qubit(name, index))
    return Gate(gate.kind, tuple(qubits), gate.angle)


def circuit_depth(c: Circuit, kinds=None) -> int:
    """Longest chain of gates that pairwise share a qubit.

    With ``kinds`` given, only gates of those kinds are counted; other gates
    are dropped before scheduling.
    """
    level = [0] * c.n_qubits
    depth = 0
    for gate in c.gates:
        if kinds is not None and gate.kind not in kinds:
            continue
        d = max(level[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            level[q] = d
        depth = max(depth, d)
    return depth


# ---- OpenQASM 2.0 ----------------------------------------------------------


def _qasm_ref(c: Circuit, qubit: int) -> str:
    name, index = c.locate(qubit)
    return f"{name}[{index}]"


def export_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    for name in REGISTER_ORDER:
        if c.registers[name]:
            lines.append(f"qreg {name}[{c.registers[name]}];")
    measured = [g.qubits[0] for g in c.gates if g.kind == "MEASURE_Z"]
    if measured:
        lines.append(f"creg c[{c.n_qubits}];")
    for gate in c.gates:
        refs = ",".join(_qasm_ref(c, q) for q in gate.qubits)
        if gate.kind == "MEASURE_Z":
            lines.append(f"measure {refs} -> c[{gate.qubits[0]}];")
        elif gate.kind in ROTATIONS:
            lines.append(f"{_QASM_NAMES[gate.kind]}({gate.angle:.17g}) {refs};")
        else:
            lines.append(f"{_QASM_NAMES[gate.kind]} {refs};")
    return "\n".join(lines) + "\n"


_QREG = re.compile(r"^qreg\s+(\w+)\[(\d+)\];$")
_REF = re.compile(r"^(\w+)\[(\d+)\]$")
_GATE = re.compile(r"^(\w+)(?:\(([^)]*)\))?\s+(.+);$")
_MEASURE = re.compile(r"^measure\s+(\w+\[\d+\])\s*->\s*c\[\d+\];$")


def import_qasm(text: str) -> Circuit:
    """Parse the subset of OpenQASM 2.0 produced by :func:`export_qasm`."""
    registers: dict[str, int] = {}
    body: list[str] = []
    for raw in text.splitlines():
        line = raw.split("//", 1)[0].strip()
        if not line or line.startswith(("OPENQASM", "include", "creg")):
            continue
        m = _QREG.match(line)
        if m:
            registers[m.group(1)] = int(m.group(2))
        else:
            body.append(line)
    c = Circuit(registers)

    def resolve(ref: str) -> int:
        m = _REF.match(ref.strip())
        if not m:
            raise ValueError(f"bad qubit reference {ref!r}")
        return c.qubit(m.group(1), int(m.group(2)))

    for line in body:
        m = _MEASURE.match(line)
        if m:
            c.append("MEASURE_Z", resolve(m.group(1)))
            continue
        m = _GATE.match(line)
        if not m or m.group(1) not in _FROM_QASM:
            raise ValueError(f"unsupported QASM statement {line!r}")
        kind = _FROM_QASM[m.group(1)]
        angle = float(m.group(2)) if m.group(2) is not None else None
        c.append(kind, *(resolve(r) for r in m.group(3).split(",")), angle=angle)
    return c
