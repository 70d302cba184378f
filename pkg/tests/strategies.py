"""Hypothesis strategies shared across test modules."""

from hypothesis import strategies as st

from pauligroup.circuit import Circuit
from pauligroup.pauli import PauliString


@st.composite
def paulis(draw, n=None, max_qubits=6, hermitian=True):
    n = draw(st.integers(1, max_qubits)) if n is None else n
    x = draw(st.integers(0, (1 << n) - 1))
    z = draw(st.integers(0, (1 << n) - 1))
    phase = draw(st.sampled_from([0, 2] if hermitian else [0, 1, 2, 3]))
    return PauliString(n, x, z, phase)


@st.composite
def pauli_pairs(draw, max_qubits=6, hermitian=True):
    n = draw(st.integers(1, max_qubits))
    return draw(paulis(n, hermitian=hermitian)), draw(paulis(n, hermitian=hermitian))


@st.composite
def clifford_circuits(draw, n, max_gates=12):
    c = Circuit.on(n)
    for _ in range(draw(st.integers(0, max_gates))):
        kind = draw(st.sampled_from(["H", "S", "Sdg", "X", "Y", "Z", "CNOT", "CZ"] if n > 1 else ["H", "S", "Sdg", "X", "Y", "Z"]))
        if kind in ("CNOT", "CZ"):
            a = draw(st.integers(0, n - 1))
            b = draw(st.integers(0, n - 2))
            c.append(kind, a, b if b < a else b + 1)
        else:
            c.append(kind, draw(st.integers(0, n - 1)))
    return c
