import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import circuit_matrix, dense
from strategies import clifford_circuits, pauli_pairs, paulis
from pauligroup.circuit import Circuit
from pauligroup.pauli import (
    PauliHamiltonian,
    PauliParseError,
    PauliString,
    UnsupportedGateError,
    commutes,
    conjugate_by_circuit,
    format_hamiltonian,
    format_pauli,
    multiply,
    parse_hamiltonian,
    parse_pauli,
    pauli_matrix,
    qubit_wise_commutes,
    weight,
)


def P(text, n=4):
    return parse_pauli(text, n)


def matrix_of(p: PauliString) -> np.ndarray:
    return (1j ** p.phase) * dense(format_pauli(p), p.n_qubits)


class TestParsing:
    def test_example_bits(self):
        p = P("X1 Z2 Y4")
        assert (p.x, p.z) == (0b1001, 0b1010)
        assert p.axes() == {0: "X", 1: "Z", 3: "Y"}

    def test_empty_is_identity(self):
        assert parse_pauli("", 3) == PauliString.identity(3)

    @pytest.mark.parametrize("text", ["X1 X1", "X0", "X5", "Q1", "X", "Xa"])
    def test_errors_name_the_token(self, text):
        with pytest.raises(PauliParseError) as exc:
            parse_pauli(text, 4)
        assert text.split()[-1] in str(exc.value)

    def test_format_sorts_tokens(self):
        assert format_pauli(parse_pauli("Y4 X1 Z2", 4)) == "X1 Z2 Y4"

    @given(paulis())
    def test_round_trip(self, p):
        p = p.unsigned()
        assert parse_pauli(format_pauli(p), p.n_qubits) == p


class TestAlgebra:
    def test_examples(self):
        assert commutes(P("X1 X2"), P("Y1 Y2"))
        assert not commutes(P("X1"), P("Y1"))
        assert qubit_wise_commutes(P("X1 Z2"), P("Z2 Y3"))
        assert not qubit_wise_commutes(P("X1 X2"), P("Y1 Y2"))
        assert multiply(P("X1"), P("Y1")) == P("Z1").with_phase(1)
        assert multiply(P("X1 X2"), P("Y1 Y2")) == P("Z1 Z2").with_phase(2)

    def test_weight(self):
        assert weight(P("X1 Z2 Y4")) == 3
        assert weight(PauliString.identity(4)) == 0
        assert weight(PauliString.zstring(7, range(7))) == 7

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            commutes(P("X1", 2), P("X1", 3))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exhaustive_against_dense(self, n):
        ops = [PauliString(n, x, z) for x in range(1 << n) for z in range(1 << n)]
        for p, q in itertools.product(ops, ops):
            mp, mq = matrix_of(p), matrix_of(q)
            assert np.allclose(matrix_of(multiply(p, q)), mp @ mq)
            assert commutes(p, q) == np.allclose(mp @ mq, mq @ mp)

    @given(pauli_pairs(max_qubits=16))
    def test_commutation_symmetric_and_implied_by_qwc(self, pq):
        p, q = pq
        assert commutes(p, q) == commutes(q, p)
        if qubit_wise_commutes(p, q):
            assert commutes(p, q)

    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(paulis(n, hermitian=False), paulis(n, hermitian=False), paulis(n, hermitian=False))))
    def test_associative_and_involutive(self, pqr):
        p, q, r = pqr
        assert multiply(multiply(p, q), r) == multiply(p, multiply(q, r))
        unit = p.unsigned()
        assert multiply(unit, multiply(unit, q)) == q
        assert multiply(unit, unit) == PauliString.identity(p.n_qubits)

    def test_package_matrix_matches_oracle(self):
        for x in range(8):
            for z in range(8):
                p = PauliString(3, x, z, 1)
                assert np.allclose(pauli_matrix(p), matrix_of(p))


def _circuit(n, *gates):
    c = Circuit.on(n)
    for kind, *qs in gates:
        c.append(kind, *qs)
    return c


class TestConjugation:
    def test_hadamard(self):
        assert conjugate_by_circuit(P("X1", 1), _circuit(1, ("H", 0))) == P("Z1", 1)

    def test_bell_stage(self):
        bell = _circuit(2, ("CNOT", 0, 1), ("H", 0))
        assert conjugate_by_circuit(P("X1 X2", 2), bell) == P("Z1", 2)
        assert conjugate_by_circuit(P("Y1 Y2", 2), bell) == P("Z1 Z2", 2).with_phase(2)

    def test_non_clifford_rejected(self):
        c = Circuit.on(1)
        c.append("RZ", 0, angle=0.3)
        with pytest.raises(UnsupportedGateError):
            conjugate_by_circuit(P("X1", 1), c)

    def test_quarter_turn_rotations_are_clifford(self):
        c = Circuit.on(1)
        c.append("RX", 0, angle=np.pi / 2)
        assert conjugate_by_circuit(P("Y1", 1), c) == P("Z1", 1)

    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(paulis(n), clifford_circuits(n))))
    def test_against_dense(self, pc):
        p, c = pc
        u = circuit_matrix(c)
        assert np.allclose(matrix_of(conjugate_by_circuit(p, c)), u @ matrix_of(p) @ u.conj().T)

    @given(st.integers(2, 6).flatmap(lambda n: st.tuples(paulis(n), paulis(n), clifford_circuits(n))))
    def test_preserves_commutation(self, pqc):
        p, q, c = pqc
        assert commutes(p, q) == commutes(conjugate_by_circuit(p, c), conjugate_by_circuit(q, c))

    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(paulis(n), st.lists(st.tuples(st.sampled_from(["H", "S", "Sdg", "X", "Y", "Z"]), st.integers(0, n - 1)), max_size=10))))
    def test_single_qubit_cliffords_keep_weight(self, pg):
        p, gates = pg
        c = _circuit(p.n_qubits, *gates)
        assert weight(conjugate_by_circuit(p, c)) == weight(p)


class TestHamiltonian:
    def test_merge_and_sign_folding(self):
        h = PauliHamiltonian.from_terms(
            2, [(1.0, P("X1", 2)), (0.5, P("X1", 2)), (2.0, P("Z2", 2).with_phase(2)), (1e-12, P("Y1", 2))]
        )
        assert h.terms == ((1.5, P("X1", 2)), (-2.0, P("Z2", 2)))

    def test_text_round_trip(self):
        h = PauliHamiltonian.from_terms(3, [(0.25, P("", 3)), (-1.5, P("X1 Z3", 3)), (1 / 3, P("Y2", 3))])
        assert parse_hamiltonian(format_hamiltonian(h)) == h

    def test_parse_comments_and_errors(self):
        h = parse_hamiltonian("# comment\n\n0.5 Z1 Z2  # trailing\n-1 X3\n")
        assert h.n_qubits == 3 and len(h) == 2
        with pytest.raises(PauliParseError, match="line 2"):
            parse_hamiltonian("1 X1\nnope X1\n")

    def test_matrix(self):
        h = PauliHamiltonian.from_terms(2, [(0.5, P("X1 X2", 2)), (0.25, P("Z1", 2))])
        assert np.allclose(h.matrix(), 0.5 * dense("X1 X2", 2) + 0.25 * dense("Z1", 2))
