import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from oracles import circuit_matrix, dense
from strategies import clifford_circuits, paulis
from pauligroup.circuit import Circuit
from pauligroup.fixtures import fixture_hamiltonian
from pauligroup.grouping import Grouping, group_hamiltonian
from pauligroup.pauli import PauliHamiltonian, format_pauli, parse_pauli
from pauligroup.sim import (
    SimulationError,
    Statevector,
    apply_circuit,
    apply_pauli,
    circuit_unitary,
    dump_state,
    exact_group_evolution,
    expectation,
    fidelity,
    hamiltonian_expectation,
    load_state,
    random_particle_conserving_state,
    random_state,
    sample_counts,
    variance_report,
)


class TestApply:
    def test_hadamard(self):
        c = Circuit.on(1)
        c.append("H", 0)
        out = apply_circuit(c, Statevector.zero(1))
        assert np.allclose(out.amplitudes, [2**-0.5, 2**-0.5])

    def test_ancillas_padded_with_zero(self):
        c = Circuit.on(1, 0, 1)
        c.append("CNOT", 0, 1)
        out = apply_circuit(c, Statevector.basis(1, 1))
        assert out.n_qubits == 2 and out.amplitudes[3] == 1
        assert out.ancilla_leakage(1) == 1.0

    def test_rejects_measurement_and_oversize(self):
        c = Circuit.on(1)
        c.append("MEASURE_Z", 0)
        with pytest.raises(SimulationError):
            apply_circuit(c, Statevector.zero(1))
        with pytest.raises(SimulationError):
            Statevector.zero(23)
        with pytest.raises(SimulationError):
            apply_circuit(Circuit.on(2), Statevector.zero(3))

    @given(st.integers(1, 4).flatmap(clifford_circuits))
    def test_unitary_matches_oracle(self, c):
        assert np.allclose(circuit_unitary(c), circuit_matrix(c))

    def test_rotations_match_oracle(self):
        c = Circuit.on(3)
        for q, a in enumerate([0.3, -1.2, 2.0]):
            c.append("RX", q, angle=a)
            c.append("RZ", (q + 1) % 3, angle=a / 3)
        c.append("CZ", 2, 0)
        assert np.allclose(circuit_unitary(c), circuit_matrix(c))

    @given(paulis(max_qubits=5, hermitian=False), st.integers(0, 2**32 - 1))
    def test_apply_pauli(self, p, seed):
        s = random_state(p.n_qubits, np.random.default_rng(seed))
        want = (1j ** p.phase) * dense(format_pauli(p), p.n_qubits) @ s.amplitudes
        assert np.allclose(apply_pauli(p, s.amplitudes), want)


class TestExactEvolution:
    def test_zero_time(self):
        s = random_state(3, np.random.default_rng(0))
        out = exact_group_evolution([(1.0, parse_pauli("X1 Y2", 3))], 0.0, s)
        assert np.allclose(out.amplitudes, s.amplitudes)

    def test_eigenstate_phase(self):
        theta = 0.9
        out = exact_group_evolution([(1.0, parse_pauli("Z1", 1))], theta / 2, Statevector.basis(1, 1))
        assert out.amplitudes[1] == pytest.approx(np.exp(0.5j * theta))

    @given(st.lists(st.tuples(st.floats(-1, 1), paulis(3)), min_size=1, max_size=4), st.floats(0, 2))
    def test_matches_expm(self, group, t):
        s = random_state(3, np.random.default_rng(1))
        want = s.amplitudes
        for h, p in group:
            want = scipy.linalg.expm(-1j * h * t * p.sign * dense(format_pauli(p), 3)) @ want
        assert np.allclose(exact_group_evolution(group, t, s).amplitudes, want)

    def test_commuting_order_independent(self):
        g = group_hamiltonian(fixture_hamiltonian("h4"))
        s = random_state(8, np.random.default_rng(2))
        for label, terms in list(g.items())[:10]:
            a = exact_group_evolution(terms, 0.7, s)
            b = exact_group_evolution(terms[::-1], 0.7, s)
            assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-12


class TestExpectation:
    def test_basics(self):
        assert expectation(parse_pauli("Z1", 1), Statevector.zero(1)) == 1.0
        assert expectation(parse_pauli("X1", 1), Statevector.zero(1)) == 0.0
        with pytest.raises(SimulationError):
            expectation(parse_pauli("Z1", 2), Statevector.zero(1))

    def test_h2_ground_state(self):
        h = fixture_hamiltonian("h2")
        w, v = np.linalg.eigh(h.matrix())
        s = Statevector(4, v[:, 0])
        assert hamiltonian_expectation(h, s) == pytest.approx(w[0], abs=1e-10)


class TestVariance:
    def test_single_term_groups_equal(self):
        h = PauliHamiltonian.from_terms(2, [(0.5, parse_pauli("X1", 2)), (0.3, parse_pauli("Z2", 2))])
        g = Grouping(h, {"a": [0], "b": [1]})
        rec = variance_report(h, g, [random_state(2, np.random.default_rng(0))])
        assert rec.individual_total == pytest.approx(rec.grouped_total)

    def test_hand_computed(self):
        # |0>: <Z1> = 1, <X2> = 0; group A = Z1 + X2 has <A^2> = 2, <A> = 1
        h = PauliHamiltonian.from_terms(2, [(1.0, parse_pauli("Z1", 2)), (1.0, parse_pauli("X2", 2))])
        rec = variance_report(h, group_hamiltonian_stub(h), [Statevector.zero(2)])
        assert rec.individual_total == pytest.approx(1.0)
        assert rec.grouped_total == pytest.approx(1.0)

    def test_h2_grouped_below_individual(self):
        h = fixture_hamiltonian("h2")
        states = [random_particle_conserving_state(4, 2, k) for k in range(100)]
        rec = variance_report(h, group_hamiltonian(h), states)
        assert 0 <= rec.grouped_total < rec.individual_total
        assert sum(g["individual"] for g in rec.per_group) == pytest.approx(rec.individual_total)

    def test_particle_conserving_support(self):
        s = random_particle_conserving_state(6, 3, 7)
        nz = np.nonzero(np.abs(s.amplitudes) > 0)[0]
        assert all(bin(b).count("1") == 3 for b in nz)
        assert s.norm == pytest.approx(1.0)
        with pytest.raises(ValueError):
            random_particle_conserving_state(3, 4, 0)

    def test_empty_states(self):
        h = fixture_hamiltonian("h2")
        with pytest.raises(SimulationError):
            variance_report(h, group_hamiltonian(h), [])


def group_hamiltonian_stub(h):
    return Grouping(h, {"all": list(range(len(h)))})


class TestMisc:
    def test_dump_round_trip(self, tmp_path):
        s = random_state(5, np.random.default_rng(3))
        path = tmp_path / "s.bin"
        dump_state(s, path)
        raw = path.read_bytes()
        assert raw[:8] == b"PGSTATE\x00" and len(raw) == 16 + 8 * 32
        back = load_state(path)
        assert back.n_qubits == 5 and fidelity(back, s) == pytest.approx(1.0, abs=1e-6)

    def test_load_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"x" * 32)
        with pytest.raises(SimulationError):
            load_state(path)

    def test_sampling_is_seeded(self):
        c = Circuit.on(2)
        c.append("H", 0)
        c.append("MEASURE_Z", 0)
        a = sample_counts(c, Statevector.zero(2), 1000, seed=9)
        assert a == sample_counts(c, Statevector.zero(2), 1000, seed=9)
        assert set(a) == {0, 1} and sum(a.values()) == 1000
