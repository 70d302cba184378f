import io

import numpy as np
import pytest

from oracles import fock_matrix
from pauligroup.circuit import Circuit
from pauligroup.fermion import (
    CliffordMap,
    FcidumpError,
    FermionHamiltonian,
    MolecularIntegrals,
    NonHermitianError,
    build_fermionic_hamiltonian,
    conjugate_hamiltonian,
    hamiltonian_from_fcidump,
    jordan_wigner_transform,
    parse_fcidump,
    write_fcidump,
)
from pauligroup.fixtures import fixture_hamiltonian, fixture_integrals, fixture_text
from pauligroup.pauli import conjugate_by_circuit, parse_pauli
from pauligroup.synthetic import random_integrals

# Ground-state energies (Hartree) of the bundled fixtures, frozen from pyscf's FCI
# solver run on the same RHF/STO-3G orbitals.
FCI_ENERGY = {"h2": -1.137270174660903, "h4": -2.1663874486347625}

HEADER = " &FCI NORB={norb},NELEC={nelec},MS2=0,\n &END\n"


def jw(mi):
    return jordan_wigner_transform(build_fermionic_hamiltonian(mi))


class TestFcidump:
    def test_single_entry(self):
        mi = parse_fcidump(HEADER.format(norb=1, nelec=1) + "0.5 1 1 0 0\n")
        assert mi.n_orbitals == 2
        assert np.allclose(mi.one_body, 0.5 * np.eye(2))
        assert not mi.two_body.any()

    def test_fixture_header_and_core(self):
        text = fixture_text("h2")
        mi = parse_fcidump(text)
        core_line = [l for l in text.splitlines() if l.split()[1:] == ["0", "0", "0", "0"]]
        assert mi.n_orbitals == 4 and mi.n_electrons == 2
        assert mi.core_energy == float(core_line[0].split()[0])

    def test_fortran_exponent(self):
        mi = parse_fcidump(HEADER.format(norb=1, nelec=1) + "2.5D-01 1 1 0 0\n")
        assert mi.one_body[0, 0] == 0.25

    @pytest.mark.parametrize(
        "text, match",
        [
            (" &FCI NELEC=2,\n &END\n0.5 1 1 0 0\n", "NORB"),
            (" &FCI NORB=2,\n &END\n", "NELEC"),
            (HEADER.format(norb=1, nelec=1) + "0.5 2 1 0 0\n", "line 3"),
            (HEADER.format(norb=1, nelec=1) + "abc 1 1 0 0\n", "line 3"),
            (HEADER.format(norb=1, nelec=1) + "0.5 1 1\n", "line 3"),
            ("0.5 1 1 0 0\n", "header"),
        ],
    )
    def test_errors(self, text, match):
        with pytest.raises(FcidumpError, match=match):
            parse_fcidump(text)

    def test_write_read_round_trip(self):
        mi_ref = random_integrals(3, seed=3, spin=True)
        h1 = mi_ref.one_body[::2, ::2]
        # spatial chemist integrals back out of the spin-expanded physicist tensor
        eri = np.einsum("pqrs->psqr", mi_ref.two_body[::2, ::2, ::2, ::2])
        buf = io.StringIO()
        write_fcidump(buf, h1, eri, nelec=2, core=0.75)
        mi = parse_fcidump(buf.getvalue())
        assert np.allclose(mi.one_body, mi_ref.one_body)
        assert np.allclose(mi.two_body, mi_ref.two_body)
        assert mi.core_energy == 0.75


class TestFermionHamiltonian:
    def test_single_number_term(self):
        mi = MolecularIntegrals(1, np.array([[0.5]]), np.zeros((1,) * 4), 0.0, 1)
        assert build_fermionic_hamiltonian(mi).terms == ((0.5, ((0, True), (0, False))),)

    def test_hopping_pair(self):
        h1 = np.array([[0.0, 0.3], [0.3, 0.0]])
        fh = build_fermionic_hamiltonian(MolecularIntegrals(2, h1, np.zeros((2,) * 4), 0.0, 1))
        assert sorted(fh.terms) == [(0.3, ((0, True), (1, False))), (0.3, ((1, True), (0, False)))]

    def test_h2_terms_match_quadruple_loop(self):
        mi = fixture_integrals("h2")
        n = mi.n_orbitals
        expected = [(mi.core_energy, ())]
        for i in range(n):
            for j in range(n):
                if mi.one_body[i, j]:
                    expected.append((mi.one_body[i, j], ((i, True), (j, False))))
        for p in range(n):
            for q in range(n):
                for r in range(n):
                    for s in range(n):
                        if mi.two_body[p, q, r, s] and p != q and r != s:
                            expected.append((0.5 * mi.two_body[p, q, r, s], ((p, True), (q, True), (r, False), (s, False))))
        assert sorted(build_fermionic_hamiltonian(mi).terms) == sorted(expected)


class TestJordanWigner:
    def test_number_operator(self):
        fh = FermionHamiltonian(1, ((1.0, ((0, True), (0, False))),))
        h = jordan_wigner_transform(fh)
        assert dict((str(p), c) for c, p in h.terms) == {"": 0.5, "Z1": -0.5}

    def test_hopping(self):
        fh = FermionHamiltonian(2, ((1.0, ((0, True), (1, False))), (1.0, ((1, True), (0, False)))))
        h = jordan_wigner_transform(fh)
        assert dict((str(p), c) for c, p in h.terms) == {"X1 X2": 0.5, "Y1 Y2": 0.5}

    def test_non_hermitian_rejected(self):
        fh = FermionHamiltonian(2, ((1.0, ((0, True), (1, False))),))
        with pytest.raises(NonHermitianError):
            jordan_wigner_transform(fh)

    def test_h2_has_15_terms(self):
        h = fixture_hamiltonian("h2")
        assert len(h) == 15 and h.n_qubits == 4
        assert any(p.is_identity for _, p in h.terms)
        assert all(abs(c) >= 1e-8 for c, _ in h.terms)
        keys = [p.key for _, p in h.terms]
        assert keys == sorted(keys)

    @pytest.mark.parametrize("name", ["h2"])
    def test_matches_fock_space_oracle(self, name):
        mi = fixture_integrals(name)
        oracle = fock_matrix(mi.one_body, mi.two_body, mi.core_energy)
        assert np.max(np.abs(fixture_hamiltonian(name, 0.0).matrix() - oracle)) < 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_random_integrals_match_fock_space_oracle(self, seed):
        mi = random_integrals(4, seed)
        oracle = fock_matrix(mi.one_body, mi.two_body, mi.core_energy)
        assert np.max(np.abs(jordan_wigner_transform(build_fermionic_hamiltonian(mi), 0.0).matrix() - oracle)) < 1e-12

    @pytest.mark.parametrize("name", sorted(FCI_ENERGY))
    def test_ground_state_energy(self, name):
        h = fixture_hamiltonian(name)
        nelec = fixture_integrals(name).n_electrons
        m = h.matrix()
        sector = [b for b in range(1 << h.n_qubits) if bin(b).count("1") == nelec]
        e0 = np.linalg.eigvalsh(m[np.ix_(sector, sector)])[0]
        assert e0 == pytest.approx(FCI_ENERGY[name], abs=1e-9)

    def test_from_text(self):
        assert hamiltonian_from_fcidump(fixture_text("h2")) == fixture_hamiltonian("h2")


class TestCliffordMap:
    def test_identity_map(self):
        h = fixture_hamiltonian("h2")
        assert conjugate_hamiltonian(h, CliffordMap.identity(4)) == h

    def test_h2_map_sends_z2_to_z1z2(self):
        cmap = CliffordMap.from_product(4, [(1, 2), (2, 4), (3, 4)])
        assert conjugate_by_circuit(parse_pauli("Z2", 4), cmap.circuit) == parse_pauli("Z1 Z2", 4)
        assert conjugate_by_circuit(parse_pauli("Z1", 4), cmap.circuit) == parse_pauli("Z1", 4)

    def test_spectrum_preserved(self):
        h = fixture_hamiltonian("h2")
        image = conjugate_hamiltonian(h, CliffordMap.from_product(4, [(1, 2), (2, 4), (3, 4)]))
        assert len(image) == len(h)
        assert np.allclose(np.linalg.eigvalsh(image.matrix()), np.linalg.eigvalsh(h.matrix()))

    def test_rejects_non_cnot(self):
        c = Circuit.on(2)
        c.append("H", 0)
        with pytest.raises(ValueError):
            CliffordMap(c)
