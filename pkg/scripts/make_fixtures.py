"""Regenerate the FCIDUMP fixtures in src/pauligroup/data/ (needs pyscf).

RHF/STO-3G canonical orbitals, no point-group symmetry, no frozen core.
"""

import argparse
from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, scf

from pauligroup.fermion import write_fcidump

MOLECULES = {
    "h2": ("H 0 0 0; H 0 0 0.7414", 0),
    "lih": ("Li 0 0 0; H 0 0 1.5949", 0),
    "h4": ("H 0 0 0; H 0 0 1.0; H 0 0 2.0; H 0 0 3.0", 0),
    "h2o": ("O 0 0 0.1173; H 0 0.7572 -0.4692; H 0 -0.7572 -0.4692", 0),
}


def dump(name, atom, charge, out_dir):
    mol = gto.M(atom=atom, basis="sto-3g", charge=charge, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    norb = c.shape[1]
    eri = ao2mo.restore(1, ao2mo.full(mol, c), norb)
    path = out_dir / f"{name}.fcidump"
    write_fcidump(path, h1, eri, mol.nelectron, mol.energy_nuc(), tol=1e-12)
    print(f"{name}: norb={norb} nelec={mol.nelectron} E_hf={mf.e_tot:.10f} -> {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).parents[1] / "src/pauligroup/data")
    ap.add_argument("names", nargs="*", default=sorted(MOLECULES))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    np.set_printoptions(precision=12)
    for name in args.names:
        atom, charge = MOLECULES[name]
        dump(name, atom, charge, args.out)


if __name__ == "__main__":
    main()
