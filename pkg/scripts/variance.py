"""Grouped vs individual measurement variance on random particle-conserving states."""

import argparse
import json

from pauligroup.fixtures import fixture_hamiltonian, fixture_integrals
from pauligroup.grouping import group_hamiltonian
from pauligroup.sim import random_particle_conserving_state, variance_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=["h2", "h4"])
    ap.add_argument("--states", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--per-group", action="store_true")
    args = ap.parse_args()

    for name in args.names:
        h = fixture_hamiltonian(name)
        nelec = fixture_integrals(name).n_electrons
        states = [random_particle_conserving_state(h.n_qubits, nelec, args.seed + k) for k in range(args.states)]
        rec = variance_report(h, group_hamiltonian(h), states)
        ratio = rec.grouped_total / rec.individual_total
        print(
            f"{name}: N={h.n_qubits} nelec={nelec} states={rec.n_states} "
            f"individual={rec.individual_total:.6f} grouped={rec.grouped_total:.6f} ratio={ratio:.3f}"
        )
        if args.per_group:
            for row in sorted(rec.per_group, key=lambda r: -r["individual"]):
                print("   ", json.dumps(row))


if __name__ == "__main__":
    main()
