"""Generate the bundled 4-qubit molecular Hamiltonian file.

Input data are restricted-Hartree-Fock molecular-orbital integrals for the
two-orbital hydrogen-molecule model at its equilibrium bond length
(chemists' notation, Hartree units).  The script assembles the
second-quantized Hamiltonian, maps it through the Jordan-Wigner layout
used by the ansatz module (spin-up orbitals first), and cross-checks the
mean-field and exact ground-state energies before writing the file.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

sys.path.insert(0, "src")

from dmvqem.ansatz import ComplexPauliSum, FermionicTerm, jordan_wigner
from dmvqem.pauli import PauliSum, save_hamiltonian, to_dense

# One- and two-electron MO integrals and the nuclear repulsion energy.
H_CORE = {0: -1.252477, 1: -0.475934}
ERI = {
    (0, 0, 0, 0): 0.674489,
    (1, 1, 1, 1): 0.697397,
    (0, 0, 1, 1): 0.663472,
    (1, 1, 0, 0): 0.663472,
    (0, 1, 0, 1): 0.181287,
    (1, 0, 1, 0): 0.181287,
    (0, 1, 1, 0): 0.181287,
    (1, 0, 0, 1): 0.181287,
}
E_NUCLEAR = 0.713754

N_ORBITALS = 2
N_MODES = 4


def mode(orbital: int, spin_down: bool) -> int:
    return orbital + (N_ORBITALS if spin_down else 0)


def assemble() -> PauliSum:
    total = ComplexPauliSum(N_MODES, {"I" * N_MODES: E_NUCLEAR})
    for p, value in H_CORE.items():
        for down in (False, True):
            term = FermionicTerm(
                factors=((mode(p, down), True), (mode(p, down), False)),
                coefficient=value,
            )
            total = total + jordan_wigner(term, N_MODES)
    for (p, q, r, s), value in ERI.items():
        for sigma in (False, True):
            for tau in (False, True):
                term = FermionicTerm(
                    factors=(
                        (mode(p, sigma), True),
                        (mode(r, tau), True),
                        (mode(s, tau), False),
                        (mode(q, sigma), False),
                    ),
                    coefficient=0.5 * value,
                )
                total = total + jordan_wigner(term, N_MODES)
    terms = []
    for label, weight in total.items():
        if abs(weight.imag) > 1e-12:
            raise AssertionError(f"non-real weight {weight} on {label}")
        terms.append((weight.real, label))
    return PauliSum(terms, n_qubits=N_MODES)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="src/dmvqem/data/h2_sto3g.json")
    args = parser.parse_args()

    h = assemble()
    dense = to_dense(h)

    # mean field: both electrons in the bonding orbital -> |1010>
    hf_index = int("1010", 2)
    e_hf = float(dense[hf_index, hf_index].real)

    w, v = np.linalg.eigh(dense)
    e_fci = float(w[0])
    ground = v[:, 0]

    # the exact ground state must live in the one-up one-down sector
    idx = np.arange(16)
    n_up = ((idx >> 3) & 1) + ((idx >> 2) & 1)
    n_dn = ((idx >> 1) & 1) + (idx & 1)
    wrong = (n_up != 1) | (n_dn != 1)
    leak = float(np.linalg.norm(ground[wrong]))
    if leak > 1e-9:
        raise AssertionError(f"ground state leaks outside the sector: {leak}")

    print(f"m = {h.m} Pauli terms on {h.n_qubits} qubits")
    print(f"E_HF  = {e_hf:+.6f}")
    print(f"E_FCI = {e_fci:+.6f}")
    print(f"correlation energy = {e_fci - e_hf:+.6f}")
    if abs(e_hf - (-1.116711)) > 2e-6 or abs(e_fci - (-1.137297)) > 2e-6:
        raise AssertionError("energies moved away from the pinned references")

    save_hamiltonian(h, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
