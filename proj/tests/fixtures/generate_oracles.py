#!/usr/bin/env python3
"""Reference energies and integrals from PySCF, committed as test fixtures.

Run from the repository root:  python3 tests/fixtures/generate_oracles.py
All calculations use Cartesian basis functions and the shipped .gbs files.
"""
import struct
import numpy as np
from pyscf import gto, scf, mp, cc, fci, mcscf
from pyscf.gto.basis import parse_gaussian

GEOMETRIES = {
    "h2": "H 0 0 0; H 0 0 0.7414",
    "h2o": "O 0.000000 0.000000 0.117300; H 0.000000 0.757200 -0.469200; "
           "H 0.000000 -0.757200 -0.469200",
}
NH2 = "N 0 0 0.14; H 0 0.80 -0.49; H 0 -0.80 -0.49"
# Same conversion the library applies at its Angstrom boundary.
ANGSTROM_TO_BOHR = 1.8897259886
BASIS_FILES = {"sto-3g": "data/basis/sto-3g.gbs", "6-31g": "data/basis/6-31g.gbs"}


def build(geom, basis, charge=0, spin=0):
    atoms = []
    for entry in geom.split(";"):
        sym, *xyz = entry.split()
        atoms.append((sym, [float(x) * ANGSTROM_TO_BOHR for x in xyz]))
    mol = gto.Mole()
    mol.atom = atoms
    mol.unit = "Bohr"
    mol.cart = True
    mol.charge = charge
    mol.spin = spin
    symbols = {a.split()[0] for a in geom.split(";")}
    mol.basis = {s: parse_gaussian.load(BASIS_FILES[basis], s) for s in symbols}
    mol.build()
    return mol


def main():
    rows = []
    for name in ("h2", "h2o"):
        for basis in ("sto-3g", "6-31g"):
            mol = build(GEOMETRIES[name], basis)
            mf = scf.RHF(mol)
            mf.conv_tol = 1e-12
            mf.conv_tol_grad = 1e-9
            mf.kernel()
            pt = mp.MP2(mf).run()
            mycc = cc.CCSD(mf)
            mycc.conv_tol = 1e-11
            mycc.conv_tol_normt = 1e-9
            mycc.kernel()
            tag = f"{name}_{basis}"
            rows.append((f"{tag}_nbf", mol.nao))
            rows.append((f"{tag}_rhf", mf.e_tot))
            rows.append((f"{tag}_mp2_corr", pt.e_corr))
            rows.append((f"{tag}_ccsd_corr", mycc.e_corr))
            if mol.nao <= 12:
                e_fci = fci.FCI(mf).kernel()[0]
                rows.append((f"{tag}_fci", e_fci))
            if tag == "h2o_sto-3g":
                # Frozen O 1s: 6 orbitals, 8 electrons (12 spin orbitals).
                cas = mcscf.CASCI(mf, 6, 8)
                cas.fcisolver.conv_tol = 1e-12
                rows.append((f"{tag}_fc_fci", cas.kernel()[0]))
                fc = cc.CCSD(mf, frozen=1)
                fc.conv_tol = 1e-11
                fc.kernel()
                rows.append((f"{tag}_fc_ccsd_corr", fc.e_corr))
                rows.append((f"{tag}_fc_mp2_corr", mp.MP2(mf, frozen=1).run().e_corr))
            if tag == "h2_sto-3g":
                eri = mol.intor("int2e", aosym="s1")
                n = mol.nao
                with open("tests/fixtures/h2_sto3g_eri.bin", "wb") as f:
                    f.write(struct.pack("<q", n))
                    f.write(np.ascontiguousarray(eri.reshape(-1), dtype="<f8").tobytes())
                s = mol.intor("int1e_ovlp")
                t = mol.intor("int1e_kin")
                v = mol.intor("int1e_nuc")
                for i in range(n):
                    for j in range(n):
                        rows.append((f"{tag}_S_{i}{j}", s[i, j]))
                        rows.append((f"{tag}_T_{i}{j}", t[i, j]))
                        rows.append((f"{tag}_V_{i}{j}", v[i, j]))

    # He+ one-electron limit and an open-shell UHF/UMP2 case.
    mol = build("He 0 0 0", "sto-3g", charge=1, spin=1)
    mf = scf.UHF(mol).run(conv_tol=1e-12)
    rows.append(("heplus_sto-3g_uhf", mf.e_tot))

    # Core-Hamiltonian guess, as in the library. From PySCF's default guess
    # this doublet converges to a lower state of different symmetry.
    mol = build(NH2, "sto-3g", charge=0, spin=1)
    mf = scf.UHF(mol)
    mf.init_guess = "1e"
    mf.conv_tol = 1e-12
    mf.kernel()
    pt = mp.UMP2(mf).run()
    rows.append(("nh2_sto-3g_uhf", mf.e_tot))
    rows.append(("nh2_sto-3g_ump2_corr", pt.e_corr))

    with open("tests/fixtures/oracle_energies.txt", "w") as f:
        f.write("# PySCF reference values (hartree), Cartesian basis functions.\n")
        f.write(f"# Geometries in Angstrom (converted with 1 A = {ANGSTROM_TO_BOHR} bohr):\n")
        for k, g in GEOMETRIES.items():
            f.write(f"#   {k}: {g}\n")
        f.write(f"#   nh2: {NH2} (doublet)\n")
        for k, v in rows:
            if isinstance(v, (int, np.integer)):
                f.write(f"{k} {v}\n")
            else:
                f.write(f"{k} {v:.12f}\n")


if __name__ == "__main__":
    main()
