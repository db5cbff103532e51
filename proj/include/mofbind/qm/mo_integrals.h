#pragma once
#include <mofbind/qm/scf.h>

namespace mofbind::qm {

/// Integrals in a set of (spin) orbitals; ERIs in chemists' notation.
/// Orbitals [0, n_occ) of each channel are occupied in the reference.
struct MoIntegrals {
  SpinMode mode{SpinMode::Restricted};
  std::array<Mat, 2> h;    // core Hamiltonian
  std::array<Mat, 2> fock; // Fock operator of the full reference
  std::array<Mat, 2> overlap;
  Tensor4 eri_aa, eri_ab, eri_bb; // (aa|aa), (aa|bb), (bb|bb)
  std::array<int, 2> n_occ{0, 0};
  double reference_energy{0.0};

  Index n_orbitals(int spin) const { return fock[spin].rows(); }
  const Tensor4 &eri(int s1, int s2) const {
    return s1 == 0 ? (s2 == 0 ? eri_aa : eri_ab) : eri_bb;
  }
};

/// Transform AO integrals to the converged molecular orbitals.
MoIntegrals mo_transform(const IntegralSet &ints, const MeanFieldResult &mf);

/// Transform to arbitrary orbitals (e.g. an embedding cluster). `fock` are
/// the AO Fock matrices of the reference; n_occ counts the leading
/// occupied columns of each coefficient block.
MoIntegrals mo_transform(const IntegralSet &ints,
                         const std::array<Mat, 2> &ao_fock,
                         const std::array<Mat, 2> &coefficients,
                         const std::array<int, 2> &n_occ, SpinMode mode,
                         double reference_energy);

} // namespace mofbind::qm
