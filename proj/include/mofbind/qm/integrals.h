#pragma once
#include <mofbind/core/tensor4.h>
#include <mofbind/qm/basis.h>
#include <string>
#include <vector>

namespace mofbind::qm {

struct IntegralOptions {
  /// In-memory ERI storage guard (basis functions).
  std::size_t max_eri_functions{400};
  double linear_dependence_threshold{1e-10};
};

/// AO integrals in atomic units; ERIs in chemists' notation (ij|kl).
struct IntegralSet {
  Mat S, T, V;
  Tensor4 eri;
  double nuclear_repulsion{0.0};
  std::vector<std::string> warnings;

  Index size() const { return S.rows(); }
  Mat core_hamiltonian() const { return T + V; }
};

/// Boys functions F_0..F_m at T, written to `out` (size m + 1).
void boys_function(int m, double t, double *out);

Mat overlap_matrix(const MolecularBasis &basis);
/// <a_i|b_j> between two bases on the same molecule frame.
Mat overlap_matrix(const MolecularBasis &a, const MolecularBasis &b);
Mat kinetic_matrix(const MolecularBasis &basis);
Mat nuclear_attraction_matrix(const MolecularBasis &basis, const Molecule &mol);
Tensor4 electron_repulsion_tensor(const MolecularBasis &basis,
                                  const IntegralOptions &opts = {});

/// S, T, V plus a warning when S is near-singular.
IntegralSet one_electron_integrals(const Molecule &mol,
                                   const MolecularBasis &basis,
                                   const IntegralOptions &opts = {});
/// One- and two-electron integrals and the nuclear repulsion.
IntegralSet compute_integrals(const Molecule &mol, const MolecularBasis &basis,
                              const IntegralOptions &opts = {});

/// Flat ERI file: int64 n, then n^4 float64 in row-major order, all
/// little-endian.
void write_eri_binary(const std::string &path, const Tensor4 &eri);
Tensor4 read_eri_binary(const std::string &path);

} // namespace mofbind::qm
