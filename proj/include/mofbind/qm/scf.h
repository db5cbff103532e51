#pragma once
#include <array>
#include <mofbind/qm/integrals.h>
#include <string>
#include <vector>

namespace mofbind::qm {

enum class SpinMode { Restricted, Unrestricted };

std::string_view to_string(SpinMode mode);

/// Electron bookkeeping of a system: electrons = nuclear charge - net charge.
struct SpinState {
  int electrons{0};
  int n_unpaired{0};

  int n_alpha() const { return (electrons + n_unpaired) / 2; }
  int n_beta() const { return (electrons - n_unpaired) / 2; }

  /// Throws ArgumentError unless electrons >= 1 and electrons - n_unpaired
  /// is even and non-negative.
  static SpinState from_charge(int nuclear_charge, int net_charge,
                               int n_unpaired);
};

struct ScfOptions {
  SpinMode mode{SpinMode::Restricted};
  int max_iterations{200};
  double energy_tolerance{1e-9};
  double residual_tolerance{1e-7};
  bool diis{true};
  int diis_size{8};
  int diis_start{2};
  double level_shift{0.0}; // hartree, applied to virtual orbitals
  double linear_dependence_threshold{1e-10};
};

/// Converged (or flagged) SCF solution. Both spin channels are always
/// stored; in restricted mode they are identical.
struct MeanFieldResult {
  SpinMode mode{SpinMode::Restricted};
  std::array<Mat, 2> coefficients;      // AO x MO
  std::array<Vec, 2> orbital_energies;  // hartree
  std::array<Vec, 2> occupations;       // 0 or 1 per spin orbital
  std::array<int, 2> n_occ{0, 0};
  double energy{0.0};                   // total, hartree
  double nuclear_repulsion{0.0};
  bool converged{false};
  double gradient_norm{0.0};
  int iterations{0};
  std::vector<double> energy_history;

  Index n_basis() const { return coefficients[0].rows(); }
  /// Spin density matrix C_occ C_occ^T of one channel (AO basis).
  Mat density(int spin) const;
  /// Alpha + beta density.
  Mat total_density() const { return density(0) + density(1); }
};

/// Coulomb J[D] and exchange K[D] in the AO basis.
Mat coulomb(const Tensor4 &eri, const Mat &density);
Mat exchange(const Tensor4 &eri, const Mat &density);

/// Fock matrices of both channels for the given spin densities.
std::array<Mat, 2> fock_matrices(const IntegralSet &ints,
                                 const std::array<Mat, 2> &densities);

/// Energy of a determinant with the given spin densities.
double mean_field_energy(const IntegralSet &ints,
                         const std::array<Mat, 2> &densities);

MeanFieldResult run_scf(const IntegralSet &ints, const SpinState &spin,
                        const ScfOptions &opts = {});

/// Coefficients, orbital energies and occupations as a flat little-endian
/// float64 file `<prefix>.bin` plus a text header `<prefix>.txt`.
void write_mean_field(const std::string &prefix, const MeanFieldResult &mf);
MeanFieldResult read_mean_field(const std::string &prefix);

} // namespace mofbind::qm
