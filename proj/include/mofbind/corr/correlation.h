#pragma once
#include <array>
#include <mofbind/qm/mo_integrals.h>
#include <string_view>
#include <vector>

namespace mofbind::corr {

using qm::MoIntegrals;

enum class Solver { MP2, CCSD, FCI };

std::string_view to_string(Solver solver);
/// "mp2" | "ccsd" | "fci" (case-insensitive).
Solver solver_from_string(std::string_view name);

/// Active orbitals per spin channel; everything else is frozen (occupied
/// orbitals outside the window stay doubly/singly occupied, virtual ones
/// stay empty).
struct OrbitalWindow {
  std::array<std::vector<Index>, 2> occ;
  std::array<std::vector<Index>, 2> vir;

  Index n_occ(int spin) const { return static_cast<Index>(occ[spin].size()); }
  Index n_vir(int spin) const { return static_cast<Index>(vir[spin].size()); }

  /// All orbitals of the reference.
  static OrbitalWindow full(const MoIntegrals &mo);
  /// All orbitals except the lowest `n_core` occupied ones of each channel.
  static OrbitalWindow frozen_core(const MoIntegrals &mo, int n_core);
  /// Throws ArgumentError unless the lists are disjoint, in range, and
  /// occ/vir indices are occupied/virtual in the reference.
  void validate(const MoIntegrals &mo) const;
};

/// Amplitudes over a window in window-local indices: t1[s](i, a),
/// t2aa(i, j, a, b) antisymmetric, t2ab(i_alpha, j_beta, a_alpha, b_beta),
/// t2bb antisymmetric.
struct Amplitudes {
  std::array<Mat, 2> t1;
  Tensor4 t2aa, t2ab, t2bb;

  static Amplitudes zeros(const OrbitalWindow &w);
};

struct CorrelatedSolution {
  Solver solver{Solver::MP2};
  qm::SpinMode mode{qm::SpinMode::Restricted};
  double energy{0.0}; // correlation energy, hartree
  Amplitudes amplitudes;
  OrbitalWindow window;
  bool converged{true};
  int iterations{0};
  std::vector<double> residual_history;
};

/// (ia|jb) over the window for spin channels (s1, s2) with s1 <= s2.
Tensor4 ovov_integrals(const MoIntegrals &mo, const OrbitalWindow &w, int s1,
                       int s2);

/// Correlation energy functional of (T1, T2) over the window:
/// sum f_ia t_ia + 1/4 <ij||ab> tau (same spin) + (ia|jb) tau (alpha-beta).
double amplitude_energy(const MoIntegrals &mo, const OrbitalWindow &w,
                        const Amplitudes &t);

/// amplitude_energy with a projector applied to the first occupied index
/// of every amplitude (window-local occupied indices), symmetrized over the
/// two occupied indices of the alpha-beta doubles.
double projected_amplitude_energy(const MoIntegrals &mo, const OrbitalWindow &w,
                                  const Amplitudes &t,
                                  const std::array<Mat, 2> &occ_projector);

CorrelatedSolution mp2(const MoIntegrals &mo, const OrbitalWindow &w);

struct CcsdOptions {
  int max_iterations{100};
  double tolerance{1e-8}; // amplitude residual norm
  int diis_size{8};
};

CorrelatedSolution ccsd(const MoIntegrals &mo, const OrbitalWindow &w,
                        const CcsdOptions &opts = {});

inline constexpr int kFciMaxSpinOrbitals = 12;

/// Exact diagonalization in the determinant space of the window at fixed
/// alpha/beta particle numbers. Amplitudes are the intermediate-normalized
/// cluster amplitudes (T1 = C1, T2 = C2 - T1 T1).
CorrelatedSolution fci_oracle(const MoIntegrals &mo, const OrbitalWindow &w);

CorrelatedSolution solve(Solver solver, const MoIntegrals &mo,
                         const OrbitalWindow &w);

} // namespace mofbind::corr
