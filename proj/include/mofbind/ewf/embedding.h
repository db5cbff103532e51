#pragma once
#include <limits>
#include <map>
#include <mofbind/corr/correlation.h>
#include <mofbind/qm/basis.h>
#include <mofbind/qm/molecule.h>
#include <mofbind/qm/scf.h>
#include <optional>
#include <string>
#include <vector>

namespace mofbind::ewf {

/// Bath threshold selecting the DMET bath alone (no bath natural orbitals).
inline constexpr double kDmetOnly = std::numeric_limits<double>::infinity();

/// Converged mean-field system the embedding works on. Holds references;
/// the referenced objects must outlive it.
struct EmbeddingSystem {
  const qm::Molecule &mol;
  const qm::MolecularBasis &basis;
  const qm::IntegralSet &ints;
  const qm::MeanFieldResult &mf;
  std::array<Mat, 2> fock; // AO Fock matrices of the reference density

  EmbeddingSystem(const qm::Molecule &mol, const qm::MolecularBasis &basis,
                  const qm::IntegralSet &ints, const qm::MeanFieldResult &mf);

  Mat occupied(int spin) const;
  Mat virtuals(int spin) const;
  int n_spin_channels() const {
    return mf.mode == qm::SpinMode::Restricted ? 1 : 2;
  }
};

/// Intrinsic atomic orbitals per spin channel, S-orthonormal columns.
struct IaoSet {
  std::array<Mat, 2> coefficients;
  std::vector<std::size_t> atom; // owning atom of each IAO
  /// max over occupied orbitals of 1 - |projection onto the IAO span|^2
  double occupied_span_deviation{0.0};

  Index size() const { return coefficients[0].cols(); }
};

IaoSet build_iaos(const EmbeddingSystem &system,
                  const qm::BasisSet &minimal_reference);

struct FragmentSpace {
  std::vector<std::size_t> atoms; // sorted
  std::string label;
  std::array<Mat, 2> orbitals; // AO x n_fragment, S-orthonormal

  Index size() const { return orbitals[0].cols(); }
  /// Q Q^T S: projector onto the fragment acting on AO coefficient vectors.
  Mat ao_projector(int spin, const Mat &overlap) const;
};

/// One fragment per atom, in atom order.
std::vector<FragmentSpace> make_fragments(const IaoSet &iaos,
                                          const qm::Molecule &mol);
/// Union of fragments (used for multi-atom fragments).
FragmentSpace merge_fragments(const std::vector<FragmentSpace> &parts);

struct BathOptions {
  double dmet_threshold{1e-6};
};

struct FragmentCluster {
  FragmentSpace fragment;
  double eta{kDmetOnly};
  /// AO x n_cluster per spin: semicanonical occupied then virtual orbitals.
  std::array<Mat, 2> coefficients;
  std::array<int, 2> n_occ{0, 0};
  std::array<int, 2> n_dmet_bath{0, 0};
  std::array<int, 2> n_bno_occ{0, 0};
  std::array<int, 2> n_bno_vir{0, 0};
  qm::MoIntegrals integrals;

  int n_orbitals(int spin) const {
    return static_cast<int>(coefficients[spin].cols());
  }
  int n_bath(int spin) const {
    return n_dmet_bath[spin] + n_bno_occ[spin] + n_bno_vir[spin];
  }
};

FragmentCluster build_bath(const EmbeddingSystem &system,
                           const FragmentSpace &fragment, double eta,
                           const BathOptions &opts = {});

struct FragmentSolution {
  FragmentCluster cluster;
  corr::Solver solver{corr::Solver::MP2};
  double contribution{0.0};   // projected correlation energy, hartree
  double cluster_energy{0.0}; // unprojected cluster correlation energy
  corr::Amplitudes amplitudes;
};

FragmentSolution solve_fragment(const EmbeddingSystem &system,
                                const FragmentCluster &cluster,
                                corr::Solver solver,
                                const corr::CcsdOptions &ccsd = {});

/// Fragment-projected mean-field energy 1/2 sum_s tr(P_x D_s (h + F_s)),
/// with D_s the cluster's own occupied density. Summed over a partition of
/// the molecule plus the nuclear repulsion, it equals E_HF.
double mean_field_fragment_energy(const EmbeddingSystem &system,
                                  const FragmentCluster &cluster);

/// E_HF + sum of contributions. Throws if a fragment is duplicated or an
/// atom of `expected_atoms` is not covered.
double assemble_global_energy(const std::vector<FragmentSolution> &solutions,
                              const qm::MeanFieldResult &mf,
                              const std::vector<std::size_t> &expected_atoms);

/// Per-fragment diagnostics as tab-separated text with a header line.
std::string diagnostics_table(const std::vector<FragmentSolution> &solutions);

struct EmbeddingOptions {
  std::string minimal_basis{"sto-3g"};
  BathOptions bath;
  corr::CcsdOptions ccsd;
  int jobs{1};
};

/// Atomic-fragment embedding of one system with a cache of fragment
/// solutions keyed by (atom, eta, solver).
class Embedding {
public:
  Embedding(const EmbeddingSystem &system, EmbeddingOptions opts = {});

  const EmbeddingSystem &system() const { return m_system; }
  const IaoSet &iaos() const { return m_iaos; }
  const std::vector<FragmentSpace> &fragments() const { return m_fragments; }
  std::vector<std::size_t> all_atoms() const;

  /// Solutions for the atomic fragments of `atoms`, sorted by atom.
  std::vector<FragmentSolution> solve(const std::vector<std::size_t> &atoms,
                                      double eta, corr::Solver solver);
  /// Sum of projected contributions over `atoms`.
  double correlation_energy(const std::vector<std::size_t> &atoms, double eta,
                            corr::Solver solver);
  /// E_nuc + sum of fragment mean-field energies over all atoms.
  double mean_field_energy(double eta) const;

  /// Every solution computed so far, in computation order.
  const std::vector<FragmentSolution> &history() const { return m_history; }
  int cache_misses() const { return m_misses; }

private:
  using Key = std::tuple<std::size_t, double, corr::Solver>;

  EmbeddingSystem m_system;
  EmbeddingOptions m_opts;
  IaoSet m_iaos;
  std::vector<FragmentSpace> m_fragments;
  std::map<Key, FragmentSolution> m_cache;
  std::vector<FragmentSolution> m_history;
  int m_misses{0};
};

struct MultiLevelSpec {
  double eta_hl{1e-5};
  double eta_ll{1e-7};
  corr::Solver hl_solver{corr::Solver::CCSD};
  corr::Solver ll_solver{corr::Solver::MP2};
  /// Fragments treated at the high level; nullopt means every atom.
  std::optional<std::vector<std::size_t>> close_atoms;
  /// Subtract the low level at eta_hl over all fragments instead of the
  /// close set only.
  bool full_bracket{false};

  void validate(std::size_t n_atoms) const;
};

struct MultiLevelResult {
  double energy{0.0};
  double hf{0.0};
  double hl{0.0};       // E^HL(eta_hl, close)
  double ll{0.0};       // E^LL(eta_ll, all)
  double ll_at_hl{0.0}; // E^LL(eta_hl, close or all)
};

/// E_HF + E^HL(eta_hl, close) + E^LL(eta_ll, all) - E^LL(eta_hl, close).
MultiLevelResult multilevel_energy(Embedding &embedding,
                                   const MultiLevelSpec &spec);

} // namespace mofbind::ewf
