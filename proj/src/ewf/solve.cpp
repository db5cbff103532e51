#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <mofbind/core/error.h>
#include <mofbind/ewf/embedding.h>
#include <set>

namespace mofbind::ewf {

namespace {

std::string format_eta(double eta) {
  return std::isinf(eta) ? "inf" : fmt::format("{:g}", eta);
}

std::string per_spin(const std::array<int, 2> &v, qm::SpinMode mode) {
  if (mode == qm::SpinMode::Restricted || v[0] == v[1])
    return fmt::format("{}", v[0]);
  return fmt::format("{}/{}", v[0], v[1]);
}

} // namespace

FragmentSolution solve_fragment(const EmbeddingSystem &system,
                                const FragmentCluster &cluster,
                                corr::Solver solver,
                                const corr::CcsdOptions &ccsd) {
  const auto &mo = cluster.integrals;
  const auto window = corr::OrbitalWindow::full(mo);
  corr::CorrelatedSolution sol;
  const auto context = [&](const std::exception &e) {
    return fmt::format("fragment {} ({} solver, eta {}): {}",
                       cluster.fragment.label, corr::to_string(solver),
                       format_eta(cluster.eta), e.what());
  };
  try {
    sol = solver == corr::Solver::CCSD ? corr::ccsd(mo, window, ccsd)
                                       : corr::solve(solver, mo, window);
  } catch (const ArgumentError &e) {
    throw ArgumentError(context(e));
  } catch (const NumericalError &e) {
    throw NumericalError(context(e));
  }

  std::array<Mat, 2> projector;
  for (int s = 0; s < 2; ++s) {
    const Mat occ = cluster.coefficients[s].leftCols(cluster.n_occ[s]);
    const Mat overlap =
        cluster.fragment.orbitals[s].transpose() * system.ints.S * occ;
    projector[s] = overlap.transpose() * overlap;
  }

  FragmentSolution out;
  out.cluster = cluster;
  out.solver = solver;
  out.cluster_energy = sol.energy;
  out.contribution =
      corr::projected_amplitude_energy(mo, window, sol.amplitudes, projector);
  out.amplitudes = std::move(sol.amplitudes);
  return out;
}

double mean_field_fragment_energy(const EmbeddingSystem &system,
                                  const FragmentCluster &cluster) {
  const Mat h = system.ints.core_hamiltonian();
  double e = 0.0;
  for (int s = 0; s < 2; ++s) {
    const Mat occ = cluster.coefficients[s].leftCols(cluster.n_occ[s]);
    const Mat &q = cluster.fragment.orbitals[s];
    // tr(Q Q^T S D M) = tr(Q^T S D M Q)
    const Mat left = q.transpose() * system.ints.S * occ;
    const Mat right = occ.transpose() * (h + system.fock[s]) * q;
    e += 0.5 * (left * right).trace();
  }
  return e;
}

double assemble_global_energy(const std::vector<FragmentSolution> &solutions,
                              const qm::MeanFieldResult &mf,
                              const std::vector<std::size_t> &expected_atoms) {
  std::vector<const FragmentSolution *> ordered;
  std::set<std::size_t> covered;
  for (const auto &sol : solutions) {
    for (auto a : sol.cluster.fragment.atoms)
      if (!covered.insert(a).second)
        throw ArgumentError(fmt::format(
            "atom {} appears in more than one fragment solution (fragment {})",
            a, sol.cluster.fragment.label));
    ordered.push_back(&sol);
  }
  std::vector<std::size_t> missing;
  for (auto a : expected_atoms)
    if (!covered.count(a))
      missing.push_back(a);
  if (!missing.empty())
    throw ArgumentError(fmt::format("missing fragment solutions for atoms {}",
                                    fmt::join(missing, ", ")));
  std::sort(ordered.begin(), ordered.end(), [](auto *x, auto *y) {
    return x->cluster.fragment.atoms < y->cluster.fragment.atoms;
  });
  double e = mf.energy;
  for (const auto *sol : ordered)
    e += sol->contribution;
  return e;
}

std::string diagnostics_table(const std::vector<FragmentSolution> &solutions) {
  std::string out = "fragment\teta\tdmet_bath\tbno_occ\tbno_vir\tn_cluster\t"
                    "solver\tcontribution_hartree\n";
  for (const auto &sol : solutions) {
    const auto &c = sol.cluster;
    const auto mode = c.integrals.mode;
    out += fmt::format(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.12f}\n", c.fragment.label,
        format_eta(c.eta), per_spin(c.n_dmet_bath, mode),
        per_spin(c.n_bno_occ, mode), per_spin(c.n_bno_vir, mode),
        per_spin({c.n_orbitals(0), c.n_orbitals(1)}, mode),
        corr::to_string(sol.solver), sol.contribution);
  }
  return out;
}

} // namespace mofbind::ewf
