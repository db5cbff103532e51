#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/corr/correlation.h>

namespace mofbind::corr {

namespace {

Vec window_energies(const MoIntegrals &mo, int s,
                    const std::vector<Index> &idx) {
  Vec e(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
    e(static_cast<Index>(k)) = mo.fock[s](idx[k], idx[k]);
  return e;
}

void check_diagonal(const MoIntegrals &mo, int s,
                    const std::vector<Index> &idx) {
  for (auto p : idx)
    for (auto q : idx)
      if (p != q && std::abs(mo.fock[s](p, q)) > 1e-6)
        throw ArgumentError(fmt::format(
            "MP2 needs (semi)canonical orbitals: Fock element ({}, {}) = "
            "{:.2e}",
            p, q, mo.fock[s](p, q)));
}

} // namespace

CorrelatedSolution mp2(const MoIntegrals &mo, const OrbitalWindow &w) {
  w.validate(mo);
  CorrelatedSolution sol;
  sol.solver = Solver::MP2;
  sol.mode = mo.mode;
  sol.window = w;
  sol.amplitudes = Amplitudes::zeros(w);

  std::array<Vec, 2> eo, ev;
  for (int s = 0; s < 2; ++s) {
    check_diagonal(mo, s, w.occ[s]);
    check_diagonal(mo, s, w.vir[s]);
    eo[s] = window_energies(mo, s, w.occ[s]);
    ev[s] = window_energies(mo, s, w.vir[s]);
    if (eo[s].size() == 0 || ev[s].size() == 0)
      continue;
    Index i_max = 0, a_min = 0;
    const double homo = eo[s].maxCoeff(&i_max);
    const double lumo = ev[s].minCoeff(&a_min);
    if (lumo - homo <= 1e-10)
      throw NumericalError(fmt::format(
          "non-positive orbital gap {:.3e} between occupied orbital {} and "
          "virtual orbital {} (spin {})",
          lumo - homo, w.occ[s][static_cast<std::size_t>(i_max)],
          w.vir[s][static_cast<std::size_t>(a_min)], s));
  }

  for (int s = 0; s < 2; ++s) {
    const auto g = ovov_integrals(mo, w, s, s);
    auto &t2 = s == 0 ? sol.amplitudes.t2aa : sol.amplitudes.t2bb;
    for (Index i = 0; i < w.n_occ(s); ++i)
      for (Index j = 0; j < w.n_occ(s); ++j)
        for (Index a = 0; a < w.n_vir(s); ++a)
          for (Index b = 0; b < w.n_vir(s); ++b)
            t2(i, j, a, b) = (g(i, a, j, b) - g(i, b, j, a)) /
                             (eo[s](i) + eo[s](j) - ev[s](a) - ev[s](b));
  }
  const auto g = ovov_integrals(mo, w, 0, 1);
  for (Index i = 0; i < w.n_occ(0); ++i)
    for (Index j = 0; j < w.n_occ(1); ++j)
      for (Index a = 0; a < w.n_vir(0); ++a)
        for (Index b = 0; b < w.n_vir(1); ++b)
          sol.amplitudes.t2ab(i, j, a, b) =
              g(i, a, j, b) / (eo[0](i) + eo[1](j) - ev[0](a) - ev[1](b));

  sol.energy = amplitude_energy(mo, w, sol.amplitudes);
  return sol;
}

} // namespace mofbind::corr
