#include <catch_amalgamated.hpp>
#include <fixtures/oracles.h>
#include <fixtures/systems.h>
#include <mofbind/core/error.h>
#include <mofbind/corr/correlation.h>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using namespace mofbind;
using namespace mofbind::qm;
using namespace mofbind::corr;
using namespace mofbind::testing;

namespace {

struct Prepared {
  TestSystem sys;
  MeanFieldResult mf;
  MoIntegrals mo;
};

Prepared prepare(const char *geom, const std::string &basis,
                 SpinMode mode = SpinMode::Restricted, int charge = 0,
                 int unpaired = 0) {
  Prepared p{make_system(geom, basis, charge, unpaired), {}, {}};
  p.mf = converged_scf(p.sys, mode);
  p.mo = mo_transform(p.sys.ints, p.mf);
  return p;
}

} // namespace

TEST_CASE("solver names", "[corr]") {
  CHECK(solver_from_string("CCSD") == Solver::CCSD);
  CHECK(to_string(Solver::FCI) == "fci");
  CHECK_THROWS_AS(solver_from_string("ccsd(t)"), ArgumentError);
}

TEST_CASE("MP2 against closed forms and oracles", "[corr]") {
  SECTION("two-orbital H2") {
    const auto p = prepare(kH2, "sto-3g");
    const auto sol = mp2(p.mo, OrbitalWindow::full(p.mo));
    const double k = p.mo.eri_aa(0, 1, 0, 1);
    const double e0 = p.mf.orbital_energies[0](0);
    const double e1 = p.mf.orbital_energies[0](1);
    CHECK_THAT(sol.energy, WithinAbs(k * k / (2.0 * (e0 - e1)), 1e-14));
    CHECK_THAT(sol.energy, WithinAbs(oracle("h2_sto-3g_mp2_corr"), 1e-8));
  }
  SECTION("water") {
    for (const char *basis : {"sto-3g", "6-31g"}) {
      const auto p = prepare(kH2O, basis);
      const auto sol = mp2(p.mo, OrbitalWindow::full(p.mo));
      CHECK_THAT(sol.energy,
                 WithinAbs(oracle(fmt::format("h2o_{}_mp2_corr", basis)),
                           1e-8));
      CHECK(sol.energy < 0.0);
      CHECK_THAT(amplitude_energy(p.mo, sol.window, sol.amplitudes),
                 WithinAbs(sol.energy, 1e-14));
    }
    const auto p = prepare(kH2O, "sto-3g");
    CHECK_THAT(mp2(p.mo, OrbitalWindow::frozen_core(p.mo, 1)).energy,
               WithinAbs(oracle("h2o_sto-3g_fc_mp2_corr"), 1e-8));
  }
  SECTION("unrestricted doublet") {
    const auto p = prepare(kNH2, "sto-3g", SpinMode::Unrestricted, 0, 1);
    const auto sol = mp2(p.mo, OrbitalWindow::full(p.mo));
    CHECK_THAT(sol.energy, WithinAbs(oracle("nh2_sto-3g_ump2_corr"), 1e-8));
  }
  SECTION("closed shell: unrestricted equals restricted") {
    const auto r = prepare(kH2O, "sto-3g");
    const auto u = prepare(kH2O, "sto-3g", SpinMode::Unrestricted);
    CHECK_THAT(mp2(u.mo, OrbitalWindow::full(u.mo)).energy,
               WithinAbs(mp2(r.mo, OrbitalWindow::full(r.mo)).energy, 1e-8));
  }
}

TEST_CASE("MP2 window properties", "[corr]") {
  const auto p = prepare(kH2O, "6-31g");
  auto w = OrbitalWindow::full(p.mo);
  const double full = mp2(p.mo, w).energy;

  auto reordered = w;
  for (int s = 0; s < 2; ++s) {
    std::reverse(reordered.occ[s].begin(), reordered.occ[s].end());
    std::reverse(reordered.vir[s].begin(), reordered.vir[s].end());
  }
  CHECK_THAT(mp2(p.mo, reordered).energy, WithinAbs(full, 1e-12));

  auto empty = w;
  empty.vir = {};
  CHECK(mp2(p.mo, empty).energy == 0.0);
  CHECK(ccsd(p.mo, empty).energy == 0.0);

  auto bad = w;
  bad.occ[0].push_back(w.vir[0].front());
  CHECK_THROWS_AS(mp2(p.mo, bad), ArgumentError);

  auto degenerate = p.mo;
  degenerate.fock[0](5, 5) = degenerate.fock[0](4, 4);
  CHECK_THROWS_WITH(mp2(degenerate, w),
                    ContainsSubstring("occupied orbital 4 and virtual "
                                      "orbital 5"));
}

TEST_CASE("MP2 is size consistent", "[corr]") {
  const auto one = prepare(kH2, "6-31g");
  const auto two = prepare("H 0 0 0; H 0 0 0.7414; H 100 0 0; H 100 0 0.7414",
                           "6-31g");
  CHECK_THAT(mp2(two.mo, OrbitalWindow::full(two.mo)).energy,
             WithinAbs(2.0 * mp2(one.mo, OrbitalWindow::full(one.mo)).energy,
                       1e-8));
}

TEST_CASE("CCSD against oracles and FCI", "[corr]") {
  SECTION("two-electron exactness") {
    for (const char *basis : {"sto-3g", "6-31g"}) {
      const auto p = prepare(kH2, basis);
      const auto w = OrbitalWindow::full(p.mo);
      const auto cc = ccsd(p.mo, w);
      const auto fci = fci_oracle(p.mo, w);
      CHECK(cc.converged);
      CHECK_THAT(cc.energy, WithinAbs(fci.energy, 1e-8));
      CHECK_THAT(cc.energy,
                 WithinAbs(oracle(fmt::format("h2_{}_ccsd_corr", basis)),
                           1e-8));
      CHECK_THAT(p.mf.energy + fci.energy,
                 WithinAbs(oracle(fmt::format("h2_{}_fci", basis)), 1e-8));
      const double mp2_total = p.mf.energy + mp2(p.mo, w).energy;
      CHECK(p.mf.energy + fci.energy < mp2_total);
      CHECK(mp2_total < p.mf.energy);
    }
  }
  SECTION("water") {
    const auto p = prepare(kH2O, "sto-3g");
    const auto cc = ccsd(p.mo, OrbitalWindow::full(p.mo));
    CHECK_THAT(cc.energy, WithinAbs(oracle("h2o_sto-3g_ccsd_corr"), 1e-7));
    CHECK_THAT(amplitude_energy(p.mo, cc.window, cc.amplitudes),
               WithinAbs(cc.energy, 1e-10));

    const auto fc = OrbitalWindow::frozen_core(p.mo, 1);
    const auto cc_fc = ccsd(p.mo, fc);
    const auto fci_fc = fci_oracle(p.mo, fc);
    CHECK_THAT(cc_fc.energy, WithinAbs(oracle("h2o_sto-3g_fc_ccsd_corr"), 1e-7));
    CHECK_THAT(p.mf.energy + fci_fc.energy,
               WithinAbs(oracle("h2o_sto-3g_fc_fci"), 1e-8));
    CHECK(fci_fc.energy <= cc_fc.energy);
    // Projected energy of the FCI amplitudes is exact.
    CHECK_THAT(amplitude_energy(p.mo, fc, fci_fc.amplitudes),
               WithinAbs(fci_fc.energy, 1e-10));
    CHECK_THROWS_WITH(fci_oracle(p.mo, OrbitalWindow::full(p.mo)),
                      ContainsSubstring("limit 12"));
  }
  SECTION("unrestricted closed shell matches restricted") {
    const auto r = prepare(kH2O, "sto-3g");
    const auto u = prepare(kH2O, "sto-3g", SpinMode::Unrestricted);
    CHECK_THAT(ccsd(u.mo, OrbitalWindow::full(u.mo)).energy,
               WithinAbs(ccsd(r.mo, OrbitalWindow::full(r.mo)).energy, 1e-8));
  }
  SECTION("non-convergence is reported") {
    const auto p = prepare(kH2O, "sto-3g");
    CcsdOptions opts;
    opts.max_iterations = 2;
    CHECK_THROWS_WITH(ccsd(p.mo, OrbitalWindow::full(p.mo), opts),
                      ContainsSubstring("residuals"));
  }
}

TEST_CASE("FCI one-electron limit", "[corr]") {
  const auto p = prepare(kH2, "sto-3g", SpinMode::Unrestricted, 1, 1);
  const auto fci = fci_oracle(p.mo, OrbitalWindow::full(p.mo));
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig(
      p.sys.ints.core_hamiltonian(), p.sys.ints.S);
  CHECK_THAT(p.mf.energy + fci.energy,
             WithinAbs(p.sys.ints.nuclear_repulsion + eig.eigenvalues()(0),
                       1e-10));
  CHECK_THAT(fci.energy, WithinAbs(0.0, 1e-12));
}
