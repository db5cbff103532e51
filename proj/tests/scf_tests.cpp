#include <catch_amalgamated.hpp>
#include <cstdio>
#include <fixtures/oracles.h>
#include <fixtures/systems.h>
#include <mofbind/core/error.h>
#include <mofbind/qm/mo_integrals.h>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using namespace mofbind;
using namespace mofbind::qm;
using namespace mofbind::testing;

TEST_CASE("spin state bookkeeping", "[scf]") {
  const auto s = SpinState::from_charge(8, 0, 2);
  CHECK(s.n_alpha() == 5);
  CHECK(s.n_beta() == 3);
  CHECK_THROWS_AS(SpinState::from_charge(8, 0, 1), ArgumentError);
  CHECK_THROWS_AS(SpinState::from_charge(1, 1, 0), ArgumentError);
}

TEST_CASE("restricted SCF matches external oracles", "[scf]") {
  for (const auto &[geom, name] :
       {std::pair{kH2, "h2"}, std::pair{kH2O, "h2o"}})
    for (const char *basis : {"sto-3g", "6-31g"}) {
      const auto sys = make_system(geom, basis);
      const auto mf = converged_scf(sys);
      INFO(name << " " << basis);
      CHECK(sys.basis.size() ==
            static_cast<std::size_t>(
                oracle(fmt::format("{}_{}_nbf", name, basis))));
      CHECK_THAT(mf.energy,
                 WithinAbs(oracle(fmt::format("{}_{}_rhf", name, basis)),
                           1e-8));
      CHECK(mf.gradient_norm < 1e-7);
      for (int s = 0; s < 2; ++s) {
        const Mat ctsc =
            mf.coefficients[s].transpose() * sys.ints.S * mf.coefficients[s];
        CHECK(max_abs_diff(ctsc, Mat::Identity(ctsc.rows(), ctsc.cols())) <
              1e-8);
        CHECK(mf.occupations[s].sum() == mf.n_occ[s]);
      }
    }
}

TEST_CASE("unrestricted SCF", "[scf]") {
  SECTION("one-electron limit") {
    const auto he = make_system("He 0 0 0", "sto-3g", 1, 1);
    const auto mf = converged_scf(he, SpinMode::Unrestricted);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig(
        he.ints.core_hamiltonian(), he.ints.S);
    CHECK_THAT(mf.energy, WithinAbs(eig.eigenvalues()(0), 1e-10));
    CHECK_THAT(mf.energy, WithinAbs(oracle("heplus_sto-3g_uhf"), 1e-8));
  }
  SECTION("open-shell doublet") {
    const auto nh2 = make_system(kNH2, "sto-3g", 0, 1);
    const auto mf = converged_scf(nh2, SpinMode::Unrestricted);
    CHECK_THAT(mf.energy, WithinAbs(oracle("nh2_sto-3g_uhf"), 1e-7));
    CHECK(mf.n_occ[0] == 5);
    CHECK(mf.n_occ[1] == 4);
    CHECK_THROWS_AS(run_scf(nh2.ints, nh2.spin), ArgumentError);
  }
  SECTION("closed shell run unrestricted equals restricted") {
    const auto h2o = make_system(kH2O, "sto-3g");
    const auto r = converged_scf(h2o);
    const auto u = converged_scf(h2o, SpinMode::Unrestricted);
    CHECK_THAT(u.energy, WithinAbs(r.energy, 1e-8));
  }
}

TEST_CASE("plain Roothaan iterations lower the energy", "[scf]") {
  const auto h2o = make_system(kH2O, "6-31g");
  ScfOptions opts;
  opts.diis = false;
  const auto mf = run_scf(h2o.ints, h2o.spin, opts);
  REQUIRE(mf.converged);
  for (std::size_t i = 1; i < mf.energy_history.size(); ++i)
    CHECK(mf.energy_history[i] <= mf.energy_history[i - 1] + 1e-12);
  CHECK_THAT(mf.energy, WithinAbs(oracle("h2o_6-31g_rhf"), 1e-8));
}

TEST_CASE("SCF failure modes", "[scf]") {
  const auto h2o = make_system(kH2O, "sto-3g");
  ScfOptions opts;
  opts.max_iterations = 2;
  const auto mf = run_scf(h2o.ints, h2o.spin, opts);
  CHECK_FALSE(mf.converged);
  CHECK_THROWS_WITH(mo_transform(h2o.ints, mf),
                    ContainsSubstring("not converged"));

  const auto dup = make_system("H 0 0 0; H 0 0 1e-7", "sto-3g");
  CHECK_THROWS_AS(run_scf(dup.ints, dup.spin), NumericalError);
}

TEST_CASE("level shift reaches the same solution", "[scf]") {
  const auto h2o = make_system(kH2O, "sto-3g");
  ScfOptions opts;
  opts.level_shift = 0.3;
  const auto mf = run_scf(h2o.ints, h2o.spin, opts);
  REQUIRE(mf.converged);
  CHECK_THAT(mf.energy, WithinAbs(oracle("h2o_sto-3g_rhf"), 1e-8));
}

TEST_CASE("SCF energy is size consistent", "[scf]") {
  const auto one = make_system(kH2, "6-31g");
  const auto two =
      make_system("H 0 0 0; H 0 0 0.7414; H 100 0 0; H 100 0 0.7414", "6-31g");
  CHECK_THAT(converged_scf(two).energy,
             WithinAbs(2.0 * converged_scf(one).energy, 1e-8));
}

TEST_CASE("MO transformation", "[scf]") {
  const auto h2o = make_system(kH2O, "sto-3g");
  const auto mf = converged_scf(h2o);
  const auto mo = mo_transform(h2o.ints, mf);
  const Index n = mo.n_orbitals(0);
  CHECK(max_abs_diff(mo.overlap[0], Mat::Identity(n, n)) < 1e-8);
  // Canonical orbitals diagonalize the Fock operator.
  CHECK(max_abs_diff(Mat(mo.fock[0].diagonal().asDiagonal()), mo.fock[0]) <
        1e-7);
  CHECK(max_abs_diff(Vec(mo.fock[0].diagonal()), mf.orbital_energies[0]) <
        1e-7);

  // Back-transformation with C^-1 recovers the AO tensor.
  const Mat cinv = mf.coefficients[0].inverse();
  const auto back = transform4(mo.eri_aa, cinv, cinv, cinv, cinv);
  CHECK(max_abs_diff(back.as_vector(), h2o.ints.eri.as_vector()) < 1e-10);

  // Identity coefficients on an orthonormal basis leave integrals alone.
  IntegralSet fake;
  fake.S = Mat::Identity(3, 3);
  fake.T = Mat::Random(3, 3);
  fake.T = (fake.T + fake.T.transpose()).eval();
  fake.V = Mat::Zero(3, 3);
  fake.eri = Tensor4::cube(3);
  fake.eri.as_vector().setRandom();
  const Mat id = Mat::Identity(3, 3);
  const auto same = mo_transform(fake, {fake.T, fake.T}, {id, id}, {1, 1},
                                 SpinMode::Restricted, 0.0);
  CHECK(max_abs_diff(same.h[0], fake.T) == 0.0);
  CHECK(max_abs_diff(same.eri_aa.as_vector(), fake.eri.as_vector()) < 1e-15);

  // Orthogonal rotation of an orthonormal basis preserves tr(h).
  const Mat q = Eigen::HouseholderQR<Mat>(Mat::Random(3, 3)).householderQ();
  const auto rotated = mo_transform(fake, {fake.T, fake.T}, {q, q}, {1, 1},
                                    SpinMode::Restricted, 0.0);
  CHECK_THAT(rotated.h[0].trace(), WithinAbs(fake.T.trace(), 1e-12));
}

TEST_CASE("mean-field dump round trip", "[scf]") {
  const auto nh2 = make_system(kNH2, "sto-3g", 0, 1);
  const auto mf = converged_scf(nh2, SpinMode::Unrestricted);
  write_mean_field("scf_tests_dump", mf);
  const auto back = read_mean_field("scf_tests_dump");
  CHECK(back.mode == mf.mode);
  CHECK(back.n_occ == mf.n_occ);
  CHECK(back.energy == mf.energy);
  CHECK(back.converged);
  for (int s = 0; s < 2; ++s) {
    CHECK(max_abs_diff(back.coefficients[s], mf.coefficients[s]) == 0.0);
    CHECK(max_abs_diff(back.orbital_energies[s], mf.orbital_energies[s]) ==
          0.0);
  }
  std::remove("scf_tests_dump.txt");
  std::remove("scf_tests_dump.bin");
}
