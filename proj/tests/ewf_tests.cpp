#include <catch_amalgamated.hpp>
#include <fixtures/oracles.h>
#include <fixtures/systems.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/ewf/embedding.h>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using namespace mofbind;
using namespace mofbind::ewf;
using namespace mofbind::testing;
using corr::Solver;

namespace {

/// A converged system kept alive for the embedding that references it.
struct Fixture {
  TestSystem sys;
  qm::MeanFieldResult mf;
  EmbeddingSystem emb_sys;

  Fixture(const char *geom, const std::string &basis,
          qm::SpinMode mode = qm::SpinMode::Restricted, int unpaired = 0)
      : sys(make_system(geom, basis, 0, unpaired)),
        mf(converged_scf(sys, mode)),
        emb_sys(sys.mol, sys.basis, sys.ints, mf) {}

  double canonical_mp2() const {
    const auto mo = qm::mo_transform(sys.ints, mf);
    return corr::mp2(mo, corr::OrbitalWindow::full(mo)).energy;
  }
};

} // namespace

TEST_CASE("IAOs collapse to Lowdin orbitals in the minimal basis", "[ewf]") {
  Fixture f(kH2, "sto-3g");
  Embedding emb(f.emb_sys);
  const Mat &q = emb.iaos().coefficients[0];
  CHECK(max_abs_diff(q, inverse_sqrt(f.sys.ints.S)) < 1e-10);
  CHECK(emb.fragments().size() == 2);
  CHECK(emb.fragments()[0].size() == 1);
}

TEST_CASE("IAO span and fragment partition", "[ewf]") {
  Fixture f(kH2O, "6-31g");
  Embedding emb(f.emb_sys);
  const auto &iaos = emb.iaos();
  const Mat &s = f.sys.ints.S;
  REQUIRE(iaos.size() == 7);
  CHECK(iaos.occupied_span_deviation < 1e-8);
  const Mat &q = iaos.coefficients[0];
  CHECK(max_abs_diff(Mat(q.transpose() * s * q), Mat::Identity(7, 7)) < 1e-8);

  const auto &frags = emb.fragments();
  REQUIRE(frags.size() == 3);
  CHECK(frags[0].size() == 5);
  CHECK(frags[1].size() == 1);
  CHECK(frags[2].size() == 1);
  CHECK(frags[0].label == "O0");

  Mat sum = Mat::Zero(s.rows(), s.rows());
  for (const auto &frag : frags)
    sum += frag.ao_projector(0, s);
  CHECK(max_abs_diff(sum, Mat(q * q.transpose() * s)) < 1e-8);
  // Restricted to the IAO span the projectors resolve the identity.
  CHECK(max_abs_diff(Mat(q.transpose() * s * sum * q), Mat::Identity(7, 7)) <
        1e-8);

  auto bad = iaos;
  bad.atom[3] = 7;
  CHECK_THROWS_WITH(make_fragments(bad, f.sys.mol),
                    ContainsSubstring("not assigned"));

  const auto merged = merge_fragments(frags);
  CHECK(merged.size() == 7);
  CHECK(merged.label == "O0+H1+H2");
  CHECK_THROWS_AS(merge_fragments({frags[1], frags[1]}), ArgumentError);
}

TEST_CASE("IAO reference basis must cover the molecule", "[ewf]") {
  Fixture f(kH2O, "sto-3g");
  qm::BasisSet h_only;
  h_only.name = "h-only";
  h_only.elements["H"] = {};
  CHECK_THROWS_WITH(build_iaos(f.emb_sys, h_only), ContainsSubstring("for O"));
}

TEST_CASE("DMET bath reproduces the mean-field energy", "[ewf]") {
  SECTION("closed shell") {
    for (const char *basis : {"sto-3g", "6-31g"}) {
      Fixture f(kH2O, basis);
      Embedding emb(f.emb_sys);
      CHECK_THAT(emb.mean_field_energy(kDmetOnly), WithinAbs(f.mf.energy, 1e-8));
    }
  }
  SECTION("open shell") {
    Fixture f(kNH2, "sto-3g", qm::SpinMode::Unrestricted, 1);
    Embedding emb(f.emb_sys);
    CHECK_THAT(emb.mean_field_energy(kDmetOnly), WithinAbs(f.mf.energy, 1e-8));
  }
  SECTION("a fragment alone does not see its environment") {
    Fixture f(kH2O, "sto-3g");
    Embedding emb(f.emb_sys);
    // Dropping the bath loses occupied weight on the fragment.
    auto c = build_bath(f.emb_sys, emb.fragments()[1], kDmetOnly);
    const double with_bath = mean_field_fragment_energy(f.emb_sys, c);
    c.coefficients[0] = c.coefficients[0].leftCols(0);
    c.coefficients[1] = c.coefficients[1].leftCols(0);
    c.n_occ = {0, 0};
    CHECK(std::abs(mean_field_fragment_energy(f.emb_sys, c) - with_bath) > 1e-2);
  }
}

TEST_CASE("bath construction", "[ewf]") {
  Fixture f(kH2O, "6-31g");
  Embedding emb(f.emb_sys);
  const Mat &s = f.sys.ints.S;

  CHECK_THROWS_WITH(build_bath(f.emb_sys, emb.fragments()[0], 0.0),
                    ContainsSubstring("DMET-only"));
  CHECK_THROWS_AS(build_bath(f.emb_sys, emb.fragments()[0], -1e-5),
                  ArgumentError);

  for (const auto &frag : emb.fragments()) {
    const auto dmet = build_bath(f.emb_sys, frag, 1.0);
    CHECK(dmet.n_bno_occ[0] + dmet.n_bno_vir[0] == 0);
    CHECK(dmet.n_dmet_bath[0] <= frag.size());
    CHECK(dmet.n_orbitals(0) == frag.size() + dmet.n_dmet_bath[0]);

    const auto full = build_bath(f.emb_sys, frag, 1e-12);
    CHECK(full.n_orbitals(0) == 13);
    const Mat &c = full.coefficients[0];
    CHECK(max_abs_diff(Mat(c.transpose() * s * c), Mat::Identity(13, 13)) <
          1e-8);

    int previous = -1;
    for (double eta : {1.0, 1e-3, 1e-5, 1e-7, 1e-9}) {
      const auto cl = build_bath(f.emb_sys, frag, eta);
      CHECK(cl.n_bath(0) >= previous);
      previous = cl.n_bath(0);
      // cluster orbitals keep the mean-field occupied/virtual split
      const Mat occ = cl.coefficients[0].leftCols(cl.n_occ[0]);
      const Mat dm = f.mf.density(0);
      CHECK(max_abs_diff(Mat(occ.transpose() * s * dm * s * occ),
                         Mat::Identity(cl.n_occ[0], cl.n_occ[0])) < 1e-8);
    }
  }
}

TEST_CASE("EWF-MP2 converges to canonical MP2 as eta decreases", "[ewf]") {
  Fixture f(kH2O, "6-31g");
  Embedding emb(f.emb_sys);
  const double reference = f.canonical_mp2();
  double previous = 1.0;
  for (double eta : {1e-3, 1e-5, 1e-7, 1e-9}) {
    const double err = std::abs(
        emb.correlation_energy(emb.all_atoms(), eta, Solver::MP2) - reference);
    CHECK(err <= previous);
    previous = err;
  }
  CHECK(previous < 1e-4);
}

TEST_CASE("fragment solutions", "[ewf]") {
  SECTION("a single fragment over all atoms recovers canonical MP2") {
    Fixture f(kH2O, "6-31g");
    Embedding emb(f.emb_sys);
    const auto all = merge_fragments(emb.fragments());
    const auto sol =
        solve_fragment(f.emb_sys, build_bath(f.emb_sys, all, 1e-9), Solver::MP2);
    CHECK_THAT(sol.contribution, WithinAbs(f.canonical_mp2(), 1e-8));
    CHECK_THAT(sol.cluster_energy, WithinAbs(sol.contribution, 1e-10));
  }
  SECTION("no virtual orbitals gives zero") {
    Fixture f(kH2O, "sto-3g");
    Embedding emb(f.emb_sys);
    auto c = build_bath(f.emb_sys, emb.fragments()[1], kDmetOnly);
    for (int s = 0; s < 2; ++s)
      c.coefficients[s] = c.coefficients[s].leftCols(c.n_occ[s]).eval();
    c.integrals = qm::mo_transform(f.sys.ints, f.emb_sys.fock, c.coefficients,
                                   c.n_occ, f.mf.mode, f.mf.energy);
    CHECK(solve_fragment(f.emb_sys, c, Solver::CCSD).contribution == 0.0);
  }
  SECTION("FCI in a small cluster lies below MP2") {
    Fixture f(kH2O, "sto-3g");
    Embedding emb(f.emb_sys);
    const auto c = build_bath(f.emb_sys, emb.fragments()[1], 1e-3);
    REQUIRE(2 * c.n_orbitals(0) <= corr::kFciMaxSpinOrbitals);
    const auto fci = solve_fragment(f.emb_sys, c, Solver::FCI);
    const auto cc = solve_fragment(f.emb_sys, c, Solver::CCSD);
    const auto pt = solve_fragment(f.emb_sys, c, Solver::MP2);
    CHECK(fci.cluster_energy < pt.cluster_energy);
    CHECK(fci.cluster_energy <= cc.cluster_energy + 1e-10);
  }
  SECTION("solver failures name the fragment") {
    Fixture f(kH2O, "sto-3g");
    Embedding emb(f.emb_sys);
    const auto c = build_bath(f.emb_sys, emb.fragments()[0], 1e-9);
    CHECK_THROWS_WITH(solve_fragment(f.emb_sys, c, Solver::FCI),
                      ContainsSubstring("fragment O0"));
  }
}

TEST_CASE("global energy assembly", "[ewf]") {
  Fixture f(kH2O, "sto-3g");
  Embedding emb(f.emb_sys);
  auto sols = emb.solve(emb.all_atoms(), 1e-10, Solver::MP2);
  CHECK_THAT(assemble_global_energy(sols, f.mf, emb.all_atoms()),
             WithinAbs(f.mf.energy + f.canonical_mp2(), 1e-8));
  CHECK_THAT(f.mf.energy + f.canonical_mp2(),
             WithinAbs(oracle("h2o_sto-3g_rhf") +
                           oracle("h2o_sto-3g_mp2_corr"),
                       1e-6));

  auto zeros = sols;
  for (auto &s : zeros)
    s.contribution = 0.0;
  CHECK(assemble_global_energy(zeros, f.mf, emb.all_atoms()) == f.mf.energy);

  auto dup = sols;
  dup.push_back(sols[1]);
  CHECK_THROWS_WITH(assemble_global_energy(dup, f.mf, emb.all_atoms()),
                    ContainsSubstring("atom 1 appears in more than one"));
  auto missing = sols;
  missing.erase(missing.begin() + 2);
  CHECK_THROWS_WITH(assemble_global_energy(missing, f.mf, emb.all_atoms()),
                    ContainsSubstring("atoms 2"));
}

TEST_CASE("unrestricted embedding", "[ewf]") {
  Fixture f(kNH2, "sto-3g", qm::SpinMode::Unrestricted, 1);
  Embedding emb(f.emb_sys);
  const double e = emb.correlation_energy(emb.all_atoms(), 1e-12, Solver::MP2);
  CHECK_THAT(e, WithinAbs(oracle("nh2_sto-3g_ump2_corr"), 1e-7));
}

TEST_CASE("fragment cache and parallel solves", "[ewf]") {
  Fixture f(kH2O, "sto-3g");
  Embedding serial(f.emb_sys);
  const double e1 = serial.correlation_energy(serial.all_atoms(), 1e-5, Solver::MP2);
  CHECK(serial.cache_misses() == 3);
  CHECK(serial.correlation_energy(serial.all_atoms(), 1e-5, Solver::MP2) == e1);
  CHECK(serial.cache_misses() == 3);
  serial.solve({0}, 1e-5, Solver::CCSD);
  CHECK(serial.cache_misses() == 4);
  CHECK_THROWS_AS(serial.solve({3}, 1e-5, Solver::MP2), ArgumentError);

  EmbeddingOptions opts;
  opts.jobs = 3;
  Embedding parallel(f.emb_sys, opts);
  CHECK(parallel.correlation_energy(parallel.all_atoms(), 1e-5, Solver::MP2) ==
        e1);

  const auto table = diagnostics_table(serial.history());
  const auto lines = text::split_lines(table);
  REQUIRE(lines.size() >= 5);
  CHECK(lines[0] == "fragment\teta\tdmet_bath\tbno_occ\tbno_vir\tn_cluster\t"
                    "solver\tcontribution_hartree");
  CHECK(text::split(lines[1], '\t').size() == 8);
  CHECK_THAT(std::string(lines[4]), ContainsSubstring("O0\t1e-05"));
  CHECK_THAT(std::string(lines[4]), ContainsSubstring("ccsd"));
}

TEST_CASE("multi-level composition", "[ewf]") {
  Fixture f(kH2O, "sto-3g");
  Embedding emb(f.emb_sys);
  const auto all = emb.all_atoms();

  MultiLevelSpec defaults;
  CHECK(defaults.eta_ll == 1e-7);
  CHECK(defaults.eta_hl == 1e-5);
  CHECK(defaults.hl_solver == Solver::CCSD);
  CHECK(defaults.ll_solver == Solver::MP2);

  SECTION("same solver and eta telescopes") {
    MultiLevelSpec spec;
    spec.hl_solver = spec.ll_solver = Solver::MP2;
    spec.eta_hl = spec.eta_ll = 1e-6;
    const auto r = multilevel_energy(emb, spec);
    CHECK_THAT(r.energy,
               WithinAbs(f.mf.energy +
                             emb.correlation_energy(all, 1e-6, Solver::MP2),
                         1e-12));
  }
  SECTION("same solver at different eta telescopes") {
    MultiLevelSpec spec;
    spec.hl_solver = Solver::MP2;
    spec.eta_hl = 1e-2;
    const auto r = multilevel_energy(emb, spec);
    CHECK(r.hl == r.ll_at_hl);
    CHECK_THAT(r.energy,
               WithinAbs(f.mf.energy +
                             emb.correlation_energy(all, 1e-7, Solver::MP2),
                         1e-12));
  }
  SECTION("restricted close set") {
    MultiLevelSpec spec;
    spec.close_atoms = std::vector<std::size_t>{0};
    const auto r = multilevel_energy(emb, spec);
    const double hl = emb.correlation_energy({0}, 1e-5, Solver::CCSD);
    const double ll_hl = emb.correlation_energy({0}, 1e-5, Solver::MP2);
    const double ll = emb.correlation_energy(all, 1e-7, Solver::MP2);
    CHECK_THAT(r.energy, WithinAbs(f.mf.energy + hl + ll - ll_hl, 1e-12));
    CHECK(r.energy < f.mf.energy + ll); // CCSD correlates more than MP2 here

    spec.full_bracket = true;
    const auto full = multilevel_energy(emb, spec);
    CHECK_THAT(full.ll_at_hl,
               WithinAbs(emb.correlation_energy(all, 1e-5, Solver::MP2), 1e-14));
  }
  SECTION("invalid specifications") {
    MultiLevelSpec spec;
    spec.eta_hl = 1e-8;
    CHECK_THROWS_WITH(multilevel_energy(emb, spec),
                      ContainsSubstring("eta_hl >= eta_ll"));
    spec = {};
    spec.close_atoms = std::vector<std::size_t>{};
    CHECK_THROWS_WITH(multilevel_energy(emb, spec), ContainsSubstring("empty"));
    spec.close_atoms = std::vector<std::size_t>{5};
    CHECK_THROWS_AS(multilevel_energy(emb, spec), ArgumentError);
  }
  SECTION("unavailable high-level solver") {
    MultiLevelSpec spec;
    spec.hl_solver = Solver::FCI;
    spec.eta_hl = 1e-7;
    CHECK_THROWS_WITH(multilevel_energy(emb, spec),
                      ContainsSubstring("LL-only mode"));
  }
}
