// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fixtures/oracles.h>
#include <fixtures/systems.h>
#include <fixtures/toy_framework.h>
#include <fmt/core.h>
#include <functional>
#include <mofbind/cluster/carve.h>
#include <mofbind/core/units.h>
#include <mofbind/crystal/cif.h>
#include <mofbind/ewf/embedding.h>
#include <mofbind/qm/mo_integrals.h>
#include <mofbind/workflow/pipeline.h>
#include <random>

using namespace mofbind;
using namespace mofbind::testing;
using corr::Solver;

namespace {

struct Outcome {
  bool pass{true};
  std::vector<std::string> details;

  void check(bool ok, std::string what) {
    if (!ok)
      pass = false;
    details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
  }
};

struct Fixture {
  TestSystem sys;
  qm::MeanFieldResult mf;
  ewf::EmbeddingSystem emb_sys;

  Fixture(const char *geom, const std::string &basis)
      : sys(make_system(geom, basis)), mf(converged_scf(sys)),
        emb_sys(sys.mol, sys.basis, sys.ints, mf) {}
};

Outcome telescoping() {
  Outcome o;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-5000.0, -1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double small = u(rng), large = u(rng);
    worst = std::max(worst,
                     std::abs(workflow::oniom_compose(small, large, small) -
                              large));
  }
  o.check(worst <= 1e-12,
          fmt::format("oniom_compose(HL=LL) - E_LL_large: max {:.1e} Eh over "
                      "1000 draws (tol 1e-12)",
                      worst));

  Fixture f(kH2O, "sto-3g");
  ewf::Embedding emb(f.emb_sys);
  ewf::MultiLevelSpec spec;
  spec.hl_solver = spec.ll_solver = Solver::MP2;
  spec.eta_hl = spec.eta_ll = 1e-6;
  const auto r = ewf::multilevel_energy(emb, spec);
  const double direct =
      f.mf.energy + emb.correlation_energy(emb.all_atoms(), 1e-6, Solver::MP2);
  const double dev = std::abs(r.energy - direct);
  o.check(dev <= 1e-12,
          fmt::format("multilevel(HL=LL, eta_HL=eta_LL) - (E_HF + E_LL): "
                      "{:.1e} Eh (tol 1e-12)",
                      dev));
  return o;
}

Outcome mean_field_consistency() {
  Outcome o;
  Fixture f(kH2O, "sto-3g");
  ewf::Embedding emb(f.emb_sys);
  const double e = emb.mean_field_energy(ewf::kDmetOnly);
  const double dev = std::abs(e - f.mf.energy);
  o.check(dev <= 1e-8,
          fmt::format("H2O/STO-3G DMET-only mean-field energy {:.12f} vs E_SCF "
                      "{:.12f}: {:.1e} Eh (tol 1e-8)",
                      e, f.mf.energy, dev));
  return o;
}

Outcome eta_convergence() {
  Outcome o;
  Fixture f(kH2O, "6-31g");
  const auto mo = qm::mo_transform(f.sys.ints, f.mf);
  const double reference = corr::mp2(mo, corr::OrbitalWindow::full(mo)).energy;
  ewf::Embedding emb(f.emb_sys);
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  std::string sweep;
  double last = 0.0;
  for (double eta : {1e-3, 1e-5, 1e-7, 1e-9}) {
    last = std::abs(emb.correlation_energy(emb.all_atoms(), eta, Solver::MP2) -
                    reference);
    sweep += fmt::format(" {:g}:{:.2e}", eta, last);
    monotone = monotone && last <= prev;
    prev = last;
  }
  o.check(monotone, fmt::format("|EWF-MP2 - MP2| non-increasing over eta "
                                "(H2O/6-31G):{}",
                                sweep));
  o.check(last < 1e-4, fmt::format("final error {:.2e} Eh (tol 1e-4)", last));
  return o;
}

Outcome solver_oracles() {
  Outcome o;
  double worst = 0.0;
  for (const auto &[name, geom] :
       {std::pair{"h2", kH2}, std::pair{"h2o", kH2O}}) {
    const auto sys = make_system(geom, "sto-3g");
    const auto mf = converged_scf(sys);
    const auto mo = qm::mo_transform(sys.ints, mf);
    const auto w = corr::OrbitalWindow::full(mo);
    const std::pair<std::string, double> values[] = {
        {"rhf", mf.energy},
        {"mp2_corr", corr::mp2(mo, w).energy},
        {"ccsd_corr", corr::ccsd(mo, w).energy}};
    for (const auto &[key, value] : values) {
      const double ref = oracle(fmt::format("{}_sto-3g_{}", name, key));
      const double dev = std::abs(value - ref);
      worst = std::max(worst, dev);
      o.check(dev <= 1e-6, fmt::format("{}/STO-3G {:<9} {:.10f} vs {:.10f} "
                                       "({:.1e})",
                                       name, key, value, ref, dev));
    }
  }
  for (const char *basis : {"sto-3g", "6-31g"}) {
    const auto sys = make_system(kH2, basis);
    const auto mf = converged_scf(sys);
    const auto mo = qm::mo_transform(sys.ints, mf);
    const auto w = corr::OrbitalWindow::full(mo);
    const double dev =
        std::abs(corr::ccsd(mo, w).energy - corr::fci_oracle(mo, w).energy);
    o.check(dev <= 1e-8,
            fmt::format("H2/{} CCSD - FCI: {:.1e} Eh (tol 1e-8)", basis, dev));
  }
  return o;
}

Outcome table_arithmetic() {
  Outcome o;
  const auto refs = workflow::load_reference_dataset();
  const auto columns = workflow::load_published_columns();
  const auto column = [&](std::string_view name) {
    for (const auto &c : columns)
      if (c.column == name)
        return workflow::check_column(c, refs);
    throw ArgumentError(fmt::format("no published column {}", name));
  };
  const struct {
    const char *name;
    double target, tol;
  } matched[] = {{"ewf_eta_1e-5", 1.99, 0.02},
                 {"ewf_eta_1e-2", 2.78, 0.02},
                 {"pbe", 3.12, 0.02},
                 {"m06l", 1.52, 0.03}};
  for (const auto &m : matched) {
    const auto c = column(m.name);
    o.check(std::abs(c.recomputed - m.target) <= m.tol,
            fmt::format("{:<13} recomputed {:.4f} (printed {:.4f}), target "
                        "{:.2f} +- {:.2f}",
                        m.name, c.recomputed, c.printed, m.target, m.tol));
  }
  for (const char *name : {"uhf", "blyp"}) {
    const auto c = column(name);
    o.check(!c.reproduced,
            fmt::format("{:<13} flagged: printed {:.4f}, recomputed {:.4f}",
                        name, c.printed, c.recomputed));
  }
  return o;
}

Outcome carving_suite() {
  using namespace cluster;
  Outcome o;
  const auto cell = crystal::build_supercell(toy_framework(), IVec3(5, 4, 3));
  const auto graph = detect_bonds(cell);
  const Vec3 metal_pos = cell.atoms[*cell.find(toy_metal(2, 2, 1))].position;
  const Vec3 site = metal_pos + Vec3(0, 0, 2.3);
  CarveConfig cfg;

  double cap_err = 0.0;
  const auto track_caps = [&](const Cluster &c) {
    for (const auto &cap : c.atoms) {
      if (!cap.roles.has(Role::Cap) || cap.element != "H")
        continue;
      const auto &anchor = c.atoms[*c.find(*cap.cap_anchor)];
      const double want = anchor.element == "O" ? cfg.oh_cap_length
                                                : cfg.ch_cap_length;
      const Vec3 replaced = cell.atoms[*cell.find(cap.provenance)].position;
      const Vec3 expected =
          anchor.position + want * (replaced - anchor.position).normalized();
      cap_err = std::max(cap_err, (cap.position - expected).norm());
    }
  };

  bool monotone = true;
  std::size_t prev = 0;
  std::string sizes;
  for (double r : {3.0, 5.0, 7.0, 9.0, 11.0}) {
    cfg.radius = r;
    const auto c = carve_large(cell, graph, toy_metal(2, 2, 1), cfg);
    monotone = monotone && c.size() >= prev;
    prev = c.size();
    sizes += fmt::format(" {:g}:{}", r, c.size());
    track_caps(c);
  }
  o.check(monotone, fmt::format("large-cluster size non-decreasing in radius "
                                "(A:atoms){}",
                                sizes));

  cfg = CarveConfig{};
  const auto small = carve_small(cell, graph, site, cfg);
  track_caps(small);
  const auto count_kind = [&](GroupKind k) {
    return std::count_if(small.groups.begin(), small.groups.end(),
                         [&](const auto &g) { return g.kind == k; });
  };
  o.check(small.size() == 21 && small.indices_with(Role::Metal).size() == 3 &&
              small.indices_with(Role::Cap).size() == 6 &&
              count_kind(GroupKind::Formate) == 3 &&
              count_kind(GroupKind::Hydroxylate) == 3,
          fmt::format("small cluster: {} atoms, {} metals, {} caps, {} "
                      "formates, {} hydroxylates (want 21/3/6/3/3)",
                      small.size(), small.indices_with(Role::Metal).size(),
                      small.indices_with(Role::Cap).size(),
                      count_kind(GroupKind::Formate),
                      count_kind(GroupKind::Hydroxylate)));
  const auto linkers = analyze_linkers(cell, graph);
  o.check(linkers.components.size() == 60 && linkers.groups.size() == 105,
          fmt::format("linker analysis: {} components, {} coordinating groups "
                      "(want 60/105)",
                      linkers.components.size(), linkers.groups.size()));
  o.check(cap_err <= 1e-6,
          fmt::format("cap placement deviation {:.1e} A (tol 1e-6)", cap_err));

  auto shuffled = cell;
  std::mt19937 rng(7);
  std::shuffle(shuffled.atoms.begin(), shuffled.atoms.end(), rng);
  const auto m1 = carve_medium(cell, site, cfg);
  o.check(carve_medium(cell, site, cfg) == m1 &&
              carve_medium(shuffled, site, cfg) == m1 &&
              carve_small(shuffled, site, cfg) == small,
          "carving deterministic and independent of atom order");

  const auto inversion = crystal::parse_cif(R"(data_inv
_cell_length_a 10
_cell_length_b 10
_cell_length_c 10
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
loop_
_symmetry_equiv_pos_as_xyz
'x, y, z'
'-x,-y,-z'
loop_
_atom_site_label
_atom_site_type_symbol
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
O1 O 0.25 0.0 0.0
)");
  const auto sites = crystal::expand_sites(inversion);
  o.check(sites.size() == 2 && std::abs(sites[0].frac(0) - 0.25) < 1e-12 &&
              std::abs(sites[1].frac(0) - 0.75) < 1e-12,
          "parse_cif inversion expansion gives x = 0.25, 0.75");
  const auto p1 = crystal::to_p1(toy_framework());
  o.check(crystal::to_p1(p1).sites == p1.sites,
          fmt::format("symmetry expansion idempotent ({} sites)",
                      p1.sites.size()));
  return o;
}

Outcome synthetic_ledger_pipeline() {
  Outcome o;
  o.details.push_back(
      "note The published per-MOF binding energies need open-shell "
      "transition-metal clusters of hundreds of atoms in a triple-zeta basis; "
      "they are NOT reproducible at desk scale and are not recomputed here.");
  o.details.push_back(
      "note Coverage: criterion 5 (report arithmetic) plus this end-to-end run "
      "on a synthetic external ledger (DFT-injection path).");

  const auto out = std::filesystem::temp_directory_path() / "mofbind_acceptance";
  std::filesystem::remove_all(out);
  auto config = workflow::read_config(fixture_path("pipeline/synthetic.ini"));
  config.ledger_path = (out / "ledger.tsv").string();
  config.report_prefix = (out / "report").string();
  const auto r = workflow::run_pipeline(config);

  const double e_complex = -1188.62 + (-3188.615 - -1188.11);
  const double e_mof = -1000.0 + (-3000.0 - -999.5);
  const double expected =
      (e_complex - e_mof - -188.6) * units::HARTREE_TO_KCALMOL;
  const double got = r.report.rows.at(0).delta_e;
  o.check(r.computed == 0 && r.cache_hits == 0,
          fmt::format("internal solvers disabled; {} external energies used",
                      r.plan.size()));
  o.check(std::abs(got - expected) <= 1e-9,
          fmt::format("composed dE {:.9f} kcal/mol vs hand composition "
                      "{:.9f}",
                      got, expected));
  const auto text = mofbind::text::read_file(config.report_prefix + ".txt");
  const auto tsv = mofbind::text::read_file(config.report_prefix + ".tsv");
  o.check(text == r.report.text() && tsv == r.report.tsv() &&
              tsv.rfind("mof\tmethod\tdelta_e_kcal_mol\t", 0) == 0,
          "report written as aligned text and TSV");
  const auto again = workflow::run_pipeline(config);
  o.check(again.report.text() == r.report.text(),
          "rerun produces a byte-identical report");
  return o;
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "telescoping identities", 1.0, telescoping},
      {2, "DMET mean-field consistency", 60.0, mean_field_consistency},
      {3, "eta convergence of EWF-MP2", 600.0, eta_convergence},
      {4, "solver oracles", 300.0, solver_oracles},
      {5, "table arithmetic", 1.0, table_arithmetic},
      {6, "carving and CIF suite", 30.0, carving_suite},
      {7, "non-reproducibility and DFT-injection pipeline", 60.0,
       synthetic_ledger_pipeline},
  };

  int failures = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.check(false, fmt::format("exception: {}", e.what()));
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    o.check(seconds < c.limit_seconds,
            fmt::format("runtime {:.3f} s (limit {:g} s)", seconds,
                        c.limit_seconds));
    fmt::print("criterion {}: {} - {} ({:.3f} s)\n", c.id,
               o.pass ? "PASS" : "FAIL", c.name, seconds);
    for (const auto &d : o.details)
      fmt::print("    {}\n", d);
    failures += o.pass ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", std::size(criteria) - failures,
             std::size(criteria));
  return failures == 0 ? 0 : 1;
}
