#include <CLI11.hpp>
#include <filesystem>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/core/units.h>
#include <mofbind/crystal/xyz.h>
#include <mofbind/ewf/embedding.h>
#include <mofbind/qm/mo_integrals.h>
#include <mofbind/workflow/pipeline.h>
#include <set>

using namespace mofbind;
using namespace mofbind::workflow;

namespace {

struct Globals {
  std::string config;
  std::string cache_dir;
  bool strict{false};
  bool dry_run{false};
  int jobs{1};
};

struct SystemInput {
  std::string xyz;
  std::string cluster;
  std::optional<int> charge;
  std::optional<int> unpaired;
  std::string basis{"sto-3g"};

  void add_to(CLI::App *cmd) {
    auto *x = cmd->add_option("--xyz", xyz, "Geometry in XYZ format (Angstrom)")
                  ->check(CLI::ExistingFile);
    auto *c = cmd->add_option("--cluster", cluster,
                              "Cluster file prefix (.xyz + .atoms.tsv)");
    x->excludes(c);
    cmd->add_option("--charge", charge, "Net charge");
    cmd->add_option("--unpaired", unpaired, "Unpaired electrons");
    cmd->add_option("--basis", basis, "Basis set name or .gbs path");
  }

  cluster::Cluster load() const {
    cluster::Cluster c;
    if (!cluster.empty())
      c = cluster::read_cluster_files(cluster);
    else if (!xyz.empty())
      c.add_molecule(crystal::read_xyz(xyz), {});
    else
      throw ArgumentError("give a geometry with --xyz or --cluster");
    if (charge)
      c.net_charge = *charge;
    if (unpaired)
      c.n_unpaired = *unpaired;
    c.validate_spin();
    return c;
  }
};

/// Basis, integrals and converged SCF of one system.
struct Prepared {
  qm::Molecule mol;
  qm::MolecularBasis basis;
  qm::IntegralSet ints;
  qm::MeanFieldResult mf;
};

Prepared prepare(const cluster::Cluster &c, const std::string &basis_name) {
  Prepared p;
  p.mol = qm::Molecule::from_cluster(c);
  const std::set<std::string> els(p.mol.elements.begin(), p.mol.elements.end());
  p.basis = qm::build_basis(p.mol, qm::load_named_basis(basis_name, els));
  p.ints = qm::compute_integrals(p.mol, p.basis);
  for (const auto &w : p.ints.warnings)
    fmt::print(stderr, "warning: {}\n", w);
  qm::ScfOptions opts;
  opts.mode = c.n_unpaired ? qm::SpinMode::Unrestricted
                           : qm::SpinMode::Restricted;
  p.mf = qm::run_scf(p.ints,
                     qm::SpinState::from_charge(p.mol.nuclear_charge(),
                                                c.net_charge, c.n_unpaired),
                     opts);
  fmt::print("{} SCF: E = {:.12f} Eh ({} iterations{})\n",
             p.mf.mode == qm::SpinMode::Restricted ? "RHF" : "UHF",
             p.mf.energy, p.mf.iterations,
             p.mf.converged ? "" : ", NOT CONVERGED");
  if (!p.mf.converged)
    throw NumericalError("SCF did not converge");
  return p;
}

PipelineConfig load_config(const Globals &g) {
  if (g.config.empty())
    throw ArgumentError("this command needs --config");
  return read_config(g.config);
}

std::vector<std::size_t> parse_atoms(const std::string &list) {
  std::vector<std::size_t> out;
  for (auto part : text::split(list, ',')) {
    const auto v = text::to_long(text::trim(part));
    if (!v || *v < 0)
      throw ArgumentError(fmt::format("bad atom index '{}'", part));
    out.push_back(static_cast<std::size_t>(*v));
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cluster carving, embedded correlation and CO2 binding-energy "
               "composition for metal-organic frameworks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline configuration (INI)");
  app.add_option("--cache-dir", g.cache_dir, "Content-addressed energy cache");
  app.add_flag("--strict", g.strict, "Treat cache hash mismatches as errors");
  app.add_flag("--dry-run", g.dry_run, "Print the plan without computing");
  app.add_option("--jobs", g.jobs, "Parallel calculations")
      ->check(CLI::PositiveNumber);

  // carve
  auto *carve = app.add_subcommand("carve", "Carve small and large clusters "
                                            "from a CIF around a CO2 pose");
  std::string carve_out{"cluster"};
  carve->add_option("--out", carve_out, "Output prefix")->capture_default_str();

  // scf / mp2
  auto *scf = app.add_subcommand("scf", "Hartree-Fock single point");
  SystemInput scf_in;
  scf_in.add_to(scf);
  auto *mp2 = app.add_subcommand("mp2", "Canonical MP2 single point");
  SystemInput mp2_in;
  mp2_in.add_to(mp2);
  int frozen_core = 0;
  mp2->add_option("--frozen-core", frozen_core,
                  "Lowest occupied orbitals per spin to freeze");

  // embed
  auto *embed = app.add_subcommand("embed", "Multilevel embedded correlation");
  SystemInput embed_in;
  embed_in.add_to(embed);
  double eta_hl = 1e-5, eta_ll = 1e-7;
  std::string hl_solver{"ccsd"}, ll_solver{"mp2"}, close, minimal{"sto-3g"};
  embed->add_option("--eta-hl", eta_hl, "Bath threshold of the high level");
  embed->add_option("--eta-ll", eta_ll, "Bath threshold of the low level");
  embed->add_option("--hl-solver", hl_solver, "mp2 | ccsd | fci");
  embed->add_option("--ll-solver", ll_solver, "mp2 | ccsd | fci");
  embed->add_option("--close", close,
                    "Comma-separated atoms treated at the high level");
  embed->add_option("--minimal-basis", minimal, "IAO reference basis");
  bool diagnostics = false;
  embed->add_flag("--diagnostics", diagnostics, "Print per-fragment table");

  // compose
  auto *compose = app.add_subcommand(
      "compose", "Compose binding energy from ledger rows");
  std::vector<std::string> ledgers;
  OniomSelection sel;
  std::string compose_name{"MOF"};
  compose->add_option("--ledger", ledgers, "Ledger file(s)")
      ->required()
      ->check(CLI::ExistingFile);
  compose->add_option("--hl-method", sel.hl_method);
  compose->add_option("--hl-basis", sel.hl_basis);
  compose->add_option("--ll-method", sel.ll_method);
  compose->add_option("--ll-basis", sel.ll_basis);
  compose->add_option("--name", compose_name, "MOF name for the Qs lookup");

  // report
  auto *report = app.add_subcommand(
      "report", "Recompute published mean deviations against Qs");
  std::string reference_path, published_path;
  report->add_option("--reference", reference_path, "Reference dataset TSV");
  report->add_option("--published", published_path,
                     "Published binding-energy columns TSV");

  // pipeline
  auto *pipeline = app.add_subcommand(
      "pipeline", "Run or load every energy and write ledger and report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*carve) {
      auto config = load_config(g);
      config.mode = "crystal";
      const auto systems = prepare_systems(config);
      for (std::size_t k : {0, 1}) {
        const auto &c = systems[k].cluster;
        const auto prefix =
            fmt::format("{}_{}", carve_out, to_string(systems[k].tier));
        cluster::write_cluster_files(prefix, c);
        fmt::print("{}: {} atoms, charge {}, {} unpaired electrons\n", prefix,
                   c.size(), c.net_charge, c.n_unpaired);
      }
    } else if (*scf) {
      prepare(scf_in.load(), scf_in.basis);
    } else if (*mp2) {
      const auto p = prepare(mp2_in.load(), mp2_in.basis);
      const auto mo = qm::mo_transform(p.ints, p.mf);
      const auto w = frozen_core > 0
                         ? corr::OrbitalWindow::frozen_core(mo, frozen_core)
                         : corr::OrbitalWindow::full(mo);
      const auto sol = corr::mp2(mo, w);
      fmt::print("MP2 correlation: {:.12f} Eh\nMP2 total: {:.12f} Eh\n",
                 sol.energy, p.mf.energy + sol.energy);
    } else if (*embed) {
      const auto p = prepare(embed_in.load(), embed_in.basis);
      const ewf::EmbeddingSystem system(p.mol, p.basis, p.ints, p.mf);
      ewf::EmbeddingOptions opts;
      opts.minimal_basis = minimal;
      opts.jobs = g.jobs;
      ewf::Embedding embedding(system, opts);
      ewf::MultiLevelSpec spec;
      spec.eta_hl = eta_hl;
      spec.eta_ll = eta_ll;
      spec.hl_solver = corr::solver_from_string(hl_solver);
      spec.ll_solver = corr::solver_from_string(ll_solver);
      if (!close.empty())
        spec.close_atoms = parse_atoms(close);
      const auto r = ewf::multilevel_energy(embedding, spec);
      fmt::print("E(HF)              {:18.12f}\n"
                 "E(HL, eta_hl)      {:18.12f}\n"
                 "E(LL, eta_ll)      {:18.12f}\n"
                 "E(LL, eta_hl)      {:18.12f}\n"
                 "E(total)           {:18.12f}\n",
                 r.hf, r.hl, r.ll, r.ll_at_hl, r.energy);
      if (diagnostics)
        fmt::print("\n{}", ewf::diagnostics_table(embedding.history()));
    } else if (*compose) {
      EnergyLedger ledger;
      for (const auto &path : ledgers)
        ledger.merge(EnergyLedger::read(path));
      const auto e_complex = oniom_compose(ledger, SystemTag::Complex, sel);
      const auto e_mof = oniom_compose(ledger, SystemTag::MOF, sel);
      const auto e_co2 = oniom_compose(ledger, SystemTag::CO2, sel);
      fmt::print("E(MOF+CO2) {:.10f} Eh\nE(MOF)     {:.10f} Eh\n"
                 "E(CO2)     {:.10f} Eh\n",
                 e_complex, e_mof, e_co2);
      BindingRow row{compose_name, "composed",
                     binding_energy(e_complex, e_mof, e_co2), {}, {}};
      const auto refs = load_reference_dataset();
      for (const auto &r : refs)
        if (r.mof == compose_name || r.core_mof_id == compose_name)
          row.qs = r.qs;
      fmt::print("\n{}", make_report({row}).text());
    } else if (*report) {
      const auto refs = load_reference_dataset(reference_path);
      fmt::print("{:<14} {:>9} {:>11}  {}\n", "column", "printed",
                 "recomputed", "status");
      for (const auto &col : load_published_columns(published_path)) {
        const auto c = check_column(col, refs);
        fmt::print("{:<14} {:>9.4f} {:>11.4f}  {}\n", c.column, c.printed,
                   c.recomputed,
                   c.reproduced ? "reproduced" : "DISCREPANCY (flagged)");
      }
    } else if (*pipeline) {
      const auto config = load_config(g);
      PipelineOptions opts;
      opts.cache_dir = g.cache_dir;
      opts.strict = g.strict;
      opts.dry_run = g.dry_run;
      opts.jobs = g.jobs;
      const auto r = run_pipeline(config, opts);
      fmt::print("{}", r.plan_text());
      if (!g.dry_run) {
        fmt::print("\n{}", r.report.text());
        fmt::print("ledger: {}\nreport: {}.txt, {}.tsv\n", config.ledger_path,
                   config.report_prefix, config.report_prefix);
      }
    }
  } catch (const std::exception &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
