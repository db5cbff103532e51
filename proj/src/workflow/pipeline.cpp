#include <atomic>
#include <exception>
#include <filesystem>
#include <fmt/format.h>
#include <mofbind/cluster/carve.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/crystal/cif.h>
#include <mofbind/crystal/xyz.h>
#include <mofbind/ewf/embedding.h>
#include <mofbind/qm/mo_integrals.h>
#include <mofbind/workflow/cache.h>
#include <mofbind/workflow/pipeline.h>
#include <set>
#include <thread>

namespace mofbind::workflow {

namespace fs = std::filesystem;
using cluster::Cluster;
using cluster::Role;

namespace {

bool is_metal(const std::string &symbol) { return element(symbol).metal; }

std::optional<std::size_t> nearest_metal(const Cluster &c, const Vec3 &site) {
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!is_metal(c.atoms[i].element))
      continue;
    const double d = (c.atoms[i].position - site).norm();
    if (!best || d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

/// Position of the CO2 atom closest to any metal of `atoms`.
Vec3 adsorption_site(const crystal::AtomCollection &co2,
                     const std::vector<Vec3> &metals) {
  if (metals.empty())
    return co2.atoms.front().position;
  Vec3 site = co2.atoms.front().position;
  double best = std::numeric_limits<double>::infinity();
  for (const auto &a : co2.atoms)
    for (const auto &m : metals)
      if (const double d = (a.position - m).norm(); d < best) {
        best = d;
        site = a.position;
      }
  return site;
}

Cluster with_co2(Cluster c, const crystal::AtomCollection &co2) {
  c.add_molecule(co2, {Role::CO2, Role::Mobile});
  return c;
}

std::string calc_id(SystemTag s, Tier t, Level l) {
  return fmt::format("{}/{}/{}", to_string(s), to_string(t), to_string(l));
}

/// HL close set for the small-tier systems; nullopt means every atom.
std::optional<std::vector<std::size_t>>
close_atoms_for(const PipelineConfig &config, const Cluster &complex_small,
                std::size_t n_atoms) {
  const auto spec = text::lower(text::trim(config.close_atoms));
  if (spec == "all")
    return std::nullopt;
  std::set<std::size_t> selected;
  if (spec == "auto") {
    const auto co2 = complex_small.indices_with(Role::CO2);
    std::optional<std::size_t> metal;
    double best = std::numeric_limits<double>::infinity();
    for (auto j : co2)
      if (auto m = nearest_metal(complex_small, complex_small.atoms[j].position)) {
        const double d =
            (complex_small.atoms[*m].position - complex_small.atoms[j].position)
                .norm();
        if (d < best) {
          best = d;
          metal = m;
        }
      }
    if (!metal)
      return std::nullopt;
    selected = cluster::select_close_atoms(complex_small, *metal,
                                           config.carve.bond_scale);
  } else {
    for (auto part : text::split(spec, ',')) {
      const auto v = text::to_long(text::trim(part));
      if (!v || *v < 0)
        throw ParseError(
            fmt::format("[solvers] close_atoms: bad atom index '{}'", part));
      selected.insert(static_cast<std::size_t>(*v));
    }
    for (auto j : complex_small.indices_with(Role::CO2))
      selected.insert(j);
  }
  std::vector<std::size_t> out;
  for (auto i : selected) {
    if (i >= complex_small.size())
      throw ArgumentError(fmt::format(
          "close atom {} is outside the small cluster ({} atoms)", i,
          complex_small.size()));
    if (i < n_atoms)
      out.push_back(i);
  }
  if (out.empty())
    throw ArgumentError("the close-fragment atom set is empty");
  return out;
}

struct Job {
  std::size_t plan_index;
  const Cluster *geometry;
  SinglePointRequest request;
  std::string label;
};

} // namespace

int cluster_unpaired(const Cluster &cluster, const SpinTable &spins) {
  std::map<std::string, int> counts;
  for (const auto &a : cluster.atoms)
    if (is_metal(a.element))
      ++counts[a.element];
  int total = 0;
  for (const auto &[el, n] : counts)
    total += spin_assignment(el, n, spins);
  return total;
}

std::vector<SystemGeometry> prepare_systems(const PipelineConfig &config) {
  if (config.co2_pose.empty())
    throw ArgumentError("[structure] co2_pose is required");
  const auto co2 = crystal::read_xyz(config.co2_pose);

  Cluster small, large;
  if (config.mode == "crystal") {
    if (config.cif.empty())
      throw ArgumentError("[structure] cif is required in crystal mode");
    const auto supercell = crystal::build_supercell(
        crystal::read_cif(config.cif), config.supercell);
    std::vector<Vec3> metals;
    for (const auto &a : supercell.atoms)
      if (is_metal(a.element))
        metals.push_back(a.position);
    if (metals.empty())
      throw ArgumentError(
          fmt::format("{} contains no metal atoms", config.cif));
    const auto site = adsorption_site(co2, metals);
    std::optional<std::size_t> center;
    for (std::size_t i = 0; i < supercell.size(); ++i)
      if (is_metal(supercell.atoms[i].element) &&
          (!center || (supercell.atoms[i].position - site).norm() <
                          (supercell.atoms[*center].position - site).norm()))
        center = i;
    large = cluster::carve_large(supercell, supercell.atoms[*center].origin,
                                 config.carve);
    small = cluster::carve_small(supercell, site, config.carve);
  } else {
    if (config.small_cluster.empty() || config.large_cluster.empty())
      throw ArgumentError(
          "[structure] small and large cluster files are required in "
          "clusters mode");
    small = cluster::read_cluster_files(config.small_cluster);
    large = cluster::read_cluster_files(config.large_cluster);
  }

  for (auto *c : {&small, &large}) {
    const bool has_metal = std::any_of(
        c->atoms.begin(), c->atoms.end(),
        [](const auto &a) { return is_metal(a.element); });
    if (has_metal)
      c->n_unpaired = cluster_unpaired(*c, config.spins);
    c->validate_spin();
  }

  Cluster co2_cluster;
  co2_cluster.add_molecule(co2, {Role::CO2, Role::Mobile});
  co2_cluster.validate_spin();

  std::vector<SystemGeometry> out;
  out.push_back({SystemTag::MOF, Tier::Small, small});
  out.push_back({SystemTag::MOF, Tier::Large, large});
  out.push_back({SystemTag::Complex, Tier::Small, with_co2(small, co2)});
  out.push_back({SystemTag::Complex, Tier::Large, with_co2(large, co2)});
  out.push_back({SystemTag::CO2, Tier::Small, co2_cluster});
  return out;
}

bool internal_method(std::string_view method) {
  return method == "hf" || method == "mp2" || method == "ccsd" ||
         method == "ewf";
}

double single_point_energy(const Cluster &cluster,
                           const SinglePointRequest &request,
                           std::string_view label) {
  if (!internal_method(request.method))
    throw ArgumentError(fmt::format(
        "method '{}' cannot be computed internally; supply it through an "
        "external ledger",
        request.method));
  const auto mol = qm::Molecule::from_cluster(cluster);
  const std::set<std::string> elements(mol.elements.begin(),
                                       mol.elements.end());
  const auto basis =
      qm::build_basis(mol, qm::load_named_basis(request.basis, elements));
  const auto ints = qm::compute_integrals(mol, basis);
  const auto spin = qm::SpinState::from_charge(
      mol.nuclear_charge(), cluster.net_charge, cluster.n_unpaired);
  qm::ScfOptions scf;
  scf.mode = cluster.n_unpaired == 0 ? qm::SpinMode::Restricted
                                     : qm::SpinMode::Unrestricted;
  scf.max_iterations = request.max_scf_iterations;
  const auto mf = qm::run_scf(ints, spin, scf);
  if (!mf.converged)
    throw NumericalError(fmt::format(
        "SCF did not converge for {} after {} iterations (gradient {:.2e})",
        label, mf.iterations, mf.gradient_norm));
  if (request.method == "hf")
    return mf.energy;

  if (request.method == "ewf") {
    const ewf::EmbeddingSystem system(mol, basis, ints, mf);
    ewf::EmbeddingOptions opts;
    opts.minimal_basis = request.minimal_basis;
    ewf::Embedding embedding(system, opts);
    ewf::MultiLevelSpec spec;
    spec.eta_hl = request.eta_hl;
    spec.eta_ll = request.eta_ll;
    spec.hl_solver = request.hl_solver;
    spec.ll_solver = request.ll_solver;
    spec.close_atoms = request.close_atoms;
    try {
      return ewf::multilevel_energy(embedding, spec).energy;
    } catch (const NumericalError &e) {
      throw NumericalError(fmt::format("{}: {}", label, e.what()));
    }
  }

  const auto mo = qm::mo_transform(ints, mf);
  const auto window = corr::OrbitalWindow::full(mo);
  const auto sol = request.method == "mp2" ? corr::mp2(mo, window)
                                           : corr::ccsd(mo, window);
  if (!sol.converged)
    throw NumericalError(
        fmt::format("{} did not converge for {}", request.method, label));
  return mf.energy + sol.energy;
}

std::string_view to_string(PlanStatus status) {
  switch (status) {
  case PlanStatus::External:
    return "external";
  case PlanStatus::Ledger:
    return "ledger";
  case PlanStatus::Cache:
    return "cache";
  case PlanStatus::Compute:
    return "compute";
  }
  return "?";
}

std::string PipelineResult::plan_text() const {
  std::size_t w = 7;
  for (const auto &e : plan)
    w = std::max(w, e.row.calc_id.size());
  std::string out = fmt::format("{:<{}}  {:<8}  {}\n", "calc_id", w, "status",
                                "method/basis [eta]  hash");
  for (const auto &e : plan)
    out += fmt::format("{:<{}}  {:<8}  {}/{}{}  {}\n", e.row.calc_id, w,
                       to_string(e.status), e.row.method, e.row.basis,
                       e.row.eta ? fmt::format(" [eta={:g}]", *e.row.eta) : "",
                       e.row.hash.empty() ? "-" : e.row.hash.substr(0, 16));
  const auto n = [&](PlanStatus s) {
    return std::count_if(plan.begin(), plan.end(),
                         [&](const auto &e) { return e.status == s; });
  };
  out += fmt::format("{} calculations: {} external, {} ledger hits, {} cache "
                     "hits, {} to compute\n",
                     plan.size(), n(PlanStatus::External),
                     n(PlanStatus::Ledger), n(PlanStatus::Cache),
                     n(PlanStatus::Compute));
  return out;
}

PipelineResult run_pipeline(const PipelineConfig &config,
                            const PipelineOptions &options) {
  PipelineResult result;
  if (fs::exists(config.ledger_path))
    result.ledger = EnergyLedger::read(config.ledger_path);
  for (const auto &path : config.external_ledgers) {
    const auto external = EnergyLedger::read(path);
    for (auto row : external.rows()) {
      row.source = Source::External;
      row.hash.clear();
      result.ledger.upsert(std::move(row));
    }
  }

  // Needed rows: HL on the small tier for every system, LL on both tiers
  // for the MOF and the complex. CO2 is the same molecule at every tier.
  struct Need {
    SystemTag system;
    Tier tier;
    Level level;
  };
  const std::vector<Need> needs = {
      {SystemTag::MOF, Tier::Small, Level::HL},
      {SystemTag::MOF, Tier::Large, Level::LL},
      {SystemTag::MOF, Tier::Small, Level::LL},
      {SystemTag::Complex, Tier::Small, Level::HL},
      {SystemTag::Complex, Tier::Large, Level::LL},
      {SystemTag::Complex, Tier::Small, Level::LL},
      {SystemTag::CO2, Tier::Small, Level::HL},
  };

  const auto existing = [&](const LedgerRow &key) -> const LedgerRow * {
    for (const auto &r : result.ledger.rows())
      if (r.same_key(key))
        return &r;
    return nullptr;
  };

  for (const auto &n : needs) {
    PlanEntry e;
    e.row.calc_id = calc_id(n.system, n.tier, n.level);
    e.row.system = n.system;
    e.row.tier = n.tier;
    e.row.level = n.level;
    const bool hl = n.level == Level::HL;
    e.row.method = hl ? config.hl_description() : config.ll_description();
    e.row.eta = hl ? config.hl_eta() : std::nullopt;
    e.row.basis = hl ? config.hl_basis : config.ll_basis;
    e.row.source = Source::Internal;
    if (const auto *r = existing(e.row); r && r->source == Source::External) {
      e.row = *r;
      e.status = PlanStatus::External;
    }
    result.plan.push_back(std::move(e));
  }

  const bool need_geometry =
      std::any_of(result.plan.begin(), result.plan.end(), [](const auto &e) {
        return e.status != PlanStatus::External;
      });
  if (need_geometry && !config.internal) {
    std::vector<std::string> missing;
    for (const auto &e : result.plan)
      if (e.status != PlanStatus::External)
        missing.push_back(fmt::format("{} ({}/{})", e.row.calc_id, e.row.method,
                                      e.row.basis));
    throw ArgumentError(fmt::format(
        "internal solvers are disabled and the ledger lacks: {}",
        fmt::join(missing, ", ")));
  }

  std::vector<SystemGeometry> systems;
  std::optional<std::vector<std::size_t>> close_mof, close_complex;
  const EnergyCache cache(options.cache_dir);
  std::vector<Job> jobs;
  if (need_geometry) {
    systems = prepare_systems(config);
    const auto &mof_small = systems[0].cluster;
    const auto &complex_small = systems[2].cluster;
    close_mof = close_atoms_for(config, complex_small, mof_small.size());
    close_complex = close_atoms_for(config, complex_small, complex_small.size());

    for (std::size_t k = 0; k < result.plan.size(); ++k) {
      auto &e = result.plan[k];
      if (e.status == PlanStatus::External)
        continue;
      const auto &geom = *std::find_if(
          systems.begin(), systems.end(), [&](const SystemGeometry &g) {
            return g.system == e.row.system && g.tier == e.row.tier;
          });
      const bool hl = e.row.level == Level::HL;
      SinglePointRequest req;
      req.method = hl ? config.hl_method : config.ll_method;
      req.basis = e.row.basis;
      req.eta_hl = config.eta_hl;
      req.eta_ll = config.eta_ll;
      req.hl_solver = config.hl_solver;
      req.ll_solver = config.ll_solver;
      req.minimal_basis = config.minimal_basis;
      if (e.row.system == SystemTag::MOF)
        req.close_atoms = close_mof;
      else if (e.row.system == SystemTag::Complex)
        req.close_atoms = close_complex;

      CalculationInputs in;
      in.geometry = canonical_geometry(qm::Molecule::from_cluster(geom.cluster));
      in.basis = e.row.basis;
      in.method = e.row.method;
      if (req.method == "ewf" && req.close_atoms)
        in.method += fmt::format("[close={}]", fmt::join(*req.close_atoms, ","));
      in.eta = e.row.eta;
      in.charge = geom.cluster.net_charge;
      in.n_unpaired = geom.cluster.n_unpaired;
      e.row.hash = in.hash();

      if (const auto *r = existing(e.row)) {
        if (r->hash == e.row.hash) {
          e.row.energy = r->energy;
          e.status = PlanStatus::Ledger;
          continue;
        }
        if (options.strict)
          throw ArgumentError(fmt::format(
              "cache hash mismatch for {}: the ledger row was computed from "
              "inputs {} but the current inputs hash to {}",
              e.row.calc_id, r->hash, e.row.hash));
      }
      if (auto v = cache.load(e.row.hash, options.strict)) {
        e.row.energy = *v;
        e.status = PlanStatus::Cache;
        continue;
      }
      e.status = PlanStatus::Compute;
      jobs.push_back({k, &geom.cluster, req,
                      fmt::format("{} ({}-level, {}/{})",
                                  to_string(e.row.system),
                                  hl ? "high" : "low", req.method,
                                  e.row.basis)});
    }
  }

  for (const auto &e : result.plan) {
    if (e.status == PlanStatus::Ledger || e.status == PlanStatus::Cache)
      ++result.cache_hits;
    if (e.status == PlanStatus::Compute)
      ++result.computed;
  }
  if (options.dry_run)
    return result;

  for (const auto &job : jobs)
    if (!internal_method(job.request.method))
      throw ArgumentError(fmt::format(
          "no ledger energy for {} and method '{}' cannot be computed "
          "internally; supply it through an external ledger",
          result.plan[job.plan_index].row.calc_id, job.request.method));

  // Independent single points in parallel; results are collected and
  // written to the ledger in plan order.
  std::vector<double> energies(jobs.size(), 0.0);
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j; (j = next++) < jobs.size();) {
      try {
        energies[j] = single_point_energy(*jobs[j].geometry, jobs[j].request,
                                          jobs[j].label);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t)
      threads.emplace_back(worker);
    for (auto &t : threads)
      t.join();
  }
  for (auto &err : errors)
    if (err)
      std::rethrow_exception(err);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    result.plan[jobs[j].plan_index].row.energy = energies[j];
    cache.store(result.plan[jobs[j].plan_index].row.hash, energies[j]);
  }

  EnergyLedger used;
  for (const auto &e : result.plan) {
    result.ledger.upsert(e.row);
    used.add(e.row);
  }

  const OniomSelection sel{config.hl_description(), config.hl_basis,
                           config.ll_description(), config.ll_basis};
  const auto method = fmt::format(
      "{}/{}{} : {}/{}", sel.hl_method, sel.hl_basis,
      config.hl_eta() ? fmt::format(" eta={:g}", *config.hl_eta()) : "",
      sel.ll_method, sel.ll_basis);
  const ComposedEnergy complex{oniom_compose(used, SystemTag::Complex, sel),
                               method};
  const ComposedEnergy mof{oniom_compose(used, SystemTag::MOF, sel), method};
  const ComposedEnergy co2{oniom_compose(used, SystemTag::CO2, sel), method};

  BindingRow row;
  row.mof = config.name.empty() ? std::string("MOF") : config.name;
  row.method = method;
  row.delta_e = binding_energy(complex, mof, co2);
  std::vector<std::string> notes;
  const auto refs = load_reference_dataset(options.reference_path);
  const auto ref = std::find_if(refs.begin(), refs.end(), [&](const auto &r) {
    return r.mof == row.mof || r.core_mof_id == row.mof;
  });
  if (ref != refs.end())
    row.qs = ref->qs;
  else
    notes.push_back(fmt::format("no reference Qs for '{}'", row.mof));
  result.report = make_report({row});
  const auto n_external =
      std::count_if(result.plan.begin(), result.plan.end(), [](const auto &e) {
        return e.status == PlanStatus::External;
      });
  notes.push_back(fmt::format(
      "composed from {} internal and {} external energies",
      result.plan.size() - n_external, n_external));
  result.report.notes = std::move(notes);

  if (options.write_files) {
    const auto ensure_parent = [](const std::string &p) {
      if (const auto dir = fs::path(p).parent_path(); !dir.empty())
        fs::create_directories(dir);
    };
    ensure_parent(config.ledger_path);
    result.ledger.write(config.ledger_path);
    ensure_parent(config.report_prefix);
    text::write_file(config.report_prefix + ".txt", result.report.text());
    text::write_file(config.report_prefix + ".tsv", result.report.tsv());
  }
  return result;
}

} // namespace mofbind::workflow
