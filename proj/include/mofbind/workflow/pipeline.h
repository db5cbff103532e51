#pragma once
#include <mofbind/cluster/cluster.h>
#include <mofbind/workflow/config.h>
#include <mofbind/workflow/ledger.h>
#include <mofbind/workflow/reference.h>
#include <optional>
#include <string>
#include <vector>

namespace mofbind::workflow {

struct PipelineOptions {
  std::string cache_dir; // empty: no cache directory
  bool strict{false};
  bool dry_run{false};
  int jobs{1};
  std::string reference_path; // empty: shipped reference dataset
  bool write_files{true};
};

/// Geometry of one system at one cluster tier, charge and spin set.
struct SystemGeometry {
  SystemTag system{SystemTag::MOF};
  Tier tier{Tier::Small};
  cluster::Cluster cluster;
};

/// MOF and MOF+CO2 at the small and large tiers, then CO2, with spins from
/// the config's spin table.
std::vector<SystemGeometry> prepare_systems(const PipelineConfig &config);

/// Total unpaired electrons of a cluster from its metal atoms.
int cluster_unpaired(const cluster::Cluster &cluster, const SpinTable &spins);

/// Internal single point: "hf", "mp2", "ccsd" (canonical) or "ewf"
/// (multilevel embedding with the config's solver settings). Throws
/// NumericalError naming `label` when the SCF does not converge.
struct SinglePointRequest {
  std::string method;
  std::string basis;
  double eta_hl{1e-5};
  double eta_ll{1e-7};
  corr::Solver hl_solver{corr::Solver::CCSD};
  corr::Solver ll_solver{corr::Solver::MP2};
  std::optional<std::vector<std::size_t>> close_atoms;
  std::string minimal_basis{"sto-3g"};
  int max_scf_iterations{200};
};
double single_point_energy(const cluster::Cluster &cluster,
                           const SinglePointRequest &request,
                           std::string_view label = "system");

bool internal_method(std::string_view method);

enum class PlanStatus { External, Ledger, Cache, Compute };
std::string_view to_string(PlanStatus status);

struct PlanEntry {
  LedgerRow row; // key fields, hash and (once known) energy
  PlanStatus status{PlanStatus::Compute};
};

struct PipelineResult {
  std::vector<PlanEntry> plan;
  EnergyLedger ledger; // everything persisted, including earlier rows
  BindingReport report;
  int computed{0};
  int cache_hits{0};

  std::string plan_text() const;
};

/// Runs or loads every energy needed by the binding-energy composition,
/// records them in the ledger and composes the report. With dry_run only
/// the plan is produced.
PipelineResult run_pipeline(const PipelineConfig &config,
                            const PipelineOptions &options = {});

} // namespace mofbind::workflow
