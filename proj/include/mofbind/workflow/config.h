#pragma once
#include <mofbind/cluster/carve.h>
#include <mofbind/corr/correlation.h>
#include <mofbind/workflow/composition.h>
#include <optional>
#include <string>
#include <vector>

namespace mofbind::workflow {

/// Pipeline configuration, read from an INI file with sections
/// [structure], [carve], [basis], [solvers], [spins], [ledger].
/// Relative paths are resolved against the config file's directory.
struct PipelineConfig {
  // [structure]
  std::string name;      // MOF name or CoRE-MOF id for the Qs lookup
  std::string mode{"clusters"}; // "clusters" | "crystal"
  std::string cif;
  IVec3 supercell{3, 3, 3};
  std::string co2_pose; // XYZ, Angstrom, same frame as the clusters
  std::string small_cluster; // cluster file prefix (clusters mode)
  std::string large_cluster;

  // [carve]
  cluster::CarveConfig carve;

  // [basis]
  std::string hl_basis{"sto-3g"};
  std::string ll_basis{"sto-3g"};

  // [solvers]
  bool internal{true};
  std::string hl_method{"ewf"}; // ewf | hf | mp2 | ccsd | any external name
  std::string ll_method{"hf"};  // hf | mp2 | any external name
  double eta_hl{1e-5};
  double eta_ll{1e-7};
  corr::Solver hl_solver{corr::Solver::CCSD};
  corr::Solver ll_solver{corr::Solver::MP2};
  /// "all", "auto" (binding metal and atoms within two bonds, plus CO2) or
  /// a comma-separated list of atom indices of the small cluster.
  std::string close_atoms{"auto"};
  std::string minimal_basis{"sto-3g"};

  // [spins]
  SpinTable spins{default_spin_table()};

  // [ledger]
  std::string ledger_path{"ledger.tsv"};
  std::vector<std::string> external_ledgers;
  std::string report_prefix{"report"};

  /// Method descriptions as written to the ledger.
  std::string hl_description() const;
  std::string ll_description() const;
  std::optional<double> hl_eta() const;
};

PipelineConfig parse_config(std::string_view ini_text,
                            const std::string &base_dir = ".");
PipelineConfig read_config(const std::string &path);

} // namespace mofbind::workflow
