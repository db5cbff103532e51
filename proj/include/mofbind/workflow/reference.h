#pragma once
#include <mofbind/workflow/composition.h>
#include <optional>
#include <string>
#include <vector>

namespace mofbind::workflow {

struct ReferenceRecord {
  std::string mof;
  std::string core_mof_id;
  std::string metal;
  double co2_uptake{0.0}; // mmol/g, metadata only
  double qs{0.0};         // kcal/mol
  int unpaired_per_metal{0};
};

/// Reads data/reference/mof74_adsorption.tsv (or `path`).
std::vector<ReferenceRecord> load_reference_dataset(const std::string &path = {});
/// Lookup by MOF name or CoRE-MOF id.
const ReferenceRecord &find_reference(const std::vector<ReferenceRecord> &refs,
                                      std::string_view key);
/// Spin table built from the dataset's metal column.
SpinTable spin_table(const std::vector<ReferenceRecord> &refs);

/// A published column of binding energies with its printed mean deviation.
struct PublishedColumn {
  std::string table;
  std::string column;
  std::string high_level;
  std::vector<std::pair<std::string, double>> values; // (mof, dE kcal/mol)
  double printed_mean{0.0};
};

std::vector<PublishedColumn> load_published_columns(const std::string &path = {});

struct ColumnCheck {
  std::string column;
  double printed{0.0};
  double recomputed{0.0};
  bool reproduced{false};
};

/// Recompute a column's mean deviation against the reference Qs values;
/// `reproduced` when it agrees with the printed mean within `tolerance`.
ColumnCheck check_column(const PublishedColumn &column,
                         const std::vector<ReferenceRecord> &refs,
                         double tolerance = 0.05);

struct BindingRow {
  std::string mof;
  std::string method;
  double delta_e{0.0}; // kcal/mol
  std::optional<double> qs;
  std::optional<double> deviation; // ||dE| - Qs|
};

struct BindingReport {
  std::vector<BindingRow> rows;
  std::optional<double> mean_deviation;
  std::vector<std::string> notes;

  std::string text() const;
  std::string tsv() const;
};

/// Fills deviations and the mean from the rows that have a Qs.
BindingReport make_report(std::vector<BindingRow> rows);

} // namespace mofbind::workflow
