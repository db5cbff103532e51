#include <algorithm>
#include <cmath>
#include <fmt/core.h>
#include <map>
#include <mofbind/core/data.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/workflow/reference.h>

namespace mofbind::workflow {

namespace {

/// Data rows of a tab-separated file with a header line and '#' comments.
std::vector<std::vector<std::string_view>>
read_table(std::string_view text, std::size_t n_fields, std::string_view what) {
  std::vector<std::vector<std::string_view>> rows;
  bool header = false;
  for (auto line : text::split_lines(text)) {
    if (text::trim(line).empty() || line.front() == '#')
      continue;
    if (!header) {
      header = true;
      continue;
    }
    auto f = text::split(line, '\t');
    if (f.size() != n_fields)
      throw ParseError(fmt::format("{}: expected {} fields in '{}'", what,
                                   n_fields, line));
    rows.push_back(std::move(f));
  }
  return rows;
}

double number(std::string_view s, std::string_view what) {
  const auto v = text::to_double(s);
  if (!v)
    throw ParseError(fmt::format("{}: bad number '{}'", what, s));
  return *v;
}

} // namespace

std::vector<ReferenceRecord> load_reference_dataset(const std::string &path) {
  const auto file =
      path.empty() ? data_path("reference/mof74_adsorption.tsv") : path;
  const auto content = text::read_file(file);
  std::vector<ReferenceRecord> out;
  for (const auto &f : read_table(content, 6, file)) {
    ReferenceRecord r;
    r.mof = std::string(f[0]);
    r.core_mof_id = std::string(f[1]);
    r.metal = std::string(f[2]);
    r.co2_uptake = number(f[3], file);
    r.qs = number(f[4], file);
    r.unpaired_per_metal = static_cast<int>(number(f[5], file));
    if (!(r.qs > 0.0) || r.co2_uptake < 0.0)
      throw ParseError(fmt::format("{}: invalid Qs or uptake for {}", file,
                                   r.mof));
    out.push_back(std::move(r));
  }
  return out;
}

const ReferenceRecord &find_reference(const std::vector<ReferenceRecord> &refs,
                                      std::string_view key) {
  for (const auto &r : refs)
    if (r.mof == key || r.core_mof_id == key)
      return r;
  throw ArgumentError(fmt::format("no reference record for '{}'", key));
}

SpinTable spin_table(const std::vector<ReferenceRecord> &refs) {
  SpinTable table = default_spin_table();
  for (const auto &r : refs)
    table[r.metal] = r.unpaired_per_metal;
  return table;
}

std::vector<PublishedColumn> load_published_columns(const std::string &path) {
  const auto file =
      path.empty() ? data_path("reference/published_binding_energies.tsv")
                   : path;
  const auto content = text::read_file(file);
  std::vector<PublishedColumn> out;
  for (const auto &f : read_table(content, 5, file)) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto &c) {
      return c.column == f[1];
    });
    if (it == out.end()) {
      out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]),
                     {}, NAN});
      it = std::prev(out.end());
    }
    if (f[3] == "printed_mean")
      it->printed_mean = number(f[4], file);
    else
      it->values.emplace_back(std::string(f[3]), number(f[4], file));
  }
  for (const auto &c : out)
    if (std::isnan(c.printed_mean) || c.values.empty())
      throw ParseError(
          fmt::format("{}: column {} lacks values or a printed mean", file,
                      c.column));
  return out;
}

ColumnCheck check_column(const PublishedColumn &column,
                         const std::vector<ReferenceRecord> &refs,
                         double tolerance) {
  std::vector<std::pair<double, double>> rows;
  for (const auto &[mof, de] : column.values)
    rows.emplace_back(de, find_reference(refs, mof).qs);
  ColumnCheck out;
  out.column = column.column;
  out.printed = column.printed_mean;
  out.recomputed = error_metrics(rows);
  out.reproduced = std::abs(out.recomputed - out.printed) <= tolerance;
  return out;
}

BindingReport make_report(std::vector<BindingRow> rows) {
  BindingReport report;
  std::vector<std::pair<double, double>> metric_rows;
  for (auto &r : rows) {
    if (r.qs) {
      r.deviation = std::abs(std::abs(r.delta_e) - *r.qs);
      metric_rows.emplace_back(r.delta_e, *r.qs);
    }
  }
  if (!metric_rows.empty())
    report.mean_deviation = error_metrics(metric_rows);
  report.rows = std::move(rows);
  return report;
}

std::string BindingReport::text() const {
  std::size_t w_mof = 3, w_method = 6;
  for (const auto &r : rows) {
    w_mof = std::max(w_mof, r.mof.size());
    w_method = std::max(w_method, r.method.size());
  }
  const auto opt = [](const std::optional<double> &v, int prec) {
    return v ? fmt::format("{:.{}f}", *v, prec) : std::string("-");
  };
  std::string out = fmt::format("{:<{}}  {:<{}}  {:>10}  {:>8}  {:>10}\n",
                                "MOF", w_mof, "method", w_method,
                                "dE", "Qs", "||dE|-Qs|");
  for (const auto &r : rows)
    out += fmt::format("{:<{}}  {:<{}}  {:>10.3f}  {:>8}  {:>10}\n", r.mof,
                       w_mof, r.method, w_method, r.delta_e, opt(r.qs, 2),
                       opt(r.deviation, 3));
  out += fmt::format("mean ||dE|-Qs| (kcal/mol): {}\n", opt(mean_deviation, 3));
  for (const auto &n : notes)
    out += fmt::format("note: {}\n", n);
  return out;
}

std::string BindingReport::tsv() const {
  const auto opt = [](const std::optional<double> &v) {
    return v ? fmt::format("{:.6f}", *v) : std::string("-");
  };
  std::string out =
      "mof\tmethod\tdelta_e_kcal_mol\tqs_kcal_mol\tdeviation_kcal_mol\n";
  for (const auto &r : rows)
    out += fmt::format("{}\t{}\t{:.6f}\t{}\t{}\n", r.mof, r.method, r.delta_e,
                       opt(r.qs), opt(r.deviation));
  out += fmt::format("mean\t-\t-\t-\t{}\n", opt(mean_deviation));
  return out;
}

} // namespace mofbind::workflow
