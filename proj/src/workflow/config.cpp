#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <filesystem>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/workflow/config.h>
#include <set>
#include <sstream>

namespace mofbind::workflow {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKeys = {
    {"structure",
     {"name", "mode", "cif", "supercell", "co2_pose", "small", "large"}},
    {"carve",
     {"radius", "n_small_metals", "n_medium_metals", "bond_scale",
      "metal_charge", "linker_heavy_atom_rule"}},
    {"basis", {"hl", "ll"}},
    {"solvers",
     {"internal", "hl_method", "ll_method", "eta_hl", "eta_ll", "hl_solver",
      "ll_solver", "close_atoms", "minimal_basis"}},
    {"spins", {}},
    {"ledger", {"path", "external", "report"}},
};

class Reader {
public:
  Reader(const pt::ptree &tree, std::string base)
      : m_tree(tree), m_base(std::move(base)) {}

  std::optional<std::string> get(const std::string &section,
                                 const std::string &key) const {
    const auto s = m_tree.get_child_optional(section);
    if (!s)
      return std::nullopt;
    const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v)
      return std::nullopt;
    return std::string(text::trim(*v));
  }

  void string(const std::string &section, const std::string &key,
              std::string &out) const {
    if (auto v = get(section, key))
      out = *v;
  }

  void path(const std::string &section, const std::string &key,
            std::string &out) const {
    if (auto v = get(section, key))
      out = resolve(*v);
  }

  std::string resolve(const std::string &p) const {
    if (p.empty() || fs::path(p).is_absolute())
      return p;
    return (fs::path(m_base) / p).lexically_normal().string();
  }

  template <typename T>
  void number(const std::string &section, const std::string &key,
              T &out) const {
    const auto v = get(section, key);
    if (!v)
      return;
    if constexpr (std::is_integral_v<T>) {
      const auto n = text::to_long(*v);
      if (!n)
        throw ParseError(
            fmt::format("[{}] {}: expected an integer, got '{}'", section, key,
                        *v));
      out = static_cast<T>(*n);
    } else {
      const auto x = text::to_double(*v);
      if (!x)
        throw ParseError(fmt::format("[{}] {}: expected a number, got '{}'",
                                     section, key, *v));
      out = *x;
    }
  }

  void boolean(const std::string &section, const std::string &key,
               bool &out) const {
    const auto v = get(section, key);
    if (!v)
      return;
    const auto s = text::lower(*v);
    if (s == "true" || s == "yes" || s == "1" || s == "on")
      out = true;
    else if (s == "false" || s == "no" || s == "0" || s == "off")
      out = false;
    else
      throw ParseError(
          fmt::format("[{}] {}: expected true or false, got '{}'", section, key,
                      *v));
  }

private:
  const pt::ptree &m_tree;
  std::string m_base;
};

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  for (auto part : text::split(s, ','))
    if (auto t = text::trim(part); !t.empty())
      out.emplace_back(t);
  return out;
}

} // namespace

std::string PipelineConfig::hl_description() const {
  if (hl_method == "ewf")
    return fmt::format("ewf-{}/{}(eta_ll={:g},iao={})",
                       corr::to_string(hl_solver), corr::to_string(ll_solver),
                       eta_ll, minimal_basis);
  return hl_method;
}

std::string PipelineConfig::ll_description() const { return ll_method; }

std::optional<double> PipelineConfig::hl_eta() const {
  if (hl_method == "ewf")
    return eta_hl;
  return std::nullopt;
}

PipelineConfig parse_config(std::string_view ini_text,
                            const std::string &base_dir) {
  pt::ptree tree;
  std::istringstream is{std::string(ini_text)};
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ParseError(fmt::format("config: {}", e.message()));
  }

  for (const auto &[section, body] : tree) {
    const auto known = kKeys.find(section);
    if (known == kKeys.end())
      throw ParseError(fmt::format("config: unknown section [{}]", section));
    if (body.empty() && !body.data().empty())
      throw ParseError(
          fmt::format("config: key '{}' outside of any section", section));
    if (section == "spins")
      continue;
    for (const auto &kv : body)
      if (!known->second.count(kv.first))
        throw ParseError(
            fmt::format("config: unknown key '{}' in [{}]", kv.first, section));
  }

  const Reader r(tree, base_dir);
  PipelineConfig c;

  r.string("structure", "name", c.name);
  r.string("structure", "mode", c.mode);
  c.mode = text::lower(c.mode);
  r.path("structure", "cif", c.cif);
  r.path("structure", "co2_pose", c.co2_pose);
  r.path("structure", "small", c.small_cluster);
  r.path("structure", "large", c.large_cluster);
  if (auto v = r.get("structure", "supercell")) {
    std::string s(*v);
    std::replace(s.begin(), s.end(), ',', ' ');
    const auto f = text::split_whitespace(s);
    const auto bad = [&] {
      return ParseError(fmt::format(
          "[structure] supercell: expected three positive integers, got '{}'",
          *v));
    };
    if (f.size() != 3)
      throw bad();
    for (int k = 0; k < 3; ++k) {
      const auto n = text::to_long(f[k]);
      if (!n || *n < 1)
        throw bad();
      c.supercell[k] = static_cast<int>(*n);
    }
  }

  r.number("carve", "radius", c.carve.radius);
  r.number("carve", "n_small_metals", c.carve.n_small_metals);
  r.number("carve", "n_medium_metals", c.carve.n_medium_metals);
  r.number("carve", "bond_scale", c.carve.bond_scale);
  r.number("carve", "metal_charge", c.carve.metal_charge);
  r.boolean("carve", "linker_heavy_atom_rule", c.carve.linker_heavy_atom_rule);

  r.string("basis", "hl", c.hl_basis);
  r.string("basis", "ll", c.ll_basis);
  c.hl_basis = text::lower(c.hl_basis);
  c.ll_basis = text::lower(c.ll_basis);

  r.boolean("solvers", "internal", c.internal);
  r.string("solvers", "hl_method", c.hl_method);
  r.string("solvers", "ll_method", c.ll_method);
  c.hl_method = text::lower(c.hl_method);
  c.ll_method = text::lower(c.ll_method);
  r.number("solvers", "eta_hl", c.eta_hl);
  r.number("solvers", "eta_ll", c.eta_ll);
  if (auto v = r.get("solvers", "hl_solver"))
    c.hl_solver = corr::solver_from_string(text::lower(*v));
  if (auto v = r.get("solvers", "ll_solver"))
    c.ll_solver = corr::solver_from_string(text::lower(*v));
  r.string("solvers", "close_atoms", c.close_atoms);
  r.string("solvers", "minimal_basis", c.minimal_basis);
  c.minimal_basis = text::lower(c.minimal_basis);

  if (const auto spins = tree.get_child_optional("spins")) {
    for (const auto &kv : *spins) {
      const auto n = text::to_long(text::trim(kv.second.data()));
      if (!n || *n < 0)
        throw ParseError(fmt::format(
            "[spins] {}: expected a non-negative integer, got '{}'", kv.first,
            kv.second.data()));
      c.spins[kv.first] = static_cast<int>(*n);
    }
  }
  for (const auto &[metal, n] : c.spins)
    c.carve.unpaired_per_metal[metal] = n;

  r.path("ledger", "path", c.ledger_path);
  c.ledger_path = r.resolve(c.ledger_path);
  if (auto v = r.get("ledger", "external"))
    for (const auto &p : split_list(*v))
      c.external_ledgers.push_back(r.resolve(p));
  r.string("ledger", "report", c.report_prefix);
  c.report_prefix = r.resolve(c.report_prefix);

  if (c.mode != "clusters" && c.mode != "crystal")
    throw ParseError(fmt::format(
        "[structure] mode: expected 'clusters' or 'crystal', got '{}'",
        c.mode));
  if (c.hl_method == "ewf" && !(c.eta_hl >= c.eta_ll && c.eta_ll > 0.0))
    throw ParseError(fmt::format(
        "[solvers] requires eta_hl >= eta_ll > 0 (got {:g} and {:g})",
        c.eta_hl, c.eta_ll));
  if (c.hl_method.empty() || c.ll_method.empty())
    throw ParseError("[solvers] hl_method and ll_method must not be empty");
  c.carve.validate();
  return c;
}

PipelineConfig read_config(const std::string &path) {
  const auto base = fs::absolute(path).parent_path().string();
  return parse_config(text::read_file(path), base);
}

} // namespace mofbind::workflow
