#include <cmath>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/workflow/composition.h>
#include <mofbind/workflow/ledger.h>

namespace mofbind::workflow {

namespace {

constexpr std::string_view kHeader =
    "calc_id\tsystem\ttier\tlevel\tmethod\teta\tbasis\tenergy_hartree\tsource\t"
    "hash";

template <typename E, std::size_t N>
E lookup(const std::pair<E, std::string_view> (&table)[N], std::string_view s,
         std::string_view what) {
  for (auto [value, name] : table)
    if (name == s)
      return value;
  throw ParseError(fmt::format("unknown {} '{}'", what, s));
}

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N],
                         E v) {
  for (auto [value, name] : table)
    if (value == v)
      return name;
  return "?";
}

constexpr std::pair<SystemTag, std::string_view> kSystems[] = {
    {SystemTag::MOF, "MOF"}, {SystemTag::CO2, "CO2"},
    {SystemTag::Complex, "MOF+CO2"}};
constexpr std::pair<Tier, std::string_view> kTiers[] = {
    {Tier::Large, "large"}, {Tier::Medium, "medium"}, {Tier::Small, "small"}};
constexpr std::pair<Level, std::string_view> kLevels[] = {{Level::LL, "LL"},
                                                          {Level::HL, "HL"}};
constexpr std::pair<Source, std::string_view> kSources[] = {
    {Source::Internal, "internal"}, {Source::External, "external"}};

bool same_eta(const std::optional<double> &a, const std::optional<double> &b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

} // namespace

std::string_view to_string(SystemTag v) { return name_of(kSystems, v); }
std::string_view to_string(Tier v) { return name_of(kTiers, v); }
std::string_view to_string(Level v) { return name_of(kLevels, v); }
std::string_view to_string(Source v) { return name_of(kSources, v); }
SystemTag system_tag_from_string(std::string_view s) {
  return lookup(kSystems, s, "system tag");
}
Tier tier_from_string(std::string_view s) { return lookup(kTiers, s, "tier"); }
Level level_from_string(std::string_view s) {
  return lookup(kLevels, s, "level");
}
Source source_from_string(std::string_view s) {
  return lookup(kSources, s, "source");
}

bool LedgerRow::same_key(const LedgerRow &o) const {
  return system == o.system && tier == o.tier && level == o.level &&
         method == o.method && same_eta(eta, o.eta) && basis == o.basis;
}

void EnergyLedger::add(LedgerRow row) {
  if (!std::isfinite(row.energy))
    throw ArgumentError(
        fmt::format("ledger energy for {} is not finite", row.calc_id));
  for (const auto &r : m_rows)
    if (r.same_key(row))
      throw ArgumentError(fmt::format(
          "duplicate ledger entry for {} {} {} {}/{} (rows '{}' and '{}')",
          to_string(row.system), to_string(row.tier), to_string(row.level),
          row.method, row.basis, r.calc_id, row.calc_id));
  m_rows.push_back(std::move(row));
}

void EnergyLedger::upsert(LedgerRow row) {
  for (auto &r : m_rows)
    if (r.same_key(row)) {
      if (!std::isfinite(row.energy))
        throw ArgumentError(
            fmt::format("ledger energy for {} is not finite", row.calc_id));
      r = std::move(row);
      return;
    }
  add(std::move(row));
}

std::vector<const LedgerRow *>
EnergyLedger::find(SystemTag system, Tier tier, Level level,
                   std::string_view method, std::string_view basis) const {
  std::vector<const LedgerRow *> out;
  for (const auto &r : m_rows)
    if (r.system == system && r.tier == tier && r.level == level &&
        (method.empty() || r.method == method) &&
        (basis.empty() || r.basis == basis))
      out.push_back(&r);
  return out;
}

const LedgerRow &EnergyLedger::require(SystemTag system, Tier tier,
                                       Level level, std::string_view method,
                                       std::string_view basis) const {
  const auto rows = find(system, tier, level, method, basis);
  const auto what = fmt::format(
      "{}-cluster {}-level energy for {}", to_string(tier),
      level == Level::LL ? "low" : "high", to_string(system));
  if (rows.empty())
    throw ArgumentError(
        fmt::format("missing {}{}", what,
                    method.empty() ? std::string()
                                   : fmt::format(" ({}/{})", method, basis)));
  if (rows.size() > 1)
    throw ArgumentError(fmt::format(
        "{} rows match the {}; select a method and basis", rows.size(), what));
  return *rows.front();
}

std::string EnergyLedger::to_tsv() const {
  std::string out(kHeader);
  out += '\n';
  for (const auto &r : m_rows)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.calc_id,
                       to_string(r.system), to_string(r.tier),
                       to_string(r.level), r.method,
                       r.eta ? fmt::format("{}", *r.eta) : "-", r.basis,
                       r.energy, to_string(r.source),
                       r.hash.empty() ? "-" : r.hash);
  return out;
}

EnergyLedger EnergyLedger::parse(std::string_view text) {
  EnergyLedger ledger;
  bool header = false;
  int line_no = 0;
  for (auto line : text::split_lines(text)) {
    ++line_no;
    if (text::trim(line).empty() || line.front() == '#')
      continue;
    if (!header) {
      if (text::trim(line) != kHeader)
        throw ParseError(fmt::format("ledger header mismatch on line {}: '{}'",
                                     line_no, line));
      header = true;
      continue;
    }
    const auto f = text::split(line, '\t');
    if (f.size() != 10)
      throw ParseError(fmt::format("ledger line {} has {} fields, expected 10",
                                   line_no, f.size()));
    LedgerRow r;
    r.calc_id = std::string(f[0]);
    r.system = system_tag_from_string(f[1]);
    r.tier = tier_from_string(f[2]);
    r.level = level_from_string(f[3]);
    r.method = std::string(f[4]);
    if (f[5] != "-") {
      r.eta = text::to_double(f[5]);
      if (!r.eta)
        throw ParseError(
            fmt::format("bad eta '{}' on ledger line {}", f[5], line_no));
    }
    r.basis = std::string(f[6]);
    const auto e = text::to_double(f[7]);
    if (!e)
      throw ParseError(
          fmt::format("bad energy '{}' on ledger line {}", f[7], line_no));
    r.energy = *e;
    r.source = source_from_string(f[8]);
    if (f[9] != "-")
      r.hash = std::string(f[9]);
    ledger.add(std::move(r));
  }
  return ledger;
}

void EnergyLedger::write(const std::string &path) const {
  text::write_file(path, to_tsv());
}

EnergyLedger EnergyLedger::read(const std::string &path) {
  return parse(text::read_file(path));
}

void EnergyLedger::merge(const EnergyLedger &other) {
  for (const auto &r : other.rows())
    add(r);
}

double oniom_compose(const EnergyLedger &ledger, SystemTag system,
                     const OniomSelection &sel) {
  const auto &hl = ledger.require(system, Tier::Small, Level::HL, sel.hl_method,
                                  sel.hl_basis);
  const auto ll_large = ledger.find(system, Tier::Large, Level::LL,
                                    sel.ll_method, sel.ll_basis);
  const auto ll_small = ledger.find(system, Tier::Small, Level::LL,
                                    sel.ll_method, sel.ll_basis);
  // An isolated CO2 is the same molecule in every tier: its bracket vanishes.
  if (system == SystemTag::CO2 && ll_large.empty() && ll_small.empty())
    return hl.energy;
  const auto &large = ledger.require(system, Tier::Large, Level::LL,
                                     sel.ll_method, sel.ll_basis);
  const auto &small = ledger.require(system, Tier::Small, Level::LL,
                                     sel.ll_method, sel.ll_basis);
  return oniom_compose(hl.energy, large.energy, small.energy);
}

} // namespace mofbind::workflow
