#pragma once
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mofbind::workflow {

enum class SystemTag { MOF, CO2, Complex };
enum class Tier { Large, Medium, Small };
enum class Level { LL, HL };
enum class Source { Internal, External };

std::string_view to_string(SystemTag v); // "MOF" | "CO2" | "MOF+CO2"
std::string_view to_string(Tier v);      // "large" | "medium" | "small"
std::string_view to_string(Level v);     // "LL" | "HL"
std::string_view to_string(Source v);    // "internal" | "external"
SystemTag system_tag_from_string(std::string_view s);
Tier tier_from_string(std::string_view s);
Level level_from_string(std::string_view s);
Source source_from_string(std::string_view s);

/// One named energy entering the binding-energy composition.
struct LedgerRow {
  std::string calc_id;
  SystemTag system{SystemTag::MOF};
  Tier tier{Tier::Small};
  Level level{Level::HL};
  std::string method;
  std::optional<double> eta;
  std::string basis;
  double energy{0.0}; // hartree
  Source source{Source::External};
  std::string hash; // content hash of the inputs; empty for external rows

  bool same_key(const LedgerRow &other) const;
};

/// Persistent table of energies. Rows are unique in (system, tier, level,
/// method, eta, basis).
class EnergyLedger {
public:
  const std::vector<LedgerRow> &rows() const { return m_rows; }
  bool empty() const { return m_rows.empty(); }

  /// Throws on a duplicate key or a non-finite energy.
  void add(LedgerRow row);
  /// Insert or replace the row with the same key.
  void upsert(LedgerRow row);

  /// Rows for (system, tier, level), optionally restricted to a method
  /// and basis.
  std::vector<const LedgerRow *> find(SystemTag system, Tier tier, Level level,
                                      std::string_view method = {},
                                      std::string_view basis = {}) const;
  /// Exactly one matching row; throws naming the missing triple, e.g.
  /// "missing small-cluster low-level energy for MOF".
  const LedgerRow &require(SystemTag system, Tier tier, Level level,
                           std::string_view method = {},
                           std::string_view basis = {}) const;

  std::string to_tsv() const;
  static EnergyLedger parse(std::string_view text);
  void write(const std::string &path) const;
  static EnergyLedger read(const std::string &path);
  /// Append every row of `other` (duplicates are an error).
  void merge(const EnergyLedger &other);

private:
  std::vector<LedgerRow> m_rows;
};

/// Subtractive (ONIOM-style) large-cluster HL energy from the three ledger
/// rows of one system.
struct OniomSelection {
  std::string hl_method, hl_basis;
  std::string ll_method, ll_basis;
};
double oniom_compose(const EnergyLedger &ledger, SystemTag system,
                     const OniomSelection &selection = {});

} // namespace mofbind::workflow
