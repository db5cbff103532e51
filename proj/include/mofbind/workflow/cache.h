#pragma once
#include <optional>
#include <string>
#include <string_view>

namespace mofbind::qm {
struct Molecule;
}

namespace mofbind::workflow {

/// Everything that determines a single-point energy.
struct CalculationInputs {
  std::string geometry; // canonical text, see canonical_geometry
  std::string basis;
  std::string method;
  std::optional<double> eta;
  int charge{0};
  int n_unpaired{0};

  /// Canonical byte string fed to the hash.
  std::string serialize() const;
  /// Lower-case hex SHA-256 of serialize().
  std::string hash() const;
};

/// One line per atom: symbol and bohr coordinates printed with 17
/// significant digits.
std::string canonical_geometry(const qm::Molecule &mol);

std::string sha256_hex(std::string_view bytes);

/// Directory of energies keyed by input hash: `<dir>/<hash>` holds the hash
/// and the energy (hartree, 17 significant digits) on two lines.
class EnergyCache {
public:
  EnergyCache() = default;
  explicit EnergyCache(std::string directory);

  bool enabled() const { return !m_dir.empty(); }
  const std::string &directory() const { return m_dir; }

  /// nullopt when absent. A file whose content does not match its name is a
  /// miss, or an error when `strict`.
  std::optional<double> load(const std::string &hash, bool strict) const;
  void store(const std::string &hash, double energy) const;

private:
  std::string m_dir;
};

} // namespace mofbind::workflow
