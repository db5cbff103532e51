#include <filesystem>
#include <fmt/core.h>
#include <memory>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/qm/molecule.h>
#include <mofbind/workflow/cache.h>
#include <openssl/evp.h>

namespace mofbind::workflow {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw NumericalError("SHA-256 digest failed");
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i)
    out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string canonical_geometry(const qm::Molecule &mol) {
  std::string out;
  for (std::size_t i = 0; i < mol.size(); ++i) {
    const auto &p = mol.positions[i];
    out += fmt::format("{} {:.17g} {:.17g} {:.17g}\n", mol.elements[i], p.x(),
                       p.y(), p.z());
  }
  return out;
}

std::string CalculationInputs::serialize() const {
  return fmt::format("basis={}\nmethod={}\neta={}\ncharge={}\nunpaired={}\n"
                     "geometry:\n{}",
                     basis, method, eta ? fmt::format("{:.17g}", *eta) : "-",
                     charge, n_unpaired, geometry);
}

std::string CalculationInputs::hash() const { return sha256_hex(serialize()); }

EnergyCache::EnergyCache(std::string directory)
    : m_dir(std::move(directory)) {}

std::optional<double> EnergyCache::load(const std::string &hash,
                                        bool strict) const {
  if (!enabled())
    return std::nullopt;
  const auto path = fs::path(m_dir) / hash;
  if (!fs::exists(path))
    return std::nullopt;
  const auto content = text::read_file(path.string());
  const auto lines = text::split_lines(content);
  std::optional<double> energy;
  if (lines.size() >= 2 && text::trim(lines[0]) == hash)
    energy = text::to_double(text::trim(lines[1]));
  if (!energy && strict)
    throw ArgumentError(fmt::format(
        "cache hash mismatch: {} does not hold an energy for {}",
        path.string(), hash));
  return energy;
}

void EnergyCache::store(const std::string &hash, double energy) const {
  if (!enabled())
    return;
  fs::create_directories(m_dir);
  const auto path = fs::path(m_dir) / hash;
  const auto tmp = fs::path(m_dir) / (hash + ".tmp");
  text::write_file(tmp.string(), fmt::format("{}\n{:.17g}\n", hash, energy));
  fs::rename(tmp, path);
}

} // namespace mofbind::workflow
