#pragma once
#include <fmt/core.h>
#include <map>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <string>

namespace mofbind::testing {

inline std::string fixture_path(const std::string &name) {
  return std::string(MOFBIND_FIXTURE_DIR) + "/" + name;
}

/// Reference values from tests/fixtures/oracle_energies.txt.
inline double oracle(const std::string &key) {
  static const auto table = [] {
    std::map<std::string, double> t;
    const auto content = text::read_file(fixture_path("oracle_energies.txt"));
    for (auto line : text::split_lines(content)) {
      line = text::trim(line);
      if (line.empty() || line.front() == '#')
        continue;
      const auto f = text::split_whitespace(line);
      t[std::string(f.at(0))] = text::to_double(f.at(1)).value();
    }
    return t;
  }();
  auto it = table.find(key);
  if (it == table.end())
    throw ArgumentError("no oracle value " + key);
  return it->second;
}

inline constexpr const char *kH2 = "H 0 0 0; H 0 0 0.7414";
inline constexpr const char *kH2O = "O 0 0 0.1173; H 0 0.7572 -0.4692; "
                                    "H 0 -0.7572 -0.4692";
inline constexpr const char *kNH2 = "N 0 0 0.14; H 0 0.80 -0.49; H 0 -0.80 -0.49";

} // namespace mofbind::testing
