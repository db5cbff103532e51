#pragma once
// Synthetic metal-organic framework used across tests: a 2D net of metal
// chains along a, each metal holding a hydroxybenzoate-like linker whose
// carboxylate chelates the metal and whose phenoxide binds the metal one
// cell further along b.

#include <mofbind/crystal/crystal.h>
#include <string>

namespace mofbind::testing {

inline constexpr double kToyA = 6.0;
inline constexpr double kToyB = 10.36;
inline constexpr double kToyC = 14.0;

inline crystal::CrystalStructure toy_framework(const std::string &metal = "Mg") {
  struct Local {
    const char *label;
    const char *element;
    double x, y;
  };
  // In-plane coordinates relative to the metal (Angstrom).
  static const Local local[] = {
      {"M1", nullptr, 0.0, 0.0},      {"O1", "O", -1.1, 2.0},
      {"O2", "O", 1.1, 2.0},          {"C1", "C", 0.0, 2.75},
      {"C2", "C", 0.0, 4.25},         {"C3", "C", 1.21244, 4.95},
      {"C4", "C", 1.21244, 6.35},     {"C5", "C", 0.0, 7.05},
      {"C6", "C", -1.21244, 6.35},    {"C7", "C", -1.21244, 4.95},
      {"O3", "O", 0.0, 8.41},         {"H1", "H", 2.15641, 4.405},
      {"H2", "H", 2.15641, 6.895},    {"H3", "H", -2.15641, 6.895},
      {"H4", "H", -2.15641, 4.405},
  };
  crystal::CrystalStructure s{crystal::Lattice(kToyA, kToyB, kToyC, 90, 90, 90),
                              {},
                              {crystal::SymmetryOperation{}}};
  for (const auto &a : local)
    s.sites.push_back({a.element ? a.element : metal,
                       Vec3((a.x + 3.0) / kToyA, a.y / kToyB, 0.5), a.label});
  return s;
}

/// Tag of the metal in cell image (i, j, k).
inline crystal::OriginTag toy_metal(int i, int j, int k) {
  return {"M1", {i, j, k}};
}

} // namespace mofbind::testing
