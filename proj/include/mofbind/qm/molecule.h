#pragma once
#include <mofbind/core/linear_algebra.h>
#include <string>
#include <string_view>
#include <vector>

namespace mofbind::cluster {
struct Cluster;
}

namespace mofbind::qm {

/// Nuclei in atomic units; the Angstrom -> bohr conversion happens in the
/// factory functions.
struct Molecule {
  std::vector<std::string> elements;
  std::vector<int> charges;
  std::vector<Vec3> positions; // bohr

  std::size_t size() const { return elements.size(); }
  int nuclear_charge() const;
  double nuclear_repulsion() const;

  void add_atom(std::string_view element, const Vec3 &position_angstrom);

  static Molecule from_cluster(const cluster::Cluster &cluster);
  /// "H 0 0 0; H 0 0 0.74" (Angstrom), entries separated by ';' or newline.
  static Molecule parse(std::string_view text);
};

} // namespace mofbind::qm
