#pragma once
#include <mofbind/crystal/crystal.h>
#include <span>
#include <vector>

namespace mofbind::cluster {

struct Bond {
  std::size_t i{0};
  std::size_t j{0}; // i < j
  double length{0.0};
};

/// Undirected covalent bond graph; neighbour lists are sorted.
struct BondGraph {
  std::vector<Bond> edges;
  std::vector<std::vector<std::size_t>> neighbors;

  std::size_t size() const { return neighbors.size(); }
  bool bonded(std::size_t i, std::size_t j) const;
  /// Breadth-first graph distances from `source` (-1 when unreachable).
  std::vector<int> distances_from(std::size_t source) const;
};

/// Edge iff distance <= scale * (r_cov(A) + r_cov(B)).
BondGraph detect_bonds(const crystal::AtomCollection &atoms,
                       double scale = 1.2);
BondGraph detect_bonds(std::span<const std::string> elements,
                       std::span<const Vec3> positions, double scale = 1.2);

} // namespace mofbind::cluster
