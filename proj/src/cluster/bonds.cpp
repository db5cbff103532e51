#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mofbind/cluster/bonds.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>

namespace mofbind::cluster {

bool BondGraph::bonded(std::size_t i, std::size_t j) const {
  const auto &n = neighbors.at(i);
  return std::binary_search(n.begin(), n.end(), j);
}

std::vector<int> BondGraph::distances_from(std::size_t source) const {
  std::vector<int> dist(size(), -1);
  std::deque<std::size_t> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : neighbors[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

BondGraph detect_bonds(std::span<const std::string> elements,
                       std::span<const Vec3> positions, double scale) {
  const std::size_t n = elements.size();
  std::vector<double> radii(n);
  double max_radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    radii[i] = element(elements[i]).covalent_radius;
    max_radius = std::max(max_radius, radii[i]);
  }
  BondGraph graph;
  graph.neighbors.resize(n);
  if (n == 0)
    return graph;

  // uniform grid with cell edge >= the largest possible bond length
  const double cell = std::max(2.0 * scale * max_radius, 1e-3);
  using Key = std::array<long, 3>;
  std::map<Key, std::vector<std::size_t>> grid;
  auto key_of = [&](const Vec3 &p) {
    return Key{static_cast<long>(std::floor(p(0) / cell)),
               static_cast<long>(std::floor(p(1) / cell)),
               static_cast<long>(std::floor(p(2) / cell))};
  };
  for (std::size_t i = 0; i < n; ++i)
    grid[key_of(positions[i])].push_back(i);

  for (std::size_t i = 0; i < n; ++i) {
    const Key k = key_of(positions[i]);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy)
        for (long dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == grid.end())
            continue;
          for (auto j : it->second) {
            if (j <= i)
              continue;
            const double d = (positions[i] - positions[j]).norm();
            if (d <= scale * (radii[i] + radii[j]))
              graph.edges.push_back({i, j, d});
          }
        }
  }
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const Bond &a, const Bond &b) {
              return std::tie(a.i, a.j) < std::tie(b.i, b.j);
            });
  for (const auto &e : graph.edges) {
    graph.neighbors[e.i].push_back(e.j);
    graph.neighbors[e.j].push_back(e.i);
  }
  for (auto &nb : graph.neighbors)
    std::sort(nb.begin(), nb.end());
  return graph;
}

BondGraph detect_bonds(const crystal::AtomCollection &atoms, double scale) {
  std::vector<std::string> elements;
  std::vector<Vec3> positions;
  elements.reserve(atoms.size());
  positions.reserve(atoms.size());
  for (const auto &a : atoms.atoms) {
    elements.push_back(a.element);
    positions.push_back(a.position);
  }
  return detect_bonds(elements, positions, scale);
}

} // namespace mofbind::cluster
