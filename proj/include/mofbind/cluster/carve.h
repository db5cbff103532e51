#pragma once
#include <map>
#include <mofbind/cluster/bonds.h>
#include <mofbind/cluster/cluster.h>
#include <optional>
#include <set>

namespace mofbind::cluster {

struct ChlorideSite {
  crystal::OriginTag metal;
  /// Explicit Cl position (Angstrom); otherwise placed opposite the mean
  /// direction of the metal's bonded neighbours.
  std::optional<Vec3> position;
};

struct CarveConfig {
  double radius{12.5};
  int n_small_metals{3};
  int n_medium_metals{5};
  double bond_scale{1.2};
  std::vector<ChlorideSite> chloride_completion;
  bool linker_heavy_atom_rule{true};

  double ch_cap_length{1.09};
  double oh_cap_length{0.96};
  double metal_chloride_length{2.25};
  int metal_charge{2};
  /// Medium cluster: rings whose centroid lies within this distance of the
  /// adsorption site are kept. Defaults to the farthest selected metal.
  std::optional<double> ring_inclusion_radius;
  /// Unpaired electrons per metal element; elements absent count as zero.
  std::map<std::string, int> unpaired_per_metal;
  std::optional<int> net_charge_override;

  void validate() const;
};

/// Carboxylate / alkoxide groups in the organic part of a structure.
struct LigandGroup {
  enum class Kind { Carboxylate, Alkoxide } kind{Kind::Carboxylate};
  std::vector<std::size_t> atoms; // carboxylate: C, O, O (+H); alkoxide: O (+H)
  std::size_t anchor{0};          // carboxylate C or alkoxide O
  std::optional<std::size_t> severed; // linker atom beyond the cut
  std::vector<std::size_t> metals;    // metals bonded to the group's oxygens
  int component{-1};
};

/// Organic connected components after deleting metal nodes, and the
/// coordinating groups found in them.
struct LinkerAnalysis {
  std::vector<int> component_of; // -1 for metals
  std::vector<std::vector<std::size_t>> components;
  std::vector<LigandGroup> groups;
  std::vector<std::vector<std::size_t>> groups_of_component;
};

LinkerAnalysis analyze_linkers(const crystal::AtomCollection &atoms,
                               const BondGraph &graph);

/// Sphere of `cfg.radius` around a metal with the whole-linker /
/// formate-hydroxylate boundary rule.
Cluster carve_large(const crystal::AtomCollection &supercell,
                    const crystal::OriginTag &center_metal,
                    const CarveConfig &cfg);
Cluster carve_large(const crystal::AtomCollection &supercell,
                    const BondGraph &graph,
                    const crystal::OriginTag &center_metal,
                    const CarveConfig &cfg);

/// The n_small_metals metals nearest the adsorption site with their
/// coordinating groups reduced to formate / hydroxylate.
Cluster carve_small(const crystal::AtomCollection &supercell,
                    const Vec3 &co2_site, const CarveConfig &cfg);
Cluster carve_small(const crystal::AtomCollection &supercell,
                    const BondGraph &graph, const Vec3 &co2_site,
                    const CarveConfig &cfg);

/// Geometry-relaxation cluster around the n_medium_metals nearest metals.
Cluster carve_medium(const crystal::AtomCollection &supercell,
                     const Vec3 &co2_site, const CarveConfig &cfg);
Cluster carve_medium(const crystal::AtomCollection &supercell,
                     const BondGraph &graph, const Vec3 &co2_site,
                     const CarveConfig &cfg);

/// Binding metal, every atom within two bonds of it, and any co2 atoms.
std::set<std::size_t> select_close_atoms(const Cluster &cluster,
                                         std::size_t binding_metal,
                                         double bond_scale = 1.2);

enum class PropagationMode {
  Strict,        ///< every mobile atom must exist in the target
  SkipUnmatched, ///< mobile atoms absent from the target are ignored
};

/// Copy relaxed positions of the mobile, non-cap atoms onto the atoms of
/// `target` with the same provenance.
Cluster propagate_coordinates(const Cluster &relaxed_medium,
                              const Cluster &target,
                              PropagationMode mode = PropagationMode::Strict);

} // namespace mofbind::cluster
