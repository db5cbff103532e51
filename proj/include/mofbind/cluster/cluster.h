#pragma once
#include <map>
#include <mofbind/crystal/crystal.h>
#include <optional>
#include <string>
#include <vector>

namespace mofbind::cluster {

enum class Role : unsigned {
  Metal = 1u << 0,
  Cap = 1u << 1,
  Mobile = 1u << 2,
  Close = 1u << 3,
  CO2 = 1u << 4,
};

class RoleSet {
public:
  RoleSet() = default;
  RoleSet(std::initializer_list<Role> roles) {
    for (auto r : roles)
      add(r);
  }
  bool has(Role r) const { return (m_bits & static_cast<unsigned>(r)) != 0; }
  void add(Role r) { m_bits |= static_cast<unsigned>(r); }
  void remove(Role r) { m_bits &= ~static_cast<unsigned>(r); }
  bool empty() const { return m_bits == 0; }

  /// Comma-separated names ("metal,mobile"), "-" when empty.
  std::string str() const;
  static RoleSet parse(std::string_view text);
  bool operator==(const RoleSet &) const = default;

private:
  unsigned m_bits{0};
};

enum class GroupKind { Metal, Formate, Hydroxylate, Chloride, Linker, Molecule };

std::string_view to_string(GroupKind kind);
GroupKind group_kind_from_string(std::string_view s);

/// Formal-charge bookkeeping unit; every cluster atom belongs to one.
struct ChargeGroup {
  GroupKind kind{GroupKind::Molecule};
  int charge{0};
  bool operator==(const ChargeGroup &) const = default;
};

struct ClusterAtom {
  std::string element;
  Vec3 position{Vec3::Zero()}; // Angstrom
  RoleSet roles;
  /// Supercell origin. Caps carry the tag of the atom they replace.
  crystal::OriginTag provenance;
  int group{-1};
  /// For caps: the atom the cap is bonded to.
  std::optional<crystal::OriginTag> cap_anchor;

  bool operator==(const ClusterAtom &) const = default;
};

struct Cluster {
  std::vector<ClusterAtom> atoms;
  std::vector<ChargeGroup> groups;
  int net_charge{0};
  int n_unpaired{0};

  std::size_t size() const { return atoms.size(); }
  int nuclear_charge() const;
  int electron_count() const { return nuclear_charge() - net_charge; }
  std::vector<std::size_t> indices_with(Role role) const;
  std::optional<std::size_t> find(const crystal::OriginTag &tag,
                                  bool include_caps = false) const;

  crystal::AtomCollection to_atom_collection() const;

  /// Append atoms as a new neutral group (e.g. an adsorbed CO2 tagged co2).
  void add_molecule(const crystal::AtomCollection &molecule, RoleSet roles);

  /// Canonical order: non-caps by provenance, then caps grouped by anchor.
  void canonicalize();

  /// Throws ArgumentError when electrons - n_unpaired is odd or negative.
  void validate_spin() const;

  bool operator==(const Cluster &) const = default;
};

/// Sidecar table: one row per atom (index, element, provenance, roles,
/// group id, cap anchor) plus "# group" and header lines.
std::string write_sidecar(const Cluster &cluster);
/// Rebuild a cluster from its XYZ geometry and sidecar table.
Cluster read_cluster(std::string_view xyz_text, std::string_view sidecar_text);

void write_cluster_files(const std::string &prefix, const Cluster &cluster);
Cluster read_cluster_files(const std::string &prefix);

} // namespace mofbind::cluster
